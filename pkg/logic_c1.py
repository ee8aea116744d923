#!/usr/bin/env python3
"""
Decision procedure and proof checker for da Costa's paraconsistent calculus C1

Surface syntax (ASCII):
    ~A     weak (primitive) negation
    ~*A    strong negation, expanded to  ~A & ~(A & ~A)
    @A     consistency ("ball"), expanded to  ~(A & ~A)
    &, |, ->   with precedence  prefix > & > | > ->, all left-associative

Validity is decided with the quasi-matrix method over C1 bivaluations:
atoms take both values, a weak negation whose argument is true branches,
everything else is computed, and branches breaking an admissibility clause
are pruned.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import config
from errors import FormulaSyntaxError, ProofScriptError, ResourceLimitError

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Syntax
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not self.name or not (self.name[0].isalpha() or self.name[0] == "_") \
                or not all(ch.isalnum() or ch == "_" for ch in self.name):
            raise FormulaSyntaxError(f"Invalid atom name {self.name!r}")

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class WeakNeg:
    inner: "Formula"

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Conj:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Disj:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Impl:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return format_formula(self)


Formula = Union[Atom, WeakNeg, Conj, Disj, Impl]
BINARY = (Conj, Disj, Impl)
_SYMBOL = {Conj: "&", Disj: "|", Impl: "->"}


def ball(a):
    """Consistency operator: A° := ~(A & ~A)"""
    return WeakNeg(Conj(a, WeakNeg(a)))


def strong_neg(a):
    """Strong negation: ~*A := ~A & A°"""
    return Conj(WeakNeg(a), ball(a))


def format_formula(f):
    def fmt(node, top):
        if isinstance(node, Atom):
            return node.name
        if isinstance(node, WeakNeg):
            return "~" + fmt(node.inner, False)
        text = f"{fmt(node.left, False)} {_SYMBOL[type(node)]} {fmt(node.right, False)}"
        return text if top else f"({text})"

    return fmt(f, True)


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isalpha() or ch == "_":
            j = i + 1
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("atom", text[i:j], i))
            i = j
        elif text.startswith("~*", i):
            tokens.append(("~*", "~*", i))
            i += 2
        elif text.startswith("->", i):
            tokens.append(("->", "->", i))
            i += 2
        elif ch in "~@&|()":
            tokens.append((ch, ch, i))
            i += 1
        else:
            raise FormulaSyntaxError(f"Unexpected character {ch!r}", i)
    return tokens


class _Parser:
    # (token, constructor) from loosest to tightest
    LEVELS = (("->", Impl), ("|", Disj), ("&", Conj))

    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def expect(self, kind):
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError(f"Expected {kind!r} but input ended", len(self.text))
        if tok[0] != kind:
            raise FormulaSyntaxError(f"Expected {kind!r}, found {tok[1]!r}", tok[2])
        self.pos += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise FormulaSyntaxError("Empty formula")
        node = self.binary(0)
        tok = self.peek()
        if tok is not None:
            raise FormulaSyntaxError(f"Unexpected {tok[1]!r}", tok[2])
        return node

    def binary(self, level):
        if level == len(self.LEVELS):
            return self.unary()
        kind, ctor = self.LEVELS[level]
        node = self.binary(level + 1)
        while self.peek() is not None and self.peek()[0] == kind:
            self.pos += 1
            node = ctor(node, self.binary(level + 1))
        return node

    def unary(self):
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError("Unexpected end of formula", len(self.text))
        kind = tok[0]
        if kind in ("~", "~*", "@"):
            self.pos += 1
            inner = self.unary()
            if kind == "~":
                return WeakNeg(inner)
            return strong_neg(inner) if kind == "~*" else ball(inner)
        if kind == "(":
            self.pos += 1
            node = self.binary(0)
            self.expect(")")
            return node
        if kind == "atom":
            self.pos += 1
            return Atom(tok[1])
        raise FormulaSyntaxError(f"Unexpected {tok[1]!r}", tok[2])


def parse_formula(text):
    """Parse formula text into an expanded tree (no ~* or @ nodes survive)"""
    if text is None or not text.strip():
        raise FormulaSyntaxError("Empty formula")
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Subformula closure and valuations
# ---------------------------------------------------------------------------

def _children(f):
    if isinstance(f, Atom):
        return ()
    if isinstance(f, WeakNeg):
        return (f.inner,)
    return (f.left, f.right)


def formula_size(f, _cache=None):
    cache = {} if _cache is None else _cache
    stack = [f]
    while stack:
        node = stack[-1]
        if node in cache:
            stack.pop()
            continue
        pending = [c for c in _children(node) if c not in cache]
        if pending:
            stack.extend(pending)
        else:
            stack.pop()
            cache[node] = 1 + sum(cache[c] for c in _children(node))
    return cache[f]


def subformula_closure(formulas):
    """All subformulas, ordered by (node count, printed text)"""
    seen = set()
    stack = list(formulas)
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        stack.extend(_children(node))
    sizes = {}
    return tuple(sorted(seen, key=lambda g: (formula_size(g, sizes), format_formula(g))))


def atoms_of(formulas):
    return tuple(f for f in subformula_closure(formulas) if isinstance(f, Atom))


@dataclass(frozen=True)
class Valuation:
    """Admissible C1 bivaluation restricted to a subformula closure"""
    subformulas: Tuple[Formula, ...]
    bits: Tuple[int, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {f: i for i, f in enumerate(self.subformulas)})

    def value(self, f):
        return self.bits[self._index[f]]

    def __getitem__(self, f):
        if isinstance(f, str):
            f = parse_formula(f)
        return self.value(f)

    def __contains__(self, f):
        return f in self._index

    def satisfies(self, f):
        return self.value(f) == 1

    def as_dict(self):
        return {format_formula(f): b for f, b in zip(self.subformulas, self.bits)}


def render_valuation(v):
    """`atom=0/1` lines followed by the weak-negation subformulas"""
    lines = [f"{f.name}={b}" for f, b in zip(v.subformulas, v.bits) if isinstance(f, Atom)]
    lines += [f"{format_formula(f)}={b}" for f, b in zip(v.subformulas, v.bits)
              if isinstance(f, WeakNeg)]
    return lines


class _QuasiMatrix:
    """
    Search plan over the closure S of the input plus ~X for every X in S.

    The extra negations pin down whether each operand is well behaved
    (not both X and ~X true), which keeps the consistency clauses local.
    Results are projected back onto S.
    """

    def __init__(self, formulas, max_closure):
        self.main = subformula_closure(formulas)
        if len(self.main) > max_closure:
            raise ResourceLimitError(
                f"Subformula closure has {len(self.main)} nodes, cap is {max_closure}")
        main_set = set(self.main)
        sizes = {}
        extras = {WeakNeg(f) for f in self.main if WeakNeg(f) not in main_set}
        self.order = self.main + tuple(
            sorted(extras, key=lambda g: (formula_size(g, sizes), format_formula(g))))
        self.index = {f: i for i, f in enumerate(self.order)}
        self.n_main = len(self.main)
        self.plan = [self._compile(f) for f in self.order]
        self.checks = [[] for _ in self.order]
        self._add_clauses()
        logger.debug("quasi-matrix over %d subformulas (%d with negation extras)",
                     self.n_main, len(self.order))

    def _compile(self, f):
        if isinstance(f, Atom):
            return ("atom",)
        if isinstance(f, WeakNeg):
            return ("neg", self.index[f.inner])
        kind = {Conj: "and", Disj: "or", Impl: "imp"}[type(f)]
        return (kind, self.index[f.left], self.index[f.right])

    def _at(self, deps, check):
        self.checks[max(deps)].append(check)

    def _add_clauses(self):
        idx = self.index
        for f, i in idx.items():
            if isinstance(f, WeakNeg) and isinstance(f.inner, WeakNeg):
                # ~~A true forces A true
                a = idx[f.inner.inner]
                self._at((i, a), lambda v, i=i, a=a: not (v[i] == 1 and v[a] == 0))

            if isinstance(f, WeakNeg) and isinstance(f.inner, Conj) \
                    and f.inner.right == WeakNeg(f.inner.left):
                # B° true forces B well behaved
                b, nb = idx[f.inner.left], idx[f.inner.right]
                self._at((i, b, nb),
                         lambda v, i=i, b=b, nb=nb: not (v[i] == 1 and v[b] == 1 and v[nb] == 1))

            if isinstance(f, BINARY) and i < self.n_main:
                # A°, B° true force (A # B)° true
                a, b = idx[f.left], idx[f.right]
                na, nb, nc = idx[WeakNeg(f.left)], idx[WeakNeg(f.right)], idx[WeakNeg(f)]
                self._at((i, a, b, na, nb, nc),
                         lambda v, a=a, b=b, c=i, na=na, nb=nb, nc=nc:
                         not (_wb(v, a, na) and _wb(v, b, nb)) or _wb(v, c, nc))

    def _choices(self, pos, v):
        step = self.plan[pos]
        kind = step[0]
        if kind == "atom":
            return (0, 1)
        if kind == "neg":
            return (1,) if v[step[1]] == 0 else (0, 1)
        left, right = v[step[1]], v[step[2]]
        if kind == "and":
            return (left & right,)
        if kind == "or":
            return (left | right,)
        return (int(left == 0 or right == 1),)

    def _ok(self, pos, v):
        return all(check(v) for check in self.checks[pos])

    def _extends(self, pos, v):
        if pos == len(self.order):
            return True
        for bit in self._choices(pos, v):
            v[pos] = bit
            if self._ok(pos, v) and self._extends(pos + 1, v):
                return True
        return False

    def _search(self, pos, v):
        if pos == self.n_main:
            if self._extends(pos, v):
                yield tuple(v[:self.n_main])
            return
        for bit in self._choices(pos, v):
            v[pos] = bit
            if self._ok(pos, v):
                yield from self._search(pos + 1, v)

    def valuations(self):
        values = [0] * len(self.order)
        for bits in self._search(0, values):
            yield Valuation(self.main, bits)


def _wb(v, x, nx):
    return not (v[x] == 1 and v[nx] == 1)


def _cap(max_closure):
    return config.load_settings().max_closure if max_closure is None else max_closure


def enumerate_valuations(formulas, max_closure=None):
    """Yield every admissible valuation over the closure, in lexicographic order"""
    yield from _QuasiMatrix(tuple(formulas), _cap(max_closure)).valuations()


@dataclass(frozen=True)
class Verdict:
    valid: bool
    countermodel: Optional[Valuation] = None


@dataclass(frozen=True)
class TrivialityVerdict:
    trivial: bool
    witness: Optional[Valuation] = None


def entails(gamma, f, max_closure=None):
    """C1 consequence: every admissible valuation satisfying gamma satisfies f"""
    gamma = tuple(gamma)
    for v in enumerate_valuations(gamma + (f,), max_closure):
        if all(v.satisfies(g) for g in gamma) and not v.satisfies(f):
            return Verdict(False, v)
    return Verdict(True)


def is_valid(f, max_closure=None):
    return entails((), f, max_closure)


def trivializes(gamma, max_closure=None):
    """
    A set is trivial when a fresh atom follows from it, i.e. when no
    admissible valuation satisfies every member. A satisfying valuation is
    returned as the witness of non-triviality.
    """
    gamma = tuple(gamma)
    for v in enumerate_valuations(gamma, max_closure):
        if all(v.satisfies(g) for g in gamma):
            return TrivialityVerdict(False, v)
    return TrivialityVerdict(True)


def is_inconsistent(gamma, max_closure=None):
    """True when some A in the closure has both A and ~A as consequences"""
    gamma = tuple(gamma)
    for a in subformula_closure(gamma):
        if entails(gamma, a, max_closure).valid and entails(gamma, WeakNeg(a), max_closure).valid:
            return True
    return False


# ---------------------------------------------------------------------------
# Proof checking
# ---------------------------------------------------------------------------

SCHEMA_TEXT = {
    "K": "A -> (B -> A)",
    "S": "(A -> (B -> C)) -> ((A -> B) -> (A -> C))",
    "AND_I": "A -> (B -> (A & B))",
    "AND_E1": "(A & B) -> A",
    "AND_E2": "(A & B) -> B",
    "OR_I1": "A -> (A | B)",
    "OR_I2": "B -> (A | B)",
    "OR_E": "(A -> C) -> ((B -> C) -> ((A | B) -> C))",
    "EXCLUDED_MIDDLE": "A | ~A",
    "DOUBLE_NEG": "~~A -> A",
    "BALL_REDUCTIO": "@B -> ((A -> B) -> ((A -> ~B) -> ~A))",
    "BALL_PROPAGATION": "(@A & @B) -> ((@(A & B) & @(A | B)) & @(A -> B))",
}
SCHEMAS = {name: parse_formula(text) for name, text in SCHEMA_TEXT.items()}


@dataclass(frozen=True)
class AxiomInstance:
    schema: str


@dataclass(frozen=True)
class ModusPonens:
    """minor is A, major is A -> B; both are 1-based step numbers"""
    minor: int
    major: int


@dataclass(frozen=True)
class Hypothesis:
    pass


@dataclass(frozen=True)
class ProofStep:
    formula: Formula
    justification: Union[AxiomInstance, ModusPonens, Hypothesis]


@dataclass(frozen=True)
class ProofScript:
    steps: Tuple[ProofStep, ...]


@dataclass(frozen=True)
class ProofResult:
    ok: bool
    proved: Optional[Formula] = None
    step: Optional[int] = None
    reason: str = ""
    hypotheses: Tuple[Formula, ...] = ()


def match_schema(template, f, bindings=None):
    """Bindings for the schema's metavariables, or None if f is not an instance"""
    bindings = {} if bindings is None else bindings
    stack = [(template, f)]
    while stack:
        t, g = stack.pop()
        if isinstance(t, Atom):
            bound = bindings.setdefault(t.name, g)
            if bound != g:
                return None
        elif type(t) is not type(g):
            return None
        elif isinstance(t, WeakNeg):
            stack.append((t.inner, g.inner))
        else:
            stack.append((t.left, g.left))
            stack.append((t.right, g.right))
    return bindings


def check_proof(script):
    if not script.steps:
        raise ProofScriptError("Proof script has no steps")

    hypotheses = []
    for n, step in enumerate(script.steps, start=1):
        just = step.justification
        if isinstance(just, Hypothesis):
            hypotheses.append(step.formula)
        elif isinstance(just, AxiomInstance):
            template = SCHEMAS.get(just.schema)
            if template is None:
                return ProofResult(False, step=n, reason=f"unknown axiom schema {just.schema!r}")
            if match_schema(template, step.formula) is None:
                return ProofResult(False, step=n, reason=(
                    f"not an instance of schema {just.schema} ({SCHEMA_TEXT[just.schema]})"))
        elif isinstance(just, ModusPonens):
            for ref in (just.minor, just.major):
                if not 1 <= ref < n:
                    return ProofResult(False, step=n, reason=f"step {ref} is not an earlier step")
            minor = script.steps[just.minor - 1].formula
            major = script.steps[just.major - 1].formula
            if not isinstance(major, Impl):
                return ProofResult(False, step=n, reason=f"step {just.major} is not an implication")
            if major.left != minor:
                return ProofResult(False, step=n, reason=(
                    f"antecedent of step {just.major} does not match step {just.minor}"))
            if major.right != step.formula:
                return ProofResult(False, step=n, reason=(
                    f"consequent of step {just.major} is not {format_formula(step.formula)}"))
        else:
            return ProofResult(False, step=n, reason=f"unknown justification {just!r}")

    return ProofResult(True, proved=script.steps[-1].formula, hypotheses=tuple(hypotheses))


def _parse_justification(text, line_no):
    words = text.split()
    if not words:
        raise ProofScriptError(f"line {line_no}: missing justification")
    head = words[0].lower()
    if head in ("hyp", "hypothesis") and len(words) == 1:
        return Hypothesis()
    if head == "axiom" and len(words) == 2:
        return AxiomInstance(words[1].upper())
    if head == "mp" and len(words) == 3:
        try:
            return ModusPonens(int(words[1]), int(words[2]))
        except ValueError:
            pass
    raise ProofScriptError(f"line {line_no}: cannot read justification {text.strip()!r}")


def parse_proof_script(text):
    """
    One step per line: `<formula> ; axiom <ID> | mp <i> <j> | hyp`.
    Blank lines and `#` comments are skipped.
    """
    steps = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ";" not in line:
            raise ProofScriptError(f"line {line_no}: expected '<formula> ; <justification>'")
        formula_text, just_text = line.rsplit(";", 1)
        try:
            formula = parse_formula(formula_text)
        except FormulaSyntaxError as e:
            raise ProofScriptError(f"line {line_no}: {e}")
        steps.append(ProofStep(formula, _parse_justification(just_text, line_no)))
    return ProofScript(tuple(steps))
