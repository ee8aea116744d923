#!/usr/bin/env python3
"""
Powers, potentia and quantum situations

A PSA (potential state of affairs) is a basis-free state vector. Choosing a
basis turns it into a quantum situation: the ordered list of powers (basis
rays) with their potentia (Born weights). Measuring exposes one power in
actuality without touching the PSA, so the same situation can be actualized
again and again.
"""
import hashlib
import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
import pandas as pd

import config
from errors import ContradictionRejected, DimensionMismatchError, InvariantViolation, UnknownPowerError
from hilbert import (StateVector, canonical_phase, change_of_basis, evolve,
                     inner, potentia, rank1_projector)
from logic_c1 import Atom, Conj, Impl, WeakNeg, trivializes
from rng import GENERATOR_NAME, ShotStream

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PSA:
    psa_id: str
    psi: StateVector

    def __eq__(self, other):
        # identity is the vector alone, whatever id or basis it was loaded with
        if not isinstance(other, PSA):
            return NotImplemented
        return self.psi.close_to(other.psi)

    __hash__ = None


def psa_to_json(psa):
    """Canonical serialization; amplitudes as [re, im] at full float precision"""
    psi = [[float(z.real), float(z.imag)] for z in psa.psi.amplitudes]
    return json.dumps({"id": psa.psa_id, "psi": psi}, sort_keys=True, separators=(",", ":"))


def psa_fingerprint(psa):
    """sha256 over the canonical JSON of the PSA"""
    return hashlib.sha256(psa_to_json(psa).encode("utf-8")).hexdigest()


def evolve_psa(psa, h, t, hbar=1.0):
    """Potential effectuation: Schrodinger evolution of the PSA"""
    return PSA(psa.psa_id, evolve(psa.psi, h, t, hbar))


@dataclass(frozen=True, eq=False)
class Power:
    name: str
    ray: StateVector
    context: str

    def __post_init__(self):
        if not self.name.isidentifier():
            raise InvariantViolation(f"Power name {self.name!r} must be an identifier")
        object.__setattr__(self, "ray", StateVector(canonical_phase(self.ray.amplitudes)))

    def atom(self):
        return Atom(self.name)


def powers_of(basis):
    return tuple(Power(name, vec, basis.label) for name, vec in zip(basis.names, basis.vectors))


@dataclass(frozen=True, eq=False)
class QuantumSituation:
    psa_id: str
    basis_label: str
    pairs: Tuple[Tuple[Power, float], ...]
    coordinates: Tuple[complex, ...] = ()

    def __post_init__(self):
        total = sum(p for _, p in self.pairs)
        if abs(total - 1.0) > config.POTENTIA_SUM_TOL:
            raise InvariantViolation(
                f"Potentia of situation ({self.psa_id}, {self.basis_label}) sum to {config.fmt_real(total)}")
        if any(not 0.0 <= p <= 1.0 for _, p in self.pairs):
            raise InvariantViolation("Potentia must lie in [0, 1]")

    @property
    def names(self):
        return tuple(power.name for power, _ in self.pairs)

    @property
    def potentias(self):
        return np.array([p for _, p in self.pairs])

    def power(self, name):
        for power, _ in self.pairs:
            if power.name == name:
                return power
        raise UnknownPowerError(f"Power {name!r} is not in situation ({self.psa_id}, {self.basis_label})")

    def potentia_of(self, name):
        for power, p in self.pairs:
            if power.name == name:
                return p
        return self.power(name)  # raises UnknownPowerError

    def same_pairs(self, other, tol=config.NORM_TOL):
        return (self.basis_label == other.basis_label and self.names == other.names
                and np.allclose(self.potentias, other.potentias, atol=tol, rtol=0))

    def superposition_text(self):
        """c_1 |a_1> + ... + c_n |a_n> over the nonzero coordinates"""
        terms = []
        for name, c in zip(self.names, self.coordinates):
            if abs(c) <= config.NORM_TOL:
                continue
            if abs(c.imag) <= config.NORM_TOL:
                terms.append(f"{config.fmt_real(c.real)}|{name}>")
            else:
                sign = "-" if c.imag < 0 else "+"
                terms.append(f"({config.fmt_real(c.real)}{sign}{config.fmt_real(abs(c.imag))}j)|{name}>")
        return " + ".join(terms)

    def to_frame(self):
        return pd.DataFrame({"Power": list(self.names), "Potentia": list(self.potentias)})


def build_quantum_situation(psa, b):
    """QS_{psi,B}: (power, |c_i|^2) for every basis element, zero weights kept"""
    if psa.psi.dim != b.dim:
        raise DimensionMismatchError(psa.psi.dim, b.dim, "PSA and basis")
    coords = change_of_basis(psa.psi, b)
    pairs = []
    for power, c in zip(powers_of(b), coords):
        weight = potentia(psa.psi, rank1_projector(power.ray))
        if abs(weight - abs(c) ** 2) > config.NORM_TOL:
            raise InvariantViolation(f"Potentia of {power.name} disagrees with its coordinate")
        pairs.append((power, weight))
    return QuantumSituation(psa.psa_id, b.label, tuple(pairs), tuple(coords))


def laboratory(psa, bases):
    """One quantum situation per experimental arrangement, never merged"""
    return [build_quantum_situation(psa, b) for b in bases]


# ---------------------------------------------------------------------------
# p-truth
# ---------------------------------------------------------------------------

class PTruth(Enum):
    P_TRUE = "p-true"
    P_FALSE = "p-false"


@dataclass(frozen=True)
class QuantumStatement:
    """`power` has potentia `potentia` in the PSA `psa_id`"""
    power: str
    potentia: float
    psa_id: str

    def __post_init__(self):
        if not 0.0 <= self.potentia <= 1.0:
            raise InvariantViolation(f"Claimed potentia {self.potentia} is outside [0, 1]")


def p_truth(s, psa, context):
    if s.power not in context.names:
        raise UnknownPowerError(f"Power {s.power!r} is not in context {context.label!r}")
    ray = context.vectors[context.names.index(s.power)]
    computed = potentia(psa.psi, rank1_projector(ray))
    if computed > config.P_TRUTH_EPS and abs(s.potentia - computed) <= config.P_TRUTH_MATCH:
        return PTruth.P_TRUE
    return PTruth.P_FALSE


def p_true_statements(qs):
    """Every power present in the PSA yields a p-true statement, and only those"""
    return [QuantumStatement(power.name, p, qs.psa_id)
            for power, p in qs.pairs if p > config.P_TRUTH_EPS]


# ---------------------------------------------------------------------------
# Contradictory powers and their formulas
# ---------------------------------------------------------------------------

NON_ORTHOGONAL = "non-orthogonal"
NOT_EIGENVECTOR = "not eigenvectors"
SAME_EIGENVALUE = "same eigenvalue"
DIFFERENT_CONTEXT = "different contexts"
NOT_EXHAUSTIVE = "not exhaustive"


@dataclass(frozen=True)
class ContradictoryPair:
    power_a: str
    power_b: str
    observable: str
    eigenvalues: Tuple[float, float] = (math.nan, math.nan)


def _eigenvalue_of(vec, obs):
    amps = vec.amplitudes
    image = obs.matrix @ amps
    lam = float(np.vdot(amps, image).real)
    return lam, float(np.linalg.norm(image - lam * amps))


def declare_contradictory(a, b, obs):
    if a.context != b.context:
        raise ContradictionRejected(DIFFERENT_CONTEXT, f"{a.context!r} vs {b.context!r}")
    if a.ray.dim != obs.dim or b.ray.dim != obs.dim:
        raise DimensionMismatchError(a.ray.dim, obs.dim, "powers and observable")
    overlap = abs(inner(a.ray, b.ray))
    if overlap > config.NORM_TOL:
        raise ContradictionRejected(NON_ORTHOGONAL, f"|<{a.name}|{b.name}>| = {config.fmt_real(overlap)}")
    lam_a, res_a = _eigenvalue_of(a.ray, obs)
    lam_b, res_b = _eigenvalue_of(b.ray, obs)
    for name, residual in ((a.name, res_a), (b.name, res_b)):
        if residual > config.SPECTRAL_TOL:
            raise ContradictionRejected(NOT_EIGENVECTOR, f"{name} is not an eigenvector of {obs.label or 'the observable'}")
    if abs(lam_a - lam_b) <= config.DEGENERACY_TOL:
        raise ContradictionRejected(SAME_EIGENVALUE, f"both have eigenvalue {config.fmt_real(lam_a)}")
    # the pair must exhaust the context: P_a + P_b = I
    covered = rank1_projector(a.ray).matrix + rank1_projector(b.ray).matrix
    if not np.allclose(covered, np.eye(obs.dim), atol=config.SPECTRAL_TOL):
        raise ContradictionRejected(
            NOT_EXHAUSTIVE, f"{a.name} and {b.name} do not span the {obs.dim}-dimensional context")
    return ContradictoryPair(a.name, b.name, obs.label, (lam_a, lam_b))


def _superposed(p):
    return config.P_TRUTH_EPS < p < 1.0 - config.P_TRUTH_EPS


def superposition_formula(qs, pairs, reinforce=False):
    """
    For each power of a contradictory pair that is genuinely superposed,
    P & ~P; with `reinforce`, also P -> ~P. Powers with potentia 0 or 1
    contribute nothing.
    """
    contradictions, implications = [], []
    for pair in pairs:
        for name in (pair.power_a, pair.power_b):
            if _superposed(qs.potentia_of(name)):
                atom = Atom(name)
                contradictions.append(Conj(atom, WeakNeg(atom)))
                implications.append(Impl(atom, WeakNeg(atom)))
    formulas = contradictions + (implications if reinforce else [])
    return tuple(dict.fromkeys(formulas))


class Consistency(Enum):
    CONSISTENT = "consistent"
    WEAKLY_INCONSISTENT_NONTRIVIAL = "weakly-inconsistent-nontrivial"
    TRIVIAL = "trivial"


@dataclass(frozen=True)
class ConsistencyReport:
    classification: Consistency
    witness: object = None
    contradictions: Tuple = ()


def _conjuncts(f):
    stack, out = [f], []
    while stack:
        node = stack.pop()
        if isinstance(node, Conj):
            stack.extend((node.right, node.left))
        else:
            out.append(node)
    return out


def contradiction_patterns(formulas):
    """Formulas A such that both A and ~A occur as conjuncts of the set"""
    conjuncts = [c for f in formulas for c in _conjuncts(f)]
    present = set(conjuncts)
    return tuple(dict.fromkeys(c for c in conjuncts if WeakNeg(c) in present))


def potential_consistency_check(formulas, max_closure=None):
    formulas = tuple(formulas)
    verdict = trivializes(formulas, max_closure)
    if verdict.trivial:
        return ConsistencyReport(Consistency.TRIVIAL)
    patterns = contradiction_patterns(formulas)
    if patterns:
        return ConsistencyReport(Consistency.WEAKLY_INCONSISTENT_NONTRIVIAL, verdict.witness, patterns)
    return ConsistencyReport(Consistency.CONSISTENT, verdict.witness)


# ---------------------------------------------------------------------------
# Actual effectuations and statistical experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ActualEffectuation:
    selected: str
    truth: Tuple[Tuple[str, bool], ...]
    shot: int
    seed: int
    generator: str = GENERATOR_NAME

    @property
    def truth_map(self):
        return dict(self.truth)


def _cumulative(qs):
    weights = qs.potentias
    if weights.sum() <= 0.0:
        raise InvariantViolation("Degenerate situation: every potentia is zero")
    return np.cumsum(weights), int(np.flatnonzero(weights > 0.0)[-1])


def _select(cumulative, last_nonzero, u):
    idx = np.searchsorted(cumulative, u, side="right")
    return np.minimum(idx, last_nonzero)


def _effectuation(qs, index, shot, seed):
    names = qs.names
    return ActualEffectuation(names[index], tuple((n, i == index) for i, n in enumerate(names)), shot, seed)


def actualize(qs, seed, shot=0):
    """Expose one power in actuality; qs and its PSA are left untouched"""
    cumulative, last = _cumulative(qs)
    u = ShotStream(seed).uniform(shot)
    return _effectuation(qs, int(_select(cumulative, last, u)), shot, seed)


def _shot_indices(qs, shots, seed):
    if isinstance(shots, bool) or not isinstance(shots, (int, np.integer)) or shots < 1:
        raise InvariantViolation(f"shots must be a positive integer, got {shots!r}")
    cumulative, last = _cumulative(qs)
    return _select(cumulative, last, ShotStream(seed).uniforms(int(shots)))


def effectuations(qs, shots, seed):
    """Shot-ordered effectuations; shot k equals actualize(qs, seed, shot=k)"""
    for shot, index in enumerate(_shot_indices(qs, shots, seed)):
        yield _effectuation(qs, int(index), shot, seed)


@dataclass(frozen=True)
class ExperimentResult:
    psa_id: str
    basis_label: str
    shots: int
    seed: int
    names: Tuple[str, ...]
    potentias: Tuple[float, ...]
    counts: Tuple[int, ...]

    @property
    def frequencies(self):
        return tuple(c / self.shots for c in self.counts)

    def count_of(self, name):
        return self.counts[self.names.index(name)]

    def frequency_of(self, name):
        return self.frequencies[self.names.index(name)]

    def bounds(self, sigmas=4.0):
        return tuple(sigmas * math.sqrt(p * (1.0 - p) / self.shots) for p in self.potentias)

    def within_bounds(self, sigmas=4.0):
        return all(abs(f - p) <= b + 1e-12
                   for f, p, b in zip(self.frequencies, self.potentias, self.bounds(sigmas)))

    def to_frame(self):
        return pd.DataFrame({
            "Power": list(self.names),
            "Potentia": list(self.potentias),
            "Count": list(self.counts),
            "Frequency": list(self.frequencies),
            "Bound": list(self.bounds()),
        })


def run_experiment(qs, shots, seed):
    """Repeated independent actualizations of the same unchanged situation"""
    indices = _shot_indices(qs, shots, seed)
    counts = np.bincount(indices, minlength=len(qs.pairs))
    logger.info("experiment on (%s, %s): %d shots, seed %d", qs.psa_id, qs.basis_label, shots, seed)
    return ExperimentResult(qs.psa_id, qs.basis_label, int(shots), int(seed), qs.names,
                            tuple(float(p) for p in qs.potentias), tuple(int(c) for c in counts))


def actual_truth(statement, effectuation):
    """A statement's power is true in actuality iff it was the one exposed"""
    if statement.power not in effectuation.truth_map:
        raise UnknownPowerError(f"Power {statement.power!r} is not in this effectuation")
    return effectuation.truth_map[statement.power]


@dataclass(frozen=True)
class OppositionReport:
    pair: ContradictoryPair
    checked: int
    violations: Tuple[Tuple[int, str], ...]

    @property
    def passed(self):
        return not self.violations


def square_of_opposition_check(pair, records):
    """Contradictories: never both actually true, never both actually false"""
    checked, violations = 0, []
    for i, eff in enumerate(records):
        checked += 1
        truth = eff.truth_map
        if pair.power_a not in truth or pair.power_b not in truth:
            violations.append((i, "power missing from effectuation"))
        elif truth[pair.power_a] and truth[pair.power_b]:
            violations.append((i, "both actually true"))
        elif not truth[pair.power_a] and not truth[pair.power_b]:
            violations.append((i, "both actually false"))
    return OppositionReport(pair, checked, tuple(violations))


def sr_holds(effectuation):
    """Semantic requirement: exactly one power of the context is actually true"""
    return sum(1 for _, value in effectuation.truth if value) == 1
