#!/usr/bin/env python3
"""
Finite-dimensional complex Hilbert-space kernel

States, orthonormal bases, Hermitian operators, projectors, Borel sets,
the Born rule, spectral decomposition (cyclic complex Jacobi) and unitary
evolution. Every value type holds a read-only numpy array.
"""
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

import config
from errors import ConvergenceError, DimensionMismatchError, InvariantViolation

logger = logging.getLogger(__name__)


def _frozen(array):
    arr = np.array(array, dtype=complex)
    arr.flags.writeable = False
    return arr


def _check_dim(dim):
    max_dim = config.load_settings().max_dim
    if not 2 <= dim <= max_dim:
        raise InvariantViolation(f"Dimension {dim} outside supported range 2..{max_dim}")


def _same_dim(a, b, what="operands"):
    if a.dim != b.dim:
        raise DimensionMismatchError(a.dim, b.dim, what)


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1:
            raise InvariantViolation("State vector must be one-dimensional")
        _check_dim(amps.shape[0])
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > config.NORM_TOL:
            raise InvariantViolation(f"State vector norm is {config.fmt_real(norm)}, expected 1")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm < config.NORM_TOL:
            raise InvariantViolation("Cannot normalize the zero vector")
        return cls(amps / norm)

    @classmethod
    def basis_state(cls, dim, index):
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @property
    def dim(self):
        return self.amplitudes.shape[0]

    def close_to(self, other, tol=config.NORM_TOL):
        return self.dim == other.dim and np.allclose(self.amplitudes, other.amplitudes, atol=tol, rtol=0)

    def __repr__(self):
        return f"StateVector({encode_vector(self.amplitudes)})"


@dataclass(frozen=True, eq=False)
class Basis:
    label: str
    vectors: Tuple[StateVector, ...]
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        vectors = tuple(self.vectors)
        if not vectors:
            raise InvariantViolation(f"Basis {self.label!r} has no vectors")
        dim = vectors[0].dim
        if len(vectors) != dim or any(v.dim != dim for v in vectors):
            raise InvariantViolation(f"Basis {self.label!r} needs exactly {dim} vectors of dimension {dim}")
        gram = np.array([[np.vdot(a.amplitudes, b.amplitudes) for b in vectors] for a in vectors])
        deviation = float(np.max(np.abs(gram - np.eye(dim))))
        if deviation > config.NORM_TOL:
            raise InvariantViolation(
                f"Basis {self.label!r} is not orthonormal (max deviation {config.fmt_real(deviation)})")
        names = tuple(self.names) or tuple(f"{self.label}{i}" for i in range(dim))
        if len(names) != dim or len(set(names)) != dim:
            raise InvariantViolation(f"Basis {self.label!r} needs {dim} distinct vector names")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "names", names)

    @classmethod
    def standard(cls, dim, label="std", names=()):
        return cls(label, tuple(StateVector.basis_state(dim, i) for i in range(dim)), names)

    @property
    def dim(self):
        return self.vectors[0].dim


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvariantViolation("Operator matrix must be square")
        _check_dim(m.shape[0])
        deviation = float(np.max(np.abs(m - m.conj().T)))
        if deviation > config.HERMITIAN_TOL:
            name = f" {self.label!r}" if self.label else ""
            raise InvariantViolation(
                f"Operator{name} is not Hermitian (deviation {config.fmt_real(deviation)})")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Projector:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvariantViolation("Projector matrix must be square")
        if float(np.max(np.abs(m - m.conj().T))) > config.NORM_TOL:
            raise InvariantViolation("Projector is not Hermitian")
        if float(np.max(np.abs(m @ m - m))) > config.NORM_TOL:
            raise InvariantViolation("Projector is not idempotent")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def zero(cls, dim):
        return cls(np.zeros((dim, dim), dtype=complex))

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim, dtype=complex))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def rank(self):
        return int(round(float(np.trace(self.matrix).real)))

    def close_to(self, other, tol=config.SPECTRAL_TOL):
        return self.dim == other.dim and float(np.max(np.abs(self.matrix - other.matrix))) <= tol


# ---------------------------------------------------------------------------
# Borel sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    low: float
    high: float
    low_closed: bool = True
    high_closed: bool = True

    def contains(self, x, tol=config.DEGENERACY_TOL):
        above = x >= self.low - tol if self.low_closed else x > self.low + tol
        below = x <= self.high + tol if self.high_closed else x < self.high - tol
        return above and below

    def __str__(self):
        if self.low == self.high:
            return "{" + config.fmt_real(self.low) + "}"
        return "{}{}, {}{}".format("[" if self.low_closed else "(", _fmt_bound(self.low),
                                   _fmt_bound(self.high), "]" if self.high_closed else ")")


def _fmt_bound(x):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return config.fmt_real(x)


@dataclass(frozen=True)
class BorelSet:
    """Finite union of intervals and points, kept sorted and merged"""
    intervals: Tuple[Interval, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", _normalize(self.intervals))

    @classmethod
    def real_line(cls):
        return cls((Interval(-math.inf, math.inf, False, False),))

    @classmethod
    def point(cls, x):
        return cls((Interval(float(x), float(x)),))

    @classmethod
    def points(cls, xs):
        return cls(tuple(Interval(float(x), float(x)) for x in xs))

    @classmethod
    def interval(cls, low, high, low_closed=True, high_closed=True):
        return cls((Interval(float(low), float(high), low_closed, high_closed),))

    @classmethod
    def parse(cls, text):
        """Read `{1, 2}`, `[-2, 2)`, `(0, inf)`, `R` or `{}` joined by `U`"""
        parts = [p.strip() for p in re.split(r"\s+[Uu]\s+|∪", text.strip()) if p.strip()]
        if not parts:
            raise InvariantViolation("Empty Borel set text")
        intervals = []
        for part in parts:
            if part in ("R", "ℝ"):
                intervals.extend(cls.real_line().intervals)
            elif part.startswith("{") and part.endswith("}"):
                body = part[1:-1].strip()
                if body:
                    intervals.extend(Interval(_real(x), _real(x)) for x in body.split(","))
            elif part[0] in "[(" and part[-1] in "])":
                bounds = part[1:-1].split(",")
                if len(bounds) != 2:
                    raise InvariantViolation(f"Cannot read interval {part!r}")
                intervals.append(Interval(_real(bounds[0]), _real(bounds[1]), part[0] == "[", part[-1] == "]"))
            else:
                raise InvariantViolation(f"Cannot read Borel set component {part!r}")
        return cls(tuple(intervals))

    def contains(self, x, tol=config.DEGENERACY_TOL):
        return any(iv.contains(x, tol) for iv in self.intervals)

    def union(self, other):
        return BorelSet(self.intervals + other.intervals)

    def __str__(self):
        return " U ".join(str(iv) for iv in self.intervals) if self.intervals else "{}"


def _real(text):
    text = text.strip().lower()
    if text in ("inf", "+inf"):
        return math.inf
    if text == "-inf":
        return -math.inf
    try:
        return float(text)
    except ValueError:
        raise InvariantViolation(f"Cannot read real number {text!r}")


def _normalize(intervals):
    items = []
    for iv in intervals:
        if iv.low > iv.high or (iv.low == iv.high and not (iv.low_closed and iv.high_closed)):
            continue  # empty
        items.append(iv)
    items.sort(key=lambda iv: (iv.low, not iv.low_closed, iv.high))
    merged = []
    for iv in items:
        if merged:
            last = merged[-1]
            touching = iv.low < last.high or (iv.low == last.high and (last.high_closed or iv.low_closed))
            if touching:
                if iv.high > last.high or (iv.high == last.high and iv.high_closed):
                    merged[-1] = Interval(last.low, iv.high, last.low_closed, iv.high_closed)
                continue
        merged.append(iv)
    return tuple(merged)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def inner(a, b):
    """<a|b>, conjugate-linear in the first argument"""
    _same_dim(a, b, "state vectors")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def rank1_projector(v):
    if not isinstance(v, StateVector):
        v = StateVector(v)
    amps = v.amplitudes
    return Projector(np.outer(amps, amps.conj()))


def potentia(psi, p):
    """
    Born rule, computed both as <psi|P|psi> and as Tr[P_psi P]. The two forms
    must agree; the bra-ket value is returned.
    """
    _same_dim(psi, p, "state and projector")
    amps = psi.amplitudes
    braket = complex(np.vdot(amps, p.matrix @ amps))
    trace = complex(np.trace(np.outer(amps, amps.conj()) @ p.matrix))
    if abs(braket - trace) > config.NORM_TOL or abs(braket.imag) > config.NORM_TOL:
        raise InvariantViolation(
            f"Born rule forms disagree: <psi|P|psi>={braket}, Tr[P_psi P]={trace}")
    return min(max(braket.real, 0.0), 1.0)


def canonical_phase(amplitudes, tol=1e-12):
    """Rotate so the first non-negligible component is real and positive"""
    amps = np.array(amplitudes, dtype=complex)
    for c in amps:
        if abs(c) > tol:
            return amps * (abs(c) / c)
    return amps


def _jacobi_rotate(a, v, p, q):
    apq = a[p, q]
    b = abs(apq)
    phase = apq / b
    theta = (a[q, q].real - a[p, p].real) / (2.0 * b)
    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    # unitary acting on coordinates (p, q): phase removal followed by a real rotation
    g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]], dtype=complex)
    cols = [p, q]
    a[:, cols] = a[:, cols] @ g
    a[cols, :] = g.conj().T @ a[cols, :]
    a[p, q] = a[q, p] = 0.0
    v[:, cols] = v[:, cols] @ g


def diagonalize(h, tol=config.JACOBI_TOL, max_sweeps=config.JACOBI_MAX_SWEEPS):
    """
    Cyclic complex Jacobi eigen-solver. Returns ascending real eigenvalues
    and the matching eigenvectors as columns, each phase-canonical.
    """
    a = np.array(h.matrix, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for sweep in range(max_sweeps + 1):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tol * scale:
            logger.debug("jacobi converged after %d sweeps (dim %d)", sweep, n)
            break
        if sweep == max_sweeps:
            raise ConvergenceError(f"Jacobi solver did not converge in {max_sweeps} sweeps")
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > tol * scale * 1e-3:
                    _jacobi_rotate(a, v, p, q)

    eigenvalues = np.real(np.diag(a))
    order = np.argsort(eigenvalues, kind="stable")
    vectors = np.column_stack([canonical_phase(v[:, i]) for i in order])
    return eigenvalues[order], vectors


def spectral_decompose(h):
    """(eigenvalue, eigenprojector) pairs, ascending, degenerate values merged"""
    eigenvalues, vectors = diagonalize(h)
    groups = []
    for i, lam in enumerate(eigenvalues):
        if groups and lam - groups[-1][0][0] <= config.DEGENERACY_TOL:
            groups[-1][0].append(lam)
            groups[-1][1].append(i)
        else:
            groups.append(([lam], [i]))

    result = []
    for lams, cols in groups:
        block = vectors[:, cols]
        result.append((float(np.mean(lams)), Projector(block @ block.conj().T)))
    return result


def eigenbasis(h, label, names=()):
    """Orthonormal eigenbasis of an observable, ascending eigenvalue order"""
    _, vectors = diagonalize(h)
    return Basis(label, tuple(StateVector(vectors[:, i]) for i in range(h.dim)), names)


def event_projector(a, delta):
    """P^A_Delta: the sum of eigenprojectors whose eigenvalue lies in delta"""
    total = np.zeros((a.dim, a.dim), dtype=complex)
    for lam, proj in spectral_decompose(a):
        if delta.contains(lam):
            total = total + proj.matrix
    return Projector(total)


def evolve(psi, h, t, hbar=1.0):
    """Solve i hbar d/dt |psi> = H |psi> with U(t) = sum exp(-i lam t / hbar) P_lam"""
    _same_dim(psi, h, "state and Hamiltonian")
    if not math.isfinite(t):
        raise InvariantViolation(f"Evolution time must be finite, got {t}")
    if not math.isfinite(hbar) or hbar <= 0:
        raise InvariantViolation(f"hbar must be a positive finite number, got {hbar}")
    u = np.zeros((h.dim, h.dim), dtype=complex)
    for lam, proj in spectral_decompose(h):
        u = u + np.exp(-1j * lam * t / hbar) * proj.matrix
    return StateVector(u @ psi.amplitudes)


def change_of_basis(psi, b):
    """Coordinates c_i = <b_i|psi>"""
    _same_dim(psi, b, "state and basis")
    return [inner(bi, psi) for bi in b.vectors]


def pauli(name):
    matrices = {
        "x": [[0, 1], [1, 0]],
        "y": [[0, -1j], [1j, 0]],
        "z": [[1, 0], [0, -1]],
    }
    key = name.lower().removeprefix("sigma_").removeprefix("sigma")
    if key not in matrices:
        raise InvariantViolation(f"Unknown Pauli matrix {name!r}")
    return HermitianOperator(np.array(matrices[key], dtype=complex), label=f"sigma_{key}")


def identity(dim):
    return HermitianOperator(np.eye(dim, dtype=complex), label="I")


# ---------------------------------------------------------------------------
# JSON codecs: complex numbers as [re, im] pairs, 12 significant digits
# ---------------------------------------------------------------------------

def encode_complex(z):
    z = complex(z)
    return [config.round_sig(z.real), config.round_sig(z.imag)]


def encode_vector(amplitudes):
    return [encode_complex(z) for z in np.asarray(amplitudes).ravel()]


def encode_matrix(matrix):
    return [[encode_complex(z) for z in row] for row in np.asarray(matrix)]


def decode_complex(value):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 \
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value):
        return complex(value[0], value[1])
    raise InvariantViolation(f"Expected a real number or an [re, im] pair, got {value!r}")


def decode_vector(values):
    return np.array([decode_complex(v) for v in values], dtype=complex)


def decode_matrix(rows):
    return np.array([[decode_complex(v) for v in row] for row in rows], dtype=complex)
