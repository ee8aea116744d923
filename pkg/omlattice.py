#!/usr/bin/env python3
"""
The lattice of subspaces of a finite-dimensional state space

Subspaces are compared through their projectors, so two different spanning
sets of the same subspace are equal. Meet, join and orthocomplement make
the lattice orthomodular but not distributive; the law checkers below
exercise both facts on seeded random cases.
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

import config
from errors import DimensionMismatchError, InvariantViolation, LatticeError
from hilbert import BorelSet, HermitianOperator, Projector, diagonalize, encode_matrix, event_projector

logger = logging.getLogger(__name__)


def _orthonormalize(columns, dim, tol=config.LATTICE_TOL):
    """Modified Gram-Schmidt (two passes), dropping residuals below tol"""
    kept = []
    for col in columns:
        w = np.array(col, dtype=complex).reshape(dim)
        for _ in range(2):
            for q in kept:
                w = w - np.vdot(q, w) * q
        norm = np.linalg.norm(w)
        if norm >= tol:
            kept.append(w / norm)
    if not kept:
        return np.zeros((dim, 0), dtype=complex)
    return np.column_stack(kept)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal spanning columns plus the canonical projector"""
    dim: int
    basis: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=complex).reshape(self.dim, -1)
        k = basis.shape[1]
        if k > self.dim:
            raise InvariantViolation(f"Rank {k} exceeds ambient dimension {self.dim}")
        if k and float(np.max(np.abs(basis.conj().T @ basis - np.eye(k)))) > config.NORM_TOL:
            raise InvariantViolation("Spanning set is not orthonormal")
        basis.flags.writeable = False
        projector = basis @ basis.conj().T
        projector.flags.writeable = False
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_projector", projector)

    @classmethod
    def span(cls, vectors, dim=None):
        columns = [getattr(v, "amplitudes", v) for v in vectors]
        if dim is None:
            if not columns:
                raise InvariantViolation("Ambient dimension needed to span an empty set")
            dim = len(columns[0])
        return cls(dim, _orthonormalize(columns, dim))

    @classmethod
    def zero(cls, dim):
        return cls(dim, np.zeros((dim, 0), dtype=complex))

    @classmethod
    def whole(cls, dim):
        return cls(dim, np.eye(dim, dtype=complex))

    @classmethod
    def from_projector(cls, p):
        matrix = p.matrix if isinstance(p, Projector) else np.asarray(p, dtype=complex)
        dim = matrix.shape[0]
        eigenvalues, vectors = diagonalize(HermitianOperator(matrix))
        return cls(dim, vectors[:, eigenvalues > 0.5])

    @property
    def rank(self):
        return self.basis.shape[1]

    @property
    def projector(self):
        return self._projector

    def distance(self, other):
        _same_dim(self, other)
        return float(np.linalg.norm(self.projector - other.projector))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.dim == other.dim and self.distance(other) < config.LATTICE_TOL

    __hash__ = None

    def __repr__(self):
        return f"Subspace(dim={self.dim}, rank={self.rank})"

    def to_json(self):
        return {"dim": self.dim, "rank": self.rank, "projector": encode_matrix(self.projector)}


def _same_dim(a, b):
    if a.dim != b.dim:
        raise DimensionMismatchError(a.dim, b.dim, "subspaces")


def meet(a, b):
    """Largest common subspace: eigenvalue-2 eigenvectors of P_a + P_b"""
    _same_dim(a, b)
    if a.rank == 0 or b.rank == 0:
        return Subspace.zero(a.dim)
    eigenvalues, vectors = diagonalize(HermitianOperator(a.projector + b.projector))
    keep = np.abs(eigenvalues - 2.0) <= config.LATTICE_TOL
    return Subspace(a.dim, _orthonormalize(vectors[:, keep].T, a.dim))


def join(a, b):
    """Span of the union of both spanning sets"""
    _same_dim(a, b)
    return Subspace(a.dim, _orthonormalize(list(a.basis.T) + list(b.basis.T), a.dim))


def ortho(a):
    """Orthocomplement, projector I - P_a"""
    extended = _orthonormalize(list(a.basis.T) + list(np.eye(a.dim, dtype=complex)), a.dim)
    complement = extended[:, a.rank:]
    if complement.shape[1] != a.dim - a.rank:
        return Subspace.from_projector(np.eye(a.dim) - a.projector)
    return Subspace(a.dim, complement)


def leq(a, b):
    _same_dim(a, b)
    return float(np.linalg.norm(b.projector @ a.projector - a.projector)) < config.LATTICE_TOL


def commutes(a, b):
    _same_dim(a, b)
    pa, pb = a.projector, b.projector
    return float(np.linalg.norm(pa @ pb - pb @ pa)) < config.LATTICE_TOL


@dataclass(frozen=True)
class LawCheck:
    holds: bool
    lhs: Subspace
    rhs: Subspace


def orthomodular_check(a, b):
    """a <= b implies b = a v (b ^ a')"""
    if not leq(a, b):
        raise LatticeError("Orthomodular law applies to comparable pairs a <= b only")
    rhs = join(a, meet(b, ortho(a)))
    return LawCheck(b == rhs, b, rhs)


def modular_check(a, b, c):
    """a <= c implies a v (b ^ c) = (a v b) ^ c"""
    if not leq(a, c):
        raise LatticeError("Modular law applies to triples with a <= c only")
    lhs = join(a, meet(b, c))
    rhs = meet(join(a, b), c)
    return LawCheck(lhs == rhs, lhs, rhs)


def is_distributive_triple(a, b, c):
    return meet(c, join(a, b)) == join(meet(c, a), meet(c, b))


@dataclass(frozen=True)
class DistributivityWitness:
    a: Subspace
    b: Subspace
    c: Subspace
    lhs: Subspace
    rhs: Subspace


def distributivity_witness(dim):
    """a = [e1], b = [e2], c = [(e1 + e2)/sqrt 2]: c ^ (a v b) = c but (c ^ a) v (c ^ b) = 0"""
    if dim < 2:
        raise LatticeError(f"No distributivity counterexample in dimension {dim}: the lattice is Boolean")
    e = np.eye(dim, dtype=complex)
    a = Subspace.span([e[0]])
    b = Subspace.span([e[1]])
    c = Subspace.span([(e[0] + e[1]) / np.sqrt(2.0)])
    lhs = meet(c, join(a, b))
    rhs = join(meet(c, a), meet(c, b))
    if lhs == rhs:
        raise LatticeError("Distributivity unexpectedly held for the witness triple")
    return DistributivityWitness(a, b, c, lhs, rhs)


def event_to_element(a, delta):
    """Lattice element of the quantum event (A, Delta)"""
    return Subspace.from_projector(event_projector(a, delta))


def event_join_check(a, delta1, delta2):
    """Event of a union of disjoint spectral sets is the join of the two events"""
    lhs = event_to_element(a, delta1.union(delta2))
    rhs = join(event_to_element(a, delta1), event_to_element(a, delta2))
    return LawCheck(lhs == rhs, lhs, rhs)


def power_atom(power):
    """A power is a rank-1 element (an atom) of the lattice"""
    return Subspace.span([power.ray])


# ---------------------------------------------------------------------------
# Seeded random cases and the law runner
# ---------------------------------------------------------------------------

def random_subspace(rng, dim, rank=None):
    """Span of a Gaussian complex matrix; rank uniform on 0..dim unless given"""
    if rank is None:
        rank = int(rng.integers(0, dim + 1))
    m = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    return Subspace.span(list(m.T), dim)


def random_chain(rng, dim):
    """A pair a <= b"""
    b = random_subspace(rng, dim)
    k = int(rng.integers(0, b.rank + 1))
    coeffs = rng.normal(size=(b.rank, k)) + 1j * rng.normal(size=(b.rank, k))
    a = Subspace.span(list((b.basis @ coeffs).T), dim)
    return a, b


def random_observable(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator((m + m.conj().T) / 2.0, label="random")


def _random_spectral_split(rng, a):
    """Two disjoint point sets drawn from the spectrum of a"""
    eigenvalues, _ = diagonalize(a)
    side = rng.integers(0, 3, size=len(eigenvalues))
    return (BorelSet.points(eigenvalues[side == 0]), BorelSet.points(eigenvalues[side == 1]))


def _laws(rng, dim):
    a, b, c = (random_subspace(rng, dim) for _ in range(3))
    x, y = random_chain(rng, dim)
    h = random_observable(rng, dim)
    d1, d2 = _random_spectral_split(rng, h)
    top, bottom = Subspace.whole(dim), Subspace.zero(dim)
    return {
        "meet_commutative": meet(a, b) == meet(b, a),
        "join_commutative": join(a, b) == join(b, a),
        "meet_associative": meet(meet(a, b), c) == meet(a, meet(b, c)),
        "join_associative": join(join(a, b), c) == join(a, join(b, c)),
        "absorption_meet": meet(a, join(a, b)) == a,
        "absorption_join": join(a, meet(a, b)) == a,
        "meet_idempotent": meet(a, a) == a,
        "join_idempotent": join(a, a) == a,
        "bounds": meet(a, top) == a and join(a, bottom) == a,
        "de_morgan_meet": ortho(meet(a, b)) == join(ortho(a), ortho(b)),
        "de_morgan_join": ortho(join(a, b)) == meet(ortho(a), ortho(b)),
        "double_ortho": ortho(ortho(a)) == a,
        "ortho_order_reversing": leq(ortho(y), ortho(x)),
        "orthomodular": orthomodular_check(x, y).holds,
        "modular": modular_check(x, b, y).holds,
        "event_join": event_join_check(h, d1, d2).holds,
    }


@dataclass(frozen=True)
class LawReport:
    dims: tuple
    trials: int
    seed: int
    frame: pd.DataFrame

    @property
    def passed(self):
        return int(self.frame["Failures"].sum()) == 0

    def failures_for(self, law):
        return int(self.frame.loc[self.frame["Law"] == law, "Failures"].sum())


def verify_lattice_laws(dims, trials, seed):
    """Run every law on `trials` seeded random cases, cycling through `dims`"""
    dims = (dims,) if isinstance(dims, int) else tuple(dims)
    if not dims or min(dims) < 2:
        raise LatticeError("Law verification needs ambient dimensions >= 2")
    if trials < 1:
        raise LatticeError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    checked, failures = {}, {}
    for trial in range(trials):
        results = _laws(rng, dims[trial % len(dims)])
        for law, ok in results.items():
            checked[law] = checked.get(law, 0) + 1
            failures[law] = failures.get(law, 0) + (0 if ok else 1)
    logger.info("lattice laws: %d trials over dims %s, seed %d", trials, dims, seed)
    frame = pd.DataFrame({
        "Law": list(checked),
        "Checked": [checked[k] for k in checked],
        "Failures": [failures[k] for k in checked],
    })
    return LawReport(dims, trials, seed, frame)
