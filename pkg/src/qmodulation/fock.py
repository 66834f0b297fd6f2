"""Truncated photon-number spaces and density operators.

Basis states of a ``FockBasis`` are occupation tuples ``(n_0, ..., n_{s-1})``
with each ``n_i`` in ``[0, n_max]``, enumerated lexicographically with slot 0
most significant. This is the same order ``numpy.kron`` produces, so the
Kronecker product of single-slot operators lands in the right place.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

import numpy as np

from . import linalg
from .errors import DomainError, RepresentationError

TOL_HERM = 1e-10
TOL_PSD = 1e-10
TOL_TRACE = 1e-10
TOL_DIAG = 1e-10
DEGENERACY_TOL = 1e-9

OccupationTuple = tuple[int, ...]


@dataclass(frozen=True)
class FockBasis:
    slots: int
    n_max: int

    def __post_init__(self):
        if self.slots < 1:
            raise DomainError(f"slots must be >= 1, got {self.slots}")
        if self.n_max < 0:
            raise DomainError(f"n_max must be >= 0, got {self.n_max}")

    @property
    def levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.levels**self.slots

    def index(self, occ: OccupationTuple) -> int:
        self.check(occ)
        idx = 0
        for n in occ:
            idx = idx * self.levels + n
        return idx

    def occupation(self, index: int) -> OccupationTuple:
        if not 0 <= index < self.dim:
            raise DomainError(f"index {index} outside basis of dim {self.dim}")
        out = []
        for _ in range(self.slots):
            index, n = divmod(index, self.levels)
            out.append(n)
        return tuple(reversed(out))

    def check(self, occ: OccupationTuple) -> None:
        if len(occ) != self.slots:
            raise DomainError(f"occupation {occ} has {len(occ)} slots, basis has {self.slots}")
        for n in occ:
            if not 0 <= n <= self.n_max:
                raise DomainError(f"photon count {n} outside [0, {self.n_max}]")

    def __iter__(self) -> Iterator[OccupationTuple]:
        return itertools.product(range(self.levels), repeat=self.slots)

    def with_slots(self, slots: int) -> FockBasis:
        return FockBasis(slots, self.n_max)


def _is_diagonal(m: np.ndarray) -> bool:
    return not np.any(m - np.diag(np.diag(m)))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Validated density matrix on a ``FockBasis``.

    ``diagonal_hint`` is set automatically when the matrix is exactly
    diagonal; it lets spectral routines skip the eigensolver.
    """

    basis: FockBasis
    matrix: np.ndarray
    diagonal_hint: bool = False
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dim = self.basis.dim
        if m.shape != (dim, dim):
            raise DomainError(f"matrix shape {m.shape} does not match basis dim {dim}")
        if self.diagonal_hint:
            m = np.diag(np.diag(m))
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if not self.diagonal_hint and _is_diagonal(m):
            object.__setattr__(self, "diagonal_hint", True)
        if self.validate:
            self._validate()

    def _validate(self):
        m = self.matrix
        herm = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if herm > TOL_HERM:
            raise DomainError(f"operator not Hermitian (max |M - M^H| = {herm:.3e})")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TOL_TRACE:
            raise DomainError(f"trace {tr.real:.12g} differs from 1")
        w = self.eigenvalues
        if w.size and w.min() < -TOL_PSD:
            raise DomainError(f"negative eigenvalue {w.min():.3e}")

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def slots(self) -> int:
        return self.basis.slots

    @cached_property
    def _eig(self):
        if self.diagonal_hint:
            w = np.diag(self.matrix).real.copy()
            order = np.argsort(w, kind="stable")
            return w[order], np.eye(self.dim, dtype=complex)[:, order]
        return linalg.eigh(self.matrix)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eig[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._eig[1]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix).real

    def allclose(self, other: DensityOperator, atol: float = 1e-10) -> bool:
        return self.basis == other.basis and bool(
            np.max(np.abs(self.matrix - other.matrix), initial=0.0) <= atol
        )

    def mean_photon_number(self) -> float:
        counts = np.array([sum(occ) for occ in self.basis], dtype=float)
        return float(counts @ self.diagonal())


@dataclass(frozen=True)
class ClassicalDistribution:
    """Sparse probability map over occupation tuples (a number-diagonal state)."""

    basis: FockBasis
    probs: Mapping[OccupationTuple, float]
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        probs = {tuple(k): float(v) for k, v in self.probs.items()}
        object.__setattr__(self, "probs", probs)
        if self.validate:
            for occ, p in probs.items():
                self.basis.check(occ)
                if p < -1e-12:
                    raise DomainError(f"negative probability {p} at {occ}")
            total = sum(probs.values())
            if abs(total - 1.0) > 1e-10:
                raise DomainError(f"probabilities sum to {total:.12g}, not 1")

    def __getitem__(self, occ: OccupationTuple) -> float:
        return self.probs.get(occ, 0.0)

    def __len__(self) -> int:
        return len(self.probs)

    def items(self):
        return self.probs.items()

    def support(self, tol: float = 0.0) -> dict[OccupationTuple, float]:
        return {k: v for k, v in self.probs.items() if v > tol}

    def mean_photon_number(self) -> float:
        return sum(p * sum(occ) for occ, p in self.probs.items())

    def allclose(self, other: ClassicalDistribution, atol: float = 1e-10) -> bool:
        if self.basis != other.basis:
            return False
        keys = set(self.probs) | set(other.probs)
        return all(abs(self[k] - other[k]) <= atol for k in keys)


@dataclass(frozen=True, eq=False)
class SchattenDecomposition:
    """Weighted orthogonal rank-one projectors ``sum_n w_n |x_n><x_n|``.

    Stored as a weight vector and a matrix whose columns are the ``x_n``;
    projectors are materialised on demand.
    """

    basis: FockBasis
    weights: np.ndarray
    vectors: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != self.basis.dim or v.shape[1] != w.size:
            raise DomainError("vectors must be a dim x len(weights) matrix")
        w.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "vectors", v)

    def __len__(self) -> int:
        return self.weights.size

    def projector(self, i: int) -> DensityOperator:
        x = self.vectors[:, i]
        return DensityOperator(self.basis, np.outer(x, x.conj()), validate=False)

    @property
    def terms(self) -> list[tuple[float, DensityOperator]]:
        return [(float(self.weights[i]), self.projector(i)) for i in range(len(self))]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.weights) @ self.vectors.conj().T

    def is_number_diagonal(self, tol: float = 1e-12) -> bool:
        """True if every projector is onto a single occupation tuple."""
        return all(
            np.count_nonzero(np.abs(self.vectors[:, i]) > tol) == 1 for i in range(len(self))
        )

    def occupations(self) -> list[OccupationTuple]:
        if not self.is_number_diagonal():
            raise RepresentationError("decomposition projectors are not number states")
        return [
            self.basis.occupation(int(np.argmax(np.abs(self.vectors[:, i]))))
            for i in range(len(self))
        ]


def number_projection(n: int, basis: FockBasis) -> DensityOperator:
    if basis.slots != 1:
        raise DomainError("number_projection needs a single-slot basis")
    return product_projection((n,), basis)


def product_projection(occ: OccupationTuple, basis: FockBasis) -> DensityOperator:
    """Projector onto the product number state ``|occ><occ|``."""
    idx = basis.index(tuple(occ))
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    m[idx, idx] = 1.0
    return DensityOperator(basis, m, diagonal_hint=True, validate=False)


def maximally_mixed(basis: FockBasis) -> DensityOperator:
    return DensityOperator(basis, np.eye(basis.dim) / basis.dim, diagonal_hint=True)


def diagonal_state(probs, basis: FockBasis | None = None) -> DensityOperator:
    probs = np.asarray(probs, dtype=float)
    if basis is None:
        basis = FockBasis(1, probs.size - 1)
    return DensityOperator(basis, np.diag(probs), diagonal_hint=True)


def tensor(a: DensityOperator, b: DensityOperator, *, validate: bool = False) -> DensityOperator:
    if a.basis.n_max != b.basis.n_max:
        raise DomainError(f"n_max mismatch: {a.basis.n_max} vs {b.basis.n_max}")
    basis = FockBasis(a.slots + b.slots, a.basis.n_max)
    diag = a.diagonal_hint and b.diagonal_hint
    if diag:
        m = np.diag(np.kron(np.diag(a.matrix), np.diag(b.matrix)))
    else:
        m = np.kron(a.matrix, b.matrix)
    return DensityOperator(basis, m, diagonal_hint=diag, validate=validate)


def tensor_all(ops) -> DensityOperator:
    ops = list(ops)
    out = ops[0]
    for op in ops[1:]:
        out = tensor(out, op)
    return out


def partial_trace(op: DensityOperator, keep) -> DensityOperator:
    """Trace out every slot not in ``keep``; kept slots retain their order."""
    keep = sorted(set(keep))
    s = op.slots
    if not keep:
        raise DomainError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= s:
        raise DomainError(f"keep {keep} not a subset of slots 0..{s - 1}")
    if len(keep) == s:
        return op
    lv = op.basis.levels
    t = op.matrix.reshape((lv,) * (2 * s))
    ket = list(range(s))
    bra = [s + i for i in range(s)]
    for i in range(s):
        if i not in keep:
            bra[i] = ket[i]
    out_idx = [ket[i] for i in keep] + [bra[i] for i in keep]
    r = np.einsum(t, ket + bra, out_idx)
    dim = lv ** len(keep)
    return DensityOperator(
        FockBasis(len(keep), op.basis.n_max),
        r.reshape(dim, dim),
        diagonal_hint=op.diagonal_hint,
        validate=False,
    )


def clamp_spectrum(w: np.ndarray) -> np.ndarray:
    """Snap tiny negative eigenvalues to zero; reject genuinely negative ones."""
    if w.size and w.min() < -TOL_PSD:
        raise DomainError(f"eigenvalue {w.min():.3e} below -{TOL_PSD}")
    return np.clip(w, 0.0, 1.0)


def spectral_decompose(op: DensityOperator, tol: float = 1e-12) -> SchattenDecomposition:
    """Schatten decomposition sorted by descending weight.

    Terms with weight below ``tol`` are dropped. ``degenerate`` is set when
    two retained weights differ by less than ``DEGENERACY_TOL`` relative to
    the larger one, i.e. when the decomposition is not unique.
    """
    herm = float(np.max(np.abs(op.matrix - op.matrix.conj().T), initial=0.0))
    if herm > TOL_HERM:
        raise DomainError(f"operator not Hermitian (max |M - M^H| = {herm:.3e})")
    w = clamp_spectrum(op.eigenvalues)
    v = op.eigenvectors
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    keep = w >= tol
    w, v = w[keep], v[:, keep]
    degenerate = False
    if w.size > 1:
        gaps = -np.diff(w)
        degenerate = bool(np.any(gaps < DEGENERACY_TOL * w[:-1]))
    return SchattenDecomposition(op.basis, w, v, degenerate=degenerate)


def to_classical(op: DensityOperator) -> ClassicalDistribution:
    m = op.matrix
    off = m - np.diag(np.diag(m))
    mass = float(np.sum(np.abs(off)))
    if mass >= TOL_DIAG:
        raise RepresentationError(f"off-diagonal mass {mass:.3e} too large for a classical state")
    probs = {}
    for i, p in enumerate(np.diag(m).real):
        if p != 0.0:
            probs[op.basis.occupation(i)] = float(p)
    return ClassicalDistribution(op.basis, probs, validate=False)


def from_classical(dist: ClassicalDistribution) -> DensityOperator:
    diag = np.zeros(dist.basis.dim)
    for occ, p in dist.items():
        diag[dist.basis.index(occ)] += p
    return DensityOperator(dist.basis, np.diag(diag), diagonal_hint=True, validate=False)
