"""Block compound states and per-symbol dynamical entropies.

A stationary i.i.d. source emits letter ``n`` (a rank-one projector ``E_n``
on the letter space) with probability ``w_n``. For a block of ``N`` symbols:

* input compound   ``sum_{n_0..n_{N-1}} prod w (x)_i E_{n_i}``
* output compound  ``(x)_i channel(rho_0)``
* joint compound   ``sum prod w ((x)_i E_{n_i}) (x) ((x)_i channel(E_{n_i}))``

``mutual_N`` is the relative entropy of the joint against the product of
input and output compounds; ``entropy_N`` is ``sum prod w S((x)E, (x)rho_0)``.
For i.i.d. sources both grow exactly linearly in ``N``, so the per-symbol
limit is a finite computation checked for additivity rather than
extrapolated.

Two evaluation paths exist. The classical path works on sparse
distributions over occupation tuples and applies when every letter is a
number state; the dense path works on full matrices and handles arbitrary
letters.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import channel as _channel
from .entropy import (
    CANONICAL,
    Policy,
    candidate_decompositions,
    degenerate_groups,
    kl_divergence,
    relative_entropy,
)
from .errors import CapacityError, ConsistencyError, DomainError, IdealModulatorError
from .fock import (
    ClassicalDistribution,
    DensityOperator,
    FockBasis,
    OccupationTuple,
    SchattenDecomposition,
    spectral_decompose,
    tensor,
    tensor_all,
)

SPARSE_CAP = 10**6
DENSE_CAP = 4096
ADDITIVITY_TOL = 1e-9
PATHS = ("auto", "classical", "dense")


@dataclass(frozen=True, eq=False)
class StationarySource:
    """Single-symbol ensemble of an i.i.d. (hence shift-invariant) source.

    Number-state letters are kept as occupation tuples so large letter
    spaces never need a dense matrix; ``decomposition`` and
    ``symbol_state`` are materialised on demand.
    """

    basis: FockBasis
    weights: tuple[float, ...]
    letters: tuple[OccupationTuple, ...] | None = None
    explicit_decomposition: SchattenDecomposition | None = None
    iid: bool = True

    def __post_init__(self):
        if not self.iid:
            raise DomainError("only i.i.d. product sources are supported")
        w = tuple(float(x) for x in self.weights)
        if any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-10:
            raise DomainError(f"letter weights {w} are not a probability vector")
        object.__setattr__(self, "weights", w)
        if self.letters is None and self.explicit_decomposition is None:
            raise DomainError("source needs letters or a decomposition")
        if self.letters is not None:
            letters = tuple(tuple(t) for t in self.letters)
            if len(letters) != len(w):
                raise DomainError("one occupation tuple per weight required")
            for t in letters:
                self.basis.check(t)
            if len(set(letters)) != len(letters):
                raise IdealModulatorError("letters share an occupation tuple")
            object.__setattr__(self, "letters", letters)

    @classmethod
    def from_letters(cls, basis, weights, occupations) -> StationarySource:
        pairs = [(w, tuple(t)) for w, t in zip(weights, occupations, strict=True) if w > 0]
        return cls(basis, tuple(w for w, _ in pairs), tuple(t for _, t in pairs))

    @classmethod
    def from_decomposition(cls, decomp: SchattenDecomposition) -> StationarySource:
        if decomp.is_number_diagonal():
            return cls(decomp.basis, tuple(decomp.weights), tuple(decomp.occupations()),
                       explicit_decomposition=decomp)
        return cls(decomp.basis, tuple(decomp.weights), explicit_decomposition=decomp)

    @classmethod
    def from_state(cls, rho: DensityOperator) -> StationarySource:
        return cls.from_decomposition(spectral_decompose(rho))

    @property
    def number_diagonal(self) -> bool:
        return self.letters is not None

    @property
    def size(self) -> int:
        return len(self.weights)

    @cached_property
    def decomposition(self) -> SchattenDecomposition:
        if self.explicit_decomposition is not None:
            return self.explicit_decomposition
        order = sorted(range(self.size), key=lambda i: -self.weights[i])
        w = np.array([self.weights[i] for i in order])
        v = np.zeros((self.basis.dim, self.size), dtype=complex)
        for col, i in enumerate(order):
            v[self.basis.index(self.letters[i]), col] = 1.0
        degenerate = any(len(g) > 1 for g in degenerate_groups(w))
        return SchattenDecomposition(self.basis, w, v, degenerate=degenerate)

    @cached_property
    def symbol_state(self) -> DensityOperator:
        _check_dense(self.basis.dim, "symbol state")
        return DensityOperator(self.basis, self.decomposition.reconstruct(), validate=False)

    @cached_property
    def classical_state(self) -> ClassicalDistribution:
        if not self.number_diagonal:
            raise DomainError("source letters are not number states")
        return ClassicalDistribution(self.basis, dict(zip(self.letters, self.weights)))


@dataclass(frozen=True)
class BlockResult:
    N: int
    entropy_N: float
    mutual_N: float

    def __post_init__(self):
        if not (self.entropy_N + ADDITIVITY_TOL >= self.mutual_N >= -ADDITIVITY_TOL):
            raise ConsistencyError(
                f"block N={self.N}: expected entropy_N >= mutual_N >= 0, "
                f"got {self.entropy_N!r}, {self.mutual_N!r}"
            )

    @property
    def entropy_per_symbol(self) -> float:
        return self.entropy_N / self.N

    @property
    def mutual_per_symbol(self) -> float:
        return self.mutual_N / self.N


def _check_dense(dim: int, what: str):
    if dim > DENSE_CAP:
        raise CapacityError(f"{what} needs dense dimension {dim} > cap {DENSE_CAP}", dim)


def _letter_channel(channel, basis: FockBasis):
    if channel.n_max != basis.n_max:
        raise DomainError(f"channel n_max {channel.n_max} != letter n_max {basis.n_max}")
    if isinstance(channel, _channel.LiftedChannel):
        if channel.slots != basis.slots:
            raise DomainError(f"channel has {channel.slots} slots, letters have {basis.slots}")
        return channel
    return _channel.lift(channel, basis.slots)


def _resolve_path(src: StationarySource, path: str) -> str:
    if path not in PATHS:
        raise DomainError(f"path must be one of {PATHS}, got {path!r}")
    if path == "auto":
        return "classical" if src.number_diagonal else "dense"
    if path == "classical" and not src.number_diagonal:
        raise DomainError("classical path needs number-state letters")
    return path


def _check_N(N: int):
    if N < 1:
        raise DomainError(f"block length must be >= 1, got {N}")


# --- classical path --------------------------------------------------------


def _letter_outputs(src, lc) -> list[dict]:
    return [
        dict(_channel.apply_lifted(lc, ClassicalDistribution(src.basis, {t: 1.0}, validate=False)).items())
        for t in src.letters
    ]


def _power(table: dict, N: int) -> dict:
    """N-fold product of a distribution over tuples, keys concatenated."""
    cur = {(): 1.0}
    for _ in range(N):
        cur = {a + x: p * q for a, p in cur.items() for x, q in table.items()}
    return cur


def _classical_input(src, N) -> ClassicalDistribution:
    if src.size**N > SPARSE_CAP:
        raise CapacityError(f"input block support {src.size ** N} > cap {SPARSE_CAP}", src.size**N)
    return ClassicalDistribution(
        src.basis.with_slots(N * src.basis.slots), _power(dict(zip(src.letters, src.weights)), N)
    )


def _classical_output(src, lc, N) -> ClassicalDistribution:
    single = _channel.apply_lifted(lc, src.classical_state)
    if len(single) ** N > SPARSE_CAP:
        raise CapacityError(f"output block support {len(single) ** N} > cap {SPARSE_CAP}", len(single) ** N)
    return ClassicalDistribution(src.basis.with_slots(N * src.basis.slots), _power(dict(single.items()), N))


def _classical_joint(src, lc, N) -> ClassicalDistribution:
    outs = _letter_outputs(src, lc)
    support = sum(len(o) for o in outs) ** N
    if support > SPARSE_CAP:
        raise CapacityError(f"joint block support {support} > cap {SPARSE_CAP}", support)
    single = {(t, y): w * p for t, w, o in zip(src.letters, src.weights, outs) for y, p in o.items()}
    cur = {((), ()): 1.0}
    for _ in range(N):
        cur = {(a + t, b + y): p * q for (a, b), p in cur.items() for (t, y), q in single.items()}
    basis = src.basis.with_slots(2 * N * src.basis.slots)
    return ClassicalDistribution(basis, {a + b: p for (a, b), p in cur.items()})


# --- dense path ------------------------------------------------------------


def _dense_letters(src):
    d = src.decomposition
    return [float(w) for w in d.weights], [d.projector(i) for i in range(len(d))]


def _dense_input(src, N) -> DensityOperator:
    _check_dense(src.basis.dim**N, "input block")
    weights, projs = _dense_letters(src)
    out = None
    for idx in itertools.product(range(len(weights)), repeat=N):
        w = math.prod(weights[i] for i in idx)
        term = tensor_all(projs[i] for i in idx).matrix * w
        out = term if out is None else out + term
    return DensityOperator(src.basis.with_slots(N * src.basis.slots), out, validate=False)


def _dense_output(src, lc, N) -> DensityOperator:
    _check_dense(src.basis.dim**N, "output block")
    single = _channel.apply_lifted(lc, src.symbol_state)
    return tensor_all([single] * N)


def _dense_joint(src, lc, N) -> DensityOperator:
    _check_dense(src.basis.dim ** (2 * N), "joint block")
    weights, projs = _dense_letters(src)
    outs = [_channel.apply_lifted(lc, p) for p in projs]
    joint = None
    for idx in itertools.product(range(len(weights)), repeat=N):
        w = math.prod(weights[i] for i in idx)
        ins = tensor_all(projs[i] for i in idx)
        term = tensor(ins, tensor_all(outs[i] for i in idx)).matrix * w
        joint = term if joint is None else joint + term
    return DensityOperator(src.basis.with_slots(2 * N * src.basis.slots), joint, validate=False)


# --- public operations -----------------------------------------------------


def block_compound_input(src: StationarySource, N: int, path: str = "auto"):
    _check_N(N)
    if _resolve_path(src, path) == "classical":
        return _classical_input(src, N)
    return _dense_input(src, N)


def block_compound_output(src: StationarySource, channel, N: int, path: str = "auto"):
    _check_N(N)
    lc = _letter_channel(channel, src.basis)
    if _resolve_path(src, path) == "classical":
        return _classical_output(src, lc, N)
    return _dense_output(src, lc, N)


def block_joint_compound(src: StationarySource, channel, N: int, path: str = "auto"):
    _check_N(N)
    lc = _letter_channel(channel, src.basis)
    if _resolve_path(src, path) == "classical":
        return _classical_joint(src, lc, N)
    return _dense_joint(src, lc, N)


def _entropy_N(src, N, path, inp) -> float:
    total = 0.0
    if path == "classical":
        for idx in itertools.product(range(src.size), repeat=N):
            w = math.prod(src.weights[i] for i in idx)
            block = sum((src.letters[i] for i in idx), ())
            total += w * kl_divergence([(block, 1.0)], inp.__getitem__).value
        return total
    weights, projs = _dense_letters(src)
    for idx in itertools.product(range(len(weights)), repeat=N):
        w = math.prod(weights[i] for i in idx)
        total += w * relative_entropy(tensor_all(projs[i] for i in idx), inp).value
    return total


def _mutual_N(src, N, path, inp, out, joint) -> float:
    if path == "classical":
        k = N * src.basis.slots
        q = lambda key: inp[key[:k]] * out[key[k:]]  # noqa: E731
        return kl_divergence(joint.items(), q).value
    return relative_entropy(joint, tensor(inp, out)).value


def _functionals_fixed(src, channel, N, path) -> BlockResult:
    path = _resolve_path(src, path)
    lc = _letter_channel(channel, src.basis)
    if path == "classical":
        inp = _classical_input(src, N)
        out = _classical_output(src, lc, N)
        joint = _classical_joint(src, lc, N)
    else:
        inp = _dense_input(src, N)
        out = _dense_output(src, lc, N)
        joint = _dense_joint(src, lc, N)
    return BlockResult(N, _entropy_N(src, N, path, inp), _mutual_N(src, N, path, inp, out, joint))


def block_functionals(
    src: StationarySource, channel, N: int, policy: Policy = CANONICAL, path: str = "auto"
) -> BlockResult:
    """Block entropy and block mutual entropy for ``N`` symbols.

    With the randomized policy, letters are rotated within degenerate
    weight groups; rotated letters are generally not number states, so
    those candidates always go through the dense path.
    """
    _check_N(N)
    best_s = best_i = None
    for k, cand in enumerate(candidate_decompositions(src.decomposition, policy)):
        if k == 0:
            res = _functionals_fixed(src, channel, N, path)
        else:
            res = _functionals_fixed(StationarySource.from_decomposition(cand), channel, N, "dense")
        best_s = res.entropy_N if best_s is None else max(best_s, res.entropy_N)
        best_i = res.mutual_N if best_i is None else max(best_i, res.mutual_N)
    return BlockResult(N, best_s, best_i)


def block_table(
    src: StationarySource, channel, block_max: int = 3, policy: Policy = CANONICAL, path: str = "auto"
) -> list[BlockResult]:
    """Block results for N = 1..block_max, checked for exact additivity."""
    if block_max < 1:
        raise DomainError(f"block_max must be >= 1, got {block_max}")
    rows = [block_functionals(src, channel, N, policy, path) for N in range(1, block_max + 1)]
    s1, i1 = rows[0].entropy_per_symbol, rows[0].mutual_per_symbol
    for r in rows[1:]:
        ds = abs(r.entropy_per_symbol - s1)
        di = abs(r.mutual_per_symbol - i1)
        if ds > ADDITIVITY_TOL or di > ADDITIVITY_TOL:
            raise ConsistencyError(
                f"per-symbol values drift at N={r.N}: |dS|={ds:.3e}, |dI|={di:.3e}"
            )
    return rows


def dynamical_entropy(src: StationarySource, block_max: int = 3, path: str = "auto") -> float:
    if block_max < 1:
        raise DomainError(f"block_max must be >= 1, got {block_max}")
    path = _resolve_path(src, path)
    per_symbol = []
    for N in range(1, block_max + 1):
        inp = _classical_input(src, N) if path == "classical" else _dense_input(src, N)
        per_symbol.append(_entropy_N(src, N, path, inp) / N)
    drift = max(abs(s - per_symbol[0]) for s in per_symbol)
    if drift > ADDITIVITY_TOL:
        raise ConsistencyError(f"per-symbol entropy drifts by {drift:.3e}")
    return per_symbol[-1]


def dynamical_mutual(
    src: StationarySource, channel, block_max: int = 3, policy: Policy = CANONICAL, path: str = "auto"
) -> float:
    return block_table(src, channel, block_max, policy, path)[-1].mutual_per_symbol
