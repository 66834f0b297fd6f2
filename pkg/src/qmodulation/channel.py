"""Vacuum-noise attenuation channel.

The channel is built from the beam-splitter isometry

    V0 |n> (x) |0>  =  sum_{j=0}^{n} C_j^n |j> (x) |n-j>,
    C_j^n = sqrt(n! / (j! (n-j)!)) alpha^j (-beta)^(n-j),

with ``alpha = sqrt(eta)`` and ``beta = sqrt(1 - eta)``. Tracing out the
loss mode gives Kraus operators ``A_k = (I (x) <k|) V0`` indexed by the
number of photons lost. Because loss never raises photon number, the
truncation at ``n_max`` is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .fock import ClassicalDistribution, DensityOperator, from_classical, to_classical


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0 or math.isnan(eta):
        raise DomainError(f"transition ratio eta={eta} outside [0, 1]")
    return eta


@lru_cache(maxsize=None)
def _log_factorials(n_max: int) -> np.ndarray:
    return np.array([math.lgamma(k + 1) for k in range(n_max + 1)])


@dataclass(frozen=True)
class AttenuationChannel:
    eta: float
    n_max: int

    def __post_init__(self):
        object.__setattr__(self, "eta", _check_eta(self.eta))
        if self.n_max < 0:
            raise DomainError(f"n_max must be >= 0, got {self.n_max}")

    @property
    def alpha(self) -> float:
        return math.sqrt(self.eta)

    @property
    def beta(self) -> float:
        return math.sqrt(1.0 - self.eta)

    def isometry(self) -> np.ndarray:
        return beam_splitter_isometry(self.n_max, self.eta)

    def kraus(self) -> KrausChannel:
        return kraus_from_isometry(self.isometry(), eta=self.eta)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    ops: tuple
    source: str = ""
    eta: float | None = None

    def __post_init__(self):
        ops = tuple(np.asarray(a, dtype=complex) for a in self.ops)
        if not ops:
            raise DomainError("a Kraus channel needs at least one operator")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1] or any(a.shape != shape for a in ops):
            raise DomainError("Kraus operators must be square and of equal shape")
        for a in ops:
            a.setflags(write=False)
        object.__setattr__(self, "ops", ops)

    @property
    def levels(self) -> int:
        return self.ops[0].shape[0]

    @property
    def n_max(self) -> int:
        return self.levels - 1

    def completeness_error(self) -> float:
        total = sum(a.conj().T @ a for a in self.ops)
        return float(np.max(np.abs(total - np.eye(self.levels))))


@dataclass(frozen=True, eq=False)
class LiftedChannel:
    per_slot: KrausChannel
    slots: int

    def __post_init__(self):
        if self.slots < 1:
            raise DomainError(f"slots must be >= 1, got {self.slots}")

    @property
    def n_max(self) -> int:
        return self.per_slot.n_max

    @property
    def eta(self) -> float | None:
        return self.per_slot.eta


def _coefficient(n: int, j: int, eta: float, lf: np.ndarray) -> float:
    """C_j^n assembled in log space; 0**0 is taken as 1."""
    k = n - j
    if (eta == 0.0 and j > 0) or (eta == 1.0 and k > 0):
        return 0.0
    log_mag = 0.5 * (lf[n] - lf[j] - lf[k])
    if j:
        log_mag += 0.5 * j * math.log(eta)
    if k:
        log_mag += 0.5 * k * math.log1p(-eta)
    return (-1.0) ** k * math.exp(log_mag)


def beam_splitter_isometry(n_max: int, eta: float) -> np.ndarray:
    """Matrix of ``V0`` restricted to vacuum in the noise mode.

    Shape ``((n_max+1)**2, n_max+1)``: column ``n`` is ``V0 |n, 0>`` in the
    output-mode (x) loss-mode basis, output mode most significant.
    """
    eta = _check_eta(eta)
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    lv = n_max + 1
    lf = _log_factorials(n_max)
    v = np.zeros((lv * lv, lv))
    for n in range(lv):
        for j in range(n + 1):
            v[j * lv + (n - j), n] = _coefficient(n, j, eta, lf)
    return v


def kraus_from_isometry(v0: np.ndarray, eta: float | None = None) -> KrausChannel:
    v0 = np.asarray(v0)
    lv = v0.shape[1]
    if v0.shape[0] != lv * lv:
        raise DomainError(f"isometry shape {v0.shape} is not (L^2, L)")
    blocks = v0.reshape(lv, lv, lv)  # (output m, lost k, input n)
    ops = [blocks[:, k, :] for k in range(lv)]
    ops = [a for a in ops if np.any(a)]
    return KrausChannel(tuple(ops), source=f"attenuation(eta={eta})", eta=eta)


def attenuation_channel(eta: float, n_max: int) -> KrausChannel:
    return AttenuationChannel(eta, n_max).kraus()


def apply(ch, state):
    """Apply a channel to a density operator or classical distribution."""
    if isinstance(ch, LiftedChannel):
        return apply_lifted(ch, state)
    if isinstance(state, ClassicalDistribution):
        if state.basis.slots != 1:
            return apply_lifted(lift(ch, state.basis.slots), state)
        if state.basis.n_max != ch.n_max:
            raise DomainError(f"channel n_max {ch.n_max} != state n_max {state.basis.n_max}")
        if ch.eta is not None:
            return thin_binomial(ch.eta, state)
        return to_classical(apply(ch, from_classical(state)))
    if state.slots != 1:
        return apply_lifted(lift(ch, state.slots), state)
    if state.dim != ch.levels:
        raise DomainError(f"channel acts on dim {ch.levels}, state has dim {state.dim}")
    rho = state.matrix
    out = sum(a @ rho @ a.conj().T for a in ch.ops)
    return DensityOperator(state.basis, out, validate=False)


def binomial_pmf(n: int, eta: float) -> list[float]:
    """P(j survivors of n) for independent per-photon survival ``eta``."""
    return [math.comb(n, j) * eta**j * (1.0 - eta) ** (n - j) for j in range(n + 1)]


def thin_binomial(eta: float, dist: ClassicalDistribution) -> ClassicalDistribution:
    """Binomial thinning of every slot count, independently per slot."""
    eta = _check_eta(eta)
    cur = dict(dist.probs)
    for slot in range(dist.basis.slots):
        nxt: dict = {}
        for occ, p in cur.items():
            if p == 0.0:
                continue
            for j, q in enumerate(binomial_pmf(occ[slot], eta)):
                if q == 0.0:
                    continue
                key = occ[:slot] + (j,) + occ[slot + 1 :]
                nxt[key] = nxt.get(key, 0.0) + p * q
        cur = nxt
    return ClassicalDistribution(dist.basis, cur, validate=False)


def lift(ch: KrausChannel, slots: int) -> LiftedChannel:
    return LiftedChannel(ch, slots)


def apply_lifted(lc: LiftedChannel, state):
    if state.basis.slots != lc.slots:
        raise DomainError(f"lifted channel has {lc.slots} slots, state has {state.basis.slots}")
    if state.basis.n_max != lc.n_max:
        raise DomainError(f"channel n_max {lc.n_max} != state n_max {state.basis.n_max}")
    if isinstance(state, ClassicalDistribution):
        if lc.eta is not None:
            return thin_binomial(lc.eta, state)
        return to_classical(apply_lifted(lc, from_classical(state)))

    s, lv = lc.slots, state.basis.levels
    t = state.matrix.reshape((lv,) * (2 * s))
    ops = np.stack(lc.per_slot.ops)
    k_ax, a_ax, b_ax, c_ax, d_ax = range(2 * s, 2 * s + 5)
    for i in range(s):
        t_idx = list(range(2 * s))
        t_idx[i], t_idx[s + i] = b_ax, c_ax
        out_idx = list(range(2 * s))
        out_idx[i], out_idx[s + i] = a_ax, d_ax
        t = np.einsum(ops, [k_ax, a_ax, b_ax], t, t_idx, ops.conj(), [k_ax, d_ax, c_ax], out_idx)
    dim = state.basis.dim
    return DensityOperator(state.basis, t.reshape(dim, dim), validate=False)


def identity_channel(n_max: int) -> KrausChannel:
    return attenuation_channel(1.0, n_max)
