"""Von Neumann entropy, Umegaki relative entropy and Ohya mutual entropy.

All values are in nats. Relative entropies may be infinite; they are
returned as ``EntropyValue`` so the infinite branch is explicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from . import channel as _channel
from .errors import ConsistencyError, DomainError
from .fock import (
    DEGENERACY_TOL,
    ClassicalDistribution,
    DensityOperator,
    SchattenDecomposition,
    clamp_spectrum,
    partial_trace,
    spectral_decompose,
    tensor,
)

KERNEL_TOL = 1e-10
BORDERLINE_TOL = 1e-12
LOG_FLOOR = 1e-300
NEG_SLACK = 1e-9


@dataclass(frozen=True)
class EntropyValue:
    value: float
    finite: bool = True
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.finite:
            object.__setattr__(self, "value", math.inf)
            return
        v = float(self.value)
        if v < -NEG_SLACK:
            raise ConsistencyError(f"negative entropy {v:.3e}")
        object.__setattr__(self, "value", max(v, 0.0))

    @classmethod
    def infinite(cls, *notes: str) -> EntropyValue:
        return cls(math.inf, finite=False, notes=tuple(notes))

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return format(self.value, ".17g") if self.finite else "inf"


def shannon(probs: Iterable[float]) -> float:
    """-sum p log p with 0 log 0 = 0."""
    return -sum(p * math.log(p) for p in probs if p > 0.0)


def _check_state(rho):
    if not isinstance(rho, (DensityOperator, ClassicalDistribution)):
        raise DomainError(f"expected a density operator, got {type(rho).__name__}")


def von_neumann(rho) -> EntropyValue:
    _check_state(rho)
    if isinstance(rho, ClassicalDistribution):
        return EntropyValue(shannon(rho.probs.values()))
    return EntropyValue(shannon(clamp_spectrum(rho.eigenvalues)))


def kl_divergence(
    p_items: Iterable[tuple[object, float]],
    q: Callable[[object], float],
    kernel_tol: float = 0.0,
) -> EntropyValue:
    """sum_x p(x) log(p(x)/q(x)) over the support of p.

    Entries with ``q <= kernel_tol`` count as the kernel of ``q``. For
    exactly represented distributions the default of 0 is right; a positive
    ``kernel_tol`` absorbs numerical noise. Total ``p`` mass in the kernel
    above ``KERNEL_TOL`` means the support condition fails.
    """
    total = 0.0
    kernel_mass = 0.0
    for x, px in p_items:
        if px <= 0.0:
            continue
        qx = q(x)
        if qx <= kernel_tol:
            kernel_mass += px
            continue
        total += px * (math.log(px) - math.log(qx))
    if kernel_mass > KERNEL_TOL or (kernel_tol == 0.0 and kernel_mass > 0.0):
        return EntropyValue.infinite(f"support violated (mass {kernel_mass:.3e})")
    return EntropyValue(total)


def relative_entropy(rho, sigma) -> EntropyValue:
    """Umegaki relative entropy ``Tr rho (log rho - log sigma)``.

    Diagonal and classical arguments are compared entrywise with an exact
    zero test for the support condition. Otherwise the support of ``sigma``
    is read off its spectrum: eigenvalues below ``KERNEL_TOL`` are kernel,
    and those in ``[BORDERLINE_TOL, KERNEL_TOL)`` are reported in ``notes``.
    """
    _check_state(rho)
    _check_state(sigma)
    if rho.basis != sigma.basis:
        raise DomainError(f"basis mismatch: {rho.basis} vs {sigma.basis}")
    if isinstance(rho, ClassicalDistribution) and isinstance(sigma, ClassicalDistribution):
        return kl_divergence(rho.items(), sigma.__getitem__)
    if isinstance(rho, ClassicalDistribution) or isinstance(sigma, ClassicalDistribution):
        raise DomainError("mixed classical/dense arguments; convert one side first")

    if rho.diagonal_hint and sigma.diagonal_hint:
        p, q = rho.diagonal(), sigma.diagonal()
        return kl_divergence(enumerate(p), q.__getitem__)

    w_r = clamp_spectrum(rho.eigenvalues)
    w_s = clamp_spectrum(sigma.eigenvalues)
    v_s = sigma.eigenvectors
    # <v_k| rho |v_k> for each eigenvector of sigma
    weights = np.einsum("ik,ij,jk->k", v_s.conj(), rho.matrix, v_s).real
    kernel = w_s < KERNEL_TOL
    notes = []
    borderline = kernel & (w_s >= BORDERLINE_TOL)
    if np.any(borderline):
        notes.append(f"{int(borderline.sum())} borderline eigenvalue(s) of sigma treated as kernel")
    kernel_mass = float(weights[kernel].sum())
    if kernel_mass > KERNEL_TOL:
        return EntropyValue.infinite(f"support violated (mass {kernel_mass:.3e})", *notes)
    supp = ~kernel
    cross = float(weights[supp] @ np.log(np.maximum(w_s[supp], LOG_FLOOR)))
    return EntropyValue(-shannon(w_r) - cross, notes=tuple(notes))


# --- compound states and mutual entropy -----------------------------------


@dataclass(frozen=True, eq=False)
class CompoundState:
    joint: DensityOperator
    marginal_in: DensityOperator
    marginal_out: DensityOperator
    product: DensityOperator
    decomposition: SchattenDecomposition


def _check_channel(decomp_basis, channel):
    if channel.n_max != decomp_basis.n_max:
        raise DomainError(f"channel n_max {channel.n_max} != state n_max {decomp_basis.n_max}")
    slots = getattr(channel, "slots", decomp_basis.slots)
    if slots != decomp_basis.slots:
        raise DomainError(f"channel acts on {slots} slots, state has {decomp_basis.slots}")


def compound_state(decomp: SchattenDecomposition, channel) -> CompoundState:
    """``sigma_E = sum_n w_n E_n (x) channel(E_n)`` plus the product ``rho (x) channel(rho)``."""
    _check_channel(decomp.basis, channel)
    joint = None
    for w, proj in decomp.terms:
        term = tensor(proj, _channel.apply(channel, proj)).matrix * w
        joint = term if joint is None else joint + term
    rho = DensityOperator(decomp.basis, decomp.reconstruct(), validate=False)
    out = _channel.apply(channel, rho)
    joint_basis = decomp.basis.with_slots(2 * decomp.basis.slots)
    return CompoundState(
        joint=DensityOperator(joint_basis, joint, validate=False),
        marginal_in=rho,
        marginal_out=out,
        product=tensor(rho, out),
        decomposition=decomp,
    )


@dataclass(frozen=True)
class Policy:
    """How the supremum over Schatten decompositions is approximated.

    ``canonical`` uses the eigensolver's decomposition (exact when the
    spectrum is nondegenerate). ``randomized`` additionally tries ``rounds``
    Haar-random rotations inside each degenerate eigenspace and keeps the
    largest value, so it is a lower bound on the true supremum.
    """

    kind: str = "canonical"
    rounds: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("canonical", "randomized"):
            raise DomainError(f"unknown policy {self.kind!r}")
        if self.kind == "randomized" and self.rounds < 1:
            raise DomainError("randomized policy needs rounds >= 1")
        if self.rounds < 0 or self.seed < 0:
            raise DomainError("rounds and seed must be nonnegative")

    @classmethod
    def canonical(cls) -> Policy:
        return cls()

    @classmethod
    def randomized(cls, rounds: int, seed: int = 0) -> Policy:
        return cls("randomized", rounds, seed)


CANONICAL = Policy()


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def degenerate_groups(weights: np.ndarray, tol: float = DEGENERACY_TOL) -> list[list[int]]:
    """Runs of consecutive (descending) weights closer than ``tol`` relative."""
    groups: list[list[int]] = []
    for i, w in enumerate(weights):
        if groups and weights[groups[-1][-1]] - w < tol * weights[groups[-1][-1]]:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def rotate_degenerate(
    decomp: SchattenDecomposition, rng: np.random.Generator
) -> SchattenDecomposition:
    """Another Schatten decomposition of the same operator."""
    order = np.argsort(-decomp.weights, kind="stable")
    w = decomp.weights[order].copy()
    v = decomp.vectors[:, order].copy()
    for g in degenerate_groups(w):
        if len(g) < 2:
            continue
        u = haar_unitary(len(g), rng)
        v[:, g] = v[:, g] @ u
        w[g] = w[g].mean()
    return SchattenDecomposition(decomp.basis, w, v, degenerate=True)


def candidate_decompositions(decomp: SchattenDecomposition, policy: Policy = CANONICAL):
    yield decomp
    if policy.kind == "randomized" and decomp.degenerate:
        rng = np.random.default_rng(policy.seed)
        for _ in range(policy.rounds):
            yield rotate_degenerate(decomp, rng)


def mutual_entropy(rho: DensityOperator, channel, policy: Policy = CANONICAL) -> EntropyValue:
    """``sup_E S(sigma_E, rho (x) channel(rho))`` over decompositions chosen by ``policy``."""
    if not isinstance(policy, Policy):
        raise DomainError(f"policy must be a Policy, got {policy!r}")
    _check_state(rho)
    decomp = spectral_decompose(rho)
    best = None
    for cand in candidate_decompositions(decomp, policy):
        cs = compound_state(cand, channel)
        val = relative_entropy(cs.joint, cs.product)
        if best is None or val.value > best.value:
            best = val
    return best


@dataclass(frozen=True)
class InequalityReport:
    mutual: float
    entropy_in: float
    entropy_out: float
    tol: float
    passed: bool

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}: 0 <= I={self.mutual:.12g} <= "
            f"min(S_in={self.entropy_in:.12g}, S_out={self.entropy_out:.12g})"
        )


def fundamental_inequality_check(
    rho: DensityOperator, channel, policy: Policy = CANONICAL, tol: float = 1e-9
) -> InequalityReport:
    i = mutual_entropy(rho, channel, policy).value
    s_in = von_neumann(rho).value
    s_out = von_neumann(_channel.apply(channel, rho)).value
    ok = -tol <= i <= min(s_in, s_out) + tol
    return InequalityReport(i, s_in, s_out, tol, ok)


def classical_mutual_information(
    prior: Mapping[object, float], likelihoods: Mapping[object, Mapping | ClassicalDistribution]
) -> float:
    """Shannon mutual information of a discrete channel, in nats."""
    if not isinstance(prior, Mapping):
        prior = dict(enumerate(prior))
    cond = {
        x: dict(lk.items()) if isinstance(lk, ClassicalDistribution) else dict(lk)
        for x, lk in likelihoods.items()
    }
    total = sum(prior.values())
    if abs(total - 1.0) > 1e-9:
        raise DomainError(f"prior sums to {total:.12g}")
    out: dict = {}
    for x, px in prior.items():
        for y, pyx in cond[x].items():
            out[y] = out.get(y, 0.0) + px * pyx
    mi = 0.0
    for x, px in prior.items():
        if px <= 0.0:
            continue
        for y, pyx in cond[x].items():
            if pyx > 0.0:
                mi += px * pyx * math.log(pyx / out[y])
    return mi


def partial_traces(cs: CompoundState) -> tuple[DensityOperator, DensityOperator]:
    """Reduced input and output states of the joint compound state."""
    s = cs.marginal_in.slots
    joint = cs.joint
    return (
        partial_trace(joint, range(s)),
        partial_trace(joint, range(s, 2 * s)),
    )
