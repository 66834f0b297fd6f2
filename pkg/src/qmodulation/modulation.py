"""Ideal pulse modulators and their transmission efficiency.

Letters are encoded into product photon-number states over ``M`` time
slots (one slot for PAM):

* PAM: letter k -> |k-1>
* PWM: letter n -> d photons in each of the first n slots, vacuum after
* PPM: letter n -> d photons in slot n, vacuum elsewhere

Two independent routes give the per-symbol mutual entropy through the
attenuation channel: the closed forms below, and a brute-force
evaluation of the block functionals on the modulated source. They share
no intermediate results; disagreements are reported, not resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import attenuation_channel
from .dynamics import StationarySource, dynamical_entropy, dynamical_mutual
from .errors import CapacityError, DomainError, IdealModulatorError
from .fock import DensityOperator, FockBasis, number_projection, product_projection

KINDS = ("PAM", "PWM", "PPM")
BRUTE_FORCE_CAP = 10**4
ORTHOGONALITY_TOL = 1e-12
ORDER_TOL = 1e-9
DISCREPANCY_TOL = 1e-6


@dataclass(frozen=True)
class Alphabet:
    lam: tuple[float, ...]

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lam)
        if len(lam) < 1:
            raise DomainError("alphabet needs at least one letter")
        if any(x < 0 for x in lam) or abs(sum(lam) - 1.0) > 1e-12:
            raise DomainError(f"letter distribution {lam} is not a probability vector")
        object.__setattr__(self, "lam", lam)

    @property
    def M(self) -> int:
        return len(self.lam)

    @classmethod
    def uniform(cls, M: int) -> Alphabet:
        return cls((1.0 / M,) * M)

    @classmethod
    def geometric(cls, M: int, p: float) -> Alphabet:
        """lambda_n proportional to p (1-p)^(n-1), truncated to M letters."""
        if not 0.0 < p < 1.0:
            raise DomainError(f"geometric parameter {p} outside (0, 1)")
        raw = [p * (1.0 - p) ** n for n in range(M)]
        total = sum(raw)
        return cls(tuple(x / total for x in raw))


@dataclass(frozen=True)
class ModulationScheme:
    kind: str
    d: int
    M: int

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in KINDS:
            raise DomainError(f"unknown modulation {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.d < 1:
            raise DomainError(f"pulse amplitude d must be >= 1, got {self.d}")
        if self.M < 2:
            raise DomainError(f"letter count M must be >= 2, got {self.M}")

    @property
    def slots(self) -> int:
        return 1 if self.kind == "PAM" else self.M

    @property
    def n_max(self) -> int:
        # loss never adds photons, so the largest emitted count is an exact cutoff
        return self.M - 1 if self.kind == "PAM" else self.d

    @property
    def basis(self) -> FockBasis:
        return FockBasis(self.slots, self.n_max)

    def occupation(self, n: int) -> tuple[int, ...]:
        """Occupation tuple of letter ``n`` (1-based)."""
        if not 1 <= n <= self.M:
            raise DomainError(f"letter {n} outside 1..{self.M}")
        if self.kind == "PAM":
            return (n - 1,)
        if self.kind == "PWM":
            return pwm_occupation(n, self.d, self.M)
        return ppm_occupation(n, self.d, self.M)

    def occupations(self) -> list[tuple[int, ...]]:
        return [self.occupation(n) for n in range(1, self.M + 1)]

    def letter_state(self, n: int) -> DensityOperator:
        return product_projection(self.occupation(n), self.basis)


def pwm_occupation(n: int, d: int, M: int) -> tuple[int, ...]:
    if not 1 <= n <= M:
        raise DomainError(f"PWM letter {n} outside 1..{M}")
    return tuple(d if j <= n else 0 for j in range(1, M + 1))


def ppm_occupation(n: int, d: int, M: int) -> tuple[int, ...]:
    if not 1 <= n <= M:
        raise DomainError(f"PPM letter {n} outside 1..{M}")
    return tuple(d if j == n else 0 for j in range(1, M + 1))


def pam_state(n: int, n_max: int) -> DensityOperator:
    return number_projection(n, FockBasis(1, n_max))


def pwm_state(n: int, d: int, M: int) -> DensityOperator:
    return product_projection(pwm_occupation(n, d, M), FockBasis(M, d))


def ppm_state(n: int, d: int, M: int) -> DensityOperator:
    return product_projection(ppm_occupation(n, d, M), FockBasis(M, d))


def max_overlap(projectors) -> float:
    """Largest |Tr E_n E_m| over distinct pairs."""
    worst = 0.0
    for i, a in enumerate(projectors):
        for b in projectors[i + 1 :]:
            worst = max(worst, abs(complex(np.trace(a.matrix @ b.matrix))))
    return worst


def check_ideal(projectors) -> None:
    ov = max_overlap(projectors)
    if ov >= ORTHOGONALITY_TOL:
        raise IdealModulatorError(f"letter images overlap: max |Tr E_n E_m| = {ov:.3e}")


def modulated_source(alphabet: Alphabet, scheme: ModulationScheme) -> StationarySource:
    if alphabet.M != scheme.M:
        raise DomainError(f"alphabet has {alphabet.M} letters, scheme expects {scheme.M}")
    occs = scheme.occupations()
    if len(set(occs)) != len(occs):
        raise IdealModulatorError(f"{scheme.kind} maps two letters to the same state")
    return StationarySource.from_letters(scheme.basis, alphabet.lam, occs)


# --- closed forms ------------------------------------------------------------


def _h(lam) -> float:
    return -sum(x * math.log(x) for x in lam if x > 0)


def closed_form_dynamical_entropy(alphabet: Alphabet) -> float:
    return _h(alphabet.lam)


def closed_form_pwm_mutual(alphabet: Alphabet, eta: float, d: int) -> float:
    """-sum_n (1 - (1-eta)^d)^n lambda_n log lambda_n, letters n = 1..M."""
    keep = 1.0 - (1.0 - eta) ** d
    return -sum(keep**n * x * math.log(x) for n, x in enumerate(alphabet.lam, start=1) if x > 0)


def closed_form_ppm_mutual(alphabet: Alphabet, eta: float, d: int) -> float:
    return (1.0 - (1.0 - eta) ** d) * _h(alphabet.lam)


def entropy_ratio(mutual: float, entropy: float) -> float:
    if entropy <= 0.0:
        raise DomainError("entropy ratio undefined for a zero-entropy source")
    return mutual / entropy


# --- brute force -------------------------------------------------------------


def _check_brute_capacity(scheme: ModulationScheme):
    dim = scheme.basis.dim
    if dim > BRUTE_FORCE_CAP:
        raise CapacityError(
            f"{scheme.kind} d={scheme.d} M={scheme.M}: letter space dim {dim} > {BRUTE_FORCE_CAP}",
            dim,
        )


def brute_force_mutual(
    alphabet: Alphabet, scheme: ModulationScheme, eta: float, block_max: int = 3
) -> float:
    """Per-symbol mutual entropy from the block functionals of the modulated source."""
    _check_brute_capacity(scheme)
    src = modulated_source(alphabet, scheme)
    ch = attenuation_channel(eta, scheme.n_max)
    return dynamical_mutual(src, ch, block_max=block_max, path="classical")


def brute_force_entropy(alphabet: Alphabet, scheme: ModulationScheme, block_max: int = 3) -> float:
    _check_brute_capacity(scheme)
    return dynamical_entropy(modulated_source(alphabet, scheme), block_max=block_max, path="classical")


@dataclass(frozen=True)
class ComparisonReport:
    eta: float
    d: int
    M: int
    lam: tuple[float, ...]
    S_tilde: float
    S_ppm_brute: float
    S_pwm_brute: float
    I_ppm_closed: float
    I_pwm_closed: float
    I_ppm_brute: float
    I_pwm_brute: float
    r_ppm_closed: float
    r_pwm_closed: float
    r_ppm_brute: float
    r_pwm_brute: float
    theorem5_closed: bool
    theorem5_brute: bool
    theorem6_closed: bool
    theorem6_brute: bool
    discrepancy_notes: tuple[str, ...] = field(default=())

    @property
    def theorem5_pass(self) -> bool:
        return self.theorem5_closed and self.theorem5_brute

    @property
    def theorem6_pass(self) -> bool:
        return self.theorem6_closed and self.theorem6_brute

    def discrepancy(self, kind: str) -> bool:
        closed = getattr(self, f"I_{kind.lower()}_closed")
        brute = getattr(self, f"I_{kind.lower()}_brute")
        return abs(closed - brute) > DISCREPANCY_TOL


def compare_modulators(
    alphabet: Alphabet, eta: float, d: int, block_max: int = 3
) -> ComparisonReport:
    M = alphabet.M
    ppm = ModulationScheme("PPM", d, M)
    pwm = ModulationScheme("PWM", d, M)

    s = closed_form_dynamical_entropy(alphabet)
    i_ppm_c = closed_form_ppm_mutual(alphabet, eta, d)
    i_pwm_c = closed_form_pwm_mutual(alphabet, eta, d)

    s_ppm_b = brute_force_entropy(alphabet, ppm, block_max)
    s_pwm_b = brute_force_entropy(alphabet, pwm, block_max)
    i_ppm_b = brute_force_mutual(alphabet, ppm, eta, block_max)
    i_pwm_b = brute_force_mutual(alphabet, pwm, eta, block_max)

    r = {
        "ppm_closed": entropy_ratio(i_ppm_c, s),
        "pwm_closed": entropy_ratio(i_pwm_c, s),
        "ppm_brute": entropy_ratio(i_ppm_b, s_ppm_b),
        "pwm_brute": entropy_ratio(i_pwm_b, s_pwm_b),
    }
    notes = []
    for kind, closed, brute in (("PPM", i_ppm_c, i_ppm_b), ("PWM", i_pwm_c, i_pwm_b)):
        if abs(closed - brute) > DISCREPANCY_TOL:
            notes.append(
                f"{kind} eta={eta} d={d} M={M}: closed form {closed!r} vs brute force {brute!r}"
            )
    for kind, sb in (("PPM", s_ppm_b), ("PWM", s_pwm_b)):
        if abs(sb - s) > DISCREPANCY_TOL:
            notes.append(f"{kind} entropy: closed form {s!r} vs brute force {sb!r}")

    return ComparisonReport(
        eta=eta, d=d, M=M, lam=alphabet.lam,
        S_tilde=s, S_ppm_brute=s_ppm_b, S_pwm_brute=s_pwm_b,
        I_ppm_closed=i_ppm_c, I_pwm_closed=i_pwm_c,
        I_ppm_brute=i_ppm_b, I_pwm_brute=i_pwm_b,
        r_ppm_closed=r["ppm_closed"], r_pwm_closed=r["pwm_closed"],
        r_ppm_brute=r["ppm_brute"], r_pwm_brute=r["pwm_brute"],
        theorem5_closed=i_ppm_c >= i_pwm_c - ORDER_TOL,
        theorem5_brute=i_ppm_b >= i_pwm_b - ORDER_TOL,
        theorem6_closed=r["ppm_closed"] >= r["pwm_closed"] - ORDER_TOL,
        theorem6_brute=r["ppm_brute"] >= r["pwm_brute"] - ORDER_TOL,
        discrepancy_notes=tuple(notes),
    )
