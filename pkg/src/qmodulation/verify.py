"""Self-check suites behind ``qmodulation verify``.

Each check returns a ``CheckResult``; ``WARN`` marks findings that are
reported but do not fail the run (the PWM closed-form probe).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import channel as ch
from .dynamics import block_functionals, block_table
from .entropy import (
    classical_mutual_information,
    fundamental_inequality_check,
    relative_entropy,
    von_neumann,
)
from .fock import (
    ClassicalDistribution,
    FockBasis,
    diagonal_state,
    from_classical,
    maximally_mixed,
    number_projection,
    product_projection,
    to_classical,
)
from .modulation import (
    Alphabet,
    ModulationScheme,
    closed_form_ppm_mutual,
    closed_form_pwm_mutual,
    compare_modulators,
    modulated_source,
)

PASS, FAIL, WARN = "PASS", "FAIL", "WARN"
ETA_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
DISTRIBUTIONS = ((0.5, 0.5), (1 / 3, 1 / 3, 1 / 3), (0.7, 0.3), (0.7, 0.2, 0.1))


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{self.status}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _binomial_oracle(n, eta, n_max):
    out = np.zeros(n_max + 1)
    for j in range(n + 1):
        out[j] = math.comb(n, j) * eta**j * (1 - eta) ** (n - j)
    return np.diag(out)


def check_binomial_thinning(level):
    worst = 0.0
    for n_max in range(7):
        for eta in ETA_GRID:
            kc = ch.attenuation_channel(eta, n_max)
            for n in range(n_max + 1):
                out = ch.apply(kc, number_projection(n, FockBasis(1, n_max)))
                worst = max(worst, float(np.max(np.abs(out.matrix - _binomial_oracle(n, eta, n_max)))))
    ok = worst <= 1e-12
    return ok, f"max entrywise error {worst:.2e} (tol 1e-12)"


def check_kraus_completeness(level):
    worst = max(
        ch.attenuation_channel(eta, n_max).completeness_error()
        for n_max in range(7)
        for eta in ETA_GRID
    )
    return worst <= 1e-12, f"max |sum A^H A - I| {worst:.2e} (tol 1e-12)"


def check_entropy_units(level):
    problems = []
    for M in range(1, 9):
        s = von_neumann(maximally_mixed(FockBasis(1, M - 1))).value
        if abs(s - math.log(M)) > 1e-12:
            problems.append(f"S(I/{M})={s}")
    for n in range(3):
        if von_neumann(number_projection(n, FockBasis(1, 2))).value != 0.0:
            problems.append(f"S(|{n}><{n}|) != 0")
    rho = diagonal_state([0.2, 0.5, 0.3])
    if relative_entropy(rho, rho).value != 0.0:
        problems.append("S(rho, rho) != 0")
    if relative_entropy(diagonal_state([0, 1.0]), diagonal_state([1.0, 0])).finite:
        problems.append("support violation not infinite")
    return not problems, "; ".join(problems) or "pure, maximally mixed, self and support cases"


def check_fundamental_inequalities(level):
    rng = np.random.default_rng(20240601)
    count = 100 if level == "full" else 30
    failures = 0
    for _ in range(count):
        dim = int(rng.integers(2, 5))
        p = rng.dirichlet(np.ones(dim))
        rho = diagonal_state(p)
        for eta in (0.25, 0.5, 0.75):
            rep = fundamental_inequality_check(rho, ch.attenuation_channel(eta, dim - 1))
            failures += not rep.passed
    return failures == 0, f"{failures} failures over {count} states x 3 eta"


def _grid_sources(d_list=(1, 2), M_list=(2, 3)):
    for lam in (None, (0.7, 0.2, 0.1)):
        for M in M_list:
            if lam is not None and len(lam) != M:
                continue
            alphabet = Alphabet(lam) if lam else Alphabet.uniform(M)
            for d in d_list:
                for kind in ("PPM", "PWM"):
                    yield alphabet, ModulationScheme(kind, d, M)


def check_block_additivity(level):
    block_max = 3 if level == "full" else 2
    n = 0
    for alphabet, scheme in _grid_sources():
        src = modulated_source(alphabet, scheme)
        block_table(src, ch.attenuation_channel(0.5, scheme.n_max), block_max)
        n += 1
    return True, f"{n} sources additive for N <= {block_max} (tol 1e-9)"


def check_ppm_closed_form(level):
    worst = 0.0
    for alphabet, scheme in _grid_sources():
        if scheme.kind != "PPM":
            continue
        for eta in (0.25, 0.5, 0.75):
            src = modulated_source(alphabet, scheme)
            brute = block_table(src, ch.attenuation_channel(eta, scheme.n_max), 2)[-1].mutual_per_symbol
            closed = closed_form_ppm_mutual(alphabet, eta, scheme.d)
            worst = max(worst, abs(brute - closed))
    return worst <= 1e-9, f"max |brute - closed| {worst:.2e} (tol 1e-9)"


def _eta_grid(level):
    return tuple(round(0.1 * k, 1) for k in range(1, 10)) if level == "full" else (0.25, 0.5, 0.75)


def check_theorem_orderings(level):
    block_max = 2 if level == "full" else 1
    bad = []
    ratio_err = 0.0
    for lam in ((0.5, 0.5), (1 / 3, 1 / 3, 1 / 3), (0.7, 0.2, 0.1)):
        alphabet = Alphabet(lam)
        for d in (1, 2):
            for eta in _eta_grid(level):
                rep = compare_modulators(alphabet, eta, d, block_max)
                ratio_err = max(ratio_err, abs(rep.r_ppm_closed - (1 - (1 - eta) ** d)))
                if not (rep.theorem5_pass and rep.theorem6_pass):
                    bad.append(f"eta={eta} d={d} lam={lam}")
    ok = not bad and ratio_err <= 1e-12
    detail = f"PPM ratio error {ratio_err:.2e}; " + (
        "orderings hold for closed and brute pairs" if not bad else "violated at " + ", ".join(bad)
    )
    return ok, detail


def check_pwm_probe(level):
    alphabet = Alphabet.uniform(2)
    scheme = ModulationScheme("PWM", 1, 2)
    closed = closed_form_pwm_mutual(alphabet, 0.5, 1)
    src = modulated_source(alphabet, scheme)
    brute = block_table(src, ch.attenuation_channel(0.5, 1), 2)[-1].mutual_per_symbol
    likelihoods = {
        n: dict(ch.thin_binomial(0.5, _point(scheme, n)).items()) for n in (1, 2)
    }
    oracle = classical_mutual_information({1: 0.5, 2: 0.5}, likelihoods)
    bounds = all(-1e-9 <= v <= math.log(2) + 1e-9 for v in (closed, brute))
    if not bounds or abs(brute - oracle) > 1e-9:
        return False, f"closed={closed!r} brute={brute!r} oracle={oracle!r}"
    detail = f"closed={closed:.6f} brute={brute:.6f} nats"
    if abs(closed - brute) > 1e-6:
        return WARN, detail + " (closed form and brute force disagree)"
    return True, detail


def _point(scheme, n):
    return ClassicalDistribution(scheme.basis, {scheme.occupation(n): 1.0})


def check_cross_path(level):
    worst = 0.0
    cases = [(1, 2), (2, 2)] if level == "fast" else [(1, 2), (2, 2), (1, 3)]
    for d, M in cases:
        for kind in ("PPM", "PWM"):
            scheme = ModulationScheme(kind, d, M)
            for lam in (Alphabet.uniform(M).lam, tuple(np.linspace(1, 2, M) / np.linspace(1, 2, M).sum())):
                src = modulated_source(Alphabet(lam), scheme)
                kc = ch.attenuation_channel(0.6, d)
                N = 2 if scheme.basis.dim**4 <= 1024 else 1
                for n in range(1, N + 1):
                    a = block_functionals(src, kc, n, path="classical")
                    b = block_functionals(src, kc, n, path="dense")
                    worst = max(worst, abs(a.mutual_N - b.mutual_N), abs(a.entropy_N - b.entropy_N))
    # a lifted channel on a product state, both representations
    basis = FockBasis(2, 2)
    rho = product_projection((2, 1), basis)
    lc = ch.lift(ch.attenuation_channel(0.3, 2), 2)
    dense = ch.apply_lifted(lc, rho)
    sparse = from_classical(ch.apply_lifted(lc, to_classical(rho)))
    worst = max(worst, float(np.max(np.abs(dense.matrix - sparse.matrix))))
    return worst <= 1e-10, f"max dense/classical gap {worst:.2e} (tol 1e-10)"


CHECKS = [
    ("binomial thinning law", check_binomial_thinning),
    ("Kraus completeness", check_kraus_completeness),
    ("entropy unit cases", check_entropy_units),
    ("fundamental inequalities", check_fundamental_inequalities),
    ("block additivity", check_block_additivity),
    ("PPM closed form vs brute force", check_ppm_closed_form),
    ("PPM ratio and PPM >= PWM orderings", check_theorem_orderings),
    ("PWM closed-form probe", check_pwm_probe),
    ("dense vs classical paths", check_cross_path),
]


def run_checks(level: str = "fast") -> list[CheckResult]:
    if level not in ("fast", "full"):
        raise ValueError(f"level must be fast or full, got {level!r}")
    results = []
    for name, fn in CHECKS:
        start = time.perf_counter()
        try:
            ok, detail = fn(level)
            status = WARN if ok == WARN else (PASS if ok else FAIL)
        except Exception as exc:  # a crashing check is a failed check
            status, detail = FAIL, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, status, detail, time.perf_counter() - start))
    return results

