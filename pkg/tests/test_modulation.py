import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import probability_vectors
from qmodulation import modulation as mod
from qmodulation.errors import CapacityError, DomainError, IdealModulatorError
from qmodulation.fock import FockBasis, DensityOperator, diagonal_state
from qmodulation.modulation import (
    Alphabet,
    ModulationScheme,
    brute_force_entropy,
    brute_force_mutual,
    check_ideal,
    closed_form_dynamical_entropy,
    closed_form_ppm_mutual,
    closed_form_pwm_mutual,
    compare_modulators,
    entropy_ratio,
    max_overlap,
    modulated_source,
    pam_state,
    ppm_state,
    pwm_state,
)


def test_alphabet():
    assert Alphabet.uniform(4).lam == (0.25,) * 4
    g = Alphabet.geometric(3, 0.5)
    assert g.lam == pytest.approx((4 / 7, 2 / 7, 1 / 7))
    with pytest.raises(DomainError):
        Alphabet((0.5, 0.6))
    with pytest.raises(DomainError):
        Alphabet(())
    with pytest.raises(DomainError):
        Alphabet.geometric(3, 1.0)


def test_scheme_shapes():
    assert ModulationScheme("ppm", 2, 3).kind == "PPM"
    s = ModulationScheme("PPM", 2, 3)
    assert (s.slots, s.n_max) == (3, 2)
    assert s.occupations() == [(2, 0, 0), (0, 2, 0), (0, 0, 2)]
    s = ModulationScheme("PWM", 1, 3)
    assert s.occupations() == [(1, 0, 0), (1, 1, 0), (1, 1, 1)]
    s = ModulationScheme("PAM", 1, 3)
    assert (s.slots, s.n_max) == (1, 2)
    assert s.occupations() == [(0,), (1,), (2,)]
    with pytest.raises(DomainError):
        ModulationScheme("QAM", 1, 2)
    with pytest.raises(DomainError):
        ModulationScheme("PPM", 0, 2)
    with pytest.raises(DomainError):
        ModulationScheme("PPM", 1, 1)
    with pytest.raises(DomainError):
        s.occupation(4)


def test_letter_states_are_orthogonal():
    for kind in ("PPM", "PWM", "PAM"):
        scheme = ModulationScheme(kind, 2, 3)
        projs = [scheme.letter_state(n) for n in range(1, 4)]
        assert max_overlap(projs) == 0.0
        check_ideal(projs)
    assert ppm_state(2, 1, 2).matrix[1, 1] == 1
    assert pwm_state(2, 1, 2).matrix[3, 3] == 1
    assert pam_state(1, 2).matrix[1, 1] == 1


def test_check_ideal_rejects_overlap():
    basis = FockBasis(1, 1)
    plus = DensityOperator(basis, np.full((2, 2), 0.5))
    with pytest.raises(IdealModulatorError):
        check_ideal([diagonal_state([1.0, 0.0]), plus])


def test_modulated_source_size_mismatch():
    with pytest.raises(DomainError):
        modulated_source(Alphabet.uniform(3), ModulationScheme("PPM", 1, 2))


def test_closed_forms_by_hand():
    a = Alphabet.uniform(2)
    assert closed_form_dynamical_entropy(a) == pytest.approx(math.log(2))
    assert closed_form_ppm_mutual(a, 0.5, 1) == pytest.approx(0.5 * math.log(2))
    # keep = 1/2: 0.5 * 0.5 ln2 + 0.25 * 0.5 ln2
    assert closed_form_pwm_mutual(a, 0.5, 1) == pytest.approx(0.375 * math.log(2))
    assert closed_form_pwm_mutual(a, 0.5, 1) == pytest.approx(0.25993019270997947, abs=1e-12)


@given(probability_vectors(2, 4), st.floats(0.0, 1.0), st.integers(1, 3))
def test_ppm_ratio_independent_of_lambda(p, eta, d):
    a = Alphabet(tuple(p))
    r = entropy_ratio(closed_form_ppm_mutual(a, eta, d), closed_form_dynamical_entropy(a))
    assert r == pytest.approx(1 - (1 - eta) ** d, abs=1e-12)


@given(probability_vectors(2, 4), st.floats(0.0, 1.0), st.integers(1, 3))
def test_closed_form_ordering(p, eta, d):
    a = Alphabet(tuple(p))
    assert closed_form_ppm_mutual(a, eta, d) >= closed_form_pwm_mutual(a, eta, d) - 1e-12


def test_entropy_ratio_rejects_zero_entropy():
    with pytest.raises(DomainError):
        entropy_ratio(0.0, 0.0)


def _pwm_oracle(eta):
    """Exhaustive Shannon MI for uniform M=2, d=1 PWM over the four outcomes."""
    def lik(occ, out):
        return math.prod(
            (eta if o else 1 - eta) if i else (1.0 if o == 0 else 0.0) for i, o in zip(occ, out)
        )
    letters = [(1, 0), (1, 1)]
    outs = list(itertools.product((0, 1), repeat=2))
    py = {y: sum(0.5 * lik(x, y) for x in letters) for y in outs}
    return sum(
        0.5 * lik(x, y) * math.log(lik(x, y) / py[y]) for x in letters for y in outs if lik(x, y) > 0
    )


def test_pwm_brute_force_matches_oracle():
    brute = brute_force_mutual(Alphabet.uniform(2), ModulationScheme("PWM", 1, 2), 0.5)
    assert brute == pytest.approx(_pwm_oracle(0.5), abs=1e-12)
    assert 0 <= brute <= math.log(2)


@pytest.mark.parametrize("lam", [(0.5, 0.5), (0.7, 0.2, 0.1)])
@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("eta", [0.25, 0.75])
def test_ppm_brute_matches_closed(lam, d, eta):
    a = Alphabet(lam)
    scheme = ModulationScheme("PPM", d, a.M)
    brute = brute_force_mutual(a, scheme, eta, block_max=2)
    assert brute == pytest.approx(closed_form_ppm_mutual(a, eta, d), abs=1e-9)
    assert brute_force_entropy(a, scheme, 2) == pytest.approx(closed_form_dynamical_entropy(a), abs=1e-9)


def test_pam_mutual_is_bounded():
    a = Alphabet.uniform(3)
    i = brute_force_mutual(a, ModulationScheme("PAM", 1, 3), 0.5, block_max=2)
    assert 0 <= i <= math.log(3)


def test_compare_modulators_report():
    rep = compare_modulators(Alphabet.uniform(2), 0.5, 1, block_max=2)
    assert rep.r_ppm_closed == pytest.approx(0.5)
    assert rep.r_pwm_closed == pytest.approx(0.375)
    assert rep.theorem5_pass and rep.theorem6_pass
    assert not rep.discrepancy("PPM")
    assert rep.discrepancy("PWM")
    assert any(n.startswith("PWM") for n in rep.discrepancy_notes)


def test_brute_force_capacity(monkeypatch):
    monkeypatch.setattr(mod, "BRUTE_FORCE_CAP", 10)
    with pytest.raises(CapacityError):
        brute_force_mutual(Alphabet.uniform(3), ModulationScheme("PPM", 2, 3), 0.5)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([0.1, 0.3, 0.5, 0.7, 0.9]), st.integers(1, 2))
def test_brute_force_orderings(eta, d):
    rep = compare_modulators(Alphabet((0.7, 0.2, 0.1)), eta, d, block_max=1)
    assert rep.theorem5_brute and rep.theorem6_brute
