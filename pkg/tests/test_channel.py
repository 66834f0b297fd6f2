import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import comb_thinning, etas, random_state
from qmodulation import channel as ch
from qmodulation.errors import DomainError
from qmodulation.fock import (
    ClassicalDistribution,
    DensityOperator,
    FockBasis,
    from_classical,
    number_projection,
    product_projection,
    to_classical,
)


@given(etas, st.integers(0, 6))
def test_isometry_columns_orthonormal(eta, n_max):
    v = ch.beam_splitter_isometry(n_max, eta)
    np.testing.assert_allclose(v.T @ v, np.eye(n_max + 1), atol=1e-12)


def test_isometry_coefficients_by_hand():
    # |1,0> -> alpha |1,0> - beta |0,1>
    eta = 0.3
    v = ch.beam_splitter_isometry(1, eta)
    assert v[2, 1] == pytest.approx(math.sqrt(eta))
    assert v[1, 1] == pytest.approx(-math.sqrt(1 - eta))
    # |2,0> -> eta |2,0> - sqrt(2 eta (1-eta)) |1,1> + (1-eta) |0,2>
    v = ch.beam_splitter_isometry(2, eta)
    assert v[2 * 3 + 0, 2] == pytest.approx(eta)
    assert v[1 * 3 + 1, 2] == pytest.approx(-math.sqrt(2 * eta * (1 - eta)))
    assert v[0 * 3 + 2, 2] == pytest.approx(1 - eta)


@given(etas, st.integers(0, 6))
def test_kraus_completeness(eta, n_max):
    assert ch.attenuation_channel(eta, n_max).completeness_error() <= 1e-12


@given(etas, st.integers(0, 6), st.data())
def test_number_state_thins_binomially(eta, n_max, data):
    n = data.draw(st.integers(0, n_max))
    out = ch.apply(ch.attenuation_channel(eta, n_max), number_projection(n, FockBasis(1, n_max)))
    expect = np.zeros(n_max + 1)
    expect[: n + 1] = comb_thinning(n, eta)
    np.testing.assert_allclose(out.matrix, np.diag(expect), atol=1e-12)


def test_endpoints():
    basis = FockBasis(1, 3)
    rho = random_state(np.random.default_rng(0), 3)
    same = ch.apply(ch.attenuation_channel(1.0, 3), rho)
    np.testing.assert_allclose(same.matrix, rho.matrix, atol=1e-14)
    vac = ch.apply(ch.attenuation_channel(0.0, 3), rho)
    np.testing.assert_allclose(vac.matrix, number_projection(0, basis).matrix, atol=1e-14)


def test_eta_domain():
    for bad in (-0.1, 1.1, float("nan")):
        with pytest.raises(DomainError):
            ch.attenuation_channel(bad, 2)
    with pytest.raises(DomainError):
        ch.AttenuationChannel(0.5, -1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), etas, st.integers(1, 3))
def test_output_is_a_state(seed, eta, n_max):
    rho = random_state(np.random.default_rng(seed), n_max)
    out = ch.apply(ch.attenuation_channel(eta, n_max), rho)
    DensityOperator(out.basis, out.matrix)  # validates Hermitian, trace 1, PSD


def test_photon_number_scales_with_eta(rng):
    rho = random_state(rng, 4)
    for eta in (0.1, 0.5, 0.9):
        out = ch.apply(ch.attenuation_channel(eta, 4), rho)
        assert out.mean_photon_number() == pytest.approx(eta * rho.mean_photon_number())


def test_channels_compose():
    # attenuation by eta1 then eta2 equals attenuation by eta1 * eta2
    rho = random_state(np.random.default_rng(7), 3)
    a = ch.apply(ch.attenuation_channel(0.4, 3), ch.apply(ch.attenuation_channel(0.7, 3), rho))
    b = ch.apply(ch.attenuation_channel(0.28, 3), rho)
    np.testing.assert_allclose(a.matrix, b.matrix, atol=1e-13)


def test_kraus_rejects_bad_ops():
    with pytest.raises(DomainError):
        ch.KrausChannel(())
    with pytest.raises(DomainError):
        ch.KrausChannel((np.eye(2), np.eye(3)))
    with pytest.raises(DomainError):
        ch.kraus_from_isometry(np.zeros((5, 2)))


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        ch.apply(ch.attenuation_channel(0.5, 2), number_projection(0, FockBasis(1, 3)))


def test_thin_binomial_per_slot():
    basis = FockBasis(2, 2)
    dist = ClassicalDistribution(basis, {(2, 1): 1.0})
    out = ch.thin_binomial(0.5, dist)
    assert out[(1, 0)] == pytest.approx(0.5 * 0.5)
    assert out[(2, 1)] == pytest.approx(0.25 * 0.5)
    assert sum(out.probs.values()) == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(etas, st.integers(1, 3), st.integers(1, 2), st.data())
def test_lifted_dense_matches_classical(eta, slots, n_max, data):
    basis = FockBasis(slots, n_max)
    occ = tuple(data.draw(st.integers(0, n_max)) for _ in range(slots))
    lc = ch.lift(ch.attenuation_channel(eta, n_max), slots)
    dense = ch.apply(lc, product_projection(occ, basis))
    sparse = ch.apply(lc, to_classical(product_projection(occ, basis)))
    np.testing.assert_allclose(dense.matrix, from_classical(sparse).matrix, atol=1e-12)


def test_lifted_matches_kron_of_kraus(rng):
    eta, n_max = 0.35, 1
    kc = ch.attenuation_channel(eta, n_max)
    basis = FockBasis(2, n_max)
    m = random_state(rng, n_max, slots=2)
    expect = sum(np.kron(a, b) @ m.matrix @ np.kron(a, b).conj().T for a in kc.ops for b in kc.ops)
    out = ch.apply(ch.lift(kc, 2), m)
    assert out.basis == basis
    np.testing.assert_allclose(out.matrix, expect, atol=1e-14)


def test_lifted_slot_mismatch():
    lc = ch.lift(ch.attenuation_channel(0.5, 1), 2)
    with pytest.raises(DomainError):
        ch.apply_lifted(lc, product_projection((0, 1, 0), FockBasis(3, 1)))
    with pytest.raises(DomainError):
        ch.lift(ch.attenuation_channel(0.5, 1), 0)
