import json

import numpy as np
import pytest

from mfseries import (
    AlgebraContext,
    MultiSeries,
    approx_eq_series,
    constant_series,
    identity_series,
    moments_from_cumulants,
    mul,
    product_moment_triple,
    s_from_cumulants,
    s_transform,
    twisted_rhs,
    verify_twisted,
)
from mfseries.algebra import approx_eq_elem
from mfseries.freeprod import diag_ipsi, diag_phichi, lemma_residuals, psi2_residual
from mfseries.ncoracle import product_moments

from conftest import random_pair


def scalar_series(coeffs):
    return MultiSeries(AlgebraContext(1), [np.array([[c]], dtype=complex) for c in coeffs])


def scalar_coeffs(f):
    return np.array([c[0, 0] for c in f.coeffs])


def unit_cumulants(ctx, order):
    return constant_series(ctx.unit(), order)


FREE_POISSON = scalar_series([1, 1, 1, 1, 1])


def test_degree_zero_values(ctx2):
    c_x, c_y = random_pair(ctx2, 3, seed=1)
    t = product_moment_triple(c_x, c_y)
    ex, ey = c_x.constant, c_y.constant
    assert approx_eq_elem(t.phi.constant, ex * ey, 1e-15)
    assert approx_eq_elem(t.phi_y_left.constant, ey, 0)
    assert approx_eq_elem(t.phi_x_right.constant, ex, 0)


def test_unit_second_factor(ctx, rng):
    c_x, _ = random_pair(ctx, 4, seed=2)
    t = product_moment_triple(c_x, unit_cumulants(ctx, 4))
    phi_x = moments_from_cumulants(c_x)
    one = identity_series(ctx, 4)
    assert approx_eq_series(t.phi, phi_x, 1e-12)
    assert approx_eq_series(t.phi_y_left, 1 + one * phi_x, 1e-12)
    assert approx_eq_series(t.phi_x_right, phi_x, 1e-12)


def test_free_poisson_product_moments_are_fuss_catalan():
    # E[(xy)^k] = binom(3k, k) / (2k + 1) for two free Poisson(1) variables
    t = product_moment_triple(FREE_POISSON, FREE_POISSON)
    np.testing.assert_allclose(scalar_coeffs(t.phi), [1, 3, 12, 55, 273], atol=1e-10)


def test_free_poisson_pair_matches_oracle():
    t = product_moment_triple(FREE_POISSON, FREE_POISSON)
    for n in range(3):
        np.testing.assert_allclose(product_moments(FREE_POISSON, FREE_POISSON, n).coeffs,
                                   t.phi.coeffs[n], atol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_psi2_consistency(ctx, seed):
    c_x, c_y = random_pair(ctx, 4, seed)
    t = product_moment_triple(c_x, c_y)
    assert max(psi2_residual(t, c_y)) <= 1e-10


def test_twisted_rhs_degenerations(ctx2):
    c_x, c_y = random_pair(ctx2, 4, seed=3)
    s_x = s_from_cumulants(c_x)
    one = constant_series(ctx2.unit(), s_x.order)
    assert approx_eq_series(twisted_rhs(s_x, one), s_x, 1e-14)
    ctx1 = AlgebraContext(1)
    a, b = random_pair(ctx1, 5, seed=4)
    sa, sb = s_from_cumulants(a), s_from_cumulants(b)
    assert approx_eq_series(twisted_rhs(sa, sb), mul(sa, sb), 1e-12)
    assert approx_eq_series(twisted_rhs(sa, sb), mul(sb, sa), 1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_twisted_formula_random_pairs(ctx, seed):
    order = 4 if ctx.d == 3 else 5
    c_x, c_y = random_pair(ctx, order, seed)
    t = product_moment_triple(c_x, c_y)
    lhs = s_transform(t.phi)
    rhs = twisted_rhs(s_from_cumulants(c_x), s_from_cumulants(c_y))
    assert approx_eq_series(lhs, rhs, 1e-8)


def test_untwisted_product_fails_in_matrix_algebra(ctx2):
    # negative control: without the twist the identity is false for d > 1
    c_x, c_y = random_pair(ctx2, 4, seed=5)
    lhs = s_transform(product_moment_triple(c_x, c_y).phi)
    s_x, s_y = s_from_cumulants(c_x), s_from_cumulants(c_y)
    assert approx_eq_series(lhs, twisted_rhs(s_x, s_y), 1e-8)
    assert approx_eq_series(lhs, mul(s_y, s_x), 1e-8).max_dev > 1e-3
    assert approx_eq_series(lhs, mul(s_x, s_y), 1e-8).max_dev > 1e-3


def test_swapped_product_has_different_mean(ctx2):
    c_x, c_y = random_pair(ctx2, 2, seed=6)
    xy = product_moment_triple(c_x, c_y).phi.constant
    yx = product_moment_triple(c_y, c_x).phi.constant
    assert approx_eq_elem(yx, c_y.constant * c_x.constant, 1e-15)
    assert not approx_eq_elem(xy, yx, 1e-6)


def test_diagnostics_unit_case(ctx):
    c_y = unit_cumulants(ctx, 4)
    t = product_moment_triple(unit_cumulants(ctx, 4), c_y)
    assert max(diag_ipsi(t, c_y)) <= 1e-10
    assert max(diag_phichi(t, c_y)) <= 1e-10


def test_diagnostics_free_poisson():
    t = product_moment_triple(FREE_POISSON, FREE_POISSON)
    assert max(diag_ipsi(t, FREE_POISSON)) <= 1e-9
    assert max(diag_phichi(t, FREE_POISSON)) <= 1e-9


@pytest.mark.parametrize("seed", range(3))
def test_diagnostics_random(ctx2, seed):
    c_x, c_y = random_pair(ctx2, 5, seed)
    t = product_moment_triple(c_x, c_y)
    assert max(diag_ipsi(t, c_y)) <= 1e-8
    assert max(diag_phichi(t, c_y)) <= 1e-8
    for direction in lemma_residuals(c_x):
        assert max(direction) <= 1e-9


def test_verify_twisted_unit_pair(ctx):
    one = unit_cumulants(ctx, 3)
    r = verify_twisted(one, one)
    assert r.passed
    assert max(r.theorem) == 0.0


def test_verify_twisted_free_poisson():
    r = verify_twisted(FREE_POISSON, FREE_POISSON, tol=1e-9)
    assert r.passed
    s = s_from_cumulants(FREE_POISSON)
    lhs = s_transform(product_moment_triple(FREE_POISSON, FREE_POISSON).phi)
    assert approx_eq_series(lhs, mul(s, s), 1e-12)


def test_verify_twisted_headline_pair():
    r = verify_twisted(*random_pair(AlgebraContext(2), 5, seed=42), tol=1e-8, seed=42)
    assert r.passed
    assert len(r.theorem) == 5 and len(r.psi2) == 6
    assert len(r.ipsi) == 6 and len(r.phichi) == 5 and len(r.lemma) == 6


def test_report_pass_flag_tracks_tolerance(ctx2):
    r = verify_twisted(*random_pair(ctx2, 3, seed=8), tol=0.0)
    assert r.passed == (r.max_deviation() == 0.0)
    d = r.to_dict()
    assert "wall_time" not in d
    assert "wall_time" in r.to_dict(timing=True)
    json.dumps(d)
