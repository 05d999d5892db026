import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mfseries import (
    AlgebraContext,
    LinearTermSingular,
    MultiSeries,
    VariableSpec,
    approx_eq_series,
    chi,
    comp_inverse,
    compose,
    constant_series,
    cumulants_from_moments,
    identity_series,
    moments_from_cumulants,
    mul,
    mul_inverse,
    random_series,
    s_from_cumulants,
    s_transform,
    t_transform,
)
from mfseries.algebra import approx_eq_elem
from mfseries.freeprob import anchor_discrepancy, random_cumulants


def scalar_series(coeffs):
    return MultiSeries(AlgebraContext(1), [np.array([[c]], dtype=complex) for c in coeffs])


def scalar_coeffs(f):
    return np.array([c[0, 0] for c in f.coeffs])


def constant_variable_moments(c: complex, order: int) -> MultiSeries:
    # x = c 1 in M_1: E[x b_1 ... b_n x] = c^{n+1} b_1 ... b_n
    return scalar_series([c ** (n + 1) for n in range(order + 1)])


FREE_POISSON = scalar_series([1, 1, 1, 1, 1])


# --- moments <-> cumulants ----------------------------------------------------------

@pytest.mark.parametrize("path", ["C1", "C2"])
def test_low_degree_moments(ctx2, rng, path):
    c = random_cumulants(ctx2, 3, rng)
    phi = moments_from_cumulants(c, path)
    assert approx_eq_elem(phi[0](), c[0](), 0)
    b = ctx2.random_element(rng)
    mean = c.constant
    assert approx_eq_elem(phi[1](b), c[1](b) + mean * b * mean, 1e-14)


@pytest.mark.parametrize("path", ["C1", "C2"])
def test_free_poisson_moments_are_catalan(path):
    phi = moments_from_cumulants(FREE_POISSON.truncate(3), path)
    np.testing.assert_allclose(scalar_coeffs(phi), [1, 2, 5, 14], atol=1e-12)


def test_low_degree_cumulants(ctx2, rng):
    phi = random_series(ctx2, 3, rng, constant=ctx2.unit())
    c = cumulants_from_moments(phi)
    assert approx_eq_elem(c[0](), phi[0](), 0)
    b = ctx2.random_element(rng)
    mean = phi.constant
    assert approx_eq_elem(c[1](b), phi[1](b) - mean * b * mean, 1e-14)


def test_anchorings_agree(ctx, rng):
    phi = moments_from_cumulants(random_cumulants(ctx, 4, rng))
    assert anchor_discrepancy(phi) <= 1e-12
    # also on moment data that did not come from our own forward map
    raw = random_series(ctx, 4, rng, constant=ctx.unit())
    assert anchor_discrepancy(raw) <= 1e-12


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.sampled_from([1, 2, 3]))
def test_moment_cumulant_bijection(seed, d):
    ctx, rng = AlgebraContext(d), np.random.default_rng(seed)
    c = random_cumulants(ctx, 4, rng)
    phi1 = moments_from_cumulants(c, "C1")
    phi2 = moments_from_cumulants(c, "C2")
    assert approx_eq_series(phi1, phi2, 1e-10)
    assert approx_eq_series(cumulants_from_moments(phi1), c, 1e-10)
    assert approx_eq_series(cumulants_from_moments(phi1, "last"), c, 1e-10)
    phi = random_series(ctx, 4, rng, constant=ctx.unit())
    assert approx_eq_series(moments_from_cumulants(cumulants_from_moments(phi)), phi, 1e-10)


# --- chi / S / T -------------------------------------------------------------------

def test_chi_of_unit_variable():
    # I.Phi = z / (1 - z), inverse z / (1 + z)
    ch = chi(constant_variable_moments(1.0, 4))
    np.testing.assert_allclose(scalar_coeffs(ch), [0, 1, -1, 1, -1], atol=1e-14)


def test_chi_of_scalar_constant():
    # I.Phi = c z / (1 - c z), inverse w / (c (1 + w))
    c = 2.5
    ch = chi(constant_variable_moments(c, 4))
    np.testing.assert_allclose(scalar_coeffs(ch), [0, 1 / c, -1 / c, 1 / c, -1 / c], atol=1e-14)


def test_chi_is_two_sided_inverse(ctx, rng):
    phi = moments_from_cumulants(random_cumulants(ctx, 4, rng))
    one = identity_series(ctx, 4)
    ch = chi(phi)
    assert approx_eq_series(compose(one * phi, ch), one, 1e-10)
    assert approx_eq_series(compose(ch, one * phi), one, 1e-10)


def test_chi_needs_invertible_mean(ctx2, rng):
    phi = random_series(ctx2, 3, rng).replace(0, np.zeros((4, 1)))
    with pytest.raises(LinearTermSingular):
        chi(phi)
    with pytest.raises(LinearTermSingular):
        s_transform(phi)
    singular_mean = random_series(ctx2, 3, rng, constant=ctx2.matrix_unit(0, 0))
    with pytest.raises(LinearTermSingular):
        s_from_cumulants(singular_mean)


@pytest.mark.parametrize("c", [1.0, 2.5, 0.5 - 0.25j])
def test_s_and_t_of_scalar_constant(c):
    phi = constant_variable_moments(c, 4)
    np.testing.assert_allclose(scalar_coeffs(s_transform(phi)), [1 / c, 0, 0, 0], atol=1e-14)
    np.testing.assert_allclose(scalar_coeffs(t_transform(phi)), [c, 0, 0, 0], atol=1e-14)
    cums = scalar_series([c, 0, 0, 0, 0])
    np.testing.assert_allclose(scalar_coeffs(s_from_cumulants(cums)), [1 / c, 0, 0, 0], atol=1e-14)


def test_unit_variable_in_matrix_algebra(ctx):
    # x = 1: Phi_n(b_1..b_n) = b_1 ... b_n, the series 1 / (1 - I)
    one = identity_series(ctx, 4)
    phi = mul_inverse(1 - one)
    assert approx_eq_series(s_transform(phi), constant_series(ctx.unit(), 3), 1e-13)
    assert approx_eq_series(t_transform(phi), constant_series(ctx.unit(), 3), 1e-13)


def test_free_poisson_s_transform():
    # I.C = z / (1 - z)  =>  I.S = w / (1 + w)
    expected = [1, -1, 1, -1]
    np.testing.assert_allclose(scalar_coeffs(s_from_cumulants(FREE_POISSON)), expected, atol=1e-12)
    phi = moments_from_cumulants(FREE_POISSON)
    np.testing.assert_allclose(scalar_coeffs(s_transform(phi)), expected, atol=1e-12)


def test_s_transform_order_and_constant(ctx, rng):
    c = random_cumulants(ctx, 4, rng)
    s = s_transform(moments_from_cumulants(c))
    assert s.order == 3
    assert approx_eq_elem(s.constant, c.constant.inverse(), 1e-10)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.sampled_from([1, 2, 3]))
def test_lemma_and_dual_path(seed, d):
    ctx, rng = AlgebraContext(d), np.random.default_rng(seed)
    c = random_cumulants(ctx, 4, rng)
    s = s_from_cumulants(c)
    one = identity_series(ctx, 4)
    ic, is_ = one * c, one * s.pad(4)
    assert approx_eq_series(compose(ic, is_), one, 1e-9)
    assert approx_eq_series(compose(is_, ic), one, 1e-9)
    assert approx_eq_series(s, s_transform(moments_from_cumulants(c)), 1e-9)
    t = t_transform(moments_from_cumulants(c))
    assert approx_eq_series(mul(s, t), constant_series(ctx.unit(), 3), 1e-10)


def test_linear_term_of_I_times_C(ctx, rng):
    c = random_cumulants(ctx, 3, rng)
    lin = (identity_series(ctx, 3) * c)[1]
    for b in ctx.basis:
        assert approx_eq_elem(lin(b), b * c.constant, 0)


def test_random_cumulants_mean_is_well_conditioned(ctx):
    rng = np.random.default_rng(11)
    for _ in range(20):
        c = random_cumulants(ctx, 2, rng, scale=0.9)
        assert np.linalg.cond(c.constant.entries) <= 1e3
        assert np.max(np.abs(c.coeffs[1].real)) <= 0.9


# --- VariableSpec -------------------------------------------------------------------

def test_variable_spec_conversions(ctx2, rng):
    v = VariableSpec.random(ctx2, 4, rng)
    w = VariableSpec.from_moments(v.moments())
    assert approx_eq_elem(v.mean(), w.mean(), 0)
    assert approx_eq_series(w.cumulants(), v.cumulants(), 1e-10)
    assert approx_eq_series(w.s_transform(), v.s_transform(), 1e-9)
    assert approx_eq_series(w.t_transform(), v.t_transform(), 1e-9)
    assert v.has_invertible_mean()
    singular = VariableSpec.from_cumulants(v.series.replace(0, np.zeros((4, 1))))
    assert not singular.has_invertible_mean()


def test_variable_spec_validates():
    ctx = AlgebraContext(2)
    with pytest.raises(ValueError):
        VariableSpec(ctx, 3, "bogus", identity_series(ctx, 3))
    with pytest.raises(ValueError):
        VariableSpec(ctx, 2, "moments", identity_series(ctx, 3))


def test_comp_inverse_of_I_phi_exists_iff_mean_invertible(ctx2, rng):
    one = identity_series(ctx2, 3)
    good = random_series(ctx2, 3, rng, constant=ctx2.unit())
    comp_inverse(one * good)
    bad = random_series(ctx2, 3, rng, constant=ctx2.matrix_unit(1, 1))
    with pytest.raises(LinearTermSingular):
        comp_inverse(one * bad)
