import math
import os

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from dhmeasure import conespline
from dhmeasure.conespline import (
    DensityEvaluator,
    NonProperConeError,
    Polynomial,
    heaviside_density,
    laplace_factor,
    spline,
    spline_density,
    spline_laplace,
    spline_term,
    write_density_csv,
)
from dhmeasure.rational import rat


def test_heaviside_single_weight_is_flat():
    assert heaviside_density([(1,)], (7,)) == 1.0
    assert heaviside_density([(1,)], (-1,)) == 0.0


def test_heaviside_repeated_weight_is_linear():
    # two copies of the same 1-D weight convolve to a ramp
    assert heaviside_density([(1,), (1,)], (3,)) == pytest.approx(3.0)
    assert heaviside_density([(1,), (1,)], (0.5,)) == pytest.approx(0.5)


def test_heaviside_triangle_weights():
    factors = [(1, 0), (0, 1), (1, 1)]
    assert heaviside_density(factors, (2, 5)) == pytest.approx(2.0)
    assert heaviside_density(factors, (5, 2)) == pytest.approx(2.0)
    assert heaviside_density(factors, (-1, 1)) == 0.0


def test_heaviside_improper_cone_rejected():
    with pytest.raises(NonProperConeError):
        heaviside_density([(1,), (-1,)], (0,))


def test_laplace_factor_quadrant():
    z = (1j, 2j)
    val = laplace_factor([(1, 0), (0, 1)], z)
    assert val == pytest.approx((1j / z[0]) * (1j / z[1]))


def test_laplace_factor_single_halfline():
    # transform of the Heaviside step is i/zeta
    z = 0.7 + 1.3j
    assert laplace_factor([(1,)], (z,)) == pytest.approx(1j / z)


def test_spline_laplace_matches_term_sum():
    S = spline(
        1,
        [
            spline_term(1, (0,), [(1,)]),
            spline_term(-1, (2,), [(1,)]),
        ],
    )
    z = 0.4 + 1.1j
    expect = (1j / z) * (1 - np.exp(2j * z))
    assert spline_laplace(S, (z,)) == pytest.approx(expect)


def test_spline_density_interval():
    # difference of shifted half-lines is the indicator of [0, 2)
    S = spline(
        1,
        [
            spline_term(1, (0,), [(1,)]),
            spline_term(-1, (2,), [(1,)]),
        ],
    )
    assert spline_density(S, (1,)).value == pytest.approx(1.0)
    assert spline_density(S, (3,)).value == pytest.approx(0.0)
    assert spline_density(S, (-1,)).value == pytest.approx(0.0)


def test_spline_with_polynomial_multiplier():
    P = Polynomial.linear((1,))
    S = spline(1, [spline_term(1, (0,), [(1,)])], poly=P)
    assert spline_density(S, (3,)).value == pytest.approx(3.0)
    ev = DensityEvaluator(S)
    assert ev((rat(5, 2),)) == pytest.approx(2.5)


def test_polynomial_algebra():
    p = Polynomial.linear((2, 1))
    q = Polynomial.linear((0, 1))
    prod = p * q
    assert prod((1, 1)) == pytest.approx(3.0)
    assert prod.eval_exact((rat(1, 2), 2)) == 6
    assert Polynomial.product_of_linear([(1, 0), (1, 0)])((3, 9)) == 9.0


def test_density_evaluator_matches_pointwise():
    S = spline(
        2,
        [
            spline_term(1, (0, 0), [(1, 0), (0, 1), (1, 1)]),
        ],
    )
    ev = DensityEvaluator(S)
    rng = np.random.default_rng(3)
    for _ in range(25):
        mu = tuple(rng.uniform(-1, 4, 2))
        assert ev(mu) == pytest.approx(spline_density(S, mu).value, abs=1e-12)


def test_laplace_requires_damping_when_strict():
    S = spline(1, [spline_term(1, (0,), [(1,)])])
    with pytest.raises(conespline.NonRegularZetaError):
        spline_laplace(S, (0.5 - 1j,))
    # relaxed mode evaluates the analytic continuation
    val = spline_laplace(S, (2.0,), strict=False)
    assert val == pytest.approx(1j / 2.0)


def test_spline_json_round_trip():
    P = Polynomial.linear((1, 2))
    S = spline(
        2,
        [
            spline_term(1, (0, 0), [(1, 0), (0, 1)]),
            spline_term(-1, (rat(1, 2), 1), [(1, 0), (0, 1)]),
        ],
        poly=P,
    )
    S2 = conespline.spline_from_json(conespline.spline_to_json(S))
    assert S2.dim == S.dim
    assert S2.terms == S.terms
    assert S2.poly.coeffs == S.poly.coeffs


def test_write_density_csv_format(tmp_path):
    path = tmp_path / "density.csv"
    write_density_csv(path, 2, [((1.0, -0.0), -0.0, 1e-12)])
    lines = path.read_text().splitlines()
    assert lines[0] == "mu_1,mu_2,density,error_bound"
    assert lines[1] == "1.0,0.0,0.0,1e-12"
    # no stray temp files
    assert os.listdir(tmp_path) == ["density.csv"]


def test_term_validation():
    with pytest.raises(NonProperConeError):
        spline_term(1, (0, 0), [(1, 0), (-1, 0)])
    with pytest.raises(ValueError):
        spline_term(2, (0,), [(1,)])
    with pytest.raises(ValueError):
        spline(1, [spline_term(1, (0,), [(1,)]), spline_term(1, (0,), [])])


translation = st.tuples(
    st.integers(min_value=-5, max_value=5), st.integers(min_value=-5, max_value=5)
)


@given(translation)
def test_density_translation_equivariance(shift):
    factors = [(1, 0), (0, 1), (1, 2)]
    S0 = spline(2, [spline_term(1, (0, 0), factors)])
    S1 = spline(2, [spline_term(1, shift, factors)])
    probe = (rat(7, 3), rat(5, 2))
    shifted = (probe[0] + shift[0], probe[1] + shift[1])
    assert spline_density(S1, shifted).value == pytest.approx(
        spline_density(S0, probe).value
    )


@given(st.integers(min_value=1, max_value=6))
def test_laplace_scaling_in_one_dim(k):
    # k-fold convolution of the step has transform (i/zeta)^k
    S = spline(1, [spline_term(1, (0,), [(1,)] * k)])
    z = 0.3 + 0.9j
    assert spline_laplace(S, (z,)) == pytest.approx((1j / z) ** k)


def test_heaviside_rank_deficient_direction():
    # mu off the factor span is rejected rather than silently zero
    with pytest.raises(ValueError):
        heaviside_density([(1, 0)], (0, 1))


def test_density_error_bound_is_reported():
    S = spline(1, [spline_term(1, (0,), [(1,)])])
    dv = spline_density(S, (1,))
    assert dv.abs_error_bound >= 0.0
    assert math.isfinite(dv.abs_error_bound)
