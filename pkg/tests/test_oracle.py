import json
import math

import numpy as np
import pytest

from dhmeasure import conespline, localize, oracle, verify
from dhmeasure.conespline import spline, spline_term
from dhmeasure.oracle import (
    LatticeCountConfig,
    MonteCarloConfig,
    QuadratureConfig,
    lattice_count,
    montecarlo_pushforward,
    numeric_laplace,
    numeric_laplace_cone,
    numeric_laplace_spline,
    quadrature_convolution,
    truncated_circle_check,
)


def test_quadrature_single_weight():
    val, err = quadrature_convolution([(1,)], (7,))
    assert val == pytest.approx(1.0, abs=1e-9)


def test_quadrature_ramp():
    val, err = quadrature_convolution([(1,), (1,)], (3,))
    assert val == pytest.approx(3.0, abs=max(err, 1e-8))


def test_quadrature_triangle():
    val, err = quadrature_convolution([(1, 0), (0, 1), (1, 1)], (2, 5))
    assert val == pytest.approx(2.0, abs=max(err, 1e-7))


def test_quadrature_agrees_with_engine_density():
    rng = np.random.default_rng(4)
    factors = [(1, 0), (0, 1), (1, 1), (1, 2)]
    for _ in range(6):
        mu = tuple(rng.uniform(0.5, 4.0, 2))
        want = conespline.heaviside_density(factors, mu)
        got, err = quadrature_convolution(factors, mu)
        assert got == pytest.approx(want, abs=1e-6 * (1 + want) + err)


def test_quadrature_needs_spanning_factors():
    with pytest.raises(ValueError):
        quadrature_convolution([(1, 0)], (1, 0))


def test_numeric_laplace_halfline_indicator():
    # transform of the step at zeta = i is exactly 1
    val = numeric_laplace(
        lambda pt: 1.0 if pt[0] >= 0 else 0.0,
        (1j,),
        [(-1.0, 40.0)],
        QuadratureConfig(1e-11, 1e-11),
    )
    assert val == pytest.approx(1.0, abs=1e-8)


def test_numeric_laplace_empty_support():
    val = numeric_laplace(lambda pt: 0.0, (1j,), [(-1.0, 1.0)])
    assert val == pytest.approx(0.0, abs=1e-12)


def test_numeric_laplace_sphere_real_limit():
    # interval indicator, nearly real zeta: 2 sin(z lam) / z
    lam = 1.0
    z = 1.7 + 1e-6j
    val = numeric_laplace(
        lambda pt: 1.0 if abs(pt[0]) <= lam else 0.0,
        (z,),
        [(-1.5, 1.5)],
        QuadratureConfig(1e-11, 1e-11),
    )
    want = 2 * math.sin(1.7 * lam) / 1.7
    assert val == pytest.approx(want, abs=2e-6)


def test_numeric_laplace_spline_box_route_one_dim():
    S = spline(1, [spline_term(1, (2,), [(1,)])])
    z = 0.6 + 1.2j
    closed = conespline.spline_laplace(S, (z,))
    val, tail = numeric_laplace_spline(
        S, (z,), QuadratureConfig(1e-9, 1e-9), decay_log=26.0, method="box"
    )
    assert abs(val - closed) <= 1e-6 * abs(closed) + tail


def test_numeric_laplace_spline_mapped_matches_closed_form():
    S = spline(
        2,
        [
            spline_term(1, (0, 0), [(1, 0), (0, 1)]),
            spline_term(-1, (1, 1), [(1, 0), (0, 1)]),
        ],
    )
    zeta = (0.5 + 1.0j, -0.7 + 1.4j)
    closed = conespline.spline_laplace(S, zeta)
    val, tail = numeric_laplace_spline(S, zeta, method="mapped")
    assert abs(val - closed) <= 1e-9 * abs(closed) + tail


def test_mapped_route_handles_polynomial_multiplier():
    P = conespline.Polynomial.linear((1, 1))
    S = spline(2, [spline_term(1, (0, 0), [(1, 0), (0, 1)])], poly=P)
    zeta = (0.3 + 1.1j, 0.2 + 0.9j)
    # transform of (x+y) on the quadrant: sum of coordinate moments
    z1, z2 = zeta
    want = (1j / z1) ** 2 * (1j / z2) + (1j / z1) * (1j / z2) ** 2
    val, tail = numeric_laplace_spline(S, zeta, method="mapped")
    assert abs(val - want) <= 1e-9 * abs(want) + tail


def test_mapped_and_box_routes_agree():
    S = spline(
        2,
        [
            spline_term(1, (0, 0), [(1, 0), (0, 1), (1, 1)]),
        ],
    )
    zeta = (0.4 + 1.3j, -0.2 + 1.5j)
    mapped, mtail = numeric_laplace_spline(S, zeta, method="mapped")
    box, btail = numeric_laplace_spline(
        S, zeta, QuadratureConfig(1e-7, 1e-7), decay_log=14.0, method="box"
    )
    assert abs(mapped - box) <= 2e-3 * abs(mapped) + mtail + btail


def test_numeric_laplace_cone_quadrant():
    zeta = (0.5 + 1.0j, -0.7 + 1.4j)
    val = numeric_laplace_cone([(1, 0), (0, 1)], (0, 0), zeta)
    want = (1j / zeta[0]) * (1j / zeta[1])
    assert val == pytest.approx(want, abs=1e-8)


def test_numeric_laplace_cone_requires_damping():
    with pytest.raises(ValueError):
        numeric_laplace_cone([(1, 0), (0, -1)], (0, 0), (1j, 1j))


def test_lattice_count_examples():
    assert lattice_count([(1,), (1,)], (5,)) == 6
    assert lattice_count([(1, 0), (0, 1), (1, 1)], (7, 7)) == 8
    assert lattice_count([(1,)], (5,)) == 1
    assert lattice_count([(1,), (1,)], (-1,)) == 0


def test_lattice_count_scaling():
    cfg = LatticeCountConfig()
    base = lattice_count([(1,), (1,)], (4,), t=1, cfg=cfg)
    scaled = lattice_count([(1,), (1,)], (4,), t=3, cfg=cfg)
    assert base == 5
    assert scaled == 13


def test_lattice_count_rejects_non_integer():
    with pytest.raises(ValueError):
        lattice_count([(1.5,)], (3,))


def test_montecarlo_deterministic():
    cfg = MonteCarloConfig(seed=11, samples=20_000, bins=8)
    a = montecarlo_pushforward([(1,)], (0,), cfg)
    b = montecarlo_pushforward([(1,)], (0,), cfg)
    assert a.counts == b.counts
    assert a.density == b.density


def test_montecarlo_flat_on_halfline():
    cfg = MonteCarloConfig(seed=3, samples=400_000, bins=10, cutoff_radius=3.0)
    table = montecarlo_pushforward([(1,)], (0,), cfg)
    dens = np.array(table.density)
    sig = np.array(table.sigma)
    centers = np.array([c[0] for c in table.centers()])
    inside = centers < 3.5
    level = dens[inside].mean()
    assert np.all(np.abs(dens[inside] - level) <= 4 * sig[inside])


def test_montecarlo_table_json(tmp_path):
    cfg = MonteCarloConfig(seed=1, samples=10_000, bins=4)
    table = montecarlo_pushforward([(1, 0), (0, 1)], (0, 0), cfg)
    data = json.loads(json.dumps(table.to_json()))
    assert data["dim"] == 2
    assert data["samples"] == 10_000
    path = tmp_path / "table.csv"
    table.to_csv(path)
    header = path.read_text().splitlines()[0]
    assert header == "mu_1,mu_2,density,error_bound"


def test_circle_check_report():
    rep = truncated_circle_check(2, 0.4 + 1.0j, 9.0)
    assert rep["resolved_sign"] == 1
    assert rep["resolved_coeff"] == "1/alpha"
    assert rep["resolved_abs_diff"] <= 1e-8


def test_circle_check_boundary_decay():
    rep = truncated_circle_check(2, 0.5 + 0.6j, 45.0)
    fp = complex(*rep["fixed_point_term"])
    assert rep["boundary_magnitude"] / abs(fp) < 1e-6


def test_spline_tail_bound_shrinks():
    S = spline(1, [spline_term(1, (0,), [(1,)])])
    loose = oracle.spline_tail_bound(S, (1.0,), 10.0)
    tight = oracle.spline_tail_bound(S, (1.0,), 30.0)
    assert tight < loose
