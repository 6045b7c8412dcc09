import numpy as np
import pytest

from dhmeasure import conespline, localize, verify
from dhmeasure.rational import rat


def sphere(lam=2):
    return verify.sphere_model(lam)


def test_model_construction_and_halfdim():
    M = sphere()
    assert M.dim == 1
    assert M.halfdim == 1
    assert len(M.points) == 2


def test_validate_model_reports_chamber():
    rep = localize.validate_model(sphere())
    assert rep.ok
    assert rep.chamber_cone is not None


def test_zero_weight_rejected():
    with pytest.raises(localize.ModelValidationError):
        localize.model(1, [localize.fixed_point((0,), [(0,)])])


def test_regularity_detection():
    M = verify.projective_plane_model(2)
    assert localize.is_regular(M, (1, 2))
    # (1, -1) pairs to zero with the weight (-1, 1) at the second point
    assert not localize.is_regular(M, (1, 1))


def test_renormalize_flips_to_positive_pairing():
    M = sphere()
    R = localize.renormalize(M, (1,))
    for p in R.points:
        for w in p.factors:
            assert sum(a * b for a, b in zip(w, (1,))) > 0
        assert p.sign in (1, -1)


def test_nonregular_xi_raises():
    M = verify.projective_plane_model(2)
    with pytest.raises(localize.NonRegularXiError):
        localize.renormalize(M, (1, 1))


def test_dh_measure_sphere_is_flat_interval():
    M = sphere(2)
    S = localize.dh_measure(M, (1,))
    rng = np.random.default_rng(0)
    for t in rng.uniform(-1.9, 1.9, 40):
        assert conespline.spline_density(S, (t,)).value == pytest.approx(1.0)
    for t in (2.5, -2.5, 7.0):
        assert conespline.spline_density(S, (t,)).value == pytest.approx(0.0)


def test_chamber_independence_on_sphere():
    M = sphere(3)
    Sa = localize.dh_measure(M, (1,))
    Sb = localize.dh_measure(M, (-1,))
    rng = np.random.default_rng(1)
    for t in rng.uniform(-4, 4, 60):
        da = conespline.spline_density(Sa, (t,))
        db = conespline.spline_density(Sb, (t,))
        assert abs(da.value - db.value) <= 1e-12


def test_localization_sum_equals_spline_transform():
    M = verify.projective_plane_model(2)
    S = localize.dh_measure(M, (1, 2))
    region = localize.gamma_region(M, (1, 2))
    rng = np.random.default_rng(2)
    eta = np.array([float(x) for x in region.sample_interior()])
    for _ in range(12):
        im = eta * rng.uniform(0.6, 2.0)
        re = rng.uniform(-2, 2, 2)
        zeta = tuple(complex(a, b) for a, b in zip(re, im))
        closed = conespline.spline_laplace(S, zeta)
        loc = localize.localization_sum(M, zeta, (1, 2))
        assert abs(closed - loc) <= 1e-10 * abs(loc)


def test_localization_rejects_zeta_outside_tube():
    M = sphere(2)
    with pytest.raises(localize.NonRegularXiError):
        localize.localization_sum(M, (0.5 - 1.0j,), (1,))


def test_gamma_region_membership():
    M = sphere(2)
    region = localize.gamma_region(M, (1,))
    assert region.contains_im(region.sample_interior())
    assert not region.contains_im([-float(x) for x in region.sample_interior()])


def test_support_min():
    M = sphere(2)
    assert localize.support_min(M, (1,)) == -2
    assert localize.support_min(M, (-1,)) == -2


def test_support_min_flat_space():
    M = verify.flat_space_model([(1, 0), (0, 1)], (1, 1))
    assert localize.support_min(M, (1, 1)) == 2


def test_default_chamber_is_deterministic():
    M = verify.projective_plane_model(2)
    assert localize.default_chamber(M) == localize.default_chamber(M)
    S0 = localize.dh_measure(M)
    S1 = localize.dh_measure(M)
    assert S0.terms == S1.terms


def test_model_json_round_trip():
    M = verify.projective_plane_model(rat(5, 2))
    M2 = localize.model_from_json(localize.model_to_json(M))
    assert M2.dim == M.dim
    assert [p.image for p in M2.points] == [p.image for p in M.points]
    assert [p.weights for p in M2.points] == [p.weights for p in M.points]


def test_model_json_rejects_bad_halfdim():
    data = localize.model_to_json(sphere())
    data["halfdim"] = 5
    with pytest.raises(localize.ModelValidationError):
        localize.model_from_json(data)


def test_renormalized_cone_always_proper():
    # even a non-proper raw weight set renormalizes to a proper one
    M = localize.model(
        1,
        [
            localize.fixed_point((2,), [(-1,)]),
            localize.fixed_point((-2,), [(1,)]),
        ],
    )
    region = localize.gamma_region(M, (1,))
    from dhmeasure import polycone

    assert polycone.cone_is_proper(
        polycone.cone_from_generators(1, region.factors)
    )


def test_dh_measure_signs_sum_to_zero_on_compact_models():
    # densities vanish far away, so the term signs must cancel
    M = verify.sphere_product_model((2, 3))
    S = localize.dh_measure(M, (1, 2))
    assert sum(t.sign for t in S.terms) == 0
