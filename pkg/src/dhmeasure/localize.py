"""Fixed-point models and Duistermaat-Heckman synthesis.

A model records, for each torus fixed point p, the moment image and the list
of isotropy weights. Given a regular element xi of the torus Lie algebra,
every weight is flipped to pair positively with xi; the product of flip signs
becomes the sign of the point's Heaviside-convolution term. The resulting
signed cone spline is the pushforward measure, and its closed-form transform
matches the oscillatory fixed-point sum on the tube where both converge.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import polycone
from .conespline import SignedConeSpline, laplace_factor, spline_term
from .rational import is_zero_vec, rat_str, vdot, vec

MAX_MOMENT_CURVE_TRIES = 1000


class ModelValidationError(ValueError):
    pass


class NonRegularXiError(ValueError):
    pass


@dataclass(frozen=True)
class FixedPointDatum:
    label: str
    image: tuple  # moment image in the dual of the torus Lie algebra
    weights: tuple  # isotropy weights, one covector per normal direction


@dataclass(frozen=True)
class FixedPointModel:
    dim: int
    halfdim: int  # number of weights carried by every fixed point
    points: tuple
    energy_direction: tuple | None = None  # optional properness direction


def fixed_point(image, weights, label=None) -> FixedPointDatum:
    return FixedPointDatum(
        "" if label is None else str(label),
        vec(image),
        tuple(vec(w) for w in weights),
    )


def model(dim, points, energy_direction=None) -> FixedPointModel:
    pts = []
    for i, p in enumerate(points):
        if not isinstance(p, FixedPointDatum):
            p = fixed_point(*p)
        if not p.label:
            p = FixedPointDatum(f"p{i}", p.image, p.weights)
        pts.append(p)
    halfdim = len(pts[0].weights) if pts else 0
    M = FixedPointModel(
        int(dim),
        halfdim,
        tuple(pts),
        vec(energy_direction) if energy_direction is not None else None,
    )
    v = validate_model(M)
    if not v.ok:
        raise ModelValidationError("; ".join(v.issues))
    return M


@dataclass(frozen=True)
class ModelValidation:
    ok: bool
    issues: tuple
    chamber_cone: object = None  # dual cone of the renormalized weights
    hyperplanes: tuple = ()  # deduplicated weight normals (sign-canonical)


def validate_model(M: FixedPointModel) -> ModelValidation:
    issues = []
    if M.dim < 1:
        issues.append("dimension must be at least 1")
    if not M.points:
        issues.append("a model needs at least one fixed point")
    for p in M.points:
        if len(p.weights) != M.halfdim:
            issues.append("all fixed points must carry the same number of weights")
            break
    labels = [p.label for p in M.points]
    if len(set(labels)) != len(labels):
        issues.append("fixed-point labels must be distinct")
    for p in M.points:
        if len(p.image) != M.dim:
            issues.append(f"moment image of {p.label} has the wrong dimension")
        for w in p.weights:
            if len(w) != M.dim:
                issues.append(f"a weight of {p.label} has the wrong dimension")
            elif is_zero_vec(w):
                issues.append(f"{p.label} carries a zero weight")
    if M.energy_direction is not None and len(M.energy_direction) != M.dim:
        issues.append("energy direction has the wrong dimension")
    if issues:
        return ModelValidation(False, tuple(issues))
    if M.energy_direction is not None and not is_regular(M, M.energy_direction):
        return ModelValidation(
            False, ("energy direction pairs to zero with some weight",)
        )

    try:
        xi = _seed_direction(M)
        R = _renormalize_unchecked(M, xi)
    except NonRegularXiError as e:
        return ModelValidation(False, (str(e),))
    factors = _distinct_factors(R)
    if factors and polycone.strict_positive_functional(factors) is None:
        # unreachable for regular xi (xi itself is such a functional);
        # kept as a corruption guard
        return ModelValidation(False, ("renormalized weight cone is not proper",))
    chamber = polycone.cone_from_normals(M.dim, factors) if factors else None
    hyper = []
    for p in M.points:
        for w in p.weights:
            from .rational import primitive

            cw = primitive(w)
            if cw not in hyper:
                hyper.append(cw)
    return ModelValidation(True, (), chamber, tuple(hyper))


def is_regular(M: FixedPointModel, xi) -> bool:
    """Exact check that xi avoids every weight hyperplane."""
    xi = vec(xi)
    return all(vdot(w, xi) != 0 for p in M.points for w in p.weights)


def _seed_direction(M: FixedPointModel):
    """Deterministic regular element: the energy direction if it works, else
    the first point (1, t, t^2, ...) of the moment curve off all hyperplanes."""
    if M.energy_direction is not None and is_regular(M, M.energy_direction):
        return M.energy_direction
    for t in range(1, MAX_MOMENT_CURVE_TRIES):
        xi = vec([t**j for j in range(M.dim)])
        if is_regular(M, xi):
            return xi
    raise NonRegularXiError("could not find a regular element")


def default_chamber(M: FixedPointModel):
    """Canonical chamber point: renormalize once with a deterministic seed,
    then take a rational interior point of the dual cone. The result pairs
    strictly positively with every renormalized weight, hence is regular."""
    xi = _seed_direction(M)
    R = _renormalize_unchecked(M, xi)
    factors = _distinct_factors(R)
    if not factors:
        return xi
    cone = polycone.cone_from_normals(M.dim, factors)
    return polycone.interior_point(cone)


# ---------------------------------------------------------------------------
# renormalization and synthesis


@dataclass(frozen=True)
class RenormalizedPoint:
    label: str
    image: tuple
    factors: tuple  # weights flipped to pair positively with xi
    sign: int  # product of the flips


@dataclass(frozen=True)
class RenormalizedModel:
    dim: int
    chamber_point: tuple
    points: tuple


def _renormalize_unchecked(M: FixedPointModel, xi) -> RenormalizedModel:
    xi = vec(xi)
    pts = []
    for p in M.points:
        sign = 1
        factors = []
        for w in p.weights:
            pairing = vdot(w, xi)
            if pairing == 0:
                raise NonRegularXiError(
                    f"xi pairs to zero with a weight of {p.label}"
                )
            if pairing > 0:
                factors.append(w)
            else:
                factors.append(tuple(-x for x in w))
                sign = -sign
        pts.append(RenormalizedPoint(p.label, p.image, tuple(factors), sign))
    return RenormalizedModel(M.dim, xi, tuple(pts))


def _distinct_factors(R: RenormalizedModel):
    seen = []
    for p in R.points:
        for f in p.factors:
            if f not in seen:
                seen.append(f)
    return tuple(seen)


def renormalize(M: FixedPointModel, xi=None) -> RenormalizedModel:
    if xi is None:
        xi = default_chamber(M)
    R = _renormalize_unchecked(M, xi)
    factors = _distinct_factors(R)
    if factors and polycone.strict_positive_functional(factors) is None:
        raise ModelValidationError("renormalized weight cone is not proper")
    return R


def dh_measure(M: FixedPointModel, xi=None) -> SignedConeSpline:
    """Pushforward measure as a signed cone spline.

    xi picks the chamber; omitted, a deterministic interior point of the
    dual cone is used. Different regular xi give different-looking term data
    with the same total measure.
    """
    R = renormalize(M, xi)
    terms = tuple(spline_term(p.sign, p.image, p.factors) for p in R.points)
    return SignedConeSpline(M.dim, terms)


@dataclass(frozen=True)
class GammaRegion:
    """Tube data: transforms converge where Im(zeta) pairs strictly
    positively with every renormalized weight."""

    dim: int
    chamber_point: tuple
    factors: tuple  # deduplicated renormalized weights

    @property
    def cone(self):
        """The dual cone in halfspace form (boundary included)."""
        return polycone.cone_from_normals(self.dim, self.factors)

    def contains_im(self, eta) -> bool:
        eta = [float(x) for x in eta]
        return all(
            sum(float(a) * b for a, b in zip(f, eta)) > 0 for f in self.factors
        )

    def sample_interior(self):
        """A rational point strictly inside, scaled to primitive form."""
        return polycone.interior_point(self.cone)


def gamma_region(M: FixedPointModel, xi=None) -> GammaRegion:
    R = renormalize(M, xi)
    return GammaRegion(M.dim, R.chamber_point, _distinct_factors(R))


def localization_sum(M: FixedPointModel, zeta, xi=None, strict: bool = True) -> complex:
    """Oscillatory fixed-point sum with the raw weights.

    strict=True insists Im(zeta) lies in the tube attached to the chamber;
    strict=False evaluates the same expression at any regular zeta
    (analytic continuation, e.g. real-limit experiments).
    """
    zeta = tuple(complex(z) for z in zeta)
    if strict:
        g = gamma_region(M, xi)
        if not g.contains_im([z.imag for z in zeta]):
            raise NonRegularXiError("Im(zeta) is outside the convergence tube")
    total = 0.0 + 0.0j
    for p in M.points:
        phase = 1j * sum(float(x) * z for x, z in zip(p.image, zeta))
        total += np.exp(phase) * laplace_factor(p.weights, zeta)
    return complex(total)


def support_min(M: FixedPointModel, xi):
    """Exact minimum of <mu, xi> over the measure's support.

    Renormalizing by xi puts xi strictly inside the dual cone, so the
    support lies in finitely many xi-bounded-below cones and the minimum is
    attained at a moment image.
    """
    xi = vec(xi)
    renormalize(M, xi)  # raises if xi is not regular
    return min(vdot(p.image, xi) for p in M.points)


# ---------------------------------------------------------------------------
# serialization


def model_to_json(M: FixedPointModel) -> dict:
    out = {
        "dim": M.dim,
        "halfdim": M.halfdim,
        "points": [
            {
                "image": [rat_str(x) for x in p.image],
                "weights": [[rat_str(x) for x in w] for w in p.weights],
            }
            for p in M.points
        ],
    }
    if M.energy_direction is not None:
        out["xi0"] = [rat_str(x) for x in M.energy_direction]
    return out


def model_from_json(data) -> FixedPointModel:
    if isinstance(data, str):
        data = json.loads(data)
    pts = [fixed_point(p["image"], p["weights"]) for p in data["points"]]
    M = model(int(data["dim"]), pts, data.get("xi0"))
    if "halfdim" in data and int(data["halfdim"]) != M.halfdim:
        raise ModelValidationError("halfdim does not match the weight lists")
    return M
