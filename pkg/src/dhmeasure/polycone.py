"""Exact rational polyhedral sets and cones.

A polyhedral set is a finite intersection of half-spaces
{x : <normal, x> >= offset}; a cone is either an intersection of homogeneous
half-spaces ("halfspace form") or a nonnegative span of finitely many vectors
("generator form"). Every predicate is decided by exact rational LP or exact
linear algebra; there are no float tolerances anywhere in this module.

Duality is representation swapping: the dual of {x : <n_i, x> >= 0} is the
nonnegative span of the n_i, and vice versa. That keeps every operation free
of facet enumeration (extreme_rays exists for tests and consistency checks
on small instances only).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from . import lp
from .lp import EQ, GE, LE, LPResult, constraint
from .rational import (
    ONE,
    ZERO,
    is_zero_vec,
    mat_vec,
    nullspace,
    primitive,
    primitive_ray,
    rank,
    rat,
    rat_str,
    vdot,
    vec,
)


class InfeasibleSetError(ValueError):
    pass


class NotFullDimensionalError(ValueError):
    pass


@dataclass(frozen=True)
class HalfSpace:
    """{x : <normal, x> >= offset}."""

    normal: tuple
    offset: object

    def __post_init__(self):
        if is_zero_vec(self.normal):
            raise ValueError("half-space normal must be nonzero")


def halfspace(normal, offset=0) -> HalfSpace:
    return HalfSpace(vec(normal), rat(offset))


@dataclass(frozen=True)
class PolyhedralSet:
    dim: int
    halfspaces: tuple

    def __post_init__(self):
        for h in self.halfspaces:
            if len(h.normal) != self.dim:
                raise lp.DimensionMismatchError(
                    f"normal of length {len(h.normal)} in dimension {self.dim}"
                )

    def constraints(self):
        return [constraint(h.normal, GE, h.offset) for h in self.halfspaces]

    def contains(self, x) -> bool:
        x = vec(x)
        return all(vdot(h.normal, x) >= h.offset for h in self.halfspaces)


def polyhedron(dim, halfspaces) -> PolyhedralSet:
    return PolyhedralSet(dim, tuple(halfspace(n, c) for n, c in halfspaces))


@dataclass(frozen=True)
class Cone:
    """Halfspace form, generator form, or both (then consistency is checkable)."""

    dim: int
    normals: tuple | None = None
    generators: tuple | None = None

    def __post_init__(self):
        if self.normals is None and self.generators is None:
            raise ValueError("cone needs normals or generators")
        for group in (self.normals, self.generators):
            if group is not None:
                for v in group:
                    if len(v) != self.dim:
                        raise lp.DimensionMismatchError(
                            f"vector of length {len(v)} in dimension {self.dim}"
                        )

    def contains(self, x) -> bool:
        x = vec(x)
        if self.normals is not None:
            return all(vdot(n, x) >= 0 for n in self.normals)
        # generator form: is x a nonnegative combination?
        cons = []
        k = len(self.generators)
        for j in range(self.dim):
            cons.append(constraint([g[j] for g in self.generators], EQ, x[j]))
        for i in range(k):
            e = [ZERO] * k
            e[i] = ONE
            cons.append(constraint(e, GE, 0))
        return lp.feasibility(cons, dim=k).status == lp.OPTIMAL


def cone_from_normals(dim, normals) -> Cone:
    return Cone(dim, normals=tuple(vec(n) for n in normals))


def cone_from_generators(dim, generators) -> Cone:
    return Cone(dim, generators=tuple(vec(g) for g in generators))


def lp_feasible(constraints, dim=None) -> LPResult:
    """Exact feasibility with witness / Farkas certificate (re-export)."""
    return lp.feasibility(constraints, dim=dim)


def is_feasible(P: PolyhedralSet) -> bool:
    return lp_feasible(P.constraints(), dim=P.dim).status == lp.OPTIMAL


def feasible_point(P: PolyhedralSet):
    res = lp_feasible(P.constraints(), dim=P.dim)
    return res.x if res.status == lp.OPTIMAL else None


def asymptotic_cone(P: PolyhedralSet) -> Cone:
    """Recession directions: drop the offsets. Defined for empty P too."""
    return Cone(P.dim, normals=tuple(h.normal for h in P.halfspaces))


def dual_cone(C: Cone, verify: bool = True) -> Cone:
    """Dual of a halfspace-form cone is generated by its normals (and the
    dual of a generator-form cone is cut out by its generators)."""
    if C.normals is not None:
        out = Cone(C.dim, generators=C.normals)
        if verify:
            for g in out.generators:
                res = lp.solve_lp(g, _cone_constraints(C))
                if res.status != lp.OPTIMAL or res.objective != 0:
                    raise AssertionError("dual generator fails <g, C> >= 0")
        return out
    return Cone(C.dim, normals=C.generators)


def _cone_constraints(C: Cone):
    if C.normals is None:
        raise ValueError("halfspace form required")
    return [constraint(n, GE, 0) for n in C.normals]


def _cone_is_trivial(normals, dim, extra_eq=None) -> bool:
    """Is {x : <n,x> >= 0 for all n, extra_eq . x = 0} equal to {0}?

    A nonzero member can be scaled so some coordinate is +-1, so 2*dim
    feasibility LPs decide the question exactly.
    """
    base = [constraint(n, GE, 0) for n in normals]
    if extra_eq is not None:
        base.append(constraint(extra_eq, EQ, 0))
    for j in range(dim):
        for s in (ONE, -ONE):
            e = [ZERO] * dim
            e[j] = s
            cons = base + [constraint(e, EQ, 1)]
            if lp.feasibility(cons, dim=dim).status == lp.OPTIMAL:
                return False
    return True


def lineality_space(C: Cone):
    """Basis of the largest linear subspace inside a halfspace-form cone."""
    if C.normals is None:
        raise ValueError("halfspace form required")
    if not C.normals:
        return nullspace([], ncols=C.dim)
    return nullspace([list(n) for n in C.normals])


def cone_is_proper(C: Cone) -> bool:
    """No line through the origin; equivalently some functional is strictly
    positive on C minus the origin."""
    if C.normals is not None:
        return not lineality_space(C)
    gens = [g for g in C.generators if not is_zero_vec(g)]
    if not gens:
        return True
    return strict_positive_functional(gens) is not None


def strict_positive_functional(vectors):
    """Exact eta with <v, eta> >= 1 for every v, or None (Gordan's side)."""
    vectors = [vec(v) for v in vectors]
    if not vectors:
        return None
    d = len(vectors[0])
    cons = [constraint(v, GE, 1) for v in vectors]
    res = lp.feasibility(cons, dim=d)
    return res.x if res.status == lp.OPTIMAL else None


def is_proper(P: PolyhedralSet) -> bool:
    """Properness of the asymptotic cone. Errors when P is empty."""
    if not is_feasible(P):
        raise InfeasibleSetError("properness is undefined for an empty set")
    return cone_is_proper(asymptotic_cone(P))


def bounded_below(P: PolyhedralSet, xi) -> bool:
    """Is <xi, .> bounded from below on P? Decided by LP minimization."""
    xi = vec(xi)
    res = lp.solve_lp(xi, P.constraints())
    if res.status == lp.INFEASIBLE:
        raise InfeasibleSetError("boundedness is undefined for an empty set")
    return res.status == lp.OPTIMAL


def proper_projection_directions(P: PolyhedralSet, xi) -> bool:
    """Is x -> <xi, x> a proper map on P (preimages of compacts compact)?

    Exactly when the asymptotic cone meets ker xi only at 0. For pointed
    asymptotic cones this is the same as xi lying in +-Int of the dual cone.
    """
    xi = vec(xi)
    if not is_feasible(P):
        raise InfeasibleSetError("projection properness is undefined for an empty set")
    C = asymptotic_cone(P)
    return _cone_is_trivial(C.normals, P.dim, extra_eq=xi)


def is_compact(P: PolyhedralSet) -> bool:
    """Compact iff feasible with trivial asymptotic cone."""
    if not is_feasible(P):
        raise InfeasibleSetError("compactness check on an empty set")
    return _cone_is_trivial(asymptotic_cone(P).normals, P.dim)


def interior_point(C: Cone):
    """A point with every defining inequality strict, by slack maximization.

    Halfspace form: maximize t subject to <n_i, x> >= t, t <= 1; for a cone
    the optimum is 1 exactly when C is full-dimensional. Generator form: the
    sum of the generators, valid once they span. Deterministic given input
    order; the returned point is scaled to a primitive integer vector.
    """
    if C.normals is not None:
        d = C.dim
        if not C.normals:
            return tuple([ONE] + [ZERO] * (d - 1)) if d else ()
        cons = []
        for n in C.normals:
            cons.append(constraint(list(n) + [-ONE], GE, 0))
        tsel = [ZERO] * d + [ONE]
        cons.append(constraint(tsel, LE, 1))
        res = lp.solve_lp(tsel, cons, maximize=True)
        if res.status != lp.OPTIMAL or res.objective <= 0:
            raise NotFullDimensionalError("cone has empty interior")
        x = primitive_ray(res.x[:d])
        if any(vdot(n, x) <= 0 for n in C.normals):  # pragma: no cover
            raise AssertionError("interior point certificate failed")
        return x
    gens = [g for g in C.generators if not is_zero_vec(g)]
    if rank([list(g) for g in gens]) < C.dim:
        raise NotFullDimensionalError("generators do not span")
    total = [ZERO] * C.dim
    for g in gens:
        for j in range(C.dim):
            total[j] += g[j]
    return primitive_ray(total)


def extreme_rays(C: Cone, max_subsets: int = 20000):
    """Extreme rays of a pointed halfspace-form cone by active-set search.

    Exponential in principle; guarded by max_subsets and meant for test-size
    instances and cross-representation consistency checks.
    """
    if C.normals is None:
        raise ValueError("halfspace form required")
    if not cone_is_proper(C):
        raise ValueError("extreme rays of a non-pointed cone")
    d = C.dim
    normals = [list(n) for n in C.normals]
    if d == 0:
        return []
    if d == 1:
        rays = []
        for cand in ((ONE,), (-ONE,)):
            if all(vdot(n, cand) >= 0 for n in normals):
                rays.append(cand)
        return rays
    count = 0
    seen = set()
    rays = []
    for S in itertools.combinations(range(len(normals)), d - 1):
        count += 1
        if count > max_subsets:
            raise ValueError("too many subsets for extreme ray enumeration")
        ker = nullspace([normals[i] for i in S])
        if len(ker) != 1:
            continue
        for v in (ker[0], tuple(-x for x in ker[0])):
            if all(vdot(n, v) >= 0 for n in normals):
                p = primitive_ray(v)
                if p not in seen:
                    seen.add(p)
                    rays.append(p)
    return rays


def cone_consistency_check(C: Cone) -> bool:
    """When both representations are present, do they describe the same set?"""
    if C.normals is None or C.generators is None:
        return True
    H = Cone(C.dim, normals=C.normals)
    for g in C.generators:
        if not H.contains(g):
            return False
    G = Cone(C.dim, generators=C.generators)
    if cone_is_proper(H):
        for r in extreme_rays(H):
            if not G.contains(r):
                return False
        return True
    # non-pointed: sample the lineality space plus LP witnesses
    for v in lineality_space(H):
        if not G.contains(v) or not G.contains(tuple(-x for x in v)):
            return False
    for n in C.normals:
        res = lp.solve_lp(n, _cone_constraints(H))
        if res.status == lp.OPTIMAL and res.x is not None and not G.contains(res.x):
            return False
    return True


# ---------------------------------------------------------------------------
# serialization: rationals as strings like "5" or "-2/3" (decimals accepted)


def _vec_to_json(v):
    return [rat_str(x) for x in v]


def polyhedron_to_json(P: PolyhedralSet) -> dict:
    return {
        "dim": P.dim,
        "halfspaces": [
            {"normal": _vec_to_json(h.normal), "offset": rat_str(h.offset)}
            for h in P.halfspaces
        ],
    }


def polyhedron_from_json(data) -> PolyhedralSet:
    if isinstance(data, str):
        data = json.loads(data)
    dim = int(data["dim"])
    hs = [
        (tuple(rat(x) for x in h["normal"]), rat(h["offset"]))
        for h in data.get("halfspaces", [])
    ]
    return polyhedron(dim, hs)


def cone_to_json(C: Cone) -> dict:
    out = {"dim": C.dim}
    if C.normals is not None:
        out["halfspaces"] = [
            {"normal": _vec_to_json(n), "offset": "0"} for n in C.normals
        ]
    if C.generators is not None:
        out["generators"] = [_vec_to_json(g) for g in C.generators]
    return out


def cone_from_json(data) -> Cone:
    if isinstance(data, str):
        data = json.loads(data)
    dim = int(data["dim"])
    normals = None
    if "halfspaces" in data:
        for h in data["halfspaces"]:
            if rat(h.get("offset", 0)) != 0:
                raise ValueError("cone half-spaces must pass through the origin")
        normals = tuple(tuple(rat(x) for x in h["normal"]) for h in data["halfspaces"])
    generators = None
    if "generators" in data:
        generators = tuple(tuple(rat(x) for x in g) for g in data["generators"])
    return Cone(dim, normals=normals, generators=generators)
