"""Signed cone splines: translated Heaviside convolutions and their densities.

A term delta_base * H_{b1} * ... * H_{bn} pushes Lebesgue measure on the
positive orthant R^n_+ forward under s -> base + sum s_i b_i. Its density at
mu is the fiber-polytope volume

    vol_{n-r} {s >= 0 : B s = mu - base} / J,

where r = rank B and J is the product of the nonzero singular values of B
(the coarea factor; J^2 is a sum of squared r x r minors, so it is computed
exactly). Fiber vertices are enumerated exactly over the rationals from
active coordinate sets; only the final convex-hull volume is floating point.

All measures here are unit-normalized: H_b integrates f along t -> t*b with
plain dt and no 2*pi factors. The Monte-Carlo calibration suite in
dhmeasure.verify measures how Darboux-coordinate Lebesgue measure relates to
this normalization.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import tempfile
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import polycone
from .rational import (
    ONE,
    ZERO,
    det,
    is_zero_vec,
    nullspace,
    rank,
    rat,
    rat_str,
    rref,
    solve,
    vdot,
    vec,
    vsub,
)

REGULARITY_RTOL = 1e-12  # |<b, zeta>| must exceed this times |b||zeta|


class NonProperConeError(ValueError):
    pass


class NonRegularZetaError(ValueError):
    pass


class PureDeltaError(ValueError):
    pass


# ---------------------------------------------------------------------------
# polynomial multipliers


@dataclass(frozen=True)
class Polynomial:
    """Rational-coefficient polynomial as {exponent tuple: coefficient}."""

    dim: int
    coeffs: tuple  # tuple of (exponent tuple, Q) pairs, sorted

    @staticmethod
    def from_dict(dim, d) -> "Polynomial":
        items = tuple(sorted((tuple(int(e) for e in k), rat(v)) for k, v in d.items() if rat(v) != 0))
        return Polynomial(dim, items)

    @staticmethod
    def constant(dim, c) -> "Polynomial":
        c = rat(c)
        return Polynomial(dim, ((tuple([0] * dim), c),) if c != 0 else ())

    @staticmethod
    def linear(coeffs) -> "Polynomial":
        coeffs = vec(coeffs)
        dim = len(coeffs)
        items = []
        for j, c in enumerate(coeffs):
            if c != 0:
                e = [0] * dim
                e[j] = 1
                items.append((tuple(e), c))
        return Polynomial(dim, tuple(sorted(items)))

    @staticmethod
    def product_of_linear(factors):
        factors = [vec(f) for f in factors]
        dim = len(factors[0])
        p = Polynomial.constant(dim, 1)
        for f in factors:
            p = p * Polynomial.linear(f)
        return p

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        acc = {}
        for e1, c1 in self.coeffs:
            for e2, c2 in other.coeffs:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, ZERO) + c1 * c2
        return Polynomial(self.dim, tuple(sorted((e, c) for e, c in acc.items() if c != 0)))

    def eval_exact(self, point):
        point = vec(point)
        total = ZERO
        for e, c in self.coeffs:
            term = c
            for x, k in zip(point, e):
                for _ in range(k):
                    term *= x
            total += term
        return total

    def __call__(self, point) -> float:
        total = 0.0
        for e, c in self.coeffs:
            term = float(c)
            for x, k in zip(point, e):
                if k:
                    term *= float(x) ** k
            total += term
        return total

    def to_json(self) -> dict:
        return {",".join(str(k) for k in e): rat_str(c) for e, c in self.coeffs}

    @staticmethod
    def from_json(dim, data) -> "Polynomial":
        return Polynomial.from_dict(dim, {tuple(int(t) for t in k.split(",")): v for k, v in data.items()})


# ---------------------------------------------------------------------------
# spline types


@lru_cache(maxsize=4096)
def _proper_factor_cone(factors) -> bool:
    live = [f for f in factors if not is_zero_vec(f)]
    if len(live) != len(factors):
        return False
    if not live:
        return True
    return polycone.strict_positive_functional(live) is not None


@dataclass(frozen=True)
class ConeSplineTerm:
    sign: int
    base: tuple
    factors: tuple  # tuple of covectors; may be empty (pure point mass)

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("term sign must be +1 or -1")
        for f in self.factors:
            if len(f) != len(self.base):
                raise ValueError("factor/base dimension mismatch")
        if not _proper_factor_cone(self.factors):
            raise NonProperConeError("term factors do not span a proper cone")

    @property
    def dim(self) -> int:
        return len(self.base)


def spline_term(sign, base, factors) -> ConeSplineTerm:
    return ConeSplineTerm(int(sign), vec(base), tuple(vec(f) for f in factors))


@dataclass(frozen=True)
class SignedConeSpline:
    dim: int
    terms: tuple
    poly: Polynomial | None = None

    def __post_init__(self):
        ns = {len(t.factors) for t in self.terms}
        if len(ns) > 1:
            raise ValueError("all terms must have the same number of factors")
        for t in self.terms:
            if t.dim != self.dim:
                raise ValueError("term dimension mismatch")
        if self.poly is not None and self.poly.dim != self.dim:
            raise ValueError("polynomial dimension mismatch")

    @property
    def nfactors(self) -> int:
        return len(self.terms[0].factors) if self.terms else 0

    @property
    def poly_multiplier(self) -> Polynomial | None:
        return self.poly


def spline(dim, terms, poly=None) -> SignedConeSpline:
    return SignedConeSpline(dim, tuple(terms), poly)


@dataclass(frozen=True)
class DensityValue:
    value: float
    abs_error_bound: float


# ---------------------------------------------------------------------------
# exact-vertex density evaluation


def _factor_rows(factors, dim):
    """Rows of B (d x n) with columns the factors."""
    return [[f[j] for f in factors] for j in range(dim)]


def _pseudo_det_sq(rows, r):
    """Sum of squared r x r minors = squared product of nonzero singular values."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    total = ZERO
    for T in itertools.combinations(range(nrows), r):
        for S in itertools.combinations(range(ncols), r):
            sub = [[rows[i][j] for j in S] for i in T]
            d = det(sub)
            total += d * d
    return total


def _gram_det(vectors):
    g = [[vdot(a, b) for b in vectors] for a in vectors]
    return det(g)


def heaviside_density(factors, mu) -> float:
    """Density of H_{b1} * ... * H_{bn} at mu, unit normalization.

    Returns the density with respect to Lebesgue measure on the span of the
    factors (Hausdorff measure of the right dimension when the span is a
    proper subspace); 0.0 when the fiber is empty. Wall points are evaluated
    as-is. Raises NonProperConeError when the factor cone contains a line.
    """
    factors = tuple(vec(f) for f in factors)
    if not factors:
        raise PureDeltaError("a point mass has no density function")
    dim = len(factors[0])
    mu = vec(mu)
    if len(mu) != dim:
        raise ValueError("point/factor dimension mismatch")
    if not _proper_factor_cone(factors):
        raise NonProperConeError("factors do not span a proper cone")
    n = len(factors)
    if n > 12:
        raise ValueError("too many factors for exact vertex enumeration")

    rows = _factor_rows(factors, dim)
    s0 = solve(rows, mu)
    r = rank(rows)
    if s0 is None:
        if r < dim:
            raise ValueError("point lies outside the span of the factors")
        return 0.0
    J = math.sqrt(float(_pseudo_det_sq(rows, r)))
    m = n - r

    if m == 0:
        return (1.0 / J) if all(x >= 0 for x in s0) else 0.0

    kernel = nullspace(rows)
    # vertices: m active coordinates pinned to zero, solved in fiber coords
    verts_u = []
    seen = set()
    for S in itertools.combinations(range(n), m):
        M = [[kernel[b][i] for b in range(m)] for i in S]
        rhs = [-s0[i] for i in S]
        red, piv = rref([row + [v] for row, v in zip(M, rhs)])
        if len(piv) != m or m in piv:
            continue  # singular active set (or inconsistent): not a vertex
        u = [ZERO] * m
        for row_i, c in enumerate(piv):
            u[c] = red[row_i][m]
        s = list(s0)
        for b in range(m):
            if u[b] != 0:
                for i in range(n):
                    s[i] += u[b] * kernel[b][i]
        if all(x >= 0 for x in s):
            tu = tuple(u)
            if tu not in seen:
                seen.add(tu)
                verts_u.append(tu)
    if not verts_u:
        return 0.0

    gram = math.sqrt(float(_gram_det(kernel)))
    if m == 1:
        us = [u[0] for u in verts_u]
        uvol = float(max(us) - min(us))
    else:
        if len(verts_u) <= m:
            return 0.0
        pts = np.array([[float(x) for x in u] for u in verts_u])
        try:
            from scipy.spatial import ConvexHull

            uvol = float(ConvexHull(pts).volume)
        except Exception:
            return 0.0  # degenerate (flat) fiber polytope
    return uvol * gram / J


def spline_density(S: SignedConeSpline, mu) -> DensityValue:
    """Signed density of the spline at mu (poly multiplier applied)."""
    if S.nfactors == 0 and S.terms:
        raise PureDeltaError("point-mass spline has no density function")
    mu = vec(mu)
    total = 0.0
    spread = 0.0
    for t in S.terms:
        v = heaviside_density(t.factors, vsub(mu, t.base))
        total += t.sign * v
        spread += abs(v)
    pval = 1.0
    if S.poly is not None:
        pval = float(S.poly.eval_exact(mu))
        total *= pval
    # float roundoff in hull volumes, scaled by the cancellation mass
    err = 1e-12 * (1.0 + spread) * (1.0 + abs(pval))
    return DensityValue(total, err)


# ---------------------------------------------------------------------------
# Laplace transforms (closed form)


def _check_regular(factors, zeta):
    zn = math.sqrt(sum(abs(z) ** 2 for z in zeta))
    vals = []
    for f in factors:
        fb = [float(x) for x in f]
        p = sum(x * z for x, z in zip(fb, zeta))
        fn = math.sqrt(sum(x * x for x in fb))
        if abs(p) <= REGULARITY_RTOL * fn * zn:
            raise NonRegularZetaError(f"zeta is non-regular for factor {f}")
        vals.append(p)
    return vals


def _check_interior(factors, zeta):
    for f in factors:
        s = sum(float(x) * z.imag for x, z in zip(f, zeta))
        if s <= 0:
            raise NonRegularZetaError(
                "Im(zeta) is not strictly inside the dual of the factor cone"
            )


def laplace_factor(factors, zeta, require_interior: bool = False) -> complex:
    """(i)^n / prod <b_i, zeta>: the transform of H_{b1} * ... * H_{bn}.

    With require_interior, Im(zeta) must pair strictly positively with every
    factor (the open tube where the defining integral converges).
    """
    factors = tuple(vec(f) for f in factors)
    zeta = tuple(complex(z) for z in zeta)
    if require_interior:
        _check_interior(factors, zeta)
    vals = _check_regular(factors, zeta)
    out = 1j ** len(factors)
    for p in vals:
        out /= p
    return out


def spline_laplace(S: SignedConeSpline, zeta, strict: bool = True) -> complex:
    """Sum of sign * e^{i <base, zeta>} * laplace_factor per term.

    strict=True insists Im(zeta) lies in the common dual-cone interior of all
    terms; strict=False evaluates the same closed form anywhere regular
    (analytic continuation, e.g. real-limit samples).
    """
    if S.poly is not None:
        raise ValueError(
            "polynomial multipliers transform through the symbolic route"
        )
    zeta = tuple(complex(z) for z in zeta)
    if strict:
        for t in S.terms:
            _check_interior(t.factors, zeta)
    total = 0.0 + 0.0j
    for t in S.terms:
        phase = 1j * sum(float(b) * z for b, z in zip(t.base, zeta))
        total += t.sign * np.exp(phase) * laplace_factor(t.factors, zeta)
    return complex(total)


# ---------------------------------------------------------------------------
# compiled float evaluator (for grids, quadrature and Monte-Carlo binning)


class DensityEvaluator:
    """Float fast path mirroring heaviside_density term by term.

    Square terms (n factors = rank = dim) and one-dimensional fibers get
    closed-form branches; higher-dimensional fibers reuse precomputed exact
    active-set solves, floated once. Terms whose factors do not span the
    ambient space fall back to the exact reference evaluator per point.
    """

    FEAS_TOL = 1e-9

    def __init__(self, S: SignedConeSpline):
        self.spline = S
        self.dim = S.dim
        self.poly = S.poly
        self._compiled = [self._compile(t) for t in S.terms]

    def _compile(self, t: ConeSplineTerm):
        d = self.dim
        n = len(t.factors)
        if n == 0:
            raise PureDeltaError("point-mass spline has no density function")
        rows = _factor_rows(t.factors, d)
        r = rank(rows)
        base = np.array([float(x) for x in t.base])
        if r < d:
            return ("exact", t.sign, t.factors, t.base)
        J = math.sqrt(float(_pseudo_det_sq(rows, r)))
        B = np.array([[float(x) for x in row] for row in rows])  # d x n
        m = n - d
        if m == 0:
            Binv = np.linalg.inv(B)
            return ("square", t.sign, base, Binv, 1.0 / J)
        Rinv = B.T @ np.linalg.inv(B @ B.T)  # n x d right inverse
        kernel = nullspace(rows)
        K = np.array([[float(x) for x in k] for k in kernel]).T  # n x m
        if m == 1:
            k = K[:, 0]
            knorm = float(np.linalg.norm(k))
            return ("segment", t.sign, base, Rinv, k, knorm / J)
        subset_maps = []
        for S_idx in itertools.combinations(range(n), m):
            M = [[kernel[b][i] for b in range(m)] for i in S_idx]
            if rank(M) != m:
                continue
            Mf = np.array([[float(x) for x in row] for row in M])
            Minv = np.linalg.inv(Mf)
            # u(mu') = -Minv @ (Rinv mu')_S ; s(mu') = Rinv mu' + K u
            subset_maps.append((np.array(S_idx), Minv))
        gram = math.sqrt(float(_gram_det(kernel)))
        # orthonormality is not assumed: volumes computed in kernel coords
        return ("general", t.sign, base, Rinv, K, subset_maps, gram / J, m, n)

    def __call__(self, point) -> float:
        mu = np.asarray(point, dtype=float)
        total = 0.0
        for c in self._compiled:
            kind = c[0]
            if kind == "exact":
                _, sign, factors, base = c
                total += sign * heaviside_density(
                    factors, vsub(vec([float(x) for x in mu]), base)
                )
                continue
            if kind == "square":
                _, sign, base, Binv, inv_j = c
                s = Binv @ (mu - base)
                tol = -self.FEAS_TOL * (1.0 + float(np.max(np.abs(s))))
                if np.all(s >= tol):
                    total += sign * inv_j
                continue
            if kind == "segment":
                _, sign, base, Rinv, k, scale = c
                sp = Rinv @ (mu - base)
                lo, hi = -np.inf, np.inf
                ok = True
                for i in range(len(k)):
                    ki = k[i]
                    if abs(ki) < 1e-14:
                        if sp[i] < -self.FEAS_TOL * (1 + abs(sp[i])):
                            ok = False
                            break
                    elif ki > 0:
                        lo = max(lo, -sp[i] / ki)
                    else:
                        hi = min(hi, -sp[i] / ki)
                if ok and hi > lo:
                    total += sign * (hi - lo) * scale
                continue
            _, sign, base, Rinv, K, subset_maps, scale, m, n = c
            sp = Rinv @ (mu - base)
            tol = self.FEAS_TOL * (1.0 + float(np.max(np.abs(sp))))
            verts = []
            for S_idx, Minv in subset_maps:
                u = -(Minv @ sp[S_idx])
                s = sp + K @ u
                if np.all(s >= -tol):
                    verts.append(u)
            if len(verts) > m:
                pts = np.unique(np.round(np.array(verts), 10), axis=0)
                if len(pts) > m:
                    try:
                        from scipy.spatial import ConvexHull

                        total += sign * float(ConvexHull(pts).volume) * scale
                    except Exception:
                        pass
        if self.poly is not None:
            total *= self.poly(mu)
        return total

    def grid(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.array([self(p) for p in pts])


# ---------------------------------------------------------------------------
# serialization


def spline_to_json(S: SignedConeSpline) -> dict:
    out = {
        "dim": S.dim,
        "terms": [
            {
                "sign": t.sign,
                "base": [rat_str(x) for x in t.base],
                "factors": [[rat_str(x) for x in f] for f in t.factors],
            }
            for t in S.terms
        ],
    }
    if S.poly is not None:
        out["poly"] = S.poly.to_json()
    return out


def spline_from_json(data) -> SignedConeSpline:
    if isinstance(data, str):
        data = json.loads(data)
    dim = int(data["dim"])
    terms = [
        spline_term(t["sign"], t["base"], t["factors"]) for t in data["terms"]
    ]
    poly = Polynomial.from_json(dim, data["poly"]) if data.get("poly") else None
    return SignedConeSpline(dim, tuple(terms), poly)


def write_density_csv(path, dim, rows):
    """rows: iterable of (point, value, error). Header is fixed:
    mu_1,...,mu_d,density,error_bound. The write is atomic: a temp file in
    the target directory is renamed over the destination."""
    header = ",".join([f"mu_{j + 1}" for j in range(dim)] + ["density", "error_bound"])
    lines = [header]
    for point, value, err in rows:
        # + 0.0 folds negative zero into plain zero
        cells = [repr(float(x) + 0.0) for x in point] + [
            repr(float(value) + 0.0),
            repr(float(err) + 0.0),
        ]
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def atomic_write_text(path, text: str):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
