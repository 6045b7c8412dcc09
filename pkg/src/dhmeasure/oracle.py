"""Brute-force verifiers, independent of the closed-form engine paths.

Nothing here reuses the fiber-volume evaluator or the closed-form transform
formulas: densities are recomputed by recursive quadrature, transforms by
damped numeric integration, pushforwards by Monte Carlo on the model space,
and partition counts by direct enumeration. The engine is trusted only after
these agree with it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from . import lp, polycone
from .rational import rat, rat_str, vdot, vec


class ImproperConeError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_depth: int = 8

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class MonteCarloConfig:
    seed: int = 0
    samples: int = 100_000
    cutoff_radius: float = 4.0
    bins: int = 24
    chunks: int = 8
    stratified: bool = False

    def __post_init__(self):
        if self.samples < 10_000:
            raise ValueError("need at least 10^4 samples")
        if self.cutoff_radius <= 0 or self.bins < 2 or self.chunks < 1:
            raise ValueError("bad Monte Carlo configuration")


@dataclass(frozen=True)
class LatticeCountConfig:
    scale: int = 1
    max_nodes: int = 20_000_000

    def __post_init__(self):
        if self.scale < 1:
            raise ValueError("scale must be a positive integer")


def _positive_functional(factors):
    """Rational eta with <b, eta> >= 1 for every factor, or error."""
    eta = polycone.strict_positive_functional([vec(f) for f in factors])
    if eta is None:
        raise ImproperConeError("factors do not span a proper cone")
    return eta


# ---------------------------------------------------------------------------
# recursive quadrature convolution


def quadrature_convolution(factors, mu, cfg: QuadratureConfig | None = None):
    """Density of the factor convolution at mu by nested 1-D quadrature.

    Returns (value, error_estimate). The factors must span the ambient
    space: the recursion bottoms out on an invertible square subset whose
    density is an exact indicator over |det|. The first factor folded onto
    that base gives a 1-D segment whose length is solved exactly from the
    linear inequalities, so quadrature only ever sees continuous
    integrands. Upper integration limits come from a strictly positive
    rational functional on the factor cone.
    """
    cfg = cfg or QuadratureConfig()
    factors = [vec(f) for f in factors]
    if not factors:
        raise ValueError("no factors to convolve")
    d = len(factors[0])
    mu = np.asarray([float(x) for x in mu], dtype=float)
    eta_r = _positive_functional(factors)
    eta = np.asarray([float(x) for x in eta_r], dtype=float)

    # greedy independent subset for the exact base case
    from .rational import rank

    base_idx = []
    for i in range(len(factors)):
        if rank([list(f) for f in (factors[j] for j in (*base_idx, i))]) == len(base_idx) + 1:
            base_idx.append(i)
        if len(base_idx) == d:
            break
    if len(base_idx) < d:
        raise ValueError("quadrature needs factors spanning the space")
    rest_idx = [i for i in range(len(factors)) if i not in base_idx]
    if len(rest_idx) > cfg.max_depth:
        raise ValueError("convolution recursion depth exceeded")

    B = np.array([[float(factors[j][r]) for j in base_idx] for r in range(d)])
    Binv = np.linalg.inv(B)
    inv_abs_det = 1.0 / abs(np.linalg.det(B))
    rest = [np.asarray([float(x) for x in factors[j]]) for j in rest_idx]
    rest_eta = [float(vdot(factors[j], eta_r)) for j in rest_idx]

    feas_tol = 1e-11

    def base_density(x):
        s = Binv @ x
        tol = feas_tol * (1.0 + float(np.max(np.abs(s))))
        return inv_abs_det if np.all(s >= -tol) else 0.0

    def segment_density(x, b, top):
        # length of {t in [0, top] : Binv (x - t b) >= 0} times 1/|det|,
        # solved exactly from the d linear inequalities in t
        s0 = Binv @ x
        sb = Binv @ b
        lo_t, hi_t = 0.0, top
        for a0, ab in zip(s0, sb):
            # need a0 - t * ab >= 0
            if abs(ab) < 1e-14:
                if a0 < -feas_tol * (1.0 + abs(a0)):
                    return 0.0
            elif ab > 0:
                hi_t = min(hi_t, a0 / ab)
            else:
                lo_t = max(lo_t, a0 / ab)
        return max(hi_t - lo_t, 0.0) * inv_abs_det

    level_err = [0.0] * (len(rest) + 1)
    level_span = [0.0] * (len(rest) + 1)

    def f(level, x):
        if level == 0:
            return base_density(x)
        b = rest[level - 1]
        top = float(x @ eta) / rest_eta[level - 1]
        if top <= 0:
            return 0.0
        if level == 1:
            return segment_density(x, b, top)
        val, aerr = integrate.quad(
            lambda t: f(level - 1, x - t * b),
            0.0,
            top,
            epsabs=cfg.abs_tol,
            epsrel=cfg.rel_tol,
            limit=200,
        )
        level_err[level] = max(level_err[level], aerr)
        level_span[level] = max(level_span[level], top)
        return val

    value = f(len(rest), mu)
    err = 0.0
    for level in range(2, len(rest) + 1):
        err = level_err[level] + level_span[level] * err
    if not rest_idx:
        err = 0.0
    return value, err


# ---------------------------------------------------------------------------
# damped numeric transforms


def numeric_laplace(f, zeta, box, cfg: QuadratureConfig | None = None) -> complex:
    """Iterated quadrature of e^{i<mu,zeta>} f(mu) over an axis box.

    box: sequence of (lo, hi) per coordinate; f takes a coordinate tuple.
    The caller guarantees the truncation is adequate (see
    numeric_laplace_spline for a tail-bounded wrapper).

    The kernel's value at the lower box corner is factored out and applied
    after integrating, so the quadrature always works at order-one scale
    even when the support sits deep inside the damping region.
    """
    cfg = cfg or QuadratureConfig(abs_tol=1e-9, rel_tol=1e-8)
    zeta = tuple(complex(z) for z in zeta)
    d = len(box)
    corner = [lo for lo, _ in box]

    def level(idx, partial):
        lo, hi = box[idx]
        if idx == d - 1:

            def integrand(t):
                pt = (*partial, t)
                v = f(pt)
                if v == 0.0:
                    return 0.0 + 0.0j
                phase = sum((p - c) * z for p, c, z in zip(pt, corner, zeta))
                return v * np.exp(1j * phase)

        else:

            def integrand(t):
                return level(idx + 1, (*partial, t))

        # inner levels run tighter so their noise does not stall the outer
        # adaptive subdivision
        squeeze = 30.0**idx
        val, _ = integrate.quad(
            integrand,
            lo,
            hi,
            epsabs=cfg.abs_tol / squeeze,
            epsrel=cfg.rel_tol / squeeze,
            limit=200,
            complex_func=True,
        )
        return val

    out = level(0, ())
    return complex(out * np.exp(1j * sum(c * z for c, z in zip(corner, zeta))))


def spline_truncation_box(S, im_zeta, decay_log: float = 34.0):
    """Axis box containing the support mass up to e^(-decay_log) damping.

    Exact per-coordinate linear programs over each term's translated cone
    intersected with the damping slab <mu - base, Im zeta> <= decay_log.
    """
    im = vec([rat(float(v)) for v in im_zeta])
    lo = [None] * S.dim
    hi = [None] * S.dim
    L = rat(float(decay_log))
    for t in S.terms:
        n = len(t.factors)
        pair_im = [vdot(f, im) for f in t.factors]
        if any(p <= 0 for p in pair_im):
            raise ValueError("Im(zeta) does not damp every factor direction")
        cons = [
            lp.constraint([rat(1) if j == i else rat(0) for j in range(n)], lp.GE, 0)
            for i in range(n)
        ]
        cons.append(lp.constraint(pair_im, lp.LE, L))
        for j in range(S.dim):
            obj = [f[j] for f in t.factors]
            for maximize in (False, True):
                res = lp.solve_lp(obj, cons, maximize=maximize)
                if res.status != lp.OPTIMAL:
                    raise ValueError("truncation region is unbounded")
                v = t.base[j] + res.objective
                if maximize:
                    hi[j] = v if hi[j] is None or v > hi[j] else hi[j]
                else:
                    lo[j] = v if lo[j] is None or v < lo[j] else lo[j]
    out = []
    for a, b in zip(lo, hi):
        fa, fb = float(a), float(b)
        pad = 1e-9 * (1.0 + abs(fa) + abs(fb))
        out.append((fa - pad, fb + pad))
    return out


def spline_tail_bound(S, im_zeta, decay_log: float) -> float:
    """Upper estimate of the transform mass beyond the damping slab.

    Per term, in factor coordinates the discarded mass is the tail of a
    Gamma(n) law: (prod_j c_j)^(-1) e^(-L) sum_{k<n} L^k / k! with
    c_j = <factor_j, Im zeta>. A polynomial multiplier of degree D is
    majorized by extending the sum to k < n + D and scaling by the largest
    coefficient magnitude; that part is an estimate, not a certificate.
    """
    L = float(decay_log)
    deg = 0
    coeff_scale = 1.0
    if S.poly is not None:
        deg = max((sum(e) for e, _ in S.poly.coeffs), default=0)
        coeff_scale = 1.0 + sum(abs(float(c)) for _, c in S.poly.coeffs)
    total = 0.0
    for t in S.terms:
        n = len(t.factors)
        prod_c = 1.0
        for f in t.factors:
            c = sum(float(x) * v for x, v in zip(f, im_zeta))
            prod_c *= c
        gam = sum(L**k / math.factorial(k) for k in range(n + deg))
        base_damp = math.exp(
            -sum(float(b) * v for b, v in zip(t.base, im_zeta))
        )
        total += base_damp * math.exp(-L) * gam / prod_c
    return coeff_scale * total


def _orthant_poly(poly, base, factors):
    """Expand poly(base + factors^T s) into orthant-coordinate monomials.

    Returns {exponent tuple over s: float coefficient}. The identity
    holds for any factor count because the multiplier is constant on
    the fibers of the orthant map.
    """
    n = len(factors)
    one = {(0,) * n: 1.0}
    if poly is None:
        return one

    def poly_mul(a, b):
        acc = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                acc[e] = acc.get(e, 0.0) + ca * cb
        return acc

    # linear form for each volume coordinate: mu_i = base_i + sum_j F_ji s_j
    coords = []
    for i in range(len(base)):
        lin = {(0,) * n: float(base[i])}
        for j, f in enumerate(factors):
            fij = float(f[i])
            if fij != 0.0:
                e = tuple(1 if k == j else 0 for k in range(n))
                lin[e] = lin.get(e, 0.0) + fij
        coords.append(lin)
    out = {}
    for e, c in poly.coeffs:
        mono = one
        for i, k in enumerate(e):
            for _ in range(k):
                mono = poly_mul(mono, coords[i])
        for es, cs in mono.items():
            out[es] = out.get(es, 0.0) + float(c) * cs
    return {e: c for e, c in out.items() if c != 0.0}


def _moment_quad(k, w, decay_log, cfg):
    """Truncated integral of s^k e^{isw} over [0, inf) plus its tail bound."""
    r = w.imag
    top = (decay_log + 4.0 * max(k, 1)) / r
    if k:
        top = (decay_log + k * math.log(max(top, 2.0))) / r
    val, _ = integrate.quad(
        lambda s: s**k * np.exp(1j * s * w) if k else np.exp(1j * s * w),
        0.0,
        top,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        limit=400,
        complex_func=True,
    )
    tail = special.gammaincc(k + 1, r * top) * math.gamma(k + 1) / r ** (k + 1)
    return complex(val), float(tail)


def _mapped_term_transform(term, poly, zeta, decay_log, cfg):
    """Transform of one signed term via orthant-coordinate factorization.

    Splits the kernel into independent one-dimensional moment integrals,
    one per factor, after expanding the multiplier in orthant coordinates.
    Returns (value, tail_bound).
    """
    n = len(term.factors)
    phase = np.exp(1j * sum(float(b) * z for b, z in zip(term.base, zeta)))
    if n == 0:
        pval = float(poly.eval_exact(term.base)) if poly is not None else 1.0
        return term.sign * pval * complex(phase), 0.0
    ws = []
    for f in term.factors:
        w = complex(sum(float(x) * z for x, z in zip(f, zeta)))
        if w.imag <= 0:
            raise ValueError("Im(zeta) does not damp every factor direction")
        ws.append(w)
    monos = _orthant_poly(poly, term.base, term.factors)
    cache = {}
    value = 0.0 + 0.0j
    tail = 0.0
    for es, c in monos.items():
        vals, tails, fulls = [], [], []
        for j, k in enumerate(es):
            if (j, k) not in cache:
                cache[(j, k)] = _moment_quad(k, ws[j], decay_log, cfg)
            v, t = cache[(j, k)]
            vals.append(v)
            tails.append(t)
            fulls.append(math.gamma(k + 1) / ws[j].imag ** (k + 1))
        value += c * np.prod(vals)
        for j in range(n):
            bound = tails[j]
            for l in range(n):
                if l != j:
                    bound *= fulls[l]
            tail += abs(c) * bound
    scale = abs(phase)
    return term.sign * complex(value * phase), tail * scale


def numeric_laplace_spline(S, zeta, cfg: QuadratureConfig | None = None,
                           decay_log: float = 30.0, method: str = "auto"):
    """Transform of a spline's density by truncated numeric integration.

    Returns (value, tail_bound). method="box" runs iterated quadrature of
    the compiled density times the oscillating kernel over a truncation
    box holding all but e^(-decay_log) of the damped mass; method="mapped"
    integrates each term in orthant coordinates, where the kernel splits
    into one-dimensional moment integrals (fast and jump-free in any
    volume dimension). "auto" picks box for one-dimensional volumes and
    mapped otherwise.
    """
    zeta = tuple(complex(z) for z in zeta)
    if method == "auto":
        method = "box" if S.dim == 1 else "mapped"
    if method == "mapped":
        mcfg = cfg or QuadratureConfig(abs_tol=1e-11, rel_tol=1e-10)
        value = 0.0 + 0.0j
        tail = 0.0
        for term in S.terms:
            v, t = _mapped_term_transform(term, S.poly, zeta, decay_log, mcfg)
            value += v
            tail += t
        return complex(value), tail
    if method != "box":
        raise ValueError("method must be 'auto', 'box', or 'mapped'")
    from .conespline import DensityEvaluator

    im = [z.imag for z in zeta]
    box = spline_truncation_box(S, im, decay_log)
    ev = DensityEvaluator(S)
    value = numeric_laplace(lambda pt: ev(pt), zeta, box, cfg)
    return value, spline_tail_bound(S, im, decay_log)


def numeric_laplace_cone(factors, base, zeta, decay_log: float = 34.0,
                         cfg: QuadratureConfig | None = None) -> complex:
    """Transform of one shifted factor cone, integrated in factor
    coordinates.

    Mapping the positive orthant through the factors splits the kernel
    into independent one-dimensional oscillatory integrals, one per
    factor, each truncated where its damping reaches e^(-decay_log). Used
    where nested volume quadrature is impractical; valid for any factor
    count since the split needs no invertibility."""
    cfg = cfg or QuadratureConfig(abs_tol=1e-10, rel_tol=1e-9)
    zeta = tuple(complex(z) for z in zeta)
    out = np.exp(1j * sum(float(b) * z for b, z in zip(base, zeta)))
    for fvec in factors:
        w = sum(float(x) * z for x, z in zip(fvec, zeta))
        if w.imag <= 0:
            raise ValueError("Im(zeta) does not damp every factor direction")
        top = decay_log / w.imag
        val, _ = integrate.quad(
            lambda s: np.exp(1j * s * w),
            0.0,
            top,
            epsabs=cfg.abs_tol,
            epsrel=cfg.rel_tol,
            limit=400,
            complex_func=True,
        )
        out *= val
    return complex(out)


# ---------------------------------------------------------------------------
# Monte-Carlo pushforward on the model space


@dataclass(frozen=True)
class DensityTable:
    dim: int
    edges: tuple  # per-axis bin edges
    counts: tuple  # flattened int counts, C order
    density: tuple  # flattened empirical density (coordinate Lebesgue)
    sigma: tuple  # flattened one-standard-deviation error bars
    samples: int
    seed: int

    def centers(self):
        axes = [
            [(e[i] + e[i + 1]) / 2 for i in range(len(e) - 1)] for e in self.edges
        ]
        shape = tuple(len(a) for a in axes)
        out = []
        for flat in range(int(np.prod(shape))):
            idx = np.unravel_index(flat, shape)
            out.append(tuple(axes[k][idx[k]] for k in range(self.dim)))
        return out

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "edges": [list(e) for e in self.edges],
            "counts": list(self.counts),
            "density": list(self.density),
            "sigma": list(self.sigma),
            "samples": self.samples,
            "seed": self.seed,
        }

    def to_csv(self, path):
        from .conespline import write_density_csv

        rows = [
            (c, v, s)
            for c, v, s in zip(self.centers(), self.density, self.sigma)
        ]
        write_density_csv(path, self.dim, rows)


def montecarlo_pushforward(weights, phi0, cfg: MonteCarloConfig) -> DensityTable:
    """Empirical pushforward density for a linear model-space action.

    Samples uniformly from the radius-R ball in coordinate space (2n real
    dimensions), maps through phi0 + sum (|z_i|^2 / 2) a_i, and bins. The
    output density is per coordinate-Lebesgue volume; comparing it with the
    unit-normalized engine density measures the per-factor area constant.
    Deterministic: counts are accumulated per chunk with a counter-based
    generator keyed by (seed, chunk) and summed exactly.
    """
    weights = [vec(w) for w in weights]
    _positive_functional(weights)
    n = len(weights)
    d = len(weights[0])
    phi0 = np.asarray([float(x) for x in vec(phi0)], dtype=float)
    A = np.array([[float(x) for x in w] for w in weights])  # n x d
    R = cfg.cutoff_radius
    half_r2 = R * R / 2.0

    lo = phi0 + half_r2 * np.minimum(A.min(axis=0), 0.0)
    hi = phi0 + half_r2 * np.maximum(A.max(axis=0), 0.0)
    span = hi - lo
    pad = 1e-9 * (1.0 + np.abs(span))
    edges = [
        np.linspace(lo[j] - pad[j], hi[j] + pad[j], cfg.bins + 1) for j in range(d)
    ]

    shape = (cfg.bins,) * d
    counts = np.zeros(shape, dtype=np.int64)
    per = cfg.samples // cfg.chunks
    sizes = [per] * cfg.chunks
    sizes[-1] += cfg.samples - per * cfg.chunks
    for c, m in enumerate(sizes):
        if m == 0:
            continue
        rng = np.random.Generator(np.random.Philox(key=[int(cfg.seed), int(c)]))
        g = rng.standard_normal((m, 2 * n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        u = rng.random(m)
        if cfg.stratified:
            u = (c + u) / cfg.chunks  # radial shell per chunk
        radii = R * u ** (1.0 / (2 * n))
        pts = g * radii[:, None]
        t = (pts[:, 0::2] ** 2 + pts[:, 1::2] ** 2) / 2.0
        mu = phi0[None, :] + t @ A
        h, _ = np.histogramdd(mu, bins=edges)
        counts += h.astype(np.int64)

    vol_ball = math.pi**n * R ** (2 * n) / math.factorial(n)
    cell = np.prod([e[1] - e[0] for e in edges])
    flat = counts.reshape(-1)
    p = flat / cfg.samples
    density = p * vol_ball / cell
    sigma = np.sqrt(np.maximum(p * (1 - p), 1e-300) / cfg.samples) * vol_ball / cell
    return DensityTable(
        d,
        tuple(tuple(float(x) for x in e) for e in edges),
        tuple(int(x) for x in flat),
        tuple(float(x) for x in density),
        tuple(float(x) for x in sigma),
        cfg.samples,
        cfg.seed,
    )


# ---------------------------------------------------------------------------
# lattice vector-partition counts


def lattice_count(weights, mu, t: int = 1,
                  cfg: LatticeCountConfig | None = None) -> int:
    """#{s in Z^n_{>=0} : sum s_i b_i = t mu} by bounded recursion."""
    cfg = cfg or LatticeCountConfig()
    weights = [vec(w) for w in weights]
    for w in weights:
        if any(x.denominator != 1 for x in w):
            raise ValueError("lattice counting needs integer weights")
    target = tuple(x * t for x in vec(mu))
    if any(x.denominator != 1 for x in target):
        raise ValueError("lattice counting needs an integer target")
    eta = _positive_functional(weights)
    pair = [vdot(w, eta) for w in weights]
    nodes = [0]

    def rec(idx, residual):
        nodes[0] += 1
        if nodes[0] > cfg.max_nodes:
            raise ValueError("lattice enumeration bound exceeded")
        if idx == len(weights) - 1:
            b = weights[idx]
            # residual must be a nonneg integer multiple of the last weight
            s = None
            for rcomp, bcomp in zip(residual, b):
                if bcomp != 0:
                    s = rcomp / bcomp
                    break
            if s is None or s.denominator != 1 or s < 0:
                return 0
            return 1 if all(rc == s * bc for rc, bc in zip(residual, b)) else 0
        level = vdot(residual, eta)
        if level < 0:
            return 0
        top = int(level / pair[idx])
        total = 0
        b = weights[idx]
        for s in range(top + 1):
            total += rec(idx + 1, tuple(rc - s * bc for rc, bc in zip(residual, b)))
        return total

    return rec(0, target)


# ---------------------------------------------------------------------------
# truncated one-dimensional check


def truncated_circle_check(alpha: int, z: complex, a: float,
                           cfg: QuadratureConfig | None = None) -> dict:
    """Sublevel transform of the rank-one quadratic flow energy.

    Integrates e^{izt} against the pushforward density (1/alpha on [0, inf))
    up to level a by quadrature, and resolves which sign and boundary
    coefficient make the closed two-term expression (fixed-point term plus
    reduced-level boundary term) reproduce it.
    """
    cfg = cfg or QuadratureConfig(abs_tol=1e-12, rel_tol=1e-11)
    alpha = int(alpha)
    if alpha <= 0:
        raise ValueError("weight must be a positive integer")
    if not (a > 0):
        raise ValueError("truncation level must be positive")
    z = complex(z)

    lhs, aerr = integrate.quad(
        lambda t: np.exp(1j * z * t) / alpha,
        0.0,
        a,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        limit=400,
        complex_func=True,
    )
    fp_term = 1j / (alpha * z)
    boundary_unit = np.exp(1j * z * a) / (1j * z)
    candidates = {}
    best = None
    for sign in (1, -1):
        for coeff_name, coeff in (("1", 1.0), ("1/alpha", 1.0 / alpha)):
            rhs = fp_term + sign * coeff * boundary_unit
            diff = abs(lhs - rhs)
            key = f"sign={sign:+d},coeff={coeff_name}"
            candidates[key] = {"rhs": [rhs.real, rhs.imag], "abs_diff": diff}
            if best is None or diff < best[2]:
                best = (sign, coeff_name, diff)
    return {
        "alpha": alpha,
        "z": [z.real, z.imag],
        "a": a,
        "quadrature": [complex(lhs).real, complex(lhs).imag],
        "quadrature_error": aerr,
        "fixed_point_term": [fp_term.real, fp_term.imag],
        "boundary_magnitude": abs(boundary_unit) / alpha,
        "candidates": candidates,
        "resolved_sign": best[0],
        "resolved_coeff": best[1],
        "resolved_abs_diff": best[2],
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
