"""Command-line front end.

Subcommands:
  cones    predicates and witnesses for a polyhedral set or cone
  abelian  density table, tube data and transform report for a model
  orbit    torus and reduced measures for an elliptic orbit
  verify   deterministic cross-check suites

Exit codes: 0 success, 1 a verification or tolerance check failed,
2 bad usage or invalid input. Logging level comes from DHK_LOG.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import conespline, hermitian, localize, oracle, polycone, verify
from .conespline import atomic_write_text
from .rational import rat, rat_str, vec

log = logging.getLogger("dhmeasure")


@dataclass
class RunConfig:
    input_path: str | None = None
    out: str | None = None
    grid: tuple | None = None  # ((lo, hi, count) per axis)
    zeta_samples: int = 5
    seed: int = 0
    chamber: tuple | None = None
    measure: str = "both"
    tol: float = 1e-6
    xi_list: tuple = ()
    suites: tuple = ()
    samples: int | None = None


def parse_vector(text: str):
    try:
        return vec([rat(part.strip()) for part in text.split(",")])
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad vector {text!r}: {exc}")


def parse_grid(text: str):
    """--grid lo:hi:count per axis, comma separated."""
    axes = []
    for part in text.split(","):
        pieces = part.split(":")
        if len(pieces) != 3:
            raise argparse.ArgumentTypeError(
                f"grid axis {part!r} is not lo:hi:count"
            )
        lo, hi, count = float(pieces[0]), float(pieces[1]), int(pieces[2])
        if count < 1 or not hi > lo:
            raise argparse.ArgumentTypeError(f"bad grid axis {part!r}")
        axes.append((lo, hi, count))
    return tuple(axes)


def grid_points(axes):
    lin = [np.linspace(lo, hi, count) for lo, hi, count in axes]
    shape = tuple(len(a) for a in lin)
    pts = []
    for flat in range(int(np.prod(shape))):
        idx = np.unravel_index(flat, shape)
        pts.append(tuple(float(lin[k][idx[k]]) for k in range(len(lin))))
    return pts


def default_grid(images, dim, count=25):
    arr = np.array([[float(x) for x in im] for im in images], dtype=float)
    lo = arr.min(axis=0)
    hi = arr.max(axis=0)
    span = np.maximum(hi - lo, 1.0)
    return tuple(
        (float(lo[j] - 0.25 * span[j]), float(hi[j] + 0.75 * span[j]), count)
        for j in range(dim)
    )


def write_json(path, payload):
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _emit(payload, out_path):
    if out_path:
        write_json(out_path, payload)
        log.info("wrote %s", out_path)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# cones


def cmd_cones(cfg: RunConfig) -> int:
    data = _load_json(cfg.input_path)
    report = {"input": cfg.input_path}
    if "halfspaces" in data:
        P = polycone.polyhedron_from_json(data)
        report["kind"] = "polyhedron"
        report["dim"] = P.dim
        feas = polycone.is_feasible(P)
        report["feasible"] = feas
        if feas:
            report["feasible_point"] = [rat_str(x) for x in polycone.feasible_point(P)]
            report["compact"] = polycone.is_compact(P)
            report["proper"] = polycone.is_proper(P)
            per_xi = []
            for xi in cfg.xi_list:
                per_xi.append(
                    {
                        "xi": [rat_str(x) for x in xi],
                        "bounded_below": polycone.bounded_below(P, xi),
                        "proper_projection": polycone.proper_projection_directions(P, xi),
                    }
                )
            if per_xi:
                report["directions"] = per_xi
    else:
        C = polycone.cone_from_json(data)
        report["kind"] = "cone"
        report["dim"] = C.dim
        proper = polycone.cone_is_proper(C)
        report["pointed"] = proper
        if C.normals is not None and proper:
            rays = polycone.extreme_rays(C)
            report["extreme_rays"] = [[rat_str(x) for x in r] for r in rays]
        try:
            ip = polycone.interior_point(C)
            report["interior_point"] = [rat_str(x) for x in ip]
        except polycone.NotFullDimensionalError:
            report["interior_point"] = None
        if C.normals is not None and C.generators is not None:
            report["representations_consistent"] = polycone.cone_consistency_check(C)
    _emit(report, cfg.out)
    return 0


# ---------------------------------------------------------------------------
# abelian models


def _tube_zetas(region, rng, count):
    """zeta draws with Im inside the tube, rescaled for quick decay."""
    direction = np.array([float(x) for x in region.sample_interior()])
    out = []
    for _ in range(count):
        im = direction * float(rng.uniform(0.8, 1.6)) + rng.uniform(
            -0.2, 0.2, size=region.dim
        )
        if not region.contains_im(im):
            im = direction
        rates = [
            sum(float(a) * b for a, b in zip(f, im))
            / math.sqrt(sum(float(a) ** 2 for a in f))
            for f in region.factors
        ]
        m = min(rates)
        if m < 0.5:
            im = im * (0.5 / m)
        re = rng.uniform(-1.5, 1.5, size=region.dim)
        out.append(tuple(complex(r, i) for r, i in zip(re, im)))
    return out


def cmd_abelian(cfg: RunConfig) -> int:
    M = localize.model_from_json(_load_json(cfg.input_path))
    check = localize.validate_model(M)
    if not check.ok:
        log.error("model validation failed: %s", "; ".join(check.issues))
        return 2
    xi = cfg.chamber if cfg.chamber is not None else localize.default_chamber(M)
    S = localize.dh_measure(M, xi)
    region = localize.gamma_region(M, xi)
    rng = np.random.Generator(np.random.Philox(key=[cfg.seed, 101]))

    report = {
        "input": cfg.input_path,
        "dim": M.dim,
        "halfdim": M.halfdim,
        "points": len(M.points),
        "chamber": [rat_str(x) for x in xi],
        "terms": len(S.terms),
        "gamma_region": {
            "factors": [[rat_str(x) for x in f] for f in region.factors],
            "interior_direction": [rat_str(x) for x in region.sample_interior()],
        },
        "support_min": rat_str(localize.support_min(M, xi)),
    }

    samples = []
    worst = 0.0
    for zeta in _tube_zetas(region, rng, cfg.zeta_samples):
        closed = conespline.spline_laplace(S, zeta)
        loc = localize.localization_sum(M, zeta, xi)
        rel = abs(closed - loc) / max(abs(loc), 1e-300)
        worst = max(worst, rel)
        samples.append(
            {
                "zeta": [[z.real, z.imag] for z in zeta],
                "spline_transform": [closed.real, closed.imag],
                "localization_sum": [loc.real, loc.imag],
                "rel_difference": rel,
            }
        )
    report["laplace_samples"] = samples
    report["laplace_worst_rel"] = worst
    report["laplace_tol"] = cfg.tol
    report["passed"] = worst <= cfg.tol

    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        axes = cfg.grid or default_grid([p.image for p in M.points], M.dim)
        rows = []
        for mu in grid_points(axes):
            dv = conespline.spline_density(S, mu)
            rows.append((mu, dv.value, dv.abs_error_bound))
        csv_path = os.path.join(cfg.out, "density.csv")
        conespline.write_density_csv(csv_path, M.dim, rows)
        write_json(os.path.join(cfg.out, "spline.json"), conespline.spline_to_json(S))
        write_json(os.path.join(cfg.out, "report.json"), report)
        log.info("wrote %s", cfg.out)
    else:
        _emit(report, None)
    return 0 if report["passed"] else 1


# ---------------------------------------------------------------------------
# orbits


def cmd_orbit(cfg: RunConfig) -> int:
    O = hermitian.orbit_from_json(_load_json(cfg.input_path))
    pair = O.pair
    om = hermitian.orbit_model(O)
    M = om.model
    rng = np.random.Generator(np.random.Philox(key=[cfg.seed, 202]))

    report = {
        "input": cfg.input_path,
        "family": pair.family,
        "params": list(pair.params),
        "rank": pair.rank,
        "lambda": [rat_str(x) for x in O.lam_native],
        "weyl_order": len(pair.weyl),
        "fixed_points": [
            {"label": p.label, "image": [rat_str(x) for x in p.image]}
            for p in M.points
        ],
        "wall_values": [(lbl, rat_str(v)) for lbl, v in om.wall_values],
    }

    want_t = cfg.measure in ("t", "both")
    want_k = cfg.measure in ("k", "both")
    out_files = {}
    passed = True

    St = Sk = None
    if want_t:
        xi = cfg.chamber if cfg.chamber is not None else om.chamber
        St = hermitian.t_type_measure(O, xi)
        region = localize.gamma_region(M, xi)
        worst = 0.0
        orient = hermitian.compact_orientation(pair)
        for zeta in _tube_zetas(region, rng, cfg.zeta_samples):
            closed = conespline.spline_laplace(St, zeta)
            loc = orient * localize.localization_sum(M, zeta, xi)
            worst = max(worst, abs(closed - loc) / max(abs(loc), 1e-300))
        report["t_measure"] = {
            "chamber": [rat_str(x) for x in xi],
            "terms": len(St.terms),
            "localization_worst_rel": worst,
        }
        passed = passed and worst <= cfg.tol

    if want_k:
        Sk = hermitian.k_type_measure(O)
        worst = 0.0
        zsamples = []
        nfac = tuple(sorted(pair.noncompact))
        for _ in range(cfg.zeta_samples):
            im = np.array([float(x) for x in pair.center_vector]) * float(
                rng.uniform(1.0, 1.8)
            ) + rng.uniform(-0.15, 0.15, size=pair.rank)
            rates = [
                sum(float(a) * b for a, b in zip(f, im))
                / math.sqrt(sum(float(a) ** 2 for a in f))
                for f in nfac
            ]
            m = min(rates)
            if m < 0.8:
                im = im * (0.8 / m)
            re = rng.uniform(-1.0, 1.0, size=pair.rank)
            zeta = tuple(complex(r, i) for r, i in zip(re, im))
            symbolic = hermitian.laplace_nu_symbolic(O, zeta)
            numeric, tail = oracle.numeric_laplace_spline(
                Sk, zeta, method="mapped"
            )
            rel = abs(symbolic - numeric) / max(abs(symbolic), 1e-300)
            worst = max(worst, rel)
            zsamples.append(
                {
                    "zeta": [[z.real, z.imag] for z in zeta],
                    "symbolic": [symbolic.real, symbolic.imag],
                    "numeric": [numeric.real, numeric.imag],
                    "numeric_tail_bound": tail,
                    "rel_difference": rel,
                }
            )
        report["k_measure"] = {
            "terms": len(Sk.terms),
            "wall_polynomial": Sk.poly.to_json() if Sk.poly is not None else None,
            "symbolic_vs_numeric": zsamples,
            "worst_rel": worst,
        }
        passed = passed and worst <= max(cfg.tol, 1e-3)

    report["tol"] = cfg.tol
    report["passed"] = passed

    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        axes = cfg.grid or default_grid([p.image for p in M.points], pair.rank)
        pts = grid_points(axes)
        write_json(os.path.join(cfg.out, "weyl.json"), hermitian.weyl_to_json(pair))
        for tag, S in (("t", St), ("k", Sk)):
            if S is None:
                continue
            write_json(
                os.path.join(cfg.out, f"{tag}_spline.json"),
                conespline.spline_to_json(S),
            )
            rows = []
            for mu in pts:
                dv = conespline.spline_density(S, mu)
                rows.append((mu, dv.value, dv.abs_error_bound))
            conespline.write_density_csv(
                os.path.join(cfg.out, f"{tag}_density.csv"), pair.rank, rows
            )
        write_json(os.path.join(cfg.out, "report.json"), report)
        log.info("wrote %s", cfg.out)
    else:
        _emit(report, None)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# verify


def cmd_verify(cfg: RunConfig) -> int:
    overrides = {}
    if cfg.samples is not None:
        overrides["montecarlo"] = {"samples": cfg.samples}
    result = verify.run_suites(cfg.suites or None, seed=cfg.seed, **overrides)
    for rep in result["suites"]:
        status = "pass" if rep["passed"] else "FAIL"
        print(f"{rep['suite']:<12} {status}  checks={rep['checks']} "
              f"failed={rep['failed']} time={rep['elapsed_s']}s")
    if cfg.out:
        write_json(cfg.out, result)
        log.info("wrote %s", cfg.out)
    return 0 if result["passed"] else 1


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="dhk",
        description="Measures on moment images from fixed-point data.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="input JSON file")
        p.add_argument("--out", default=None, help="output file or directory")
        p.add_argument("--seed", type=int, default=0, help="draw seed (default 0)")

    p = sub.add_parser("cones", help="polyhedral predicates and witnesses")
    common(p)
    p.add_argument(
        "--xi",
        action="append",
        type=parse_vector,
        default=[],
        help="direction for boundedness checks; repeatable",
    )

    p = sub.add_parser("abelian", help="measure synthesis for a model")
    common(p)
    p.add_argument("--grid", type=parse_grid, default=None,
                   help="density grid, lo:hi:count per axis, comma separated")
    p.add_argument("--zeta-samples", type=int, default=5)
    p.add_argument("--chamber", type=parse_vector, default=None)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("orbit", help="orbit measures for a Hermitian pair")
    common(p)
    p.add_argument("--grid", type=parse_grid, default=None)
    p.add_argument("--zeta-samples", type=int, default=3)
    p.add_argument("--chamber", type=parse_vector, default=None)
    p.add_argument("--measure", choices=("t", "k", "both"), default="both")
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("verify", help="run cross-check suites")
    common(p, needs_input=False)
    p.add_argument(
        "--suites",
        default=None,
        help=f"comma list from {{{','.join(verify.SUITES)}}} (default all)",
    )
    p.add_argument("--samples", type=int, default=None,
                   help="Monte Carlo sample override")

    return top


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    cfg.input_path = getattr(args, "input", None)
    cfg.out = args.out
    cfg.seed = args.seed
    cfg.grid = getattr(args, "grid", None)
    cfg.zeta_samples = getattr(args, "zeta_samples", 5)
    cfg.chamber = getattr(args, "chamber", None)
    cfg.measure = getattr(args, "measure", "both")
    cfg.tol = getattr(args, "tol", 1e-6)
    cfg.xi_list = tuple(getattr(args, "xi", []) or [])
    suites = getattr(args, "suites", None)
    cfg.suites = tuple(s.strip() for s in suites.split(",")) if suites else ()
    cfg.samples = getattr(args, "samples", None)
    return cfg


_COMMANDS = {
    "cones": cmd_cones,
    "abelian": cmd_abelian,
    "orbit": cmd_orbit,
    "verify": cmd_verify,
}


_DASH_VALUE_FLAGS = {"--grid", "--xi", "--chamber"}


def _merge_dash_values(argv):
    """Join '--grid -3:3:9' into '--grid=-3:3:9' so argparse does not read
    the negative-leading value as an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (
            tok in _DASH_VALUE_FLAGS
            and i + 1 < len(argv)
            and argv[i + 1].startswith("-")
            and not argv[i + 1].startswith("--")
        ):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("DHK_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    argv = _merge_dash_values(sys.argv[1:] if argv is None else list(argv))
    args = build_parser().parse_args(argv)
    cfg = _config_from_args(args)
    try:
        return _COMMANDS[args.command](cfg)
    except (
        OSError,
        json.JSONDecodeError,
        KeyError,
        TypeError,
        ValueError,
    ) as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
