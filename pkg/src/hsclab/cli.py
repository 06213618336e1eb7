"""Command-line interface.

Every subcommand prints a single JSON report to stdout with a top-level
"schema": 1 field, the tool version, the seed, and an echo of the
parsed configuration; identical command lines produce byte-identical
reports.  Human-oriented progress goes to stderr.  Exit codes: 0 on
success, 1 when a numerical check fails, 2 on usage errors.

Points and directions are comma-separated values: either 2n bare reals
read as (re, im) pairs ("0.5,0.1" is 0.5+0.1i for a one-coordinate
metric) or n complex literals in a+bi form ("0.5+0.1i,2i").

CSV output (scan --csv) has columns: index, re1, im1, ..., re_n, im_n,
min_hsc -- one row per grid point with the scanned minimum there.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, acceptance, certify, dsl, warp
from .curvature import (PointOutsideBoxError, curvature, gaussian_curvature_1d,
                        hsc_dirs, metric_jet, pair_symmetry_defect)
from .positivity import (NEG_THRESHOLD, _c2pair, find_negative_witness,
                         scan_chart, scan_to_csv)


def parse_complex_vector(text: str, n: int, what: str) -> np.ndarray:
    """n complex entries from 2n bare reals (re, im pairs) or n literals."""
    toks = [t.strip() for t in text.split(",") if t.strip()]
    has_literal = any(("i" in t) or ("j" in t) for t in toks)
    try:
        if not has_literal and len(toks) == 2 * n:
            vals = [float(t) for t in toks]
            return np.array([complex(vals[2 * k], vals[2 * k + 1])
                             for k in range(n)])
        if len(toks) == n:
            return np.array([complex(t.replace("i", "j")) for t in toks])
    except ValueError as exc:
        raise SystemExit(_usage(f"could not parse {what} {text!r}: {exc}"))
    raise SystemExit(_usage(
        f"{what} needs {n} complex entries ({2 * n} reals or {n} literals), "
        f"got {len(toks)} values"))


def parse_float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _load_metric(args) -> dsl.MetricSpec:
    if getattr(args, "catalog", None):
        try:
            return dsl.catalog(args.catalog)
        except KeyError as exc:
            raise SystemExit(_usage(str(exc)))
    if getattr(args, "file", None):
        try:
            return dsl.load_spec(args.file)
        except (OSError, dsl.ParseError, KeyError, ValueError) as exc:
            raise SystemExit(_usage(f"cannot load metric file: {exc}"))
    raise SystemExit(_usage("one of --catalog or --file is required"))


def _parse_box(text: str, n: int):
    groups = [g for g in text.split(",") if g.strip()]
    if len(groups) != n:
        raise SystemExit(_usage(f"--box needs {n} groups of "
                                "re_min:re_max:im_min:im_max"))
    rects = []
    for g in groups:
        parts = [float(p) for p in g.split(":")]
        if len(parts) != 4:
            raise SystemExit(_usage("each --box group is re_min:re_max:im_min:im_max"))
        rects.append(dsl.Rect(*parts))
    return tuple(rects)


def _config_echo(args) -> dict:
    skip = {"func"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        out[k] = v
    return out


def _emit(args, command: str, payload: dict) -> None:
    report = {"schema": 1, "version": __version__, "command": command,
              "seed": getattr(args, "seed", 0), "config": _config_echo(args)}
    report.update(payload)
    print(json.dumps(report, sort_keys=True, indent=2))


# ---------------------------------------------------------------------------
# Subcommands


def cmd_curvature(args) -> int:
    spec = _load_metric(args)
    point = parse_complex_vector(args.point, spec.n, "--point")
    try:
        mj = metric_jet(spec, point.reshape(1, spec.n))
    except PointOutsideBoxError as exc:
        raise SystemExit(_usage(str(exc)))
    tensor = curvature(mj)
    payload = {
        "metric": spec.name,
        "point": [_c2pair(z) for z in point],
        "metric_value": [[_c2pair(z) for z in row] for row in mj.g[0]],
        "tensor_max_abs": float(np.abs(tensor.R[0]).max()),
        "pair_symmetry_defect": pair_symmetry_defect(tensor.R),
    }
    if args.dir:
        d = parse_complex_vector(args.dir, spec.dim, "--dir")
        val = hsc_dirs(mj.g, tensor.R, d.reshape(1, 1, spec.dim))[0, 0]
        payload["direction"] = [_c2pair(z) for z in d]
        payload["hsc"] = float(val)
    _emit(args, "curvature", payload)
    return 0


def cmd_scan(args) -> int:
    spec = _load_metric(args)
    box = _parse_box(args.box, spec.n) if args.box else None
    rep = scan_chart(spec, box=box, grid_per_axis=args.grid, dirs=args.dirs,
                     seed=args.seed, starts=args.starts, iters=args.iters)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(scan_to_csv(rep))
    _emit(args, "scan", {"scan": rep.as_dict()})
    return 0


def cmd_witness(args) -> int:
    spec = _load_metric(args)
    w = find_negative_witness(spec, budget=args.budget, seed=args.seed,
                              threshold=args.threshold)
    _emit(args, "witness", {"metric": spec.name, "found": w is not None,
                            "witness": None if w is None else w.as_dict()})
    return 0


def cmd_lemma1(args) -> int:
    try:
        w = certify.choose_weights(args.k0, args.k1, args.n, args.s)
    except ValueError as exc:
        raise SystemExit(_usage(str(exc)))
    identities = certify.weight_identities(args.k0, args.k1, args.n, args.s)
    prod = certify.product_inequality_check(w.a, w.b, w.c, w.d,
                                            trials=args.trials, seed=args.seed)
    k2 = args.k2 if args.k2 is not None else w.base_required
    tensor = certify.random_block_tensor(args.k0, args.k1, k2, args.n, args.s,
                                         seed=args.seed)
    hyp = certify.check_block_hypotheses(tensor, trials=args.trials,
                                         seed=args.seed)
    payload = {
        "weights": w.as_dict(),
        "identities": identities,
        "product_inequalities": prod,
        "tensor_hypotheses": hyp,
    }
    ok = (identities["terms_equalized"]
          and identities["constraint_sum_is_half_ratio"]
          and identities["ratio_formula_matches"]
          and prod["violations"] == 0 and hyp["ok"])
    if k2 >= w.base_required:
        bound = certify.split_bound_check(tensor, w, trials=args.trials,
                                          seed=args.seed)
        payload["bound_check"] = bound
        ok = ok and bound["violations"] == 0 and bound["all_strictly_positive"]
    else:
        payload["bound_check"] = {
            "skipped": f"base bound {k2:g} below certified requirement "
                       f"{w.base_required:g}"}
    payload["ok"] = bool(ok)
    _emit(args, "lemma1", payload)
    return 0 if ok else 1


def cmd_lemma2(args) -> int:
    gspec = dsl.catalog(args.g) if not args.g.endswith(".json") \
        else dsl.load_spec(args.g)
    hspec = dsl.catalog(args.h) if not args.h.endswith(".json") \
        else dsl.load_spec(args.h)
    point = complex(parse_complex_vector(args.point, 1, "--point")[0])
    payload = {"g": gspec.name, "h": hspec.name, "point": _c2pair(point)}
    try:
        worst = 0.0
        for lam in parse_float_list(args.lambdas):
            closed = certify.pencil_curvature(gspec, hspec, point, lam)
            direct = gaussian_curvature_1d(
                certify.pencil_spec(gspec, hspec, lam), point)
            worst = max(worst, abs(closed - direct) / max(1.0, abs(direct)))
        thr = certify.pencil_positive_threshold(gspec, hspec, point,
                                                lam_max=args.lam_max)
        decay = certify.pencil_decay_check(gspec, hspec, point)
    except (ValueError, ArithmeticError, certify.ThresholdNotReachedError) as exc:
        payload["error"] = str(exc)
        payload["ok"] = False
        _emit(args, "lemma2", payload)
        return 1
    ok = worst <= 1e-9
    payload.update({"formula_worst_rel_error": worst, "threshold": thr,
                    "decay": decay, "ok": bool(ok)})
    _emit(args, "lemma2", payload)
    return 0 if ok else 1


def cmd_warp(args) -> int:
    f = warp.load_fibration(args.file) if args.file else warp.warp_demo_fibration()
    if args.write_demo:
        warp.save_fibration(warp.warp_demo_fibration(), args.write_demo)
    assembled = warp.assemble(f, args.lam)
    try:
        validation = dsl.validate(assembled, seed=args.seed).as_dict()
    except dsl.MetricError as exc:
        _emit(args, "warp", {"fibration": f.name, "error": str(exc), "ok": False})
        return 1
    payload = {
        "fibration": f.name,
        "lam": args.lam,
        "assembled": dsl.spec_to_dict(assembled),
        "validation": validation,
        "mu0_search": warp.mu0_search(f, seed=args.seed),
        "asymptotics": warp.fibration_inverse_asymptotics(f),
        "determinant": warp.determinant_split_check(trials=args.trials,
                                                    seed=args.seed),
        "growth": warp.base_growth_check(f, seed=args.seed),
    }
    ok = (payload["asymptotics"]["ok"] and payload["determinant"]["ok"]
          and payload["growth"]["ok"])
    if args.search:
        try:
            res = warp.lambda_search(f, seed=args.seed)
            payload["lambda_search"] = res.as_dict()
            ok = ok and res.min_hsc_at_star > 0 \
                and all(v > 0 for _, v in res.persistence)
        except warp.HypothesisViolationError as exc:
            payload["lambda_search"] = {
                "hypothesis_violation": {"side": exc.side, "value": exc.value,
                                         "witness": exc.witness}}
            ok = False
    payload["ok"] = bool(ok)
    _emit(args, "warp", payload)
    return 0 if ok else 1


def cmd_example1(args) -> int:
    rep = warp.family_negativity_report(
        lam_values=tuple(parse_float_list(args.lambdas)),
        fiber_samples=args.fibers, seed=args.seed, budget=args.budget)
    ok = (rep["base"]["positive"] and rep["fiber_min"] >= -1e-8
          and rep["fiber_origin_max_abs"] <= 1e-9 and rep["all_negative"])
    _emit(args, "example1", {"report": rep, "ok": bool(ok)})
    return 0 if ok else 1


def cmd_selftest(args) -> int:
    rep = acceptance.run_all(seed=args.seed)
    for c in rep["checks"]:
        print(f"{'PASS' if c['ok'] else 'FAIL'} {c['name']}", file=sys.stderr)
    _emit(args, "selftest", {"suite": rep, "ok": rep["ok"]})
    return 0 if rep["ok"] else 1


# ---------------------------------------------------------------------------
# Parser


def _add_metric_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--catalog", help="bundled metric name, e.g. poincare, "
                   "fs_affine, paper_base, paper_G(1), warp_demo, flat(2)")
    p.add_argument("--file", help="metric JSON file (see save/load format)")


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0,
                   help="random seed recorded in the report (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsc-lab",
        description="Curvature workbench for Hermitian metrics in local "
                    "coordinates: jets, curvature tensors, holomorphic "
                    "sectional curvature, positivity scans, and warped "
                    "product experiments.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curvature", help="curvature tensor and sectional "
                       "value at a point")
    _add_metric_source(p)
    _add_seed(p)
    p.add_argument("--point", required=True, help="chart point")
    p.add_argument("--dir", help="holomorphic direction (optional)")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("scan", help="minimum sectional curvature over a "
                       "grid of chart points")
    _add_metric_source(p)
    _add_seed(p)
    p.add_argument("--grid", type=int, default=9, help="grid points per axis")
    p.add_argument("--dirs", type=int, default=64, help="probe directions per point")
    p.add_argument("--starts", type=int, default=8, help="descent starts per point")
    p.add_argument("--iters", type=int, default=200, help="descent iterations")
    p.add_argument("--box", help="override box: re_min:re_max:im_min:im_max "
                   "groups, comma-separated per coordinate")
    p.add_argument("--csv", help="also write per-point minima as CSV "
                   "(columns: index, re/im per coordinate, min_hsc)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("witness", help="search for a direction of negative "
                       "sectional curvature (exit 0 whether or not found)")
    _add_metric_source(p)
    _add_seed(p)
    p.add_argument("--budget", type=int, default=50000,
                   help="total point evaluations across staged scans")
    p.add_argument("--threshold", type=float, default=NEG_THRESHOLD,
                   help="negativity threshold (default %(default)g)")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("lemma1", help="weight constants, product "
                       "inequalities, and the certified split bound")
    _add_seed(p)
    p.add_argument("--k0", type=float, required=True, help="fiber quartic lower bound")
    p.add_argument("--k1", type=float, required=True, help="mixed entry bound")
    p.add_argument("--n", type=int, required=True, help="total dimension")
    p.add_argument("--s", type=int, required=True, help="fiber dimension")
    p.add_argument("--k2", type=float, help="base quartic bound "
                   "(default: the certified requirement)")
    p.add_argument("--trials", type=int, default=10000)
    p.set_defaults(func=cmd_lemma1)

    p = sub.add_parser("lemma2", help="pencil curvature formula, positivity "
                       "threshold, and large-lam decay for 1-D metrics")
    _add_seed(p)
    p.add_argument("--g", default="poincare", help="first metric (catalog "
                   "name or .json path)")
    p.add_argument("--h", default="fs_affine", help="second metric")
    p.add_argument("--point", default="0,0", help="chart point")
    p.add_argument("--lambdas", default="0.001,0.1,1,17",
                   help="lams for the formula cross-check")
    p.add_argument("--lam-max", type=float, default=warp.LAMBDA_MAX,
                   dest="lam_max")
    p.set_defaults(func=cmd_lemma2)

    p = sub.add_parser("warp", help="assemble a warped product and run its "
                       "checks; --search finds the positivity threshold")
    _add_seed(p)
    p.add_argument("--file", help="fibration JSON (default: bundled demo)")
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=1000,
                   help="determinant identity trials")
    p.add_argument("--search", action="store_true",
                   help="run the lam positivity search (slow)")
    p.add_argument("--write-demo", dest="write_demo",
                   help="write the bundled demo fibration JSON here")
    p.set_defaults(func=cmd_warp)

    p = sub.add_parser("example1", help="counterexample family report: "
                       "positive base, semi-positive fibers, negative "
                       "directions at every lam")
    _add_seed(p)
    p.add_argument("--lambdas", default="0.5,1,5,50")
    p.add_argument("--fibers", type=int, default=20,
                   help="sampled fibers for the semi-positivity check")
    p.add_argument("--budget", type=int, default=20000,
                   help="witness search budget per lam")
    p.set_defaults(func=cmd_example1)

    p = sub.add_parser("selftest", help="run the full acceptance suite "
                       "(pass/fail lines on stderr, JSON report on stdout)")
    _add_seed(p)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except dsl.MetricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (dsl.ParseError, PointOutsideBoxError, OSError) as exc:
        return _usage(str(exc))


if __name__ == "__main__":
    sys.exit(main())
