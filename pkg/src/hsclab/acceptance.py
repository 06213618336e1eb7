"""End-to-end acceptance checks.

Each check runs one advertised guarantee of the package at its stated
tolerance and returns a JSON-able detail dict.  run_core executes the
eight numerical checks; run_all additionally reruns the core and
byte-compares the canonical reports, so determinism is itself a checked
guarantee.  Reports carry no timestamps or timings: repeated runs with
the same seed must be byte-identical.
"""

from __future__ import annotations

import json

import numpy as np

from . import __version__, certify, dsl, warp, wirtinger
from .curvature import (MetricJet, curvature, gaussian_curvature_1d, hsc_dirs,
                        metric_jet, metric_jet_from_fd)

ONE_DIM_CATALOG = ("flat(1)", "poincare", "fs_affine", "paper_base")


def _hsc_at(spec, rng, count):
    pts = dsl.box_sample(spec.box, rng, count)
    mj = metric_jet(spec, pts)
    dirs = rng.standard_normal((count, 1, spec.dim)) \
        + 1j * rng.standard_normal((count, 1, spec.dim))
    return hsc_dirs(mj.g, curvature(mj).R, dirs)[:, 0]


def check_constant_curvature(seed: int) -> dict:
    """Hyperbolic disk metric has constant value -4, projective line
    metric in an affine chart +4, on 100 random points and directions."""
    rng = np.random.default_rng([seed, 1])
    errs = {}
    for name, target in (("poincare", -4.0), ("fs_affine", 4.0)):
        vals = _hsc_at(dsl.catalog(name), rng, 100)
        errs[name] = float(np.abs(vals - target).max())
    return {"ok": bool(max(errs.values()) <= 1e-8), "max_abs_error": errs,
            "tolerance": 1e-8, "points": 100}


def check_base_formula(seed: int) -> dict:
    """The bundled base metric has curvature 2/(1 + |z|^2), strictly
    positive on its chart."""
    rng = np.random.default_rng([seed, 2])
    spec = dsl.catalog("paper_base")
    pts = dsl.box_sample(spec.box, rng, 100)
    mj = metric_jet(spec, pts)
    dirs = np.ones((100, 1, 1), dtype=complex)
    vals = hsc_dirs(mj.g, curvature(mj).R, dirs)[:, 0]
    target = 2.0 / (1.0 + np.abs(pts[:, 0]) ** 2)
    err = float(np.abs(vals - target).max())
    return {"ok": bool(err <= 1e-8 and vals.min() > 0),
            "max_abs_error": err, "min_value": float(vals.min()),
            "tolerance": 1e-8, "points": 100}


def check_counterexample_family(seed: int) -> dict:
    """Positive base, semi-positive fibers vanishing at the fiber origin,
    yet a negative direction exists for every lam in the family."""
    rep = warp.family_negativity_report(seed=seed)
    ok = (rep["base"]["positive"]
          and rep["fiber_min"] >= -1e-8
          and rep["fiber_origin_max_abs"] <= 1e-9
          and rep["all_negative"])
    return {"ok": bool(ok), "report": rep}


def _random_jet_case(rng):
    """A random expression/point pair whose exact jet is finite and of
    moderate size; wild draws (overflow, near-singular) are redrawn."""
    while True:
        n = int(rng.integers(1, 4))
        expr = dsl.random_expr(rng, n)
        pts = (rng.uniform(-0.8, 0.8, (1, n))
               + 1j * rng.uniform(-0.8, 0.8, (1, n)))
        try:
            with np.errstate(all="ignore"):
                jet = dsl.eval_jet(expr, n, pts)
        except (wirtinger.SingularPointError, ZeroDivisionError, OverflowError):
            continue
        parts = [jet.value, jet.d, jet.dbar, jet.ddbar]
        scale = max(float(np.abs(p).max()) for p in parts)
        if not all(np.isfinite(p).all() for p in parts) or scale > 1e6:
            continue
        return expr, n, pts, jet, max(1.0, scale)


def _jet_slots(jet):
    return (jet.value, jet.d, jet.dbar, jet.ddbar)


def _slots_gap(a, b) -> float:
    return max(float(np.abs(x - y).max()) for x, y in zip(_jet_slots(a), _jet_slots(b)))


def check_jet_vs_divided_differences(seed: int) -> dict:
    """Arithmetic jets agree with the central-difference oracle on 1000
    random expressions: every slot within relative 1e-6, absolute floor
    1e-8 at the jet's scale.  Curvature computed from either jet route
    agrees within 1e-6 relative across the catalog, 100 points each.

    The oracle side is Richardson-extrapolated from steps 1e-3 and 5e-4,
    which removes the leading truncation term while keeping roundoff an
    order of magnitude under the floor.  Draws where the two raw steps
    disagree beyond 1e-5 of the jet scale are redrawn: divided
    differences cannot certify anything there.  The redraw looks only at
    the oracle, so a genuine arithmetic-rule defect can never hide
    behind it.
    """
    rng = np.random.default_rng([seed, 3])
    worst_ratio = 0.0
    checked = 0
    while checked < 1000:
        expr, n, pts, jet, scale = _random_jet_case(rng)
        fd1 = wirtinger.fd_jet(lambda z: dsl.eval_value(expr, z), pts[0],
                               step=1e-3)
        fd2 = wirtinger.fd_jet(lambda z: dsl.eval_value(expr, z), pts[0],
                               step=5e-4)
        if _slots_gap(fd1, fd2) > 1e-5 * scale:
            continue
        checked += 1
        floor = 1e-8 * scale
        for a, f1, f2 in zip(_jet_slots(jet), _jet_slots(fd1), _jet_slots(fd2)):
            refined = (4.0 * f2 - f1) / 3.0
            allowed = np.maximum(1e-6 * np.abs(a), floor)
            worst_ratio = max(worst_ratio,
                              float((np.abs(a - refined) / allowed).max()))

    worst_curv = 0.0
    for name in dsl.CATALOG_NAMES:
        specs = []
        if name == "flat(n)":
            specs = [dsl.catalog("flat(1)"), dsl.catalog("flat(2)")]
        elif name == "paper_G(lam)":
            specs = [dsl.catalog("paper_G(1)"), dsl.catalog("paper_G(5)")]
        elif name == "paper_fiber":
            # A family: pin the parameter coordinate to get a metric.
            from .curvature import restrict
            specs = [restrict(dsl.catalog("paper_fiber"), {2: 0.3 + 0.1j})]
        else:
            specs = [dsl.catalog(name)]
        for spec in specs:
            pts = dsl.box_sample(spec.box, rng, 100)
            r_arith = curvature(metric_jet(spec, pts)).R
            m1 = metric_jet_from_fd(spec, pts, step=1e-3)
            m2 = metric_jet_from_fd(spec, pts, step=5e-4)
            refined = MetricJet(m1.n, (4 * m2.g - m1.g) / 3,
                                (4 * m2.dg - m1.dg) / 3,
                                (4 * m2.dbarg - m1.dbarg) / 3,
                                (4 * m2.ddbarg - m1.ddbarg) / 3, m1.points)
            r_fd = curvature(refined, check=False).R
            scale = max(1.0, float(np.abs(r_arith).max()))
            worst_curv = max(worst_curv,
                             float(np.abs(r_arith - r_fd).max()) / scale)
    ok = worst_ratio <= 1.0 and worst_curv <= 1e-6
    return {"ok": bool(ok), "worst_jet_tolerance_ratio": worst_ratio,
            "worst_curvature_rel_error": worst_curv,
            "expressions": 1000, "points_per_metric": 100}


def check_one_dim_equivalence(seed: int) -> dict:
    """For one-coordinate metrics the sectional value is the Gaussian
    curvature: both routes agree within 1e-9 on 100 points per metric."""
    rng = np.random.default_rng([seed, 4])
    worst = 0.0
    for name in ONE_DIM_CATALOG:
        spec = dsl.catalog(name)
        pts = dsl.box_sample(spec.box, rng, 100)
        mj = metric_jet(spec, pts)
        dirs = rng.standard_normal((100, 1, 1)) + 1j * rng.standard_normal((100, 1, 1))
        via_hsc = hsc_dirs(mj.g, curvature(mj).R, dirs)[:, 0]
        via_gauss = np.array([gaussian_curvature_1d(spec, z) for z in pts[:, 0]])
        worst = max(worst, float(np.abs(via_hsc - via_gauss).max()))
    return {"ok": bool(worst <= 1e-9), "worst_abs_difference": worst,
            "tolerance": 1e-9, "points_per_metric": 100}


def check_split_bound_suite(seed: int) -> dict:
    """Weight identities are exact, the reference constant equals 312,
    the three product inequalities never fail on 1e5 random trials, and
    the certified quartic lower bound holds on 100 random tensors with
    the base bound at its certified minimum, 1e4 directions each."""
    ident_ok = True
    rng = np.random.default_rng([seed, 5])
    for _ in range(30):
        k0 = float(rng.uniform(0.2, 10)); k1 = float(rng.uniform(0.2, 10))
        n = int(rng.integers(2, 7)); s = int(rng.integers(1, n))
        ident = certify.weight_identities(k0, k1, n, s)
        ident_ok = ident_ok and ident["terms_equalized"] \
            and ident["constraint_sum_is_half_ratio"] and ident["ratio_formula_matches"]
    scale_ok = True
    ref = certify.choose_weights(3.7, 1.3, 5, 2).required_ratio
    for _ in range(20):
        t = float(2.0 ** rng.integers(-20, 21))
        scale_ok = scale_ok and \
            certify.choose_weights(3.7 * t, 1.3 * t, 5, 2).required_ratio == ref
    w812 = certify.choose_weights(8.0, 1.0, 2, 1)
    anchor_ok = w812.required_ratio == 312.0

    prod = certify.product_inequality_check(w812.a, w812.b, w812.c, w812.d,
                                            trials=100000, seed=seed)

    bound_violations = 0
    worst_margin = np.inf
    all_positive = True
    for k in range(100):
        k0 = float(rng.uniform(0.5, 8)); k1 = float(rng.uniform(0.2, 4))
        n = int(rng.integers(2, 6)); s = int(rng.integers(1, n))
        w = certify.choose_weights(k0, k1, n, s)
        tensor = certify.random_block_tensor(k0, k1, w.base_required, n, s,
                                             seed=int(rng.integers(0, 2**31)))
        rep = certify.split_bound_check(tensor, w, trials=10000,
                                        seed=int(rng.integers(0, 2**31)))
        bound_violations += rep["violations"]
        worst_margin = min(worst_margin, rep["worst_margin"])
        all_positive = all_positive and rep["all_strictly_positive"]
    ok = (ident_ok and scale_ok and anchor_ok and prod["violations"] == 0
          and bound_violations == 0 and all_positive)
    return {"ok": bool(ok), "identities_exact": bool(ident_ok),
            "scale_invariance_exact": bool(scale_ok),
            "reference_constant": w812.required_ratio,
            "reference_constant_is_312": bool(anchor_ok),
            "product_inequality": prod,
            "bound_violations": int(bound_violations),
            "bound_worst_margin": float(worst_margin),
            "bound_all_strictly_positive": bool(all_positive),
            "tensors": 100, "directions_per_tensor": 10000}


def check_pencil_suite(seed: int) -> dict:
    """Closed pencil formula matches direct curvature of the summed
    metric (50 pairs x 5 points x 4 lams, 1e-9); the positivity threshold
    of the hyperbolic/projective pair at 0 matches the positive root of
    the pencil numerator within 1e-6; lam * K approaches the second
    metric's curvature within 1% at lam = 1e4."""
    rng = np.random.default_rng([seed, 6])
    worst = 0.0
    for _ in range(50):
        gs = dsl.catalog(ONE_DIM_CATALOG[rng.integers(0, len(ONE_DIM_CATALOG))])
        hs = dsl.catalog(ONE_DIM_CATALOG[rng.integers(0, len(ONE_DIM_CATALOG))])
        box = certify.pencil_spec(gs, hs, 1.0).box[0]
        for _ in range(5):
            p = complex(rng.uniform(box.re_min, box.re_max),
                        rng.uniform(box.im_min, box.im_max))
            for lam in (1e-3, 0.1, 1.0, 17.0):
                closed = certify.pencil_curvature(gs, hs, p, lam)
                direct = gaussian_curvature_1d(certify.pencil_spec(gs, hs, lam), p)
                worst = max(worst, abs(closed - direct) / max(1.0, abs(direct)))

    gs, hs = dsl.catalog("poincare"), dsl.catalog("fs_affine")
    g, gz, gzbar, gzz = certify._entry_jet_scalars(gs, 0j)
    h, hz, hzbar, hzz = certify._entry_jet_scalars(hs, 0j)
    kg = gaussian_curvature_1d(gs, 0j)
    kh = gaussian_curvature_1d(hs, 0j)
    # Pencil numerator as a quadratic in lam; its positive root is the
    # independently computed threshold the search must reproduce.
    a2 = h.real ** 3 * kh
    a1 = 2 * (-h.real * gzz - g.real * hzz + gz * hzbar + hz * gzbar).real
    a0 = g.real ** 3 * kg
    root = float((-a1 + np.sqrt(a1 * a1 - 4 * a2 * a0)) / (2 * a2))
    thr = certify.pencil_positive_threshold(gs, hs, 0j)
    thr_err = abs(thr["threshold"] - root)

    try:
        decay = certify.pencil_decay_check(gs, hs, 0j)
        decay_ok = True
    except ArithmeticError as exc:
        decay = {"error": str(exc)}
        decay_ok = False
    ok = worst <= 1e-9 and thr_err <= 1e-6 and decay_ok
    return {"ok": bool(ok), "worst_formula_rel_error": worst,
            "numerator_root": root, "threshold": thr["threshold"],
            "threshold_error": float(thr_err), "decay": decay,
            "pairs": 50, "points_per_pair": 5}


def check_warp_suite(seed: int) -> dict:
    """Block determinant identity on 1000 random matrices; inverse block
    asymptotics slopes within 0.2 of their orders; curvature never
    increases on coordinate slices (1000 trials on the counterexample
    family and on the assembled warp product); curvature numerator grows
    along base directions; the positivity search returns a finite lam
    with a positive scanned minimum, negative at lam = 1e-3, persisting
    at twice and four times the threshold."""
    det = warp.determinant_split_check(trials=1000, seed=seed)

    rng = np.random.default_rng([seed, 7])
    asym_ok = True
    slopes = []
    for _ in range(5):
        n = int(rng.integers(3, 7)); s = int(rng.integers(1, n - 1))
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        rep = warp.inverse_asymptotics(a @ a.conj().T + n * np.eye(n), s)
        asym_ok = asym_ok and rep["ok"]
        slopes.append({k: rep[k]["slope"] for k in
                       ("fiber_error", "base_diag_error", "cross_value",
                        "base_offdiag_value")})

    f = warp.warp_demo_fibration()
    dec_violations = 0
    dec_worst = np.inf
    for spec in (dsl.catalog("paper_G(1)"), warp.assemble(f, 4.0)):
        for fixed in ({2: 0.3 + 0.2j}, {1: 0.25 - 0.35j}):
            rep = warp.submanifold_decreasing_check(spec, fixed, trials=500,
                                                    seed=seed)
            dec_violations += rep["violations"]
            dec_worst = min(dec_worst, rep["worst_margin"])

    try:
        growth = warp.base_growth_check(f, seed=seed)
        growth_ok = growth["ok"]
    except ArithmeticError as exc:
        growth = {"error": str(exc)}
        growth_ok = False

    search = warp.lambda_search(f, seed=seed)
    search_ok = (np.isfinite(search.lambda_star)
                 and search.min_hsc_at_star > 0
                 and search.history[0][0] == 1e-3
                 and search.history[0][1] < -1e-8
                 and all(v > 0 for _, v in search.persistence)
                 and all(v <= 0 for l, v in search.history
                         if l < search.lambda_star / 2))
    ok = (det["ok"] and asym_ok and dec_violations == 0
          and growth_ok and search_ok)
    return {"ok": bool(ok), "determinant": det,
            "asymptotics_ok": bool(asym_ok), "asymptotics_slopes": slopes,
            "decreasing_violations": int(dec_violations),
            "decreasing_worst_margin": float(dec_worst),
            "growth": growth, "search": search.as_dict(),
            "search_ok": bool(search_ok)}


CORE_CHECKS = (
    ("constant_curvature_models", check_constant_curvature),
    ("positive_base_formula", check_base_formula),
    ("counterexample_family", check_counterexample_family),
    ("jets_match_divided_differences", check_jet_vs_divided_differences),
    ("one_dimensional_equivalence", check_one_dim_equivalence),
    ("split_bound_certification", check_split_bound_suite),
    ("pencil_analysis", check_pencil_suite),
    ("warped_fibration_suite", check_warp_suite),
)

CHECK_NAMES = tuple(name for name, _ in CORE_CHECKS) + ("deterministic_reports",)


def canonical_bytes(report: dict) -> bytes:
    return json.dumps(report, sort_keys=True, separators=(",", ":")).encode()


def run_core(seed: int = 0) -> dict:
    checks = []
    for name, fn in CORE_CHECKS:
        detail = fn(seed)
        checks.append({"name": name, "ok": bool(detail.pop("ok")),
                       "detail": detail})
    return {"schema": 1, "version": __version__, "seed": seed,
            "checks": checks, "ok": all(c["ok"] for c in checks)}


def run_all(seed: int = 0) -> dict:
    """Core checks plus determinism: the core is run twice and the two
    canonical reports must agree byte for byte."""
    first = run_core(seed)
    second = run_core(seed)
    same = canonical_bytes(first) == canonical_bytes(second)
    checks = list(first["checks"])
    checks.append({"name": "deterministic_reports", "ok": bool(same),
                   "detail": {"bytes": len(canonical_bytes(first)),
                              "identical": bool(same)}})
    return {"schema": 1, "version": __version__, "seed": seed,
            "checks": checks, "ok": all(c["ok"] for c in checks)}
