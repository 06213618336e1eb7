"""Warped product metrics on holomorphic fibrations.

A fibration here is a coordinate chart with s fiber coordinates followed
by m base coordinates.  Given a fiber metric block (which may depend on
the base coordinates: the warp) and a base metric, the assembled family

    g(lam) = blockdiag(fiber, (mu0 + lam) * base)

is studied as lam grows: inverse block asymptotics, growth of the
curvature numerator along base directions, curvature decrease on
coordinate submanifolds, and a bisection search for the smallest lam
making the holomorphic sectional curvature positive on the chart.

The search refuses charts that fail its standing hypotheses (positive
base curvature, positive fiber curvature on sampled fibers); the bundled
counterexample family shows why: its fiber curvature vanishes at one
point of every fiber, and no lam rescues positivity there.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from . import dsl
from .curvature import (curvature, gaussian_curvature_1d, hsc_dirs,
                        metric_jet, restrict)
from .positivity import (NEG_THRESHOLD, _c2pair, find_negative_witness,
                         scan_chart)

LAMBDA_MAX = float(2 ** 30)
MU0_MAX_EXPONENT = 40
HYPOTHESIS_MARGIN = 1e-8


# ---------------------------------------------------------------------------
# Fibration charts


@dataclass(frozen=True)
class FibrationSpec:
    """A chart with s fiber coordinates, m base coordinates, a fiber
    metric block over all n = s + m coordinates, and a base metric over
    its own m coordinates (z1..zm in the base's numbering)."""

    name: str
    s: int
    m: int
    fiber_entries: tuple
    base_entries: tuple
    mu0: float
    box: tuple

    @property
    def n(self) -> int:
        return self.s + self.m

    def base_spec(self) -> dsl.MetricSpec:
        return dsl.MetricSpec(f"{self.name}.base", self.m, self.base_entries,
                              self.box[self.s:])


def _check_fibration(f: FibrationSpec) -> None:
    if f.s < 1 or f.m < 1:
        raise ValueError("need at least one fiber and one base coordinate")
    if len(f.fiber_entries) != f.s or any(len(r) != f.s for r in f.fiber_entries):
        raise ValueError("fiber_entries must be s x s")
    if len(f.base_entries) != f.m or any(len(r) != f.m for r in f.base_entries):
        raise ValueError("base_entries must be m x m")
    if len(f.box) != f.n:
        raise ValueError("box must cover all s + m coordinates")
    if f.mu0 < 0:
        raise ValueError("mu0 must be nonnegative")


def fibration_to_dict(f: FibrationSpec) -> dict:
    return {
        "name": f.name, "s": f.s, "m": f.m,
        "fiber_entries": [[dsl.to_source(e) for e in row] for row in f.fiber_entries],
        "base_entries": [[dsl.to_source(e) for e in row] for row in f.base_entries],
        "mu0": f.mu0,
        "box": [[r.re_min, r.re_max, r.im_min, r.im_max] for r in f.box],
    }


def fibration_from_dict(d: dict) -> FibrationSpec:
    s, m = int(d["s"]), int(d["m"])
    fiber = tuple(tuple(dsl.parse(src, s + m) for src in row)
                  for row in d["fiber_entries"])
    base = tuple(tuple(dsl.parse(src, m) for src in row)
                 for row in d["base_entries"])
    box = tuple(dsl.Rect(*map(float, r)) for r in d["box"])
    f = FibrationSpec(str(d["name"]), s, m, fiber, base, float(d["mu0"]), box)
    _check_fibration(f)
    return f


def save_fibration(f: FibrationSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(fibration_to_dict(f), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_fibration(path) -> FibrationSpec:
    with open(path, encoding="utf-8") as fh:
        return fibration_from_dict(json.load(fh))


def warp_demo_fibration() -> FibrationSpec:
    """Bundled example: one warped fiber coordinate over a positively
    curved one-dimensional base; assembling it at mu0=0, lam=1 reproduces
    the catalog metric warp_demo."""
    fiber = ((dsl.parse("exp(z2*conj(z2))/(1+z1*conj(z1))^2", 2),),)
    base = ((dsl.parse("1/(1+z1*conj(z1))", 1),),)
    box = (dsl.Rect(-dsl.DISK_HALF, dsl.DISK_HALF, -dsl.DISK_HALF, dsl.DISK_HALF),) * 2
    return FibrationSpec("warp_demo", 1, 1, fiber, base, 0.0, box)


def assemble(f: FibrationSpec, lam: float, name: str | None = None) -> dsl.MetricSpec:
    """The warped product metric at parameter lam: fiber block unchanged,
    base block scaled by (mu0 + lam) and shifted onto coordinates
    z_{s+1}..z_n, zero off-diagonal blocks."""
    _check_fibration(f)
    scale = f.mu0 + float(lam)
    if not scale > 0:
        raise ValueError("mu0 + lam must be positive")
    n, s = f.n, f.s
    zero = dsl.Lit(0j)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < s and j < s:
                row.append(f.fiber_entries[i][j])
            elif i >= s and j >= s:
                row.append(dsl.scale_expr(
                    scale, dsl.shift_vars(f.base_entries[i - s][j - s], s)))
            else:
                row.append(zero)
        rows.append(tuple(row))
    if name is None:
        name = f.name if (scale == 1.0 and f.mu0 == 0.0) else \
            f"{f.name}@{dsl._fmt_real(float(lam))}"
    return dsl.MetricSpec(name, n, tuple(rows), f.box)


def mu0_search(f: FibrationSpec, samples: int = 300, seed: int = 0) -> float:
    """Smallest mu0 on the power-of-two schedule 2^0, 2^1, ... such that
    the assembled metric at lam = 0 validates on sampled points."""
    for k in range(MU0_MAX_EXPONENT + 1):
        mu0 = float(2.0 ** k)
        candidate = dataclasses.replace(f, mu0=mu0)
        try:
            dsl.validate(assemble(candidate, 0.0), samples=samples, seed=seed)
            return mu0
        except dsl.MetricError:
            continue
    raise RuntimeError(f"no valid mu0 up to 2^{MU0_MAX_EXPONENT}")


# ---------------------------------------------------------------------------
# Positivity search in lam


class HypothesisViolationError(RuntimeError):
    """A standing hypothesis of the positivity search failed.

    side is "fiber" or "base"; witness locates the failure.
    """

    def __init__(self, side: str, value: float, witness):
        self.side = side
        self.value = value
        self.witness = witness
        super().__init__(
            f"{side} curvature hypothesis fails: min {value:.6g} at {witness}")


@dataclass(frozen=True)
class LambdaSearchResult:
    lambda_star: float
    min_hsc_at_star: float
    history: tuple
    persistence: tuple
    seed: int

    def as_dict(self) -> dict:
        return {
            "lambda_star": self.lambda_star,
            "min_hsc_at_star": self.min_hsc_at_star,
            "history": [[l, v] for l, v in self.history],
            "persistence": [[l, v] for l, v in self.persistence],
            "seed": self.seed,
        }


def _fiber_restriction(f: FibrationSpec, base_point) -> dsl.MetricSpec:
    """Induced metric on the fiber through a fixed base point.

    Restriction keeps only the fiber block, so the base scale is
    irrelevant here; lam = 1 is as good as any.
    """
    fixed = {f.s + 1 + a: complex(base_point[a]) for a in range(f.m)}
    return restrict(assemble(f, 1.0), fixed)


def check_hypotheses(f: FibrationSpec, fiber_samples: int = 5, seed: int = 0,
                     grid_per_axis: int = 7, dirs: int = 16, starts: int = 2,
                     iters: int = 80) -> dict:
    """Sampled prechecks for the positivity search.

    Base: the base metric must have strictly positive minimal curvature
    on its chart.  Fiber: the induced fiber metric over each sampled base
    point must too.  Raises HypothesisViolationError naming the failing
    side with a witness point.
    """
    _check_fibration(f)
    base_scan = scan_chart(f.base_spec(), grid_per_axis=grid_per_axis,
                           dirs=dirs, seed=seed, starts=starts, iters=iters)
    if base_scan.min_hsc <= HYPOTHESIS_MARGIN:
        raise HypothesisViolationError("base", base_scan.min_hsc,
                                       [_c2pair(z) for z in base_scan.witness_point])
    rng = np.random.default_rng([seed, 17])
    base_boxes = f.box[f.s:]
    fiber_mins = []
    for k in range(fiber_samples):
        c = dsl.box_sample(base_boxes, rng, 1)[0]
        sub = _fiber_restriction(f, c)
        sub_scan = scan_chart(sub, grid_per_axis=grid_per_axis, dirs=dirs,
                              seed=seed, starts=starts, iters=iters)
        if sub_scan.min_hsc <= HYPOTHESIS_MARGIN:
            raise HypothesisViolationError(
                "fiber", sub_scan.min_hsc,
                {"base_point": [_c2pair(z) for z in c],
                 "fiber_point": [_c2pair(z) for z in sub_scan.witness_point]})
        fiber_mins.append(sub_scan.min_hsc)
    return {
        "base_min_hsc": base_scan.min_hsc,
        "fiber_min_hsc": min(fiber_mins),
        "fiber_samples": fiber_samples,
        "seed": seed,
    }


def lambda_search(f: FibrationSpec, lam_start: float = 1e-3,
                  lam_max: float = LAMBDA_MAX, bisections: int = 6,
                  grid_per_axis: int = 5, dirs: int = 24, starts: int = 4,
                  iters: int = 120, seed: int = 0,
                  skip_hypotheses: bool = False) -> LambdaSearchResult:
    """Smallest lam (doubling from lam_start, then bisection) with
    strictly positive scanned minimal curvature of the assembled metric.

    Every lam is scanned with the same seed and budget, so the recorded
    history is comparable across lam.  The returned lambda_star is the
    positive end of the final bracket; persistence holds the re-scanned
    minima at 2*lambda_star and 4*lambda_star.
    """
    if not skip_hypotheses:
        check_hypotheses(f, seed=seed)

    def scan_min(lam: float) -> float:
        spec = assemble(f, lam)
        rep = scan_chart(spec, grid_per_axis=grid_per_axis, dirs=dirs,
                         seed=seed, starts=starts, iters=iters)
        return rep.min_hsc

    history = []
    lam = float(lam_start)
    val = scan_min(lam)
    history.append((lam, val))
    lo = 0.0
    while val <= 0:
        lo = lam
        lam *= 2
        if lam > lam_max:
            raise RuntimeError(f"no positive scan minimum up to lam_max={lam_max:g}")
        val = scan_min(lam)
        history.append((lam, val))
    hi, hi_val = lam, val
    if lo > 0.0:
        for _ in range(bisections):
            mid = 0.5 * (lo + hi)
            mval = scan_min(mid)
            history.append((mid, mval))
            if mval > 0:
                hi, hi_val = mid, mval
            else:
                lo = mid
    persistence = tuple((m * hi, scan_min(m * hi)) for m in (2.0, 4.0))
    return LambdaSearchResult(lambda_star=hi, min_hsc_at_star=hi_val,
                              history=tuple(history),
                              persistence=persistence, seed=seed)


# ---------------------------------------------------------------------------
# Inverse block asymptotics


def _fit_or_zero(lams, vals):
    """Log-log slope, or None when the series is exactly zero (below
    1e-14): decoupled blocks produce identically zero entries."""
    v = np.asarray(vals, dtype=float)
    if np.all(v < 1e-14):
        return None
    if np.any(v <= 0):
        raise ArithmeticError("cannot fit a slope through zero values")
    return float(np.polyfit(np.log(np.asarray(lams, dtype=float)), np.log(v), 1)[0])


def inverse_asymptotics(h0, s: int, lam_values=None) -> dict:
    """Large-lam block structure of inv(h0 + lam * blockdiag(0, I)).

    The fiber block of the inverse tends to inv(fiber block of h0) with
    error O(1/lam); lam times the base diagonal of the inverse tends to 1
    with error O(1/lam); mixed entries are O(1/lam) and base off-diagonal
    entries O(1/lam^2).  Reports the fitted log-log slopes (None for
    identically zero series, which occur when the blocks decouple) and
    whether each is within 0.2 of its expected order.
    """
    h0 = np.asarray(h0, dtype=complex)
    n = h0.shape[0]
    if not (0 < s < n):
        raise ValueError("need 0 < s < n")
    if np.abs(h0 - h0.conj().T).max() > 1e-12 * max(1.0, np.abs(h0).max()):
        raise ValueError("h0 must be Hermitian")
    if lam_values is None:
        lam_values = np.geomspace(1e2, 1e6, 5)
    lams = [float(l) for l in lam_values]
    bump = np.zeros((n, n))
    bump[s:, s:] = np.eye(n - s)
    fiber_inv = np.linalg.inv(h0[:s, :s])
    off_base = ~np.eye(n - s, dtype=bool)
    err_fiber, err_base_diag, val_cross, val_base_off = [], [], [], []
    for lam in lams:
        hinv = np.linalg.inv(h0 + lam * bump)
        err_fiber.append(np.abs(hinv[:s, :s] - fiber_inv).max())
        err_base_diag.append(np.abs(lam * np.diagonal(hinv[s:, s:]) - 1).max())
        val_cross.append(np.abs(hinv[:s, s:]).max())
        val_base_off.append(np.abs(hinv[s:, s:][off_base]).max()
                            if n - s > 1 else 0.0)
    series = {
        "fiber_error": (err_fiber, -1.0),
        "base_diag_error": (err_base_diag, -1.0),
        "cross_value": (val_cross, -1.0),
        "base_offdiag_value": (val_base_off, -2.0),
    }
    out = {"lam_values": lams, "s": s, "n": n}
    ok = True
    for key, (vals, expected) in series.items():
        slope = _fit_or_zero(lams, vals)
        within = slope is None or abs(slope - expected) <= 0.2
        ok = ok and within
        out[key] = {"values": [float(v) for v in vals],
                    "slope": slope, "expected_slope": expected,
                    "within_0.2": within}
    out["ok"] = ok
    return out


def fibration_inverse_asymptotics(f: FibrationSpec, point=None,
                                  lam_values=None) -> dict:
    """Inverse asymptotics of the assembled metric value at a point.

    The base block is first orthonormalized (Cholesky of the lam = 1
    value), after which the family is h0 + lam' * blockdiag(0, I) up to
    the affine reparametrization absorbed into lam'.
    """
    _check_fibration(f)
    if point is None:
        point = np.array([(r.re_min + r.re_max) / 2 + 1j * (r.im_min + r.im_max) / 2
                          for r in f.box]) + 0.1
        point = np.array([complex(min(max(z.real, r.re_min), r.re_max),
                                  min(max(z.imag, r.im_min), r.im_max))
                          for z, r in zip(point, f.box)])
    pts = np.asarray(point, dtype=complex).reshape(1, f.n)
    g_fiber = dsl.metric_values(
        dsl.MetricSpec(f.name, f.n,
                       tuple(tuple(row) for row in f.fiber_entries), f.box), pts)[0]
    g_base = dsl.metric_values(f.base_spec(), pts[:, f.s:])[0]
    L = np.linalg.cholesky(g_base)
    T = np.linalg.inv(L).conj().T
    h0 = np.zeros((f.n, f.n), dtype=complex)
    h0[:f.s, :f.s] = g_fiber
    h0[f.s:, f.s:] = f.mu0 * np.eye(f.m)
    out = inverse_asymptotics(h0, f.s, lam_values)
    out["point"] = [_c2pair(z) for z in np.asarray(point, dtype=complex)]
    out["base_transform"] = [[_c2pair(z) for z in row] for row in T]
    return out


def determinant_split_check(dim: int = 6, trials: int = 1000, seed: int = 0) -> dict:
    """det(H) = det(P) * det(S - R inv(P) Q) for the 2x2 block partition
    of random Hermitian positive definite matrices; relative error must
    stay below 1e-9."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, dim + 1))
        s = int(rng.integers(1, n))
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = a @ a.conj().T + n * np.eye(n)
        p, q = h[:s, :s], h[:s, s:]
        r, t = h[s:, :s], h[s:, s:]
        lhs = np.linalg.det(h)
        rhs = np.linalg.det(p) * np.linalg.det(t - r @ np.linalg.solve(p, q))
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return {"trials": trials, "seed": seed, "worst_rel_error": float(worst),
            "ok": bool(worst <= 1e-9)}


# ---------------------------------------------------------------------------
# Curvature decrease on coordinate submanifolds


def submanifold_decreasing_check(spec: dsl.MetricSpec, fixed: dict,
                                 trials: int = 1000, seed: int = 0) -> dict:
    """Holomorphic sectional curvature does not increase when restricting
    to a coordinate slice: for tangent directions of the slice, the
    restricted curvature is at most the ambient one (slack 1e-9 relative).
    """
    sub = restrict(spec, fixed)
    kept = [k for k in range(1, spec.n + 1) if k not in fixed]
    kept_dirs = [k for k in kept if k <= spec.dim]
    if sub.dim == 0:
        raise ValueError("slice has no tangent directions")
    rng = np.random.default_rng([seed, 23])
    pts_sub = dsl.box_sample(sub.box, rng, trials)
    dirs_sub = rng.standard_normal((trials, sub.dim)) \
        + 1j * rng.standard_normal((trials, sub.dim))

    pts_amb = np.zeros((trials, spec.n), dtype=complex)
    for col, k in enumerate(kept):
        pts_amb[:, k - 1] = pts_sub[:, col]
    for k, v in fixed.items():
        pts_amb[:, k - 1] = complex(v)
    dirs_amb = np.zeros((trials, spec.dim), dtype=complex)
    for col, k in enumerate(kept_dirs):
        dirs_amb[:, k - 1] = dirs_sub[:, col]

    mj_sub = metric_jet(sub, pts_sub)
    k_sub = hsc_dirs(mj_sub.g, curvature(mj_sub).R, dirs_sub[:, None, :])[:, 0]
    mj_amb = metric_jet(spec, pts_amb, check_box=False)
    k_amb = hsc_dirs(mj_amb.g, curvature(mj_amb).R, dirs_amb[:, None, :])[:, 0]

    scale = np.maximum(1.0, np.abs(k_amb))
    margin = (k_amb - k_sub) / scale
    return {
        "trials": trials, "seed": seed,
        "violations": int(np.sum(margin < -1e-9)),
        "worst_margin": float(margin.min()),
        "fixed": {str(k): _c2pair(complex(v)) for k, v in fixed.items()},
    }


# ---------------------------------------------------------------------------
# Growth of the curvature numerator along base directions


def base_growth_check(f: FibrationSpec, point=None,
                      lam_values=(1e2, 1e3, 1e4), seed: int = 0) -> dict:
    """The curvature numerator along a fixed base direction grows at
    least linearly in lam (log-log slope >= 0.8).

    The direction has zero fiber components, random base components, and
    is normalized once against the lam = 1 metric; it is deliberately not
    renormalized per lam, so the statement is about the raw numerator of
    the assembled family.
    """
    _check_fibration(f)
    rng = np.random.default_rng([seed, 31])
    if point is None:
        point = dsl.box_sample(f.box, rng, 1)[0]
    pts = np.asarray(point, dtype=complex).reshape(1, f.n)
    xi = np.zeros(f.n, dtype=complex)
    xi[f.s:] = rng.standard_normal(f.m) + 1j * rng.standard_normal(f.m)
    g1 = metric_jet(assemble(f, 1.0), pts).g[0]
    xi = xi / np.sqrt(np.einsum("ij,i,j->", g1, xi, xi.conj()).real)
    lams = [float(l) for l in lam_values]
    nums = []
    for lam in lams:
        mj = metric_jet(assemble(f, lam), pts)
        R = curvature(mj).R[0]
        nums.append(float(np.einsum("ijkl,i,j,k,l->", R, xi, xi.conj(),
                                    xi, xi.conj()).real))
    if min(nums) <= 0:
        raise ArithmeticError("curvature numerator not positive along the base")
    slope = float(np.polyfit(np.log(lams), np.log(nums), 1)[0])
    return {
        "point": [_c2pair(z) for z in np.asarray(point, dtype=complex)],
        "lam_values": lams, "numerators": nums,
        "slope": slope, "ok": slope >= 0.8, "seed": seed,
    }


# ---------------------------------------------------------------------------
# The bundled counterexample family


def family_negativity_report(lam_values=(0.5, 1.0, 5.0, 50.0),
                             fiber_samples: int = 20, seed: int = 0,
                             budget: int = 20000) -> dict:
    """Full numerical story of the counterexample family paper_G(lam).

    (a) The base metric has strictly positive curvature on its chart.
    (b) Induced fiber metrics have nonnegative curvature, vanishing at
        the fiber origin, on sampled fibers (the fiber block does not
        depend on lam).
    (c) Still, for every lam in lam_values the assembled metric admits a
        direction of negative holomorphic sectional curvature.
    """
    base = dsl.catalog("paper_base")
    base_scan = scan_chart(base, grid_per_axis=11, dirs=2, seed=seed,
                           starts=1, iters=1)
    rng = np.random.default_rng([seed, 41])
    g1 = dsl.catalog("paper_G(1)")
    fiber_box = g1.box[1:]
    fibers = []
    for _ in range(fiber_samples):
        c = complex(dsl.box_sample(fiber_box, rng, 1)[0, 0])
        sub = restrict(g1, {2: c})
        rep = scan_chart(sub, grid_per_axis=11, dirs=2, seed=seed,
                         starts=1, iters=1)
        fibers.append({
            "base_point": _c2pair(c),
            "min_hsc": rep.min_hsc,
            "origin_hsc": gaussian_curvature_1d(sub, 0j),
        })
    witnesses = []
    for lam in lam_values:
        spec = dsl.catalog(f"paper_G({dsl._fmt_real(float(lam))})")
        w = find_negative_witness(spec, budget=budget, seed=seed)
        witnesses.append({
            "lam": float(lam),
            "witness": None if w is None else w.as_dict(),
        })
    return {
        "base": {"min_hsc": base_scan.min_hsc,
                 "positive": base_scan.min_hsc > 0},
        "fibers": fibers,
        "fiber_min": min(f["min_hsc"] for f in fibers),
        "fiber_origin_max_abs": max(abs(f["origin_hsc"]) for f in fibers),
        "witnesses": witnesses,
        "all_negative": all(w["witness"] is not None
                            and w["witness"]["value"] < NEG_THRESHOLD
                            for w in witnesses),
        "seed": seed,
    }
