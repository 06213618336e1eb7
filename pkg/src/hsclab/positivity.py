"""Direction minimization of sectional values, chart scans, and witnesses.

The direction optimizer is a probe-then-descend scheme: a batch of random
metric-unit directions measures the landscape, then multi-start projected
coordinate descent (shrinking real/imaginary axis steps, renormalizing to
metric norm 1 after every move, accepting only improvements) refines the
minimum.  All randomness derives from per-point generator streams seeded
as [seed, point_index, purpose], so reports are reproducible and adding
directions or starts only extends the candidate set: minima are monotone
non-increasing in dirs, starts, and iterations at a fixed seed.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import dsl
from .curvature import curvature, hsc_dirs, metric_jet

NEG_THRESHOLD = -1e-8
DEFAULT_GRID = 9
DEFAULT_DIRS = 64
DEFAULT_STARTS = 8
DEFAULT_ITERS = 200
STEP_INIT = 0.25
STEP_MIN = 1e-7


def _complex_dirs(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    # one draw call so a longer batch extends, not reshuffles, a short one
    arr = rng.standard_normal((count, 2 * d))
    return arr[:, :d] + 1j * arr[:, d:]


def _unit(g: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Normalize dirs (..., m, d) to metric norm 1 under g (..., d, d)."""
    nrm2 = np.einsum("...ij,...mi,...mj->...m", g, dirs, np.conjugate(dirs)).real
    return dirs / np.sqrt(np.maximum(nrm2, 1e-300))[..., None]


def _descend(g: np.ndarray, R: np.ndarray, dirs0: np.ndarray, iters: int):
    """Lockstep coordinate descent on K over the metric unit sphere.

    g (N, d, d), R (N, d, d, d, d), dirs0 (N, d).  Each row descends
    independently; returns (values, dirs) with values non-increasing over
    iterations.
    """
    N, d = dirs0.shape
    dirs = _unit(g, dirs0[:, None, :])[:, 0, :]
    val = hsc_dirs(g, R, dirs[:, None])[:, 0]
    step = np.full(N, STEP_INIT)
    # proposal slot 0 is the current direction so ties never move
    moves = np.zeros((4 * d, d), dtype=complex)
    for a in range(d):
        moves[2 * a, a] = 1.0
        moves[2 * a + 1, a] = -1.0
        moves[2 * d + 2 * a, a] = 1.0j
        moves[2 * d + 2 * a + 1, a] = -1.0j
    # rows whose step has shrunk below STEP_MIN are frozen and leave the
    # working set; rows never interact, so this changes nothing else
    active = np.arange(N)
    for _ in range(iters):
        if active.size == 0:
            break
        cur = dirs[active][:, None, :]
        props = np.concatenate(
            [cur, cur + step[active][:, None, None] * moves[None]], axis=1)
        props = _unit(g[active], props)
        vals = hsc_dirs(g[active], R[active], props)
        best = np.argmin(vals, axis=1)
        rows = np.arange(active.size)
        improved = vals[rows, best] < val[active]
        dirs[active] = np.where(improved[:, None], props[rows, best], dirs[active])
        val[active] = np.where(improved, vals[rows, best], val[active])
        new_step = np.where(improved, step[active], step[active] * 0.5)
        step[active] = new_step
        active = active[new_step >= STEP_MIN]
    return val, dirs


def _min_over_dirs(g, R, dirs, starts, iters, seed, point_indices):
    """Per-point direction minimum for stacked points.

    g (P, d, d), R (P, d⁴); returns (values (P,), dirs (P, d)).
    """
    P, d = g.shape[0], g.shape[-1]
    probe = np.empty((P, dirs, d), dtype=complex)
    start_dirs = np.empty((P, starts, d), dtype=complex)
    for row, pidx in enumerate(point_indices):
        probe[row] = _complex_dirs(np.random.default_rng([seed, int(pidx), 0]), dirs, d)
        start_dirs[row] = _complex_dirs(np.random.default_rng([seed, int(pidx), 1]), starts, d)
    probe = _unit(g, probe)
    probe_vals = hsc_dirs(g, R, probe)

    flat_g = np.repeat(g, starts, axis=0)
    flat_R = np.repeat(R, starts, axis=0)
    ref_vals, ref_dirs = _descend(flat_g, flat_R, start_dirs.reshape(P * starts, d), iters)
    ref_vals = ref_vals.reshape(P, starts)
    ref_dirs = ref_dirs.reshape(P, starts, d)

    cand_vals = np.concatenate([probe_vals, ref_vals], axis=1)
    cand_dirs = np.concatenate([probe, ref_dirs], axis=1)
    best = np.argmin(cand_vals, axis=1)
    rows = np.arange(P)
    return cand_vals[rows, best], cand_dirs[rows, best]


def _c2pair(z: complex):
    return [float(np.real(z)), float(np.imag(z))]


def _vec_dict(v) -> list:
    return [_c2pair(z) for z in np.asarray(v).reshape(-1)]


@dataclass(frozen=True)
class ScanReport:
    name: str
    n: int
    min_hsc: float
    witness_point: tuple
    witness_dir: tuple
    points_scanned: int
    dirs_per_point: int
    starts: int
    iters: int
    grid_per_axis: int
    margin: float
    seed: int
    points: np.ndarray = field(repr=False)
    per_point_min: np.ndarray = field(repr=False)

    def as_dict(self, include_points: bool = False) -> dict:
        out = {
            "name": self.name,
            "n": self.n,
            "min_hsc": self.min_hsc,
            "witness_point": _vec_dict(self.witness_point),
            "witness_dir": _vec_dict(self.witness_dir),
            "points_scanned": self.points_scanned,
            "dirs_per_point": self.dirs_per_point,
            "starts": self.starts,
            "iters": self.iters,
            "grid_per_axis": self.grid_per_axis,
            "margin": self.margin,
            "seed": self.seed,
        }
        if include_points:
            out["per_point_min"] = [float(v) for v in self.per_point_min]
            out["points"] = [_vec_dict(p) for p in self.points]
        return out


def scan_to_csv(report: ScanReport) -> str:
    """One row per scanned point: index, re/im of each coordinate, min K."""
    buf = io.StringIO()
    cols = ["index"]
    for k in range(1, report.n + 1):
        cols += [f"re{k}", f"im{k}"]
    cols.append("min_hsc")
    buf.write(",".join(cols) + "\n")
    for idx, (pt, val) in enumerate(zip(report.points, report.per_point_min)):
        cells = [str(idx)]
        for z in pt:
            cells += [repr(float(z.real)), repr(float(z.imag))]
        cells.append(repr(float(val)))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def min_hsc_at_point(spec: dsl.MetricSpec, point, starts: int = DEFAULT_STARTS,
                     seed: int = 0, dirs: int = DEFAULT_DIRS,
                     iters: int = DEFAULT_ITERS, point_index: int = 0):
    """Direction minimum at one point: (value, metric-unit witness direction)."""
    pts = np.asarray(point, dtype=complex).reshape(1, -1)
    mj = metric_jet(spec, pts)
    R = curvature(mj)
    vals, wdirs = _min_over_dirs(mj.g, R.R, dirs, starts, iters, seed, [point_index])
    return float(vals[0]), wdirs[0]


def scan_chart(spec: dsl.MetricSpec, box=None, grid_per_axis: int = DEFAULT_GRID,
               dirs: int = DEFAULT_DIRS, seed: int = 0,
               starts: int = DEFAULT_STARTS, iters: int = DEFAULT_ITERS) -> ScanReport:
    """Direction-minimize on a full grid over all 2n real axes of the box.

    The winner is the lexicographically first point attaining the global
    minimum (grid order is lexicographic in (re_1, im_1, re_2, ...)).
    """
    if grid_per_axis < 2:
        raise ValueError("grid_per_axis must be at least 2")
    use_box = spec.box if box is None else box
    pts = dsl.box_grid(use_box, grid_per_axis)
    mj = metric_jet(spec, pts, check_box=box is None)
    R = curvature(mj)
    vals, wdirs = _min_over_dirs(mj.g, R.R, dirs, starts, iters, seed,
                                 range(pts.shape[0]))
    best = int(np.argmin(vals))
    return ScanReport(
        name=spec.name, n=spec.n, min_hsc=float(vals[best]),
        witness_point=tuple(pts[best]), witness_dir=tuple(wdirs[best]),
        points_scanned=int(pts.shape[0]), dirs_per_point=dirs, starts=starts,
        iters=iters, grid_per_axis=grid_per_axis, margin=abs(float(vals[best])),
        seed=seed, points=pts, per_point_min=vals)


@dataclass(frozen=True)
class NegativeWitness:
    value: float
    point: tuple
    direction: tuple
    points_scanned: int
    threshold: float
    seed: int
    stage: int

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "point": _vec_dict(self.point),
            "direction": _vec_dict(self.direction),
            "points_scanned": self.points_scanned,
            "threshold": self.threshold,
            "seed": self.seed,
            "stage": self.stage,
        }


_WITNESS_STAGES = ((5, 32, 4, 120), (9, 64, 8, 200), (13, 96, 8, 200))


def find_negative_witness(spec: dsl.MetricSpec, box=None, budget: int = 50000,
                          seed: int = 0, threshold: float = NEG_THRESHOLD):
    """Search scans of increasing resolution for K < threshold.

    Returns a NegativeWitness or None once `budget` points have been
    examined without one.  None is an absence of evidence, not a
    positivity proof.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    scanned = 0
    for stage, (grid, dirs, starts, iters) in enumerate(_WITNESS_STAGES):
        if scanned >= budget:
            break
        rep = scan_chart(spec, box=box, grid_per_axis=grid, dirs=dirs,
                         seed=seed + stage, starts=starts, iters=iters)
        scanned += rep.points_scanned
        if rep.min_hsc < threshold:
            return NegativeWitness(
                value=rep.min_hsc, point=rep.witness_point,
                direction=rep.witness_dir, points_scanned=scanned,
                threshold=threshold, seed=seed, stage=stage)
    return None
