"""Curvature tensors and holomorphic sectional curvature of Hermitian metrics.

The curvature components used throughout are, in local coordinates,

    R[i,j,k,l] = -d2g[i,j,k,l] + sum_{p,q} ginv[p,q] * dg[i,p,k] * dbarg[q,j,l]

where dg[i,p,k] is the z_k-derivative of entry (i,p), dbarg[q,j,l] the
zbar_l-derivative of entry (q,j), and ginv the plain matrix inverse of the
entry matrix.  With this index wiring the affine Fubini-Study chart
1/(1+|z|^2)^2 comes out at constant sectional value +4 and the unit-disk
hyperbolic metric 1/(1-|z|^2)^2 at -4, which pins the convention.

Sectional values are

    K(xi) = 2 * sum R[i,j,k,l] xi_i conj(xi_j) xi_k conj(xi_l)
              / (sum g[i,j] xi_i conj(xi_j))^2,

real by the pair symmetry R[i,j,k,l] = conj(R[j,i,l,k]) and invariant under
scaling of xi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dsl
from .wirtinger import DIV_EPS, SingularPointError

COND_LIMIT = 1e12
PAIR_SYMMETRY_TOL = 1e-10
IMAG_TOL = 1e-10


class IllConditionedError(ArithmeticError):
    """Entry matrix condition number exceeds COND_LIMIT at some point."""


class PointOutsideBoxError(ValueError):
    pass


@dataclass(frozen=True)
class MetricJet:
    """Metric entries and their first/mixed-second derivatives at points.

    Arrays carry a leading batch shape: g is (..., d, d), dg and dbarg are
    (..., d, d, n) with the derivative index last, ddbarg is
    (..., d, d, n, n) indexed [i, j, k, l] for the z_k, zbar_l mixed
    derivative of entry (i, j).  For honest metrics d == n.
    """

    n: int
    g: np.ndarray
    dg: np.ndarray
    dbarg: np.ndarray
    ddbarg: np.ndarray
    points: np.ndarray

    @property
    def batch_shape(self):
        return self.g.shape[:-2]


@dataclass(frozen=True)
class CurvatureTensor:
    n: int
    R: np.ndarray  # (..., n, n, n, n) indexed [i, j, k, l]
    points: np.ndarray


def metric_jet(spec: dsl.MetricSpec, points, check_box: bool = True) -> MetricJet:
    """Evaluate all entry jets of an honest (d == n) metric at points (..., n)."""
    if spec.is_family:
        raise ValueError(
            f"{spec.name} is a metric family ({spec.dim} of {spec.n} coordinates "
            "are metric directions); restrict the parameters to constants first")
    pts = np.asarray(points, dtype=complex)
    if pts.shape[-1] != spec.n:
        raise ValueError(f"points must have {spec.n} coordinates")
    if check_box:
        flat = pts.reshape(-1, spec.n)
        for row in flat:
            if not dsl.box_contains(spec.box, row):
                raise PointOutsideBoxError(f"point {row.tolist()} outside box of {spec.name}")
    n = spec.n
    batch = pts.shape[:-1]
    g = np.empty(batch + (n, n), dtype=complex)
    dg = np.empty(batch + (n, n, n), dtype=complex)
    dbarg = np.empty(batch + (n, n, n), dtype=complex)
    ddbarg = np.empty(batch + (n, n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            jet = dsl.eval_jet(spec.entries[i][j], n, pts)
            g[..., i, j] = jet.value
            dg[..., i, j, :] = jet.d
            dbarg[..., i, j, :] = jet.dbar
            ddbarg[..., i, j, :, :] = jet.ddbar
    return MetricJet(n, g, dg, dbarg, ddbarg, pts)


def metric_jet_from_fd(spec: dsl.MetricSpec, points, step: float = None) -> MetricJet:
    """Same arrays as metric_jet but via the finite-difference oracle."""
    from .wirtinger import FD_STEP, fd_jet

    if spec.is_family:
        raise ValueError("restrict the parameters to constants first")
    pts = np.asarray(points, dtype=complex)
    batch = pts.shape[:-1]
    n = spec.n
    h = FD_STEP if step is None else step
    g = np.empty(batch + (n, n), dtype=complex)
    dg = np.empty(batch + (n, n, n), dtype=complex)
    dbarg = np.empty(batch + (n, n, n), dtype=complex)
    ddbarg = np.empty(batch + (n, n, n, n), dtype=complex)
    flat = pts.reshape(-1, n)
    for idx, row in enumerate(flat):
        where = np.unravel_index(idx, batch) if batch else ()
        for i in range(n):
            for j in range(n):
                f = lambda z, e=spec.entries[i][j]: dsl.eval_value(e, z)
                jet = fd_jet(f, row, step=h)
                g[where + (i, j)] = jet.value
                dg[where + (i, j)] = jet.d
                dbarg[where + (i, j)] = jet.dbar
                ddbarg[where + (i, j)] = jet.ddbar
    return MetricJet(n, g, dg, dbarg, ddbarg, pts)


def pair_symmetry_defect(R: np.ndarray) -> float:
    """max |R[i,j,k,l] - conj(R[j,i,l,k])|, the realness obstruction."""
    mirror = np.conjugate(np.swapaxes(np.swapaxes(R, -4, -3), -2, -1))
    return float(np.abs(R - mirror).max())


def curvature(mj: MetricJet, check: bool = True) -> CurvatureTensor:
    """Curvature components from a MetricJet; see the module docstring."""
    g = mj.g
    if check:
        cond = np.linalg.cond(g)
        worst = float(np.max(cond))
        if not np.isfinite(worst) or worst > COND_LIMIT:
            raise IllConditionedError(f"metric condition number {worst:.3e} exceeds {COND_LIMIT:.0e}")
    eye = np.broadcast_to(np.eye(mj.n, dtype=complex), g.shape)
    ginv = np.linalg.solve(g, eye)
    R = -mj.ddbarg + np.einsum("...pq,...ipk,...qjl->...ijkl", ginv, mj.dg, mj.dbarg)
    if check:
        scale = max(1.0, float(np.abs(R).max())) if R.size else 1.0
        defect = pair_symmetry_defect(R)
        if defect > PAIR_SYMMETRY_TOL * scale:
            raise ArithmeticError(f"curvature pair-symmetry defect {defect:.3e} at scale {scale:.3e}")
    return CurvatureTensor(mj.n, R, mj.points)


def _metric_norm2(g: np.ndarray, xi: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...i,...j->...", g, xi, np.conjugate(xi))


def hsc(mj: MetricJet, R: CurvatureTensor, xi) -> np.ndarray | float:
    """Sectional value K(xi) at each batch point; xi is (..., n) or (n,)."""
    xi = np.asarray(xi, dtype=complex)
    xi = np.broadcast_to(xi, mj.batch_shape + (mj.n,))
    xibar = np.conjugate(xi)
    num = np.einsum("...ijkl,...i,...j,...k,...l->...", R.R, xi, xibar, xi, xibar)
    den = _metric_norm2(mj.g, xi)
    scale = np.maximum(1.0, np.abs(num))
    if np.any(np.abs(num.imag) > IMAG_TOL * scale):
        raise ArithmeticError("sectional numerator has a non-negligible imaginary part")
    if np.any(den.real <= DIV_EPS):
        raise SingularPointError("direction has vanishing metric norm")
    out = 2.0 * num.real / den.real ** 2
    return float(out) if out.ndim == 0 else out


def hsc_dirs(g: np.ndarray, R: np.ndarray, dirs: np.ndarray,
             check_imag: bool = False) -> np.ndarray:
    """Batched K over m directions per point: g (...,d,d), R (...,d,d,d,d),
    dirs (..., m, d) -> (..., m).  Staged contractions, O(m d^4)."""
    dbar = np.conjugate(dirs)
    t = np.einsum("...ijkl,...mi->...mjkl", R, dirs)
    t = np.einsum("...mjkl,...mj->...mkl", t, dbar)
    t = np.einsum("...mkl,...mk->...ml", t, dirs)
    num = np.einsum("...ml,...ml->...m", t, dbar)
    den = np.einsum("...ij,...mi,...mj->...m", g, dirs, dbar)
    if check_imag:
        scale = np.maximum(1.0, np.abs(num))
        if np.any(np.abs(num.imag) > IMAG_TOL * scale):
            raise ArithmeticError("sectional numerator has a non-negligible imaginary part")
    return 2.0 * num.real / den.real ** 2


def curvature_at(spec: dsl.MetricSpec, points, check_box: bool = True):
    """Convenience: (MetricJet, CurvatureTensor) at points."""
    mj = metric_jet(spec, points, check_box=check_box)
    return mj, curvature(mj)


def gaussian_curvature_1d(spec: dsl.MetricSpec, point) -> float:
    """-(2/g) * (d2 log g / dz dzbar) for a one-coordinate metric.

    The log derivative expands through the jet slots as
    g_zzbar/g - g_z g_zbar/g^2, so no log primitive is needed.  Equals the
    sectional value of the same metric at the same point.
    """
    if spec.n != 1 or spec.dim != 1:
        raise ValueError("defined for one-coordinate metrics only")
    pts = np.asarray(point, dtype=complex).reshape(1, 1)
    jet = dsl.eval_jet(spec.entries[0][0], 1, pts)
    gval = complex(jet.value[0])
    if abs(gval) <= DIV_EPS:
        raise SingularPointError("metric value vanishes at the point")
    gz = complex(jet.d[0, 0])
    gzbar = complex(jet.dbar[0, 0])
    gzz = complex(jet.ddbar[0, 0, 0])
    val = -2.0 * gzz / gval ** 2 + 2.0 * gz * gzbar / gval ** 3
    return float(val.real)


def restrict(spec: dsl.MetricSpec, fixed: dict, name: str | None = None) -> dsl.MetricSpec:
    """Freeze some coordinates to constants and renumber the rest.

    Works both for honest metrics (producing the induced metric on a
    coordinate slice) and for families (freezing parameter coordinates to
    obtain an honest fiber metric).  Keys of `fixed` are 1-based
    coordinate indices; values must lie in the box slice.
    """
    if not fixed:
        return spec
    for k, v in fixed.items():
        if not 1 <= k <= spec.n:
            raise ValueError(f"coordinate index z{k} out of range 1..{spec.n}")
        r = spec.box[k - 1]
        if not r.contains(complex(v)):
            raise ValueError(f"value {v} for z{k} lies outside the box slice")
    kept = [k for k in range(1, spec.n + 1) if k not in fixed]
    if not kept:
        raise ValueError("cannot fix every coordinate (dimension would be 0)")
    kept_dirs = [k for k in kept if k <= spec.dim]
    if not kept_dirs:
        raise ValueError("all metric directions fixed; nothing to restrict to")
    renumber = {k: pos + 1 for pos, k in enumerate(kept)}

    def replace(k: int):
        if k in fixed:
            return dsl.Lit(complex(fixed[k]))
        return dsl.Var(renumber[k])

    entries = tuple(
        tuple(dsl.map_vars(spec.entries[i - 1][j - 1], replace) for j in kept_dirs)
        for i in kept_dirs)
    box = tuple(spec.box[k - 1] for k in kept)
    if name is None:
        frozen = ",".join(f"z{k}={dsl.to_source(dsl.Lit(complex(fixed[k])))}"
                          for k in sorted(fixed))
        name = f"{spec.name}[{frozen}]"
    return dsl.MetricSpec(name, len(kept), entries, box)
