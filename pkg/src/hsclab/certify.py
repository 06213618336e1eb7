"""Positivity certification for block-split curvature tensors, and the
closed-form curvature of a 1-D metric pencil g + lam*h.

First half: given a tensor whose fiber block dominates K0, whose base
block dominates K2, and whose strictly mixed entries are bounded by K1,
an explicit weight choice turns three scalar product inequalities into a
quartic lower bound

    full quartic >= (K0/2)*S_fiber + (K2 - K1*Kcal)*S_base,

where S_fiber/S_base are the squared coordinate masses on each side of
the split and Kcal depends only on K0/K1.  The required base bound is
base >= Kcal * mixed.

Second half: for 1-D metrics g, h the curvature of g + lam*h satisfies
the exact identity

    K(g + lam*h) * (g + lam*h)^3
      = g^3 K(g) + lam^2 h^3 K(h)
        + 2 lam (-h g_zzbar - g h_zzbar + g_z h_zbar + h_z g_zbar),

which yields positivity thresholds in lam and the large-lam decay
lam*K -> K(h).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import dsl
from .curvature import gaussian_curvature_1d

BOUND_TOL = 1e-9


# ---------------------------------------------------------------------------
# Weight choice and the split constant


@dataclass(frozen=True)
class WeightChoice:
    """Inequality weights for a fiber/base split, chosen by equalization.

    fiber_lower (K0) bounds the fiber-block quartic from below, mixed_bound
    (K1) bounds strictly mixed entries, required_ratio (Kcal) is the
    smallest base/mixed ratio the choice certifies, and base_required is
    required_ratio * mixed_bound.
    """

    fiber_lower: float
    mixed_bound: float
    n: int
    s: int
    a_sq: float
    b_sq: float
    c_sq: float
    d_sq: float
    required_ratio: float
    base_required: float

    @property
    def a(self) -> float:
        return float(np.sqrt(self.a_sq))

    @property
    def b(self) -> float:
        return float(np.sqrt(self.b_sq))

    @property
    def c(self) -> float:
        return float(np.sqrt(self.c_sq))

    @property
    def d(self) -> float:
        return float(np.sqrt(self.d_sq))

    def as_dict(self) -> dict:
        return {
            "fiber_lower": self.fiber_lower, "mixed_bound": self.mixed_bound,
            "n": self.n, "s": self.s,
            "a": self.a, "b": self.b, "c": self.c, "d": self.d,
            "a_sq": self.a_sq, "b_sq": self.b_sq,
            "c_sq": self.c_sq, "d_sq": self.d_sq,
            "required_ratio": self.required_ratio,
            "base_required": self.base_required,
        }


def _exact_weights(fiber_lower, mixed_bound, n: int, s: int):
    """Squared weights, constraint terms, and the split constant as exact
    rationals.  Equalization: each constraint term is (1/8) * K0/K1."""
    if not (0 < s < n):
        raise ValueError("need 0 < s < n")
    if not (fiber_lower > 0 and mixed_bound > 0):
        raise ValueError("bounds must be positive")
    r = Fraction(fiber_lower) / Fraction(mixed_bound)
    u = n - s
    a_sq = r / (32 * u ** 3)
    b_sq = r / (48 * u ** 2)
    c_sq = r / (32 * s * u)
    d_sq = r * r / (1024 * s ** 3 * u ** 2)
    terms = (4 * a_sq * u ** 3, 6 * b_sq * u ** 2,
             4 * c_sq * s * u, 4 * d_sq / c_sq * s ** 2 * u)
    kcal = (4 / a_sq * s * u ** 2 + 4 * s * u
            + 6 / b_sq * s ** 2 + 4 / (c_sq * d_sq) * s ** 3)
    return (a_sq, b_sq, c_sq, d_sq), terms, r, kcal


def choose_weights(fiber_lower: float, mixed_bound: float, n: int, s: int) -> WeightChoice:
    """Equalized weight choice; the constraint identities hold exactly in
    rational arithmetic (see weight_identities)."""
    (a_sq, b_sq, c_sq, d_sq), _, _, kcal = _exact_weights(fiber_lower, mixed_bound, n, s)
    return WeightChoice(
        fiber_lower=float(fiber_lower), mixed_bound=float(mixed_bound), n=n, s=s,
        a_sq=float(a_sq), b_sq=float(b_sq), c_sq=float(c_sq), d_sq=float(d_sq),
        required_ratio=float(kcal),
        base_required=float(kcal * Fraction(mixed_bound)))


def weight_identities(fiber_lower, mixed_bound, n: int, s: int) -> dict:
    """Exact-rational facts about the equalized choice: every constraint
    term equals r/8, their sum equals r/2, and the split constant matches
    its defining formula."""
    sqs, terms, r, kcal = _exact_weights(fiber_lower, mixed_bound, n, s)
    a_sq, b_sq, c_sq, d_sq = sqs
    u = n - s
    kcal_ref = (4 / a_sq * s * u ** 2 + 4 * s * u
                + 6 / b_sq * s ** 2 + 4 / (c_sq * d_sq) * s ** 3)
    return {
        "terms_equalized": all(t == r / 8 for t in terms),
        "constraint_sum_is_half_ratio": sum(terms) == r / 2,
        "ratio_formula_matches": kcal == kcal_ref,
        "required_ratio": float(kcal),
    }


# ---------------------------------------------------------------------------
# The three product inequalities


def product_inequality_slacks(a, b, c, d, moduli) -> np.ndarray:
    """Right minus left side of the three weighted product inequalities.

    moduli has shape (..., 6): three fiber-side magnitudes (x1, x2, x3)
    and three base-side magnitudes (y1, y2, y3).  All three slacks are
    nonnegative for any positive weights by the arithmetic-geometric mean
    inequality; at unit weights and unit moduli they are (2, 1, 2).
    """
    m = np.asarray(moduli, dtype=float)
    x1, x2, x3 = m[..., 0], m[..., 1], m[..., 2]
    y1, y2, y3 = m[..., 3], m[..., 4], m[..., 5]
    s1 = a**2 * x1**4 + y1**4 / a**2 + y2**2 * y3**2 - x1 * y1 * y2 * y3
    s2 = b**2 * x1**2 * x2**2 + y1**2 * y2**2 / b**2 - x1 * x2 * y1 * y2
    s3 = (c**2 * x1**2 * x2**2 + (d**2 / c**2) * x3**4
          + y1**4 / (c**2 * d**2) - x1 * x2 * x3 * y1)
    return np.stack([s1, s2, s3], axis=-1)


def product_inequality_check(a: float, b: float, c: float, d: float,
                             trials: int, seed: int = 0) -> dict:
    """Random nonnegative moduli trials; reports violations and worst slack."""
    if min(a, b, c, d) <= 0:
        raise ValueError("weights must be positive")
    rng = np.random.default_rng(seed)
    moduli = rng.uniform(0.0, 3.0, size=(trials, 6))
    slacks = product_inequality_slacks(a, b, c, d, moduli)
    worst = float(slacks.min())
    return {
        "trials": trials,
        "seed": seed,
        "violations": int(np.sum(slacks < -BOUND_TOL)),
        "worst_slack": worst,
    }


# ---------------------------------------------------------------------------
# Block-bounded tensors


@dataclass(frozen=True)
class BoundedBlockTensor:
    """A pair-symmetric tensor with quartic lower bounds on the two
    diagonal blocks and an entrywise bound on the strictly mixed entries."""

    n: int
    s: int
    R: np.ndarray
    fiber_lower: float
    mixed_bound: float
    base_lower: float


def _model_block(bound: float, size: int) -> np.ndarray:
    eye = np.eye(size)
    block = 0.5 * bound * (np.einsum("ij,kl->ijkl", eye, eye)
                           + np.einsum("il,kj->ijkl", eye, eye))
    return block.astype(complex)


def _strictly_mixed_mask(n: int, s: int) -> np.ndarray:
    idx = np.arange(n)
    fiber = idx < s
    allf = np.einsum("i,j,k,l->ijkl", fiber, fiber, fiber, fiber)
    allb = np.einsum("i,j,k,l->ijkl", ~fiber, ~fiber, ~fiber, ~fiber)
    return ~(allf | allb)


def random_block_tensor(fiber_lower: float, mixed_bound: float, base_lower: float,
                        n: int, s: int, seed: int = 0,
                        noise: float = 0.9) -> BoundedBlockTensor:
    """Model blocks (quartic bounds attained with equality) plus uniform
    mixed noise of modulus <= noise * mixed_bound, pair-symmetrized."""
    if not (0 < s < n):
        raise ValueError("need 0 < s < n")
    rng = np.random.default_rng(seed)
    R = np.zeros((n, n, n, n), dtype=complex)
    R[:s, :s, :s, :s] = _model_block(fiber_lower, s)
    R[s:, s:, s:, s:] = _model_block(base_lower, n - s)
    mixed = _strictly_mixed_mask(n, s)
    cap = noise * mixed_bound
    for ijkl in np.argwhere(mixed):
        i, j, k, l = (int(v) for v in ijkl)
        mirror = (j, i, l, k)
        if (i, j, k, l) > mirror:
            continue
        if (i, j, k, l) == mirror:
            R[i, j, k, l] = rng.uniform(-cap, cap)
            continue
        w = cap * rng.uniform(0, 1) * np.exp(2j * np.pi * rng.uniform(0, 1))
        R[i, j, k, l] = w
        R[mirror] = np.conjugate(w)
    return BoundedBlockTensor(n, s, R, float(fiber_lower),
                              float(mixed_bound), float(base_lower))


def _quartic(R: np.ndarray, xi: np.ndarray) -> np.ndarray:
    xb = np.conjugate(xi)
    return np.einsum("ijkl,...i,...j,...k,...l->...", R, xi, xb, xi, xb)


def check_block_hypotheses(t: BoundedBlockTensor, trials: int = 10000,
                           seed: int = 0) -> dict:
    """Verify the three bounds the certification consumes.

    The entrywise mixed_bound is checked on strictly mixed entries (index
    tuples meeting both sides of the split): those are exactly the entries
    the mixed-term estimate uses, while the diagonal blocks are governed
    by their own quartic bounds and may legitimately reach fiber_lower or
    base_lower.

    Quartic margins are relative to the magnitude of the compared
    quantities, so the 1e-9 slack stays meaningful when the bounds are
    large; at unit scale it is the plain difference.
    """
    n, s = t.n, t.s
    rng = np.random.default_rng(seed)
    xf = rng.standard_normal((trials, s)) + 1j * rng.standard_normal((trials, s))
    qf = _quartic(t.R[:s, :s, :s, :s], xf).real
    mf = (np.abs(xf) ** 2).sum(axis=1) ** 2
    fiber_margin = float(((qf - t.fiber_lower * mf)
                          / np.maximum(1.0, np.abs(t.fiber_lower) * mf)).min())

    xb = rng.standard_normal((trials, n - s)) + 1j * rng.standard_normal((trials, n - s))
    qb = _quartic(t.R[s:, s:, s:, s:], xb).real
    mb = (np.abs(xb) ** 2).sum(axis=1) ** 2
    base_margin = float(((qb - t.base_lower * mb)
                         / np.maximum(1.0, np.abs(t.base_lower) * mb)).min())

    mixed_max = float(np.abs(t.R[_strictly_mixed_mask(n, s)]).max())
    ok = (fiber_margin >= -BOUND_TOL and base_margin >= -BOUND_TOL
          and mixed_max < t.mixed_bound)
    return {
        "trials": trials, "seed": seed, "ok": ok,
        "fiber_margin": fiber_margin, "base_margin": base_margin,
        "mixed_entry_max": mixed_max, "mixed_bound": t.mixed_bound,
        "pair_symmetry_defect": float(np.abs(
            t.R - np.conjugate(np.transpose(t.R, (1, 0, 3, 2)))).max()),
    }


def split_bound_check(t: BoundedBlockTensor, w: WeightChoice,
                      trials: int = 10000, seed: int = 0) -> dict:
    """Check the certified lower bound on random directions.

    Asserts, for each unit trial direction xi, the full quartic is at
    least (K0/2)*S_fiber + (K2 - K1*Kcal)*S_base - 1e-9 and strictly
    positive, where S_fiber and S_base are the squared coordinate masses
    of the two blocks.  Requires base_lower >= required_ratio *
    mixed_bound.  The slack is relative to the magnitude of the compared
    quantities (plain 1e-9 at unit scale).
    """
    if t.base_lower < w.required_ratio * t.mixed_bound * (1 - 1e-12):
        raise ValueError("base_lower below the certified requirement")
    n, s = t.n, t.s
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal((trials, n)) + 1j * rng.standard_normal((trials, n))
    xi /= np.linalg.norm(xi, axis=1, keepdims=True)
    num = _quartic(t.R, xi)
    scale = np.maximum(1.0, np.abs(num))
    if (np.abs(num.imag) / scale).max() > 1e-9:
        raise ArithmeticError("quartic of a pair-symmetric tensor must be real")
    num = num.real
    sf = (np.abs(xi[:, :s]) ** 2).sum(axis=1) ** 2
    sb = (np.abs(xi[:, s:]) ** 2).sum(axis=1) ** 2
    rhs = 0.5 * t.fiber_lower * sf + (t.base_lower - t.mixed_bound * w.required_ratio) * sb
    scale = np.maximum(1.0, np.abs(num) + np.abs(rhs))
    margin = (num - rhs) / scale
    worst = int(np.argmin(margin))
    return {
        "trials": trials, "seed": seed,
        "violations": int(np.sum(margin < -BOUND_TOL)),
        "worst_margin": float(margin.min()),
        "min_quartic": float(num.min()),
        "all_strictly_positive": bool(np.all(num > 0)),
        "worst_direction": [[float(z.real), float(z.imag)] for z in xi[worst]],
    }


# ---------------------------------------------------------------------------
# 1-D pencils g + lam*h


def _entry_jet_scalars(spec: dsl.MetricSpec, point):
    if spec.n != 1 or spec.dim != 1:
        raise ValueError("pencil operations take one-coordinate metrics")
    pts = np.asarray(point, dtype=complex).reshape(1, 1)
    jet = dsl.eval_jet(spec.entries[0][0], 1, pts)
    return (complex(jet.value[0]), complex(jet.d[0, 0]),
            complex(jet.dbar[0, 0]), complex(jet.ddbar[0, 0, 0]))


def pencil_curvature_from_jets(g, gz, gzbar, gzz, kg,
                               h, hz, hzbar, hzz, kh, lam: float) -> float:
    """The closed-form curvature of g + lam*h from entry jets and the two
    endpoint curvatures; exact as an algebraic identity."""
    if g.real <= 0 or h.real <= 0:
        raise ValueError("metric values must be positive")
    g, h = g.real, h.real
    cross = (-h * gzz - g * hzz + gz * hzbar + hz * gzbar).real
    return float((g**3 * kg + lam**2 * h**3 * kh + 2 * lam * cross) / (g + lam * h) ** 3)


def pencil_curvature(gspec: dsl.MetricSpec, hspec: dsl.MetricSpec,
                     point, lam: float) -> float:
    """Closed-form curvature of the 1-D pencil at `point`."""
    g, gz, gzbar, gzz = _entry_jet_scalars(gspec, point)
    h, hz, hzbar, hzz = _entry_jet_scalars(hspec, point)
    kg = gaussian_curvature_1d(gspec, point)
    kh = gaussian_curvature_1d(hspec, point)
    return pencil_curvature_from_jets(g, gz, gzbar, gzz, kg,
                                      h, hz, hzbar, hzz, kh, lam)


def pencil_spec(gspec: dsl.MetricSpec, hspec: dsl.MetricSpec, lam: float,
                name: str | None = None) -> dsl.MetricSpec:
    """The summed 1-D metric g + lam*h as a MetricSpec, for direct
    curvature cross-checks.  Box: intersection of the operand boxes."""
    if gspec.n != 1 or hspec.n != 1:
        raise ValueError("pencil_spec takes one-coordinate metrics")
    entry = dsl.Add(gspec.entries[0][0],
                    dsl.scale_expr(lam, hspec.entries[0][0]))
    ga, ha = gspec.box[0], hspec.box[0]
    box = (dsl.Rect(max(ga.re_min, ha.re_min), min(ga.re_max, ha.re_max),
                    max(ga.im_min, ha.im_min), min(ga.im_max, ha.im_max)),)
    if box[0].re_min > box[0].re_max or box[0].im_min > box[0].im_max:
        raise ValueError("operand boxes do not overlap")
    if name is None:
        name = f"{gspec.name}+{dsl._fmt_real(float(lam))}*{hspec.name}"
    return dsl.MetricSpec(name, 1, ((entry,),), box)


PENCIL_SCHEDULE_START = 1e-6
PENCIL_BISECTIONS = 40


class ThresholdNotReachedError(RuntimeError):
    pass


def pencil_positive_threshold(gspec: dsl.MetricSpec, hspec: dsl.MetricSpec,
                              point, lam_max: float = 2.0 ** 30,
                              persistence_samples: int = 10) -> dict:
    """Smallest lam (doubling then bisection) with positive pencil
    curvature at the point; also samples persistence above the threshold.

    Requires the second metric to have positive curvature at the point.
    Returns the threshold (the positive end of the final bracket), the
    curvature there, and the persistence samples.
    """
    kh = gaussian_curvature_1d(hspec, point)
    if kh <= 0:
        raise ValueError(f"second metric has nonpositive curvature {kh:.6g} at the point")
    g, gz, gzbar, gzz = _entry_jet_scalars(gspec, point)
    h, hz, hzbar, hzz = _entry_jet_scalars(hspec, point)
    kg = gaussian_curvature_1d(gspec, point)

    def phi(lam: float) -> float:
        return pencil_curvature_from_jets(g, gz, gzbar, gzz, kg,
                                          h, hz, hzbar, hzz, kh, lam)

    lam = PENCIL_SCHEDULE_START
    lo = 0.0
    while phi(lam) <= 0:
        lo = lam
        lam *= 2
        if lam > lam_max:
            raise ThresholdNotReachedError(
                f"no positive pencil curvature up to lam_max={lam_max:g}")
    hi = lam
    if lo > 0.0:
        for _ in range(PENCIL_BISECTIONS):
            mid = 0.5 * (lo + hi)
            if phi(mid) > 0:
                hi = mid
            else:
                lo = mid
    samples = np.geomspace(min(hi * (1 + 1e-9), lam_max), lam_max,
                           persistence_samples)
    persist = [(float(l), phi(float(l))) for l in samples]
    bad = [p for p in persist if p[1] <= 0]
    if bad:
        raise ArithmeticError(f"positivity not persistent above threshold: {bad[:3]}")
    return {
        "threshold": float(hi),
        "curvature_at_threshold": phi(float(hi)),
        "lam_max": float(lam_max),
        "persistence": persist,
    }


def pencil_decay_check(gspec: dsl.MetricSpec, hspec: dsl.MetricSpec,
                       point, lam_list=None) -> dict:
    """Large-lam behavior: lam*K approaches the curvature of the second
    metric (within 1% at the top), and |K| decays like 1/lam (log-log
    slope -1 +- 0.2 over the last two decades)."""
    if lam_list is None:
        lam_list = [1.0, 10.0, 100.0, 1e3, 1e4]
    lams = [float(l) for l in lam_list]
    if sorted(lams) != lams or lams[-1] < 1e4:
        raise ValueError("lam_list must be increasing with last entry >= 1e4")
    kh = gaussian_curvature_1d(hspec, point)
    vals = [pencil_curvature(gspec, hspec, point, l) for l in lams]
    top_ratio = lams[-1] * vals[-1] / kh
    tail = [(l, v) for l, v in zip(lams, vals) if l >= lams[-1] / 100 and v != 0]
    slope = None
    if len(tail) >= 2:
        xs = np.log([l for l, _ in tail])
        ys = np.log([abs(v) for _, v in tail])
        slope = float(np.polyfit(xs, ys, 1)[0])
    ok = abs(top_ratio - 1.0) <= 0.01 and (slope is None or abs(slope + 1.0) <= 0.2)
    if not ok:
        raise ArithmeticError(
            f"decay violation: lam*K/K_h = {top_ratio:.6f}, tail slope {slope}")
    return {
        "lam_values": lams,
        "curvatures": vals,
        "top_ratio": float(top_ratio),
        "tail_slope": slope,
        "limit_curvature": float(kh),
    }
