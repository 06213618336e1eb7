"""Curvature tensors and sectional values on metrics with known answers.

Closed-form references used below, all derivable by hand from
K = -(2/g) d2 log g / dz dzbar in one coordinate:

  * g = 1/(1-|z|^2)^2        ->  K = -4 everywhere
  * g = 1/(1+|z|^2)^2        ->  K = +4 everywhere
  * g = 1/(1+|z|^2)          ->  K = 2/(1+|z|^2)
  * g = A/(1+A^2|z|^4)       ->  K = 8A|z|^2/(1+A^2|z|^4)  (A > 0 constant)
  * g = B/(1+|z|^2)^2        ->  K = 4/B                   (B > 0 constant)
"""

import numpy as np
import pytest

from hsclab import dsl
from hsclab.curvature import (IllConditionedError, PointOutsideBoxError,
                              curvature, curvature_at, gaussian_curvature_1d,
                              hsc, hsc_dirs, metric_jet, metric_jet_from_fd,
                              pair_symmetry_defect, restrict)


def _sample(spec, count, seed):
    rng = np.random.default_rng(seed)
    return dsl.box_sample(spec.box, rng, count)


def _random_dirs(rng, count, n):
    d = rng.standard_normal((count, 1, n)) + 1j * rng.standard_normal((count, 1, n))
    return d


@pytest.mark.parametrize("name,value", [("poincare", -4.0), ("fs_affine", 4.0)])
def test_constant_curvature(name, value):
    spec = dsl.catalog(name)
    pts = _sample(spec, 50, 3)
    mj, tensor = curvature_at(spec, pts)
    vals = hsc_dirs(mj.g, tensor.R, _random_dirs(np.random.default_rng(4), 50, 1))
    np.testing.assert_allclose(vals[:, 0], value, atol=1e-9)


def test_flat_metric_has_zero_tensor():
    mj, tensor = curvature_at(dsl.catalog("flat(2)"),
                              _sample(dsl.catalog("flat(2)"), 20, 5))
    assert np.abs(tensor.R).max() < 1e-14


def test_base_metric_formula():
    spec = dsl.catalog("paper_base")
    pts = _sample(spec, 60, 6)
    vals = np.array([gaussian_curvature_1d(spec, p) for p in pts[:, 0]])
    np.testing.assert_allclose(vals, 2.0 / (1.0 + np.abs(pts[:, 0]) ** 2),
                               atol=1e-10)
    assert vals.min() > 0


def test_hsc_direction_scale_invariance():
    spec = dsl.catalog("paper_G(1)")
    pts = _sample(spec, 10, 7)
    mj, tensor = curvature_at(spec, pts)
    rng = np.random.default_rng(8)
    d = rng.standard_normal((10, 1, 2)) + 1j * rng.standard_normal((10, 1, 2))
    k1 = hsc_dirs(mj.g, tensor.R, d)
    k2 = hsc_dirs(mj.g, tensor.R, (0.3 - 1.7j) * d)
    np.testing.assert_allclose(k1, k2, rtol=1e-10)


def test_hsc_agrees_with_hsc_dirs():
    spec = dsl.catalog("warp_demo")
    pts = _sample(spec, 8, 9)
    mj, tensor = curvature_at(spec, pts)
    xi = np.array([0.6 - 0.2j, 0.3 + 0.9j])
    a = hsc(mj, tensor, xi)
    b = hsc_dirs(mj.g, tensor.R, np.broadcast_to(xi, (8, 1, 2)))[:, 0]
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_pair_symmetry_of_catalog_tensors():
    for name in ("poincare", "paper_base", "paper_G(1)", "warp_demo"):
        spec = dsl.catalog(name)
        mj, tensor = curvature_at(spec, _sample(spec, 25, 10))
        scale = max(1.0, float(np.abs(tensor.R).max()))
        assert pair_symmetry_defect(tensor.R) <= 1e-10 * scale


def test_jets_vs_divided_difference_jets():
    spec = dsl.catalog("paper_G(1)")
    pts = _sample(spec, 5, 11)
    a = metric_jet(spec, pts)
    b = metric_jet_from_fd(spec, pts)
    for name in ("g", "dg", "dbarg", "ddbarg"):
        x, y = getattr(a, name), getattr(b, name)
        scale = max(1.0, float(np.abs(x).max()))
        np.testing.assert_allclose(x, y, atol=1e-5 * scale, err_msg=name)


def test_gaussian_equals_sectional_in_one_dim():
    rng = np.random.default_rng(12)
    for name in ("poincare", "fs_affine", "paper_base"):
        spec = dsl.catalog(name)
        pts = dsl.box_sample(spec.box, rng, 20)
        mj, tensor = curvature_at(spec, pts)
        sect = hsc_dirs(mj.g, tensor.R, np.ones((20, 1, 1), dtype=complex))[:, 0]
        gauss = np.array([gaussian_curvature_1d(spec, p) for p in pts[:, 0]])
        np.testing.assert_allclose(sect, gauss, atol=1e-11)


def test_restricted_fiber_family_formula():
    # fixing the parameter coordinate turns the bundled family into a
    # one-coordinate metric with curvature 8A|z|^2/(1+A^2|z|^4)
    family = dsl.catalog("paper_fiber")
    for c in (0j, 0.3 + 0.1j, -0.5 + 0.4j):
        sub = restrict(family, {2: c})
        amp = np.exp(2.0 * abs(c) ** 2)
        for z in (0.2 + 0j, 0.4 - 0.3j, 0.05 + 0.6j):
            t = abs(z) ** 2
            want = 8.0 * amp * t / (1.0 + amp ** 2 * t ** 2)
            assert gaussian_curvature_1d(sub, z) == pytest.approx(want, abs=1e-9)


def test_fiber_curvature_vanishes_at_origin_only():
    sub = restrict(dsl.catalog("paper_fiber"), {2: 0.2 - 0.3j})
    assert abs(gaussian_curvature_1d(sub, 0j)) < 1e-12
    assert gaussian_curvature_1d(sub, 0.3 + 0j) > 0.1


def test_warp_demo_fiber_is_rescaled_round_sphere():
    family = dsl.catalog("warp_demo")
    for c in (0j, 0.4 + 0.2j):
        sub = restrict(family, {2: c}, name="slice")
        want = 4.0 * np.exp(-abs(c) ** 2)
        for z in (0j, 0.3 - 0.2j):
            assert gaussian_curvature_1d(sub, z) == pytest.approx(want, abs=1e-9)


def test_family_requires_restriction():
    with pytest.raises(ValueError):
        metric_jet(dsl.catalog("paper_fiber"), np.zeros((1, 2)))


def test_point_outside_box_rejected():
    with pytest.raises(PointOutsideBoxError):
        metric_jet(dsl.catalog("poincare"), np.array([[2.0 + 0j]]))


def test_ill_conditioned_metric_rejected():
    tiny = dsl.MetricSpec(
        "tiny", 2,
        ((dsl.parse("1", 2), dsl.parse("0", 2)),
         (dsl.parse("0", 2), dsl.parse("1/100000000000000", 2))),
        dsl._square_box(2, 0.5))
    with pytest.raises(IllConditionedError):
        curvature(metric_jet(tiny, np.zeros((1, 2))))


def test_warp_family_minimum_at_origin():
    # the assembled family at warp factor lam has directional minimum
    # -2/(3 lam) at the chart origin
    for lam in (0.5, 1.0, 5.0):
        spec = dsl.catalog(f"paper_G({lam:g})")
        mj, tensor = curvature_at(spec, np.zeros((1, 2)))
        rng = np.random.default_rng(13)
        dirs = rng.standard_normal((1, 4096, 2)) + 1j * rng.standard_normal((1, 4096, 2))
        got = hsc_dirs(mj.g, tensor.R, dirs).min()
        assert got == pytest.approx(-2.0 / (3.0 * lam), rel=5e-3)
        assert got >= -2.0 / (3.0 * lam) - 1e-9
