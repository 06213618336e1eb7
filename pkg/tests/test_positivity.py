import numpy as np

from hsclab import dsl
from hsclab.positivity import (find_negative_witness, min_hsc_at_point,
                               scan_chart, scan_to_csv)

# box corner of the bundled disk charts: |z|^2 = 2*(0.95/sqrt(2))^2 = 0.9025
CORNER_MIN = 2.0 / (1.0 + 0.9025)


def test_min_at_point_constant_negative():
    val, wdir = min_hsc_at_point(dsl.catalog("poincare"), [0j])
    assert abs(val + 4.0) < 1e-9
    assert len(wdir) == 1


def test_min_at_point_constant_positive():
    val, _ = min_hsc_at_point(dsl.catalog("fs_affine"), [0.2 + 0.1j])
    assert abs(val - 4.0) < 1e-9


def test_scan_base_metric_minimum_at_corner():
    rep = scan_chart(dsl.catalog("paper_base"), grid_per_axis=5, dirs=8,
                     starts=2, iters=40)
    assert abs(rep.min_hsc - CORNER_MIN) < 1e-9
    assert rep.margin == abs(rep.min_hsc)
    assert rep.points_scanned == 25
    w = rep.witness_point[0]
    assert abs(abs(w) ** 2 - 0.9025) < 1e-12  # a corner of the box


def test_scan_is_deterministic():
    a = scan_chart(dsl.catalog("warp_demo"), grid_per_axis=3, dirs=8,
                   starts=2, iters=30, seed=5)
    b = scan_chart(dsl.catalog("warp_demo"), grid_per_axis=3, dirs=8,
                   starts=2, iters=30, seed=5)
    assert a.min_hsc == b.min_hsc
    assert a.witness_dir == b.witness_dir


def test_scan_report_dict_and_csv():
    rep = scan_chart(dsl.catalog("paper_base"), grid_per_axis=3, dirs=8,
                     starts=1, iters=20)
    d = rep.as_dict()
    assert d["name"] == "paper_base" and "points" not in d
    csv = scan_to_csv(rep)
    lines = csv.strip().splitlines()
    assert lines[0] == "index,re1,im1,min_hsc"
    assert len(lines) == 1 + rep.points_scanned


def test_witness_found_on_negative_chart():
    w = find_negative_witness(dsl.catalog("poincare"), budget=200)
    assert w is not None
    assert abs(w.value + 4.0) < 1e-6
    assert w.stage == 0


def test_witness_absent_on_positive_chart():
    assert find_negative_witness(dsl.catalog("fs_affine"), budget=200) is None
    assert find_negative_witness(dsl.catalog("flat(1)"), budget=200) is None


def test_witness_on_warped_family():
    w = find_negative_witness(dsl.catalog("paper_G(1)"), budget=3000)
    assert w is not None and w.value < -1e-8
    assert len(w.point) == 2 and len(w.direction) == 2


def test_witness_dict_is_json_clean():
    import json
    w = find_negative_witness(dsl.catalog("poincare"), budget=200)
    json.dumps(w.as_dict())
