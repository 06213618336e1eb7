"""Expression parsing, evaluation, metric specs, and the bundled catalog."""

import numpy as np
import pytest

from hsclab import dsl, wirtinger
from hsclab.dsl import (MetricSpec, ParseError, Rect, catalog, load_spec,
                        parse, save_spec, to_source, validate)


def test_parse_and_eval_basics():
    e = parse("z1*conj(z1) + 2")
    pts = np.array([[0.5 + 0.5j], [1j]])
    np.testing.assert_allclose(dsl.eval_value(e, pts), [2.5, 3.0])


def test_parse_precedence_and_power():
    e = parse("1/(1+z1*conj(z1))^2")
    v = dsl.eval_value(e, np.array([[0.5 + 0j]]))
    np.testing.assert_allclose(v, [1 / 1.25 ** 2])


def test_parse_exp_and_unary_minus():
    e = parse("-exp(2*z1)")
    v = dsl.eval_value(e, np.array([[0.3 + 0.1j]]))
    np.testing.assert_allclose(v, [-np.exp(0.6 + 0.2j)])


def test_parse_rejects_unknown_identifier():
    with pytest.raises(ParseError):
        parse("q + 1")


def test_parse_rejects_bad_variable_index():
    with pytest.raises(ParseError):
        parse("z0")
    with pytest.raises(ParseError):
        parse("z3", 2)


def test_to_source_round_trips():
    # round trip through source must preserve values, not just shape
    rng = np.random.default_rng(11)
    pts = rng.uniform(-0.5, 0.5, (8, 2)) + 1j * rng.uniform(-0.5, 0.5, (8, 2))
    for _ in range(30):
        e = dsl.random_expr(rng, 2)
        e2 = parse(to_source(e), 2)
        try:
            a = np.atleast_1d(dsl.eval_value(e, pts))
            b = np.atleast_1d(dsl.eval_value(e2, pts))
        except (ZeroDivisionError, FloatingPointError):
            continue
        mask = np.isfinite(a)
        np.testing.assert_allclose(a[mask], b[mask], rtol=1e-12, atol=1e-12)


def test_eval_jet_matches_divided_differences():
    rng = np.random.default_rng(12)
    checked = 0
    while checked < 40:
        n = int(rng.integers(1, 3))
        e = dsl.random_expr(rng, n)
        p = rng.uniform(-0.6, 0.6, n) + 1j * rng.uniform(-0.6, 0.6, n)
        try:
            jet = dsl.eval_jet(e, n, p.reshape(1, n))
            ref = wirtinger.fd_jet(lambda z: dsl.eval_value(e, z), p)
        except (wirtinger.SingularPointError, ZeroDivisionError,
                FloatingPointError, OverflowError):
            continue
        slots = np.concatenate([np.atleast_1d(jet.value).ravel(),
                                jet.d.ravel(), jet.dbar.ravel(),
                                jet.ddbar.ravel()])
        refs = np.concatenate([np.atleast_1d(ref.value).ravel(),
                               ref.d.ravel(), ref.dbar.ravel(),
                               ref.ddbar.ravel()])
        if not np.all(np.isfinite(refs)) or np.abs(refs).max() > 1e4:
            continue
        scale = max(1.0, float(np.abs(refs).max()))
        np.testing.assert_allclose(slots, refs, atol=2e-5 * scale)
        checked += 1


def test_scale_expr_unit_factor_is_identity():
    e = parse("1/(1+z1*conj(z1))")
    assert dsl.scale_expr(1.0, e) is e


def test_scale_expr_folds_into_quotient():
    e = dsl.scale_expr(3.0, parse("1/(1+z1*conj(z1))"))
    assert to_source(e) == "3/(1+z1*conj(z1))"


def test_shift_vars():
    e = dsl.shift_vars(parse("z1*conj(z1)", 1), 1)
    pts = np.array([[0.1 + 0j, 0.5 - 0.5j]])
    np.testing.assert_allclose(dsl.eval_value(e, pts), [0.5])


def test_box_sample_stays_inside():
    box = (Rect(-0.3, 0.4, -0.2, 0.1), Rect(0.0, 1.0, -1.0, 0.0))
    pts = dsl.box_sample(box, np.random.default_rng(0), 200)
    assert pts.shape == (200, 2)
    for k, r in enumerate(box):
        assert pts[:, k].real.min() >= r.re_min and pts[:, k].real.max() <= r.re_max
        assert pts[:, k].imag.min() >= r.im_min and pts[:, k].imag.max() <= r.im_max


def test_box_grid_covers_corners():
    box = (Rect(-1.0, 1.0, -2.0, 2.0),)
    g = dsl.box_grid(box, 3)
    assert g.shape[-1] == 1
    vals = set(map(tuple, np.column_stack([g[:, 0].real, g[:, 0].imag])))
    assert (-1.0, -2.0) in vals and (1.0, 2.0) in vals


def test_catalog_names_resolve():
    for name in ("flat(2)", "poincare", "fs_affine", "paper_base",
                 "paper_fiber", "paper_G(2)", "warp_demo"):
        spec = catalog(name)
        assert isinstance(spec, MetricSpec)


def test_catalog_rejects_unknown():
    with pytest.raises(KeyError):
        catalog("nonsense")
    with pytest.raises(KeyError):
        catalog("paper_G(-1)")


def test_family_flag():
    assert catalog("paper_fiber").is_family
    assert not catalog("paper_G(1)").is_family
    assert not catalog("poincare").is_family


def test_validate_accepts_bundled_metrics():
    for name in ("poincare", "fs_affine", "paper_base", "paper_G(1)",
                 "warp_demo"):
        rep = validate(catalog(name), samples=200)
        assert rep.min_eigenvalue > 0
        assert rep.hermitian_defect <= dsl.HERMITIAN_TOL


def test_validate_rejects_non_hermitian():
    spec = MetricSpec("skew", 1, ((parse("z1", 1),),),
                      (Rect(0.1, 0.5, 0.1, 0.5),))
    with pytest.raises(dsl.HermitianDefectError):
        validate(spec, samples=50)


def test_validate_rejects_indefinite():
    spec = MetricSpec("neg", 1, ((parse("-1", 1),),),
                      (Rect(-0.5, 0.5, -0.5, 0.5),))
    with pytest.raises(dsl.NotPositiveDefiniteError):
        validate(spec, samples=50)


def test_spec_save_load_round_trip(tmp_path):
    spec = catalog("paper_G(1.5)")
    path = tmp_path / "g.json"
    save_spec(spec, path)
    back = load_spec(path)
    assert back.name == spec.name and back.n == spec.n
    assert [[to_source(e) for e in row] for row in back.entries] \
        == [[to_source(e) for e in row] for row in spec.entries]
    assert back.box == spec.box


def test_spec_from_dict_validates_shape():
    with pytest.raises(ValueError):
        dsl.spec_from_dict({"name": "bad", "n": 1,
                            "entries": [["1", "0"], ["0", "1"]],
                            "box": [{"re": [-1, 1], "im": [-1, 1]}]})
