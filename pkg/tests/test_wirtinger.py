"""Jet arithmetic against the divided-difference oracle and hand jets."""

import numpy as np
import pytest

from hsclab import wirtinger
from hsclab.wirtinger import Jet2, SingularPointError, constant, fd_jet, seed


def test_fd_jet_squared_modulus():
    # f(z) = z*conj(z): d = conj(p), dbar = p, ddbar = 1
    p = 0.4 - 0.25j
    jet = fd_jet(lambda z: z[0] * np.conjugate(z[0]), [p])
    assert abs(jet.value - abs(p) ** 2) < 1e-10
    assert abs(jet.d[0] - np.conjugate(p)) < 1e-8
    assert abs(jet.dbar[0] - p) < 1e-8
    assert abs(jet.ddbar[0, 0] - 1.0) < 1e-6


def test_fd_jet_two_variables():
    # f(z) = z1^2 * conj(z2): only the (1, 2bar) mixed slot is nonzero
    p = np.array([0.3 + 0.2j, -0.1 + 0.5j])
    jet = fd_jet(lambda z: z[0] ** 2 * np.conjugate(z[1]), p)
    assert abs(jet.d[0] - 2 * p[0] * np.conjugate(p[1])) < 1e-8
    assert abs(jet.d[1]) < 1e-8
    assert abs(jet.dbar[0]) < 1e-8
    assert abs(jet.dbar[1] - p[0] ** 2) < 1e-8
    expect = np.zeros((2, 2), dtype=complex)
    expect[0, 1] = 2 * p[0]
    np.testing.assert_allclose(jet.ddbar, expect, atol=1e-6)


def test_seed_jet_slots():
    p = np.array([0.1j, 0.7])
    z1 = seed(2, p, 0)
    np.testing.assert_array_equal(z1.d, [1.0, 0.0])
    np.testing.assert_array_equal(z1.dbar, [0.0, 0.0])
    np.testing.assert_array_equal(z1.ddbar, np.zeros((2, 2)))
    z1bar = seed(2, p, 0, conjugate=True)
    np.testing.assert_array_equal(z1bar.dbar, [1.0, 0.0])
    assert z1bar.value == np.conjugate(p[0])


def test_constant_jet_is_flat():
    c = constant(3, 2.5 - 1j)
    assert c.value == 2.5 - 1j
    assert not c.d.any() and not c.dbar.any() and not c.ddbar.any()


def _compare_to_fd(build, f, point, tol=1e-5):
    """Evaluate `build` on seed jets and `f` through the oracle; the two
    jets must agree slot by slot relative to the oracle's own scale."""
    pts = np.asarray(point, dtype=complex)
    n = pts.shape[0]
    jets = [seed(n, pts, k) for k in range(n)]
    got = build(*jets)
    want = fd_jet(f, pts)
    for name in ("value", "d", "dbar", "ddbar"):
        a, b = np.atleast_1d(getattr(got, name)), np.atleast_1d(getattr(want, name))
        scale = max(1.0, float(np.abs(b).max()))
        np.testing.assert_allclose(a, b, atol=tol * scale, err_msg=name)


def test_product_rule_matches_oracle():
    _compare_to_fd(
        lambda z1, z2: z1 * z1.conjugate() * z2,
        lambda z: z[0] * np.conjugate(z[0]) * z[1],
        [0.3 - 0.2j, 0.5 + 0.4j])


def test_quotient_rule_matches_oracle():
    _compare_to_fd(
        lambda z1: 1.0 / (1.0 + z1 * z1.conjugate()),
        lambda z: 1.0 / (1.0 + z[0] * np.conjugate(z[0])),
        [0.6 + 0.1j])


def test_exp_chain_rule_matches_oracle():
    _compare_to_fd(
        lambda z1, z2: (z1 * z1.conjugate() + 2.0 * z2).exp(),
        lambda z: np.exp(z[0] * np.conjugate(z[0]) + 2.0 * z[1]),
        [0.2 + 0.3j, -0.1 - 0.2j])


def test_negative_power_matches_oracle():
    _compare_to_fd(
        lambda z1: (1.0 + z1 * z1.conjugate()) ** -2,
        lambda z: (1.0 + z[0] * np.conjugate(z[0])) ** -2.0,
        [0.45 - 0.3j])


def test_random_rational_jets_match_oracle():
    """Hand-rolled property check: random coefficient rational functions
    of one variable, jets vs the oracle at random interior points."""
    rng = np.random.default_rng(2024)
    for _ in range(25):
        a, b, c = rng.uniform(0.5, 2.0, 3)
        w = complex(*rng.uniform(-0.1, 0.1, 2))

        def build(z1, a=a, b=b, c=c, w=w):
            t = (z1 + w) * (z1 + w).conjugate()
            return (a + b * t) / (c + t * t)

        def f(z, a=a, b=b, c=c, w=w):
            t = (z[0] + w) * np.conjugate(z[0] + w)
            return (a + b * t) / (c + t * t)

        p = complex(*rng.uniform(-0.6, 0.6, 2))
        _compare_to_fd(build, f, [p])


def test_reciprocal_of_zero_raises():
    with pytest.raises(SingularPointError):
        seed(1, [0j], 0).reciprocal()


def test_jet_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        seed(1, [0.1 + 0j], 0) * seed(2, [0.1 + 0j, 0j], 0)


def test_non_integer_power_rejected():
    with pytest.raises(TypeError):
        seed(1, [0.5 + 0j], 0) ** 1.5


def test_batched_jets_broadcast():
    pts = np.linspace(0.1, 0.5, 4)[:, None] * (1 + 1j)
    jets = seed(1, pts, 0)
    sq = jets * jets.conjugate()
    assert sq.batch_shape == (4,)
    np.testing.assert_allclose(sq.value, np.abs(pts[:, 0]) ** 2)
    np.testing.assert_allclose(sq.ddbar[:, 0, 0], 1.0)


def test_conjugate_transposes_mixed_block():
    rng = np.random.default_rng(7)
    p = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    j = seed(2, p, 0) * seed(2, p, 1).conjugate() + seed(2, p, 1) ** 2
    jc = j.conjugate()
    np.testing.assert_allclose(jc.ddbar, np.conjugate(j.ddbar.T))
    np.testing.assert_allclose(jc.d, np.conjugate(j.dbar))
