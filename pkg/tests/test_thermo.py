import math

import pytest

from leeyang.thermo import (
    BkEstimate,
    alpha1_extrapolate,
    bk_sequence,
    critical_beta,
    exact_1d_radius,
    fit_alpha1,
    radius_from_bk,
    susceptibility_trend,
)


def chain_susceptibility(length, beta):
    t = math.tanh(beta)
    return sum(t ** abs(i - j) for i in range(length) for j in range(length)) / length


def test_exact_1d_radius():
    assert exact_1d_radius(0) == pytest.approx(math.pi / 2)
    assert exact_1d_radius(0.5) == pytest.approx(0.376727508, abs=1e-9)
    assert exact_1d_radius(1) == pytest.approx(0.135751851, abs=1e-9)
    assert exact_1d_radius(20) < 1e-17
    with pytest.raises(ValueError):
        exact_1d_radius(-0.1)


def test_exact_1d_radius_is_branch_point():
    # the square root in the chain eigenvalue vanishes at h = i alpha
    for beta in (0.3, 1.2):
        a = exact_1d_radius(beta)
        assert math.exp(2 * beta) * -math.sin(a) ** 2 + math.exp(-2 * beta) == pytest.approx(0, abs=1e-15)


def test_critical_beta():
    assert critical_beta(1) == math.inf
    assert critical_beta(2) == pytest.approx(0.5 * math.log(1 + math.sqrt(2)))
    assert critical_beta(2) == pytest.approx(0.44068679, abs=1e-8)
    assert critical_beta(3) is None
    with pytest.raises(ValueError):
        critical_beta(0)


def test_bk_chain_susceptibility():
    est = bk_sequence(1, "0.5", 2, 10)
    vals = est.floats()
    for n, v in zip(est.ns, vals):
        assert v == pytest.approx(chain_susceptibility(2 * n + 1, 0.5), rel=1e-13)
    assert est.monotone and all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < math.e
    assert est.b_k == pytest.approx(math.e, abs=1e-3)


def test_bk_trivial_cases():
    odd = bk_sequence(2, "0.4", 3, 2)
    assert odd.floats() == [0.0, 0.0] and odd.b_k == 0
    flat = bk_sequence(2, 0, 2, 3)
    assert flat.floats() == [1.0, 1.0, 1.0] and flat.b_k == pytest.approx(1)


def test_bk_higher_orders_monotone():
    for k in (4, 6):
        assert bk_sequence(1, "1", k, 8).monotone


def fake(k, b):
    return BkEstimate(k=k, beta=0.0, d=1, ns=[1], values=[str(b)], monotone=True, b_k=b)


def test_radius_conventions():
    assert radius_from_bk([fake(2, 5.0)], flagged_infinite=True).value == 0
    assert radius_from_bk([fake(2, 0.0), fake(4, 0.0)]).value == math.inf
    with pytest.raises(ValueError):
        radius_from_bk([fake(3, 1.0)])


def test_radius_beta_zero():
    # ln cosh coefficients: per-k radii above pi/2 for k >= 4, closing in from above
    rp = radius_from_bk([fake(2, 1), fake(4, -2), fake(6, 16), fake(8, -272)])
    assert rp.per_k[2] == pytest.approx(math.sqrt(2))
    assert all(rp.per_k[k] > math.pi / 2 for k in (4, 6, 8))
    assert rp.per_k[8] < rp.per_k[6]
    assert rp.branch_fit == pytest.approx(math.pi / 2, rel=0.05)


def test_radius_chain_beta_one():
    bks = [bk_sequence(1, "1", k, 20) for k in (2, 4, 6, 8)]
    assert all(b.monotone for b in bks)
    rp = radius_from_bk(bks)
    ref = exact_1d_radius(1)
    # the k <= 8 max proxy is still far above the limit; the per-k sequence falls toward it
    assert rp.value > ref
    seq = [rp.per_k[k] for k in (2, 4, 6, 8)]
    assert all(b < a for a, b in zip(seq, seq[1:]))
    assert abs(rp.branch_fit - ref) < 0.15 * ref
    # ordering with the finite boxes: the branch estimate sits below every alpha_1(B_n)
    est = alpha1_extrapolate(1, "1", 6)
    assert all(rp.branch_fit <= a for a in est.floats())


def test_alpha1_chain_bracketing():
    est = alpha1_extrapolate(1, "1", 11)
    vals = est.floats()
    ref = exact_1d_radius(1)
    assert est.reference == pytest.approx(ref)
    assert all(v >= ref for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert 0 <= est.limit <= min(vals)
    assert set(est.fits) == {1, 2}


def test_alpha1_beta_zero():
    est = alpha1_extrapolate(2, 0, 3)
    assert est.floats() == pytest.approx([math.pi / 2] * 3)
    assert est.limit == pytest.approx(math.pi / 2)


def test_alpha1_supercritical_square():
    est = alpha1_extrapolate(2, "0.6", 3)
    vals = est.floats()
    assert vals[2] < 0.2 * vals[0]
    assert est.limit < 0.02
    assert est.reference is None


def test_fit_needs_three_sizes():
    with pytest.raises(ValueError):
        fit_alpha1([1, 2], [0.5, 0.4], 1, 1)


def test_susceptibility_trend():
    chain = susceptibility_trend(1, "0.5", 6)
    assert chain.bounded and chain.values[-1] < math.e
    flat = susceptibility_trend(2, 0, 3)
    assert flat.bounded and flat.values == [1.0, 1.0, 1.0]
    hot = susceptibility_trend(2, "0.6", 3)
    assert not hot.bounded
    assert all(b > a for a, b in zip(hot.values, hot.values[1:]))
    assert hot.increments[1] > hot.increments[0]
    cool = susceptibility_trend(2, "0.3", 3)
    assert cool.bounded
