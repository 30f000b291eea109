import itertools
import math

import mpmath
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from leeyang.cumulants import (
    cumulants,
    cumulants_from_moments,
    raw_moments,
    set_partitions,
    ursell,
    ursell_sum_check,
)
from leeyang.lattice import CapExceeded, SpinDomain, make_rectangle
from leeyang.partition import partition

# cumulants of a single +-1 spin: derivatives of ln cosh h
LN_COSH = {2: 1, 4: -2, 6: 16, 8: -272}


def taylor_log_z(domain, beta, order):
    """u_k by differentiating ln Z(h) in mpmath, summing configurations directly."""
    with mpmath.workdps(60):
        b = mpmath.mpf(beta)
        classes = {}
        for spins in itertools.product((-1, 1), repeat=domain.num_sites):
            key = (sum(spins[u] * spins[v] for u, v in domain.edges), sum(spins))
            classes[key] = classes.get(key, 0) + 1

        def log_z(h):
            return mpmath.log(mpmath.fsum(c * mpmath.exp(b * e + h * m) for (e, m), c in classes.items()))

        coeffs = mpmath.taylor(log_z, 0, order)
        return [coeffs[k] * math.factorial(k) for k in range(order + 1)]


def test_single_site_series():
    cv = cumulants(partition(make_rectangle(1, [1]), 0, 30), 8)
    for k in range(1, 9):
        assert cv[k] == LN_COSH.get(k, 0)


@pytest.mark.parametrize("n", [2, 5, 9])
def test_beta_zero_is_additive(n):
    cv = cumulants(partition(make_rectangle(1, [n]), 0, 30), 8)
    for k, v in LN_COSH.items():
        assert abs(cv[k] - n * v) < 1e-25 * abs(n * v)


def test_two_site_closed_form():
    # <M^2> = 4 / (1 + e^{-2b}) for two coupled spins
    cv = cumulants(partition(make_rectangle(1, [2]), 1, 30), 2)
    with mpmath.workdps(40):
        assert abs(cv[2] - 4 / (1 + mpmath.exp(-2))) < mpmath.mpf(10) ** -28


def test_odd_cumulants_vanish():
    cv = cumulants(partition(make_rectangle(2, [3, 3]), "0.8", 30), 7)
    assert all(cv[k] == 0 for k in (1, 3, 5, 7))


subsets = st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=7)


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(verts=subsets, beta=st.sampled_from(["0", "0.15", "0.44069", "0.9"]))
def test_against_derivatives_of_log_z(verts, beta):
    dom = SpinDomain(2, tuple(verts))
    cv = cumulants(partition(dom, beta, 30), 6)
    ref = taylor_log_z(dom, beta, 6)
    for k in range(1, 7):
        assert abs(cv[k] - ref[k]) <= 1e-22 * max(1, abs(ref[k]))


def test_moment_recursion_on_gaussian_like_input():
    # moments of a centred variable with kappa_2 = 1, kappa_4 = 3 are 1, 0, 1, 0, 6
    cv = cumulants_from_moments([1, 0, 1, 0, 6], precision=20)
    assert list(cv.values) == [0, 1, 0, 3]


def test_raw_moment_limits():
    poly = partition(make_rectangle(1, [3]), "0.2", 30)
    assert raw_moments(poly, 0) == [1]
    with pytest.raises(ValueError):
        raw_moments(poly, 17)


def test_set_partition_counts():
    # Bell numbers
    assert [sum(1 for _ in set_partitions(list(range(n)))) for n in range(6)] == [1, 1, 2, 5, 15, 52]


def test_pair_ursell_on_chain():
    # open chain: <s_i s_j> = tanh(b)^|i-j|
    dom = make_rectangle(1, [4])
    for j in range(4):
        got = ursell(dom, "0.7", [0, j])
        assert abs(got - math.tanh(0.7) ** j) < 1e-15


def test_repeated_single_site_fourth():
    assert abs(ursell(make_rectangle(1, [1]), 0, [0, 0, 0, 0]) + 2) < 1e-28


def test_ursell_shlosman_sign_on_plaquette():
    dom = make_rectangle(2, [2, 2])
    for tup in itertools.combinations_with_replacement(range(4), 4):
        assert ursell(dom, "0.6", list(tup)) <= 1e-28


@pytest.mark.parametrize(
    "dom,beta,k",
    [(make_rectangle(1, [2]), "1", 2), (make_rectangle(1, [3]), "0.5", 4), (make_rectangle(2, [2, 3]), "0.7", 4)],
)
def test_sum_of_ursell_functions(dom, beta, k):
    lhs, rhs, gap = ursell_sum_check(dom, beta, k)
    assert gap < 1e-25


def test_ursell_input_checks():
    dom = make_rectangle(1, [3])
    with pytest.raises(ValueError):
        ursell(dom, 0, [0, 1, 2, 0, 1])
    with pytest.raises(IndexError):
        ursell(dom, 0, [5])
    with pytest.raises(CapExceeded):
        ursell_sum_check(make_rectangle(1, [40]), 0, 4)


def test_per_site_and_dict():
    cv = cumulants(partition(make_rectangle(1, [4]), "0.5", 30), 4)
    with mpmath.workdps(40):
        assert abs(cv.per_site(2) - cv[2] / 4) < 1e-28
    data = cv.to_dict()
    assert data["k_max"] == 4 and len(data["u"]) == 4
    with pytest.raises(IndexError):
        cv[0]
