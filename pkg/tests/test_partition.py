import itertools
import math

import mpmath
import pytest

from leeyang.lattice import CapExceeded, SpinDomain, make_box, make_rectangle
from leeyang.partition import (
    MagnetizationPolynomial,
    enumerate_counts,
    enumerate_partition,
    evaluate,
    free_energy_per_site,
    partition,
    transfer_counts,
    transfer_partition,
)


def naive_z(domain, beta, h):
    """Direct sum over spin tuples, no shared code with the engines."""
    with mpmath.workdps(50):
        b, hh = mpmath.mpf(beta), mpmath.mpc(h)
        total = mpmath.mpc(0)
        for spins in itertools.product((-1, 1), repeat=domain.num_sites):
            e = sum(spins[u] * spins[v] for u, v in domain.edges)
            total += mpmath.exp(b * e + hh * sum(spins))
        return total


SMALL = [
    make_rectangle(1, [1]),
    make_rectangle(1, [2]),
    make_rectangle(1, [5]),
    make_rectangle(2, [2, 2]),
    make_rectangle(2, [2, 3]),
    make_rectangle(3, [1, 2, 2]),
    SpinDomain(2, ((0, 0), (1, 0), (0, 1), (1, 1), (2, 1))),
]


@pytest.mark.parametrize("dom", SMALL, ids=lambda d: str(d.describe()))
@pytest.mark.parametrize("beta,h", [("0", 0.3), ("0.4", 0.1 + 0.7j), ("1", -0.25)])
def test_matches_direct_sum(dom, beta, h):
    poly = partition(dom, beta, 30)
    z = evaluate(poly, h)
    ref = naive_z(dom, beta, h)
    assert abs(z - ref) <= 1e-27 * abs(ref)


@pytest.mark.parametrize("n", [1, 2, 7, 12])
@pytest.mark.parametrize("beta", ["0.3", "1.5"])
def test_free_chain_closed_form(n, beta):
    # Z(0) = 2 (2 cosh beta)^(n-1) for an open chain
    poly = transfer_partition(make_rectangle(1, [n]), beta, 40)
    with mpmath.workdps(50):
        ref = 2 * (2 * mpmath.cosh(mpmath.mpf(beta))) ** (n - 1)
        assert abs(poly.partition_at_zero() - ref) <= mpmath.mpf(10) ** -38 * ref


def test_plaquette_closed_form():
    # 2x2 is a 4-cycle: Z(0) = (2 cosh b)^4 + (2 sinh b)^4
    with mpmath.workdps(40):
        b = mpmath.mpf("0.7")
        ref = (2 * mpmath.cosh(b)) ** 4 + (2 * mpmath.sinh(b)) ** 4
        z = partition(make_rectangle(2, [2, 2]), "0.7", 35).partition_at_zero()
        assert abs(z - ref) <= mpmath.mpf(10) ** -33 * ref


@pytest.mark.parametrize(
    "dom",
    [make_rectangle(1, [9]), make_rectangle(2, [3, 4]), make_rectangle(2, [4, 4]), make_rectangle(3, [2, 2, 3]), make_box(2, 1)],
    ids=lambda d: str(d.side_lengths()),
)
def test_engines_agree_on_counts(dom):
    assert enumerate_counts(dom) == transfer_counts(dom)


def test_counts_total_and_symmetry():
    dos = transfer_counts(make_rectangle(2, [5, 5]))
    assert dos.total() == 2**25
    for row in dos.counts:
        assert tuple(row) == tuple(reversed(row))


def test_ground_states():
    # all-up and all-down are the only configurations with every bond satisfied
    dom = make_rectangle(2, [3, 3])
    dos = transfer_counts(dom)
    top = dos.energies.index(len(dom.edges))
    assert dos.counts[top][0] == 1 and dos.counts[top][-1] == 1 and sum(dos.counts[top]) == 2


def test_coefficients_are_mirrored():
    poly = partition(make_rectangle(2, [3, 3]), "0.5", 30)
    for m in poly.magnetizations:
        assert poly.coefficient(m) == poly.coefficient(-m)
    with pytest.raises(KeyError):
        poly.coefficient(2)


def test_beta_zero_is_binomial():
    n = 10
    poly = partition(make_rectangle(1, [n]), 0, 30)
    assert [int(c) for c in poly.coefficients] == [math.comb(n, p) for p in range(n + 1)]


def test_precision_change_and_round_trip():
    poly = partition(make_rectangle(2, [2, 3]), "0.3", 20)
    hi = poly.with_precision(60)
    assert hi.precision == 60
    assert abs(hi.coefficients[3] - poly.coefficients[3]) < 1e-19 * hi.coefficients[3]
    back = MagnetizationPolynomial.from_dict(hi.to_dict())
    assert back.coefficients == hi.coefficients and back.beta == hi.beta
    assert back.dos == hi.dos


def test_free_energy_matches_log():
    poly = partition(make_rectangle(1, [4]), "0.5", 30)
    with mpmath.workdps(40):
        ref = mpmath.log(naive_z(poly.domain, "0.5", mpmath.mpf("0.2")).real) / 4
    assert abs(free_energy_per_site(poly, "0.2") - ref) < 1e-27


def test_caps():
    with pytest.raises(CapExceeded):
        enumerate_partition(make_rectangle(1, [12]), 0, cap=2**10)
    with pytest.raises(CapExceeded):
        transfer_partition(make_rectangle(2, [20, 20]), 0)
    with pytest.raises(ValueError):
        transfer_partition(SpinDomain(2, ((0, 0), (1, 1))), 0)
    with pytest.raises(ValueError):
        partition(make_rectangle(1, [3]), -1)
    with pytest.raises(ValueError):
        partition(make_rectangle(1, [3]), 1, precision=5)
