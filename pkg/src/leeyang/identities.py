"""Finite-volume checks of the zero/cumulant relations and correlation inequalities.

Every check returns a :class:`CheckReport`.  ``gap`` is always oriented so
that the check passes when ``gap <= tolerance``; for inequalities the gap is
the (signed) amount by which the inequality is violated.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import mpmath

from . import highreal
from .cumulants import cumulants, ensemble, ursell_sum_check
from .partition import evaluate, partition
from .zeros import DEFAULT_THETA_TOL, find_zeros_adaptive, first_zero, periodic_zero_sum

IDENTITY_REL_TOL = 1e-6
IDENTITY_MAX_K = 4
URSELL_K4_MAX_SITES = 6
TAYLOR_TERMS = 8


@dataclass
class CheckReport:
    name: str
    provenance: dict
    lhs: str
    rhs: str
    gap: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.gap <= self.tolerance)

    def to_dict(self):
        return {
            "name": self.name,
            "provenance": self.provenance,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _provenance(domain, beta, precision, **extra):
    out = {
        "domain": domain.describe(),
        "beta": highreal.decimal(beta, precision),
        "precision": precision,
    }
    out.update(extra)
    return out


def check_cumulant_zero_identity(poly, zs, k_max=IDENTITY_MAX_K, rel_tol=IDENTITY_REL_TOL):
    """u_{2k}(M) against (-1)^(k-1) (2k)!/k * sum_j alpha_j^(-2k), for k = 1..k_max.

    The zero sum is taken with its periodic-image tail certified below
    rel_tol / 10.
    """
    if not 1 <= k_max <= IDENTITY_MAX_K:
        raise ValueError(f"k_max must be between 1 and {IDENTITY_MAX_K}")
    u = cumulants(poly, 2 * k_max)
    reports = []
    for k in range(1, k_max + 1):
        s, err = periodic_zero_sum(zs, k, rel_tol / 10)
        with highreal.working(zs.precision):
            rhs = (-1) ** (k - 1) * mpmath.factorial(2 * k) / k * s
            lhs = u[2 * k]
            gap = float(abs(lhs - rhs) / abs(lhs))
        reports.append(
            CheckReport(
                f"cumulant_zero_identity[k={k}]",
                _provenance(poly.domain, poly.beta, poly.precision, k=k, tail_bound=highreal.decimal(err, 6)),
                highreal.decimal(lhs, poly.precision),
                highreal.decimal(rhs, poly.precision),
                gap,
                rel_tol,
            )
        )
    return reports


def check_cumulant_bound(poly, zs, k_max=IDENTITY_MAX_K):
    """|u_{2k}| <= (2k)!/k * 4|Lambda| * alpha_1^(-2k); gap is lhs/rhs - 1."""
    a1 = first_zero(zs)
    if not a1 < 2 * mpmath.pi:
        raise AssertionError("first zero must lie below 2 pi")
    u = cumulants(poly, 2 * k_max)
    n = poly.num_sites
    reports = []
    for k in range(1, k_max + 1):
        with highreal.working(zs.precision):
            lhs = abs(u[2 * k])
            rhs = mpmath.factorial(2 * k) / k * 4 * n * a1 ** (-2 * k)
            gap = float(lhs / rhs - 1)
        reports.append(
            CheckReport(
                f"cumulant_bound[k={k}]",
                _provenance(poly.domain, poly.beta, poly.precision, k=k),
                highreal.decimal(lhs, poly.precision),
                highreal.decimal(rhs, poly.precision),
                gap,
                0.0,
            )
        )
    return reports


def _check_nested(domains):
    for small, big in zip(domains, domains[1:]):
        if not big.contains(small) or big.num_sites == small.num_sites:
            raise ValueError("domains must be strictly nested")


def check_first_zero_monotonicity(domains, beta, precision=highreal.DEFAULT_PRECISION, theta_tol=DEFAULT_THETA_TOL):
    """alpha_1 along a nested family must not increase (slack 10 theta_tol)."""
    _check_nested(domains)
    alphas = []
    for dom in domains:
        zs = find_zeros_adaptive(partition(dom, beta, precision), theta_tol)
        alphas.append(first_zero(zs))
    rises = [float(b - a) for a, b in zip(alphas, alphas[1:])]
    gap = max(rises, default=float("-inf"))
    return CheckReport(
        "first_zero_monotonicity",
        {
            "domains": [d.describe() for d in domains],
            "beta": highreal.decimal(highreal.to_high(beta, precision), precision),
            "precision": precision,
            "theta_tol": theta_tol,
        },
        " ".join(highreal.decimal(a, 18) for a in alphas),
        "nonincreasing",
        gap,
        10 * theta_tol,
    )


def taylor_envelope(q, terms=TAYLOR_TERMS):
    """Per-site bound on the Taylor remainder after ``terms`` orders at |h| = q alpha_1.

    From |u_{2k}|/(2k)! <= (4|Lambda|/k) alpha_1^(-2k), the omitted orders
    2k > terms sum to at most 4/(k0) q^(2 k0) / (1 - q^2), k0 = terms/2 + 1.
    """
    k0 = terms // 2 + 1
    return 4.0 / k0 * q ** (2 * k0) / (1 - q * q)


def check_taylor_consistency(poly, zs, h_samples=None, terms=TAYLOR_TERMS):
    """Partial Taylor sums of ln Z / |Lambda| against direct evaluation.

    ``h_samples`` are complex fields with |h| < alpha_1; the default is
    0.8 alpha_1 along both axes.  Gap is the worst ratio of the observed
    error to the remainder envelope.
    """
    a1 = first_zero(zs)
    if h_samples is None:
        r = 0.8 * float(a1)
        h_samples = [r, -r, 1j * r]
    u = cumulants(poly, terms)
    n = poly.num_sites
    worst = 0.0
    worst_diff = 0.0
    with highreal.working(zs.precision):
        log_z0 = mpmath.log(poly.partition_at_zero())
        for h in h_samples:
            hh = mpmath.mpc(h)
            q = float(abs(hh) / a1)
            if q >= 1:
                raise ValueError("Taylor samples must lie inside the zero-free disk")
            series = log_z0 + mpmath.fsum(u[k] * hh**k / mpmath.factorial(k) for k in range(1, terms + 1))
            direct = mpmath.log(evaluate(poly, hh))
            diff = float(abs(direct - series)) / n
            env = taylor_envelope(q, terms)
            ratio = 0.0 if diff == 0 else diff / env
            worst = max(worst, ratio)
            worst_diff = max(worst_diff, diff)
    return CheckReport(
        "taylor_consistency",
        _provenance(poly.domain, poly.beta, poly.precision, terms=terms, h=[str(complex(h)) for h in h_samples]),
        f"{worst_diff:.6e}",
        "geometric envelope",
        worst,
        1.0,
    )


def _tuples(n, k):
    return itertools.combinations_with_replacement(range(n), k)


def check_ursell_signs_monotonicity(domains, beta, precision=highreal.DEFAULT_PRECISION, k4_max_sites=URSELL_K4_MAX_SITES):
    """Sign law (-1)^(k-1) u_{2k} >= 0 and growth with the domain, at h = 0.

    Pairs are checked on every domain; 4-tuples on domains with at most
    ``k4_max_sites`` sites.  Tuples are matched across domains by vertex
    coordinates.  The gap is the largest violation over both inequalities,
    with a slack of 10^-(P-2) for cancellation.
    """
    _check_nested(domains)
    worst = float("-inf")
    count = 0
    prev = {}
    for dom in domains:
        ens = ensemble(dom, beta, 0, precision)
        cur = {}
        orders = [2] + ([4] if dom.num_sites <= k4_max_sites else [])
        for size in orders:
            sign = 1 if size == 2 else -1
            for tup in _tuples(dom.num_sites, size):
                val = sign * ens.ursell(list(tup))
                key = tuple(dom.vertices[i] for i in tup)
                cur[key] = val
                worst = max(worst, float(-val))
                if key in prev:
                    worst = max(worst, float(prev[key] - val))
                count += 1
        prev = cur
    return CheckReport(
        "ursell_signs_monotonicity",
        {
            "domains": [d.describe() for d in domains],
            "beta": highreal.decimal(highreal.to_high(beta, precision), precision),
            "precision": precision,
            "tuples": count,
        },
        f"{worst:.6e}",
        "0",
        worst,
        10.0 ** (2 - precision),
    )


def check_ursell_sum(domain, beta, k, precision=highreal.DEFAULT_PRECISION, rel_tol=None):
    """u_k(M) against the brute-force sum of Ursell functions over k-tuples."""
    if rel_tol is None:
        rel_tol = 10.0 ** (8 - precision)
    lhs, rhs, gap = ursell_sum_check(domain, beta, k, precision)
    return CheckReport(
        f"ursell_sum[k={k}]",
        _provenance(domain, highreal.to_high(beta, precision), precision, k=k),
        highreal.decimal(lhs, precision),
        highreal.decimal(rhs, precision),
        float(gap),
        rel_tol,
    )


def prefix_family(domain):
    """Nested boxes ending in ``domain`` (same corner, sides grown together), or [domain]."""
    from .lattice import SpinDomain

    sides = domain.side_lengths()
    if sides is None:
        return [domain]
    corner = domain.vertices[0]
    out = []
    for step in range(1, max(sides) + 1):
        cur = [min(s, step) for s in sides]
        ranges = [range(c, c + s) for c, s in zip(corner, cur)]
        dom = SpinDomain(domain.dimension, tuple(itertools.product(*ranges)))
        if not out or dom.num_sites > out[-1].num_sites:
            out.append(dom)
    return out


def run_suite(domain, beta, precision=highreal.DEFAULT_PRECISION, theta_tol=DEFAULT_THETA_TOL, k_max=IDENTITY_MAX_K):
    """All checks that fit the domain's size, as a list of reports.

    Enumeration-based checks (Ursell sums and signs) are skipped above a
    few hundred thousand configurations.
    """
    poly = partition(domain, beta, precision)
    zs = find_zeros_adaptive(poly, theta_tol)
    if zs.precision != poly.precision:
        poly = poly.with_precision(zs.precision)
    reports = []
    reports += check_cumulant_zero_identity(poly, zs, k_max)
    reports += check_cumulant_bound(poly, zs, k_max)
    reports.append(check_taylor_consistency(poly, zs))
    family = prefix_family(domain)
    if len(family) > 1:
        reports.append(check_first_zero_monotonicity(family, beta, precision, theta_tol))
    n = domain.num_sites
    if n <= 18:
        reports.append(check_ursell_sum(domain, beta, 2, precision))
        if n**4 <= 10**5:
            reports.append(check_ursell_sum(domain, beta, 4, precision))
    if n <= 12:
        reports.append(check_ursell_signs_monotonicity([f for f in family if f.num_sites <= 12], beta, precision))
    return reports
