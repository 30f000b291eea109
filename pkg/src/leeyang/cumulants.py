"""Cumulants of the total magnetization and Ursell functions of spin tuples.

Cumulants u_k(M) at h = 0 come from the sector polynomial (raw moments of M
then the moment-to-cumulant recursion).  Ursell functions of arbitrary vertex
tuples need joint moments that do not factor through magnetization sectors,
so those are computed by direct enumeration of small domains.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import highreal
from .lattice import CapExceeded, SpinDomain
from .partition import ENUMERATION_CAP

MOMENT_CAP = 16
URSELL_MAX_ORDER = 4


@dataclass
class CumulantVector:
    domain: SpinDomain
    beta: object
    k_max: int
    values: tuple  # u_1 .. u_{k_max}
    precision: int

    def __getitem__(self, k):
        """u_k, 1-based."""
        if not 1 <= k <= self.k_max:
            raise IndexError(k)
        return self.values[k - 1]

    def per_site(self, k):
        with highreal.working(self.precision):
            return self[k] / self.domain.num_sites

    def to_dict(self):
        return {
            "provenance": {
                "domain": self.domain.describe(),
                "beta": highreal.decimal(self.beta, self.precision),
                "precision": self.precision,
            },
            "k_max": self.k_max,
            "u": [highreal.decimal(v, self.precision) for v in self.values],
        }


def _work_dps(precision, n, p_max):
    # power sums of m^p reach N^p before the recursion cancels them down
    return precision + highreal.GUARD_DIGITS + int(p_max * math.log10(n + 1)) + 1


def raw_moments(poly, p_max, cap=MOMENT_CAP):
    """[<M^0>, ..., <M^p_max>] at h = 0; odd moments are exactly zero."""
    if p_max < 0 or p_max > cap:
        raise ValueError(f"p_max must be in [0, {cap}]")
    n = poly.num_sites
    with mpmath.workdps(_work_dps(poly.precision, n, p_max)):
        z = poly.partition_at_zero()
        out = [mpmath.mpf(1)]
        for p in range(1, p_max + 1):
            if p % 2:
                out.append(mpmath.mpf(0))
                continue
            # mirrored pairs m, -m contribute 2 c_m m^p
            terms = [2 * c * mpmath.mpf(m) ** p for m, c in zip(poly.magnetizations, poly.coefficients) if m > 0]
            out.append(mpmath.fsum(terms) / z)
    return out


def cumulants_from_moments(moments, domain=None, beta=None, precision=highreal.DEFAULT_PRECISION):
    """u_1..u_K from raw moments m_0..m_K by
    u_k = m_k - sum_{j=1}^{k-1} C(k-1, j-1) u_j m_{k-j}."""
    k_max = len(moments) - 1
    n = domain.num_sites if domain is not None else 1
    with mpmath.workdps(_work_dps(precision, n, k_max)):
        kappa = [None]
        for k in range(1, k_max + 1):
            acc = moments[k]
            for j in range(1, k):
                if kappa[j] == 0 or moments[k - j] == 0:
                    continue
                acc -= math.comb(k - 1, j - 1) * kappa[j] * moments[k - j]
            kappa.append(acc)
    values = tuple(highreal.rounded(v, precision) for v in kappa[1:])
    return CumulantVector(domain, beta, k_max, values, precision)


def cumulants(poly, k_max=8):
    """Cumulant vector u_1..u_{k_max} of M at h = 0."""
    return cumulants_from_moments(raw_moments(poly, k_max), poly.domain, poly.beta, poly.precision)


# -- Ursell functions ----------------------------------------------------------


def set_partitions(items):
    """All set partitions of a list, as lists of blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


class SpinEnsemble:
    """Exact Gibbs expectations on a small domain at (beta, h).

    Joint moments <prod_{i in B} s_i> are sums over (energy, magnetization)
    classes split by the sign of the product, so each query is one pass over
    the configurations plus a short extended-precision sum.
    """

    def __init__(self, domain, beta, h=0, precision=highreal.DEFAULT_PRECISION, cap=ENUMERATION_CAP):
        n = domain.num_sites
        if n > 62 or 2**n > cap:
            raise CapExceeded(
                f"Ursell functions need exact enumeration of 2^{n} configurations, above the cap {cap}",
                required=2**n,
                cap=cap,
            )
        self.domain = domain
        self.precision = precision
        self.dps = precision + highreal.GUARD_DIGITS
        idx = np.arange(2**n, dtype=np.uint64)
        self._spins = [(((idx >> np.uint64(v)) & np.uint64(1)).astype(np.int8) * 2 - 1) for v in range(n)]
        energy = np.zeros(idx.shape, dtype=np.int64)
        for u, v in domain.edges:
            energy += self._spins[u] * self._spins[v]
        mag = np.bitwise_count(idx).astype(np.int64) * 2 - n
        self._e_min = int(energy.min()) if len(domain.edges) else 0
        self._m_min = -n
        self._n_m = 2 * n + 1
        self._cls = (energy - self._e_min) * self._n_m + (mag - self._m_min)
        n_cls = int(self._cls.max()) + 1
        with mpmath.workdps(self.dps):
            b = highreal.to_high(beta, self.dps)
            hh = highreal.to_high(h, self.dps)
            self._weights = []
            for c in range(n_cls):
                e = c // self._n_m + self._e_min
                m = c % self._n_m + self._m_min
                self._weights.append(mpmath.exp(b * e + hh * m))
            counts = np.bincount(self._cls, minlength=n_cls)
            self._z = self._sum(counts)
        self._cache = {(): mpmath.mpf(1)}

    def _sum(self, signed_counts):
        with mpmath.workdps(self.dps):
            return mpmath.fsum(w * int(c) for w, c in zip(self._weights, signed_counts) if c)

    def moment(self, vertices):
        """<prod s_v> over a multiset of vertex indices (s_v^2 = 1)."""
        odd = tuple(sorted(v for v in set(vertices) if list(vertices).count(v) % 2))
        val = self._cache.get(odd)
        if val is None:
            prod = np.ones(self._cls.shape, dtype=np.int8)
            for v in odd:
                prod = prod * self._spins[v]
            n_cls = len(self._weights)
            plus = np.bincount(self._cls[prod > 0], minlength=n_cls)
            minus = np.bincount(self._cls[prod < 0], minlength=n_cls)
            with mpmath.workdps(self.dps):
                val = self._sum(plus - minus) / self._z
            self._cache[odd] = val
        return val

    def ursell(self, vertices):
        """Truncated correlation via the set-partition expansion."""
        items = list(range(len(vertices)))
        with mpmath.workdps(self.dps):
            total = mpmath.mpf(0)
            for part in set_partitions(items):
                r = len(part)
                term = (-1) ** (r - 1) * math.factorial(r - 1)
                prod = mpmath.mpf(term)
                for block in part:
                    prod *= self.moment([vertices[i] for i in block])
                total += prod
            return total


@functools.lru_cache(maxsize=32)
def ensemble(domain, beta, h=0, precision=highreal.DEFAULT_PRECISION):
    return SpinEnsemble(domain, beta, h, precision)


def ursell(domain, beta, vertices, h=0, precision=highreal.DEFAULT_PRECISION):
    """Ursell function u_k(s_{v_1}, ..., s_{v_k}) for 1 <= k <= 4 vertex indices.

    Repeated indices are allowed.
    """
    vertices = [int(v) for v in vertices]
    if not 1 <= len(vertices) <= URSELL_MAX_ORDER:
        raise ValueError(f"Ursell functions are provided for 1 to {URSELL_MAX_ORDER} vertices")
    if any(v < 0 or v >= domain.num_sites for v in vertices):
        raise IndexError("vertex index outside the domain")
    return ensemble(domain, beta, h, precision).ursell(vertices)


def ursell_sum_check(domain, beta, k, precision=highreal.DEFAULT_PRECISION, max_tuples=10**6):
    """Compare u_k(M) with the sum of Ursell functions over all k-tuples.

    Returns (lhs, rhs, relative gap).
    """
    from .partition import partition

    if k not in (2, 4):
        raise ValueError("k must be 2 or 4")
    n = domain.num_sites
    if n**k > max_tuples:
        raise CapExceeded(f"{n}^{k} tuples exceed the limit {max_tuples}", required=n**k, cap=max_tuples)
    lhs = cumulants(partition(domain, beta, precision), k)[k]
    ens = ensemble(domain, beta, 0, precision)
    memo = {}
    with mpmath.workdps(ens.dps):
        terms = []
        for tup in itertools.product(range(n), repeat=k):
            key = tuple(sorted(tup))
            val = memo.get(key)
            if val is None:
                val = memo[key] = ens.ursell(list(key))
            terms.append(val)
        rhs = mpmath.fsum(terms)
        gap = abs(lhs - rhs) / abs(lhs) if lhs != 0 else abs(rhs)
    return lhs, rhs, gap
