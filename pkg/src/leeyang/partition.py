"""Exact partition functions organised by magnetization sector.

For a domain with N sites the partition function at field h is

    Z(h) = sum_m c_m exp(m h),   m in {-N, -N+2, ..., N},

with c_m the Boltzmann weight exp(beta * sum_{uv} s_u s_v) summed over
configurations of total magnetization m.  Both engines below first build the
integer density of states g(E, m) (number of configurations with bond energy
E and magnetization m) and only then form c_m = sum_E g(E, m) exp(beta E) in
extended precision.  The integer stage is exact, so the same counts serve any
beta and any precision.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import highreal
from .lattice import CapExceeded, SpinDomain

ENUMERATION_CAP = 2**28
STATE_CAP = 2**14
# bytes held by one transfer-matrix layer (states x energies x magnetizations)
MEMORY_CAP = 2**31

_CHUNK = 2**22


@dataclass(frozen=True, eq=False)
class DensityOfStates:
    """Counts ``counts[i, p]`` of configurations with bond energy
    ``energies[i]`` and ``p`` up-spins (magnetization ``2p - N``)."""

    num_sites: int
    energies: tuple
    counts: tuple

    @classmethod
    def from_array(cls, num_sites, energy_min, arr):
        rows = [tuple(int(v) for v in row) for row in arr]
        energies = [energy_min + i for i in range(len(rows))]
        keep = [i for i, row in enumerate(rows) if any(row)]
        return cls(num_sites, tuple(energies[i] for i in keep), tuple(rows[i] for i in keep))

    def __eq__(self, other):
        if not isinstance(other, DensityOfStates):
            return NotImplemented
        return (self.num_sites, self.energies, self.counts) == (
            other.num_sites,
            other.energies,
            other.counts,
        )

    def total(self):
        return sum(sum(row) for row in self.counts)

    def to_dict(self):
        return {
            "num_sites": self.num_sites,
            "energies": list(self.energies),
            "counts": [[str(c) for c in row] for row in self.counts],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            int(data["num_sites"]),
            tuple(int(e) for e in data["energies"]),
            tuple(tuple(int(c) for c in row) for row in data["counts"]),
        )


@dataclass(eq=False)
class MagnetizationPolynomial:
    """Sector coefficients ``c_m`` of Z at inverse temperature ``beta``.

    ``coefficients[i]`` belongs to magnetization ``m = -N + 2 i``.
    """

    domain: SpinDomain
    beta: mpmath.mpf
    coefficients: tuple
    precision: int
    dos: DensityOfStates | None = None
    method: str = ""

    @property
    def num_sites(self):
        return self.domain.num_sites

    @property
    def magnetizations(self):
        n = self.num_sites
        return tuple(range(-n, n + 1, 2))

    def coefficient(self, m):
        n = self.num_sites
        if (m + n) % 2 or abs(m) > n:
            raise KeyError(m)
        return self.coefficients[(m + n) // 2]

    def partition_at_zero(self):
        with highreal.working(self.precision):
            return mpmath.fsum(self.coefficients)

    def with_precision(self, precision):
        """Rebuild the coefficients from the exact counts at a new precision."""
        if self.dos is None:
            raise ValueError("no density of states attached; cannot change precision")
        return _polynomial(self.domain, self.dos, self.beta, precision, self.method)

    def to_dict(self):
        return {
            "domain": self.domain.to_dict(),
            "beta": highreal.to_json(self.beta),
            "beta_decimal": highreal.decimal(self.beta, self.precision),
            "precision": self.precision,
            "method": self.method,
            "magnetizations": list(self.magnetizations),
            "coefficients": [highreal.to_json(c) for c in self.coefficients],
            "density_of_states": None if self.dos is None else self.dos.to_dict(),
        }

    @classmethod
    def from_dict(cls, data):
        dos = data.get("density_of_states")
        return cls(
            domain=SpinDomain.from_dict(data["domain"]),
            beta=highreal.from_json(data["beta"]),
            coefficients=tuple(highreal.from_json(c) for c in data["coefficients"]),
            precision=int(data["precision"]),
            dos=None if dos is None else DensityOfStates.from_dict(dos),
            method=data.get("method", ""),
        )


def _as_beta(beta, precision):
    b = highreal.to_high(beta, precision + highreal.GUARD_DIGITS)
    if b < 0:
        raise ValueError("beta must be non-negative")
    return b


def _polynomial(domain, dos, beta, precision, method):
    precision = highreal.check_precision(precision)
    n = domain.num_sites
    b = _as_beta(beta, precision)
    with highreal.working(precision):
        weights = [mpmath.exp(b * e) for e in dos.energies]
        upper = []
        # only sectors m >= 0 are summed; c_{-m} is the same object as c_m
        for p in range((n + 1) // 2, n + 1):
            terms = [w * row[p] for w, row in zip(weights, dos.counts) if row[p]]
            upper.append(highreal.rounded(mpmath.fsum(terms), precision))
    lower = upper[1:] if n % 2 == 0 else upper
    coeffs = tuple(reversed(lower)) + tuple(upper)
    return MagnetizationPolynomial(domain, b, coeffs, precision, dos, method)


# -- brute-force enumeration -------------------------------------------------


@functools.lru_cache(maxsize=64)
def enumerate_counts(domain, cap=ENUMERATION_CAP):
    """Density of states by visiting every configuration.

    Configurations with the last spin up are enumerated; their spin flips
    have the same energy and mirrored magnetization.
    """
    n = domain.num_sites
    if n > 62 or 2**n > cap:
        raise CapExceeded(
            f"enumeration of {n} sites needs 2^{n} configurations, above the cap {cap}; "
            "use transfer_partition for rectangles",
            required=2**n,
            cap=cap,
        )
    n_edges = len(domain.edges)
    width = 2 * n_edges + 1
    hist = np.zeros(width * (n + 1), dtype=np.int64)
    eu = np.array([e[0] for e in domain.edges], dtype=np.uint64)
    ev = np.array([e[1] for e in domain.edges], dtype=np.uint64)
    top = np.uint64(1 << (n - 1))
    half = 2 ** (n - 1)
    one = np.uint64(1)
    for start in range(0, half, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, half), dtype=np.uint64) | top
        energy = np.full(idx.shape, n_edges, dtype=np.int64)  # offset so index >= 0
        for u, v in zip(eu, ev):
            differ = ((idx >> u) ^ (idx >> v)) & one
            energy += 1 - 2 * differ.astype(np.int64)
        ups = np.bitwise_count(idx).astype(np.int64)
        hist += np.bincount(energy * (n + 1) + ups, minlength=hist.size)
    hist = hist.reshape(width, n + 1)
    full = hist + hist[:, ::-1]
    return DensityOfStates.from_array(n, -n_edges, full)


def enumerate_partition(domain, beta, precision=highreal.DEFAULT_PRECISION, cap=ENUMERATION_CAP):
    """Sector polynomial by exhaustive enumeration (the oracle path)."""
    return _polynomial(domain, enumerate_counts(domain, cap), beta, precision, "enumeration")


# -- transfer matrix ---------------------------------------------------------


def _slice_geometry(domain):
    sides = domain.side_lengths()
    if sides is None:
        raise ValueError("transfer_partition needs an axis-aligned rectangular domain")
    axis = max(range(len(sides)), key=lambda a: (sides[a], -a))
    length = sides[axis]
    cross = [s for a, s in enumerate(sides) if a != axis]
    width = math.prod(cross)
    rows = [tuple(v[a] for a in range(len(sides)) if a != axis) for v in domain.vertices]
    rows = sorted(set(rows))
    row_index = {r: i for i, r in enumerate(rows)}
    earlier = []
    for i, r in enumerate(rows):
        nbrs = []
        for a in range(len(r)):
            q = r[:a] + (r[a] - 1,) + r[a + 1 :]
            j = row_index.get(q)
            if j is not None:
                nbrs.append(j)
        earlier.append(sorted(nbrs))
    return length, width, earlier


@functools.lru_cache(maxsize=64)
def transfer_counts(domain, state_cap=STATE_CAP):
    """Density of states by a site-by-site transfer-matrix sweep.

    The sweep runs along the longest axis.  The state is the spin profile of
    the most recent cross-section (one bit per row); adding a site at row r
    replaces bit r, picks up the bond to the previous slice (the old bit r)
    and the bonds to earlier rows of the current slice.
    """
    n = domain.num_sites
    length, width, earlier = _slice_geometry(domain)
    n_states = 2**width
    if n_states > state_cap:
        raise CapExceeded(
            f"cross-section of {width} sites needs {n_states} transfer states, above the cap {state_cap}",
            required=n_states,
            cap=state_cap,
        )
    n_edges = len(domain.edges)
    n_e = 2 * n_edges + 1
    dtype = np.int64 if n <= 62 else object
    layer_bytes = n_states * n_e * (n + 1) * 8
    if layer_bytes > MEMORY_CAP:
        raise CapExceeded(
            f"transfer layer needs {layer_bytes} bytes, above the memory cap {MEMORY_CAP}",
            required=layer_bytes,
            cap=MEMORY_CAP,
        )
    states = np.arange(n_states, dtype=np.int64)
    bits = [(states >> r) & 1 for r in range(width)]
    g = np.zeros((n_states, n_e, n + 1), dtype=dtype)
    g[0, n_edges, 0] = 1
    for x in range(length):
        for r in range(width):
            new = np.zeros_like(g)
            for b in (0, 1):
                shift = np.zeros(n_states, dtype=np.int64)
                for r2 in earlier[r]:
                    shift += 2 * (bits[r2] == b) - 1
                if x > 0:
                    shift += 2 * (bits[r] == b) - 1
                    live = np.ones(n_states, dtype=bool)
                else:
                    # first slice: unplaced rows are still 0, no left bond
                    live = bits[r] == 0
                dest = (states & ~(1 << r)) | (b << r)
                for sh in np.unique(shift[live]):
                    sel = states[live & (shift == sh)]
                    src = g[sel]
                    d = dest[sel]
                    sh = int(sh)
                    if sh >= 0:
                        new[d, sh:, b:] += src[:, : n_e - sh, : n + 1 - b]
                    else:
                        new[d, : n_e + sh, b:] += src[:, -sh:, : n + 1 - b]
            g = new
    total = g.sum(axis=0)
    return DensityOfStates.from_array(n, -n_edges, total)


def transfer_partition(domain, beta, precision=highreal.DEFAULT_PRECISION, state_cap=STATE_CAP):
    """Sector polynomial by transfer-matrix dynamic programming (fast path)."""
    return _polynomial(domain, transfer_counts(domain, state_cap), beta, precision, "transfer")


def partition(domain, beta, precision=highreal.DEFAULT_PRECISION):
    """Transfer path for rectangles, enumeration otherwise."""
    if domain.side_lengths() is not None:
        return transfer_partition(domain, beta, precision)
    return enumerate_partition(domain, beta, precision)


# -- evaluation --------------------------------------------------------------


def evaluate(poly, h):
    """Z(h) = sum_m c_m exp(m h) for complex h, at the polynomial's precision."""
    with highreal.working(poly.precision):
        hh = mpmath.mpc(h)
        terms = [c * mpmath.exp(m * hh) for m, c in zip(poly.magnetizations, poly.coefficients)]
        return +mpmath.fsum(terms)


def free_energy_per_site(poly, h):
    """ln Z(h) / |Lambda| for real h."""
    with highreal.working(poly.precision):
        hh = mpmath.mpf(h) if not isinstance(h, mpmath.mpf) else h
        terms = [c * mpmath.exp(m * hh) for m, c in zip(poly.magnetizations, poly.coefficients)]
        return mpmath.log(mpmath.fsum(terms)) / poly.num_sites
