"""Sequences over growing boxes and estimates of their infinite-volume limits.

Box B_n = [-n, n]^d has side L = 2n + 1.  Finite-size fits below are
written in 1/L rather than 1/n: the two families coincide asymptotically,
but surface corrections are exactly proportional to 1/L for a chain, so the
fit in L is far less biased at the sizes reachable here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import highreal
from .cumulants import cumulants
from .lattice import make_box
from .partition import partition
from .zeros import DEFAULT_THETA_TOL, find_zeros_adaptive, first_zero

FIT_POINTS = 4
BETA_C_2D = 0.5 * math.log(1 + math.sqrt(2))


def exact_1d_radius(beta):
    """alpha_1 of the infinite chain: arcsin(exp(-2 beta)).

    The chain free energy is ln(e^b cosh h + sqrt(e^{2b} sinh^2 h + e^{-2b})).
    At h = i t the radicand is e^{-2b} - e^{2b} sin^2 t, which first vanishes
    at sin t = e^{-2b}.
    """
    beta = float(beta)
    if beta < 0:
        raise ValueError("beta must be non-negative")
    return math.asin(math.exp(-2 * beta))


def critical_beta(d):
    """inf for d = 1, the Onsager value for d = 2, None (unknown) for d >= 3."""
    if d < 1:
        raise ValueError("d must be positive")
    if d == 1:
        return math.inf
    if d == 2:
        return BETA_C_2D
    return None


def _fit(sizes, values, p, points=FIT_POINTS):
    """Least squares a + b * L^-p on the last ``points`` entries; returns (a, b, rss)."""
    x = np.asarray(sizes[-points:], dtype=float) ** (-p)
    y = np.asarray(values[-points:], dtype=float)
    design = np.column_stack([np.ones_like(x), x])
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    rss = float(np.sum((design @ coef - y) ** 2))
    return float(coef[0]), float(coef[1]), rss


def _sides(ns):
    return [2 * n + 1 for n in ns]


@dataclass
class BkEstimate:
    k: int
    beta: float
    d: int
    ns: list
    values: list  # u_k(M_{B_n}) / |B_n| as decimal strings
    monotone: bool
    b_k: float  # a from the fit a + b / L
    slope: float = 0.0
    precision: int = highreal.DEFAULT_PRECISION

    def floats(self):
        return [float(v) for v in self.values]

    def to_dict(self):
        return {
            "k": self.k,
            "beta": self.beta,
            "d": self.d,
            "n": list(self.ns),
            "values": list(self.values),
            "monotone": self.monotone,
            "b_k": self.b_k,
            "slope": self.slope,
            "precision": self.precision,
        }


def bk_sequence(d, beta, k, n_max, precision=highreal.DEFAULT_PRECISION):
    """u_k(M_{B_n}) / |B_n| for n = 1..n_max and its a + b/L extrapolation.

    For even k the sequence of absolute values must not decrease; the flag
    records whether it did not (within 10^-(P-5) relative slack).
    """
    if k < 1:
        raise ValueError("k must be positive")
    ns = list(range(1, n_max + 1))
    vals = []
    for n in ns:
        cv = cumulants(partition(make_box(d, n), beta, precision), k)
        vals.append(cv.per_site(k))
    monotone = True
    if k % 2 == 0:
        slack = 10.0 ** (5 - precision)
        with highreal.working(precision):
            for a, b in zip(vals, vals[1:]):
                if abs(b) < abs(a) * (1 - slack):
                    monotone = False
    floats = [float(v) for v in vals]
    if k % 2:
        b_k, slope = 0.0, 0.0
    elif len(ns) == 1:
        b_k, slope = floats[0], 0.0
    else:
        b_k, slope, _ = _fit(_sides(ns), floats, 1, min(FIT_POINTS, len(ns)))
    return BkEstimate(
        k=k,
        beta=float(beta),
        d=d,
        ns=ns,
        values=[highreal.decimal(v, precision) for v in vals],
        monotone=monotone,
        b_k=b_k,
        slope=slope,
        precision=precision,
    )


@dataclass
class RadiusProxy:
    """1 / max_k (|b_k|/k!)^(1/k) with the per-k terms it came from.

    ``per_k`` maps k to (|b_k|/k!)^(-1/k).  ``branch_fit`` fits
    ln(per_k) = ln r + a/k + c ln(k)/k through the three largest k (the
    shape of a square-root branch point); it is a disclosed extra, not part
    of the max proxy.
    """

    value: float
    per_k: dict
    branch_fit: float | None = None

    def __float__(self):
        return self.value


def radius_from_bk(bks, flagged_infinite=False):
    """Finite-k proxy for the radius 1/limsup (|b_k|/k!)^(1/k).

    ``flagged_infinite`` marks input where b_2 diverges (1/inf = 0).  All
    b_k = 0 gives +inf (1/0 = inf).
    """
    if flagged_infinite:
        return RadiusProxy(0.0, {})
    if any(e.k % 2 for e in bks):
        raise ValueError("radius_from_bk takes even k only")
    per_k = {}
    roots = []
    for e in sorted(bks, key=lambda e: e.k):
        root = (abs(e.b_k) / math.factorial(e.k)) ** (1.0 / e.k)
        roots.append(root)
        per_k[e.k] = math.inf if root == 0 else 1.0 / root
    top = max(roots, default=0.0)
    value = math.inf if top == 0 else 1.0 / top
    fit = None
    ks = [k for k in sorted(per_k) if math.isfinite(per_k[k]) and k >= 4]
    if len(ks) >= 3:
        ks = np.array(ks[-3:], dtype=float)
        y = np.log([per_k[int(k)] for k in ks])
        design = np.column_stack([np.ones(3), 1 / ks, np.log(ks) / ks])
        fit = float(np.exp(np.linalg.solve(design, y)[0]))
    return RadiusProxy(value, per_k, fit)


@dataclass
class RadiusEstimate:
    beta: float
    d: int
    ns: list
    num_sites: list
    alphas: list  # decimal strings
    limit: float
    power: int
    fits: dict = field(default_factory=dict)  # p -> (a, b, rss)
    reference: float | None = None
    method: str = "a + b L^-p, last 4 boxes"

    def floats(self):
        return [float(a) for a in self.alphas]

    def to_dict(self):
        return {
            "beta": self.beta,
            "d": self.d,
            "n": list(self.ns),
            "num_sites": list(self.num_sites),
            "alpha1": list(self.alphas),
            "limit": self.limit,
            "power": self.power,
            "fits": {str(p): {"a": a, "b": b, "rss": r} for p, (a, b, r) in self.fits.items()},
            "reference": self.reference,
            "method": self.method,
        }


def fit_alpha1(ns, alphas, d, beta, num_sites=None, points=FIT_POINTS):
    """Extrapolate an alpha_1 sequence: p in {1, 2} by least residual.

    The limit is clamped to [0, min(alphas)]: the sequence decreases to its
    limit, so anything outside that range is fit noise.
    """
    floats = [float(a) for a in alphas]
    if len(ns) < 3:
        raise ValueError("need at least three sizes to extrapolate")
    pts = min(points, len(ns))
    fits = {p: _fit(_sides(ns), floats, p, pts) for p in (1, 2)}
    power = min(fits, key=lambda p: (fits[p][2], p))
    limit = min(max(fits[power][0], 0.0), min(floats))
    return RadiusEstimate(
        beta=float(beta),
        d=d,
        ns=list(ns),
        num_sites=list(num_sites) if num_sites else [(2 * n + 1) ** d for n in ns],
        alphas=[a if isinstance(a, str) else highreal.decimal(a, 20) for a in alphas],
        limit=limit,
        power=power,
        fits=fits,
        reference=exact_1d_radius(beta) if d == 1 else None,
    )


def alpha1_sequence(d, beta, n_max, precision=highreal.DEFAULT_PRECISION, theta_tol=DEFAULT_THETA_TOL):
    out = []
    for n in range(1, n_max + 1):
        zs = find_zeros_adaptive(partition(make_box(d, n), beta, precision), theta_tol)
        out.append(first_zero(zs))
    return out


def alpha1_extrapolate(d, beta, n_max, precision=highreal.DEFAULT_PRECISION, theta_tol=DEFAULT_THETA_TOL):
    ns = list(range(1, n_max + 1))
    return fit_alpha1(ns, alpha1_sequence(d, beta, n_max, precision, theta_tol), d, beta)


@dataclass
class SusceptibilityTrend:
    d: int
    beta: float
    ns: list
    values: list  # u_2 / |B_n| as floats
    increments: list
    ratios: list  # successive increment ratios
    bounded: bool

    def to_dict(self):
        return dict(self.__dict__)


def susceptibility_trend(d, beta, n_max, precision=highreal.DEFAULT_PRECISION):
    """u_2(M_{B_n}) / |B_n| with a ratio test on its increments.

    The trend is called bounded when the increments shrink (last ratio below
    1) or vanish, and unbounded when they grow.  Three or four boxes cannot
    tell a slow divergence from a slow approach, so this is a diagnostic.
    """
    est = bk_sequence(d, beta, 2, n_max, precision)
    vals = est.floats()
    inc = [b - a for a, b in zip(vals, vals[1:])]
    ratios = [b / a for a, b in zip(inc, inc[1:]) if a > 0]
    scale = max(abs(v) for v in vals)
    if all(abs(x) <= 1e-12 * scale for x in inc):
        bounded = True
    else:
        bounded = bool(ratios) and ratios[-1] < 1
    return SusceptibilityTrend(d, float(beta), est.ns, vals, inc, ratios, bounded)
