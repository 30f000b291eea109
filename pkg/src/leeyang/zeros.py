"""Lee-Yang zeros on the imaginary field axis.

All zeros of Z(h) are purely imaginary, so it suffices to study the real
trigonometric polynomial

    Q(theta) = Z(i theta) = sum_{m >= 0} w_m cos(m theta),

with w_0 = c_0 and w_m = 2 c_m.  Q has period 2 pi, Q(-theta) = Q(theta) and
Q(pi - theta) = (-1)^N Q(theta); it has exactly N zeros (with multiplicity) in
(0, pi).  That count is used as a completeness certificate: the search only
succeeds once the certified multiplicities add up to N.

Roots are bracketed by sign changes on a uniform grid and refined by
bisection.  The number of roots near each candidate is certified with a
Rouché count on its Taylor expansion: if one term |a_k| rho^k dominates the
sum of all the others on the circle of radius rho, Q has exactly k zeros in
that disk.  This also handles tangential and repeated roots (beta = 0 gives a
single root of multiplicity N at pi/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from . import highreal

INITIAL_GRID_FACTOR = 16
MAX_GRID_FACTOR = 2**10
DEFAULT_THETA_TOL = 1e-15


class ZeroCountError(RuntimeError):
    """The certified multiplicities do not add up to |Lambda|.

    ``suspects`` lists (lo, hi) angle intervals that could not be resolved.
    Usually fixed by rebuilding the polynomial at a higher precision.
    """

    def __init__(self, message, found=0, expected=0, suspects=()):
        super().__init__(message)
        self.found = found
        self.expected = expected
        self.suspects = list(suspects)


class InsufficientPrecision(ZeroCountError):
    """Zeros were found but the coefficient precision cannot pin them to theta_tol."""


class TrigPoly:
    """Q(theta) = sum_m w_m cos(m theta) evaluated in extended precision."""

    def __init__(self, freqs, weights, precision, num_sites, exact=False):
        self.freqs = tuple(freqs)
        self.weights = tuple(weights)
        self.precision = precision
        self.num_sites = num_sites
        self.exact = exact
        self.dps = precision + highreal.GUARD_DIGITS + num_sites // 2
        with mpmath.workdps(self.dps):
            self._abs = [abs(w) for w in self.weights]
            self._eps_work = mpmath.mpf(10) ** (-self.dps) * (len(self.freqs) + 1) * 10
            self._eps_data = mpmath.mpf(0) if exact else mpmath.mpf(10) ** (-precision) * 2
            self._scale = {}

    def scale(self, j):
        """S_j = sum_m |w_m| m^j, the natural size of the j-th derivative."""
        s = self._scale.get(j)
        if s is None:
            with mpmath.workdps(self.dps):
                s = mpmath.fsum(a * mpmath.mpf(m) ** j for m, a in zip(self.freqs, self._abs))
            self._scale[j] = s
        return s

    def noise(self, j=0):
        """Bound on the evaluation error of the j-th derivative."""
        return self._eps_work * self.scale(j)

    def data_noise(self, j=0):
        """Bound on how far the j-th derivative of the true Q may differ,
        given coefficients rounded to the stored precision."""
        return self._eps_data * self.scale(j)

    def __call__(self, theta, deriv=0):
        with mpmath.workdps(self.dps):
            t = mpmath.mpf(theta)
            if deriv == 0:
                return self._eval_cos(t)
            z = mpmath.expj(t)
            z2 = z * z
            zm = z ** self.freqs[0]
            acc = []
            for m, w in zip(self.freqs, self.weights):
                # d^j/dt^j cos(m t) = Re[(i m)^j e^{i m t}]
                acc.append(w * mpmath.mpf(m) ** deriv * (((1j) ** deriv) * zm).real)
                zm *= z2
            return mpmath.fsum(acc)

    def _eval_cos(self, t):
        # Chebyshev-style recurrence in steps of 2: C_{m+2} = 2 cos(2t) C_m - C_{m-2}
        c2 = mpmath.cos(2 * t)
        m0 = self.freqs[0]
        prev = mpmath.cos(t) if m0 == 1 else c2  # C_{m0-2}: C_{-1} = C_1, C_{-2} = C_2
        cur = mpmath.cos(m0 * t)
        total = self.weights[0] * cur
        two_c2 = 2 * c2
        for w in self.weights[1:]:
            prev, cur = cur, two_c2 * cur - prev
            total += w * cur
        return total

    def taylor(self, center, order):
        """a_j = Q^(j)(center)/j! for j = 0..order."""
        with mpmath.workdps(self.dps):
            c = mpmath.mpf(center)
            cs = [(mpmath.cos(m * c), mpmath.sin(m * c)) for m in self.freqs]
            coef = [mpmath.mpf(1)] * len(self.freqs)
            out = []
            for j in range(order + 1):
                if j:
                    coef = [k * m / j for k, m in zip(coef, self.freqs)]
                r = j % 4
                terms = []
                for w, k, (cm, sm) in zip(self.weights, coef, cs):
                    trig = (cm, -sm, -cm, sm)[r]
                    terms.append(w * k * trig)
                out.append(mpmath.fsum(terms))
            return out

    def rouche_counter(self, center):
        """Return ``count(rho)``: certified number of zeros in |theta - center| < rho, or None."""
        n = self.freqs[-1] if self.freqs else 0
        order = n + 20
        with mpmath.workdps(self.dps):
            a = [abs(x) for x in self.taylor(center, order)]
            noise, fact = [], mpmath.mpf(1)
            for j in range(order + 1):
                if j:
                    fact *= j
                noise.append(self.noise(j) / fact)
            tail0 = self.scale(0) / mpmath.factorial(order + 1)

        def count(rho):
            with mpmath.workdps(self.dps):
                rho = mpmath.mpf(rho)
                powers = [rho**j for j in range(order + 1)]
                terms = [x * r for x, r in zip(a, powers)]
                noises = [x * r for x, r in zip(noise, powers)]
                nr = n * rho
                tail = tail0 * nr ** (order + 1) * mpmath.exp(nr)
                k = max(range(len(terms)), key=lambda j: terms[j])
                rest = mpmath.fsum(terms) - terms[k] + mpmath.fsum(noises) - noises[k] + tail
                return k if terms[k] - noises[k] > rest else None

        return count

    def uncertainty_radius(self, center, mult):
        """Radius within which coefficient rounding can move a root of order ``mult``."""
        if self.exact:
            return mpmath.mpf(0)
        with mpmath.workdps(self.dps):
            a = self.taylor(center, mult)
            am = abs(a[mult])
            if am == 0:
                return mpmath.inf
            fact = mpmath.mpf(1)
            r = mpmath.mpf(0)
            for j in range(mult):
                if j:
                    fact *= j
                r = max(r, (self.data_noise(j) / fact / am) ** (mpmath.mpf(1) / (mult - j)))
            return r


def imaginary_axis_restriction(poly):
    """Q(theta) = Z(i theta) as a cosine polynomial, exactly real by c_m = c_{-m}."""
    n = poly.num_sites
    freqs, weights = [], []
    with highreal.working(poly.precision):
        for m, c in zip(poly.magnetizations, poly.coefficients):
            if m < 0:
                continue
            freqs.append(m)
            weights.append(c if m == 0 else 2 * c)
    return TrigPoly(freqs, weights, poly.precision, n, exact=_is_exact(poly))


def _is_exact(poly):
    # beta = 0: c_m are integer counts, exact whenever they fit the mantissa
    if poly.beta != 0 or poly.dos is None:
        return False
    for p, c in enumerate(poly.coefficients):
        count = sum(row[p] for row in poly.dos.counts)
        if c != count or int(c) != count:
            return False
    return True


@dataclass
class ZeroSet:
    domain: object
    beta: object
    precision: int
    angles: tuple
    multiplicities: tuple
    residuals: tuple
    uncertainties: tuple
    tol: float
    scale: object
    grid: int = 0

    @property
    def total_multiplicity(self):
        return sum(self.multiplicities)

    def all_positive_zeros_base(self):
        """Base angles of all zeros in (0, 2 pi): theta_j and 2 pi - theta_j."""
        out = []
        with highreal.working(self.precision):
            two_pi = 2 * mpmath.pi
            for th, k in zip(self.angles, self.multiplicities):
                out.append((th, k))
                out.append((two_pi - th, k))
        return out

    def to_dict(self):
        digits = self.precision
        return {
            "provenance": {
                "domain": self.domain.describe(),
                "beta": highreal.decimal(self.beta, digits),
                "precision": self.precision,
                "grid": self.grid,
            },
            "theta": [highreal.decimal(t, digits) for t in self.angles],
            "multiplicity": list(self.multiplicities),
            "residual": [highreal.decimal(r, 6) for r in self.residuals],
            "uncertainty": [highreal.decimal(u, 6) for u in self.uncertainties],
            "tol": self.tol,
        }


def _bisect(f, lo, hi, flo, tol, noise):
    """Refine a sign change of f on [lo, hi]; stops early when |f| drops to noise."""
    while hi - lo > tol:
        mid = (lo + hi) / 2
        fm = f(mid)
        if abs(fm) <= noise:
            return mid, hi - lo
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2, hi - lo


def _sign(v, noise):
    if v > noise:
        return 1
    if v < -noise:
        return -1
    return 0


def find_zeros(poly, theta_tol=DEFAULT_THETA_TOL):
    """All zeros of Q on (0, pi) with multiplicities, refined to ``theta_tol``.

    Raises ZeroCountError if the multiplicities cannot be made to add up to
    |Lambda| even on the finest grid, and InsufficientPrecision if they do but
    some zero is not determined to ``theta_tol`` by the stored coefficients.
    """
    floor = 10.0 ** (-(poly.precision - 8))
    if theta_tol < floor:
        raise ValueError(f"theta_tol must be >= 1e-{poly.precision - 8} at precision {poly.precision}")
    q = imaginary_axis_restriction(poly)
    n = poly.num_sites
    grid = INITIAL_GRID_FACTOR * n
    while True:
        found, suspects = _isolate(q, grid, theta_tol)
        total = sum(k for _, k, _ in found)
        if total == n:
            break
        if total > n or grid * 2 > MAX_GRID_FACTOR * n:
            raise ZeroCountError(
                f"found multiplicity {total} of {n} zeros on a grid of {grid} points",
                found=total,
                expected=n,
                suspects=suspects,
            )
        grid *= 2
    with mpmath.workdps(q.dps):
        angles = tuple(highreal.rounded(c, poly.precision) for c, _, _ in found)
        mults = tuple(k for _, k, _ in found)
        # |Q| at the stored angle relative to sum |w_m|
        residuals = tuple(abs(q(c)) / q.scale(0) for c in angles)
        uncertainties = tuple(u for _, _, u in found)
        scale = q.scale(1)
    bad = [(c, u) for c, u in zip(angles, uncertainties) if u > theta_tol]
    if bad:
        raise InsufficientPrecision(
            f"{len(bad)} zeros are only determined to {highreal.decimal(max(u for _, u in bad), 3)} "
            f"by {poly.precision}-digit coefficients (theta_tol {theta_tol})",
            found=n,
            expected=n,
            suspects=[(c - u, c + u) for c, u in bad],
        )
    return ZeroSet(
        domain=poly.domain,
        beta=poly.beta,
        precision=poly.precision,
        angles=angles,
        multiplicities=mults,
        residuals=residuals,
        uncertainties=uncertainties,
        tol=theta_tol,
        scale=scale,
        grid=grid,
    )


def _isolate(q, grid, tol):
    with mpmath.workdps(q.dps):
        pi = +mpmath.pi
        tol = mpmath.mpf(tol)
        pts = [pi * i / grid for i in range(grid + 1)]
        vals = [q(p) for p in pts]
        noise0 = q.noise(0)
        signs = [_sign(v, noise0) for v in vals]
        # (center, lo, hi, bisection width)
        cands = []
        i = 0
        while i < grid:
            if signs[i] == 0:
                i += 1
                continue
            j = i + 1
            while signs[j] == 0:
                j += 1
            if j > i + 1:
                # run of grid values below evaluation noise
                k = min(range(i + 1, j), key=lambda t: abs(vals[t]))
                cands.append((pts[k], pts[i], pts[j], pts[1] - pts[0]))
            elif signs[j] != signs[i]:
                c, width = _bisect(q, pts[i], pts[j], vals[i], tol, noise0)
                cands.append((c, pts[i], pts[j], width))
            i = j
        total_guess = len(cands)
        if total_guess < q.num_sites:
            cands.extend(_tangential(q, pts, vals, signs, cands, tol))
        cands.sort(key=lambda c: c[0])
        found, suspects = [], []
        for idx, (c, lo, hi, width) in enumerate(cands):
            gaps = [c, pi - c]
            if idx > 0:
                gaps.append((c - cands[idx - 1][0]) / 2)
            if idx + 1 < len(cands):
                gaps.append((cands[idx + 1][0] - c) / 2)
            rmax = min(gaps)
            res = _certify(q, c, rmax, max(4 * width, 4 * tol))
            if res is None:
                suspects.append((lo, hi))
                continue
            center, mult, unc = res
            if mult:
                found.append((center, mult, unc))
        return found, suspects


def _tangential(q, pts, vals, signs, cands, tol):
    """Roots where Q touches zero (or two roots fall between grid points)."""
    taken = set()
    for c, lo, hi, _ in cands:
        taken.add(lo)
        taken.add(hi)
    out = []
    noise1 = q.noise(1)
    for i in range(1, len(pts) - 1):
        if signs[i - 1] == 0 or signs[i] == 0 or signs[i + 1] == 0:
            continue
        if not (signs[i - 1] == signs[i] == signs[i + 1]):
            continue
        if not (abs(vals[i]) <= abs(vals[i - 1]) and abs(vals[i]) <= abs(vals[i + 1])):
            continue
        if pts[i] in taken:
            continue
        lo, hi = pts[i - 1], pts[i + 1]
        dlo, dhi = q(lo, 1), q(hi, 1)
        if (dlo > 0) == (dhi > 0):
            continue
        c, width = _bisect(lambda t: q(t, 1), lo, hi, dlo, tol, noise1)
        qc = q(c)
        if abs(qc) <= q.noise(0) + q.data_noise(0):
            out.append((c, lo, hi, width))
        elif (qc > 0) != (vals[i] > 0):
            for a, b, fa in ((lo, c, vals[i - 1]), (c, hi, qc)):
                r, w = _bisect(q, a, b, fa, tol, q.noise(0))
                out.append((r, a, b, w))
    return out


def _certify(q, center, rmax, rho0):
    """Multiplicity of the zero cluster at ``center``; returns (center, mult, uncertainty)."""
    rho = rho0
    count = q.rouche_counter(center)
    while rho <= rmax:
        k = count(rho)
        if k is not None:
            break
        rho *= 2
    else:
        return None
    if k == 0:
        return center, 0, 0
    if k == 1:
        unc = q.data_noise(0) / max(abs(q(center, 1)), q.noise(1))
        return center, 1, unc
    # a k-fold cluster: its centroid is the simple zero of Q^(k-1) nearby
    lo, hi = center - rho, center + rho
    flo, fhi = q(lo, k - 1), q(hi, k - 1)
    if (flo > 0) != (fhi > 0):
        fc = q(center, k - 1)
        if abs(fc) > q.noise(k - 1):
            if (fc > 0) == (flo > 0):
                lo, flo = center, fc
            else:
                hi = center
            center, _ = _bisect(lambda t: q(t, k - 1), lo, hi, flo, rho0 / 4, q.noise(k - 1))
    unc = q.uncertainty_radius(center, k)
    return center, k, unc


def find_zeros_adaptive(poly, theta_tol=DEFAULT_THETA_TOL, max_precision=240):
    """find_zeros, rebuilding the polynomial at higher precision on failure.

    Needs the exact density of states attached to ``poly``.  The returned
    ZeroSet records the precision that succeeded.
    """
    while True:
        try:
            return find_zeros(poly, theta_tol)
        except ZeroCountError:
            if poly.dos is None or poly.precision >= max_precision:
                raise
            nxt = min(max_precision, poly.precision + max(20, poly.precision // 2))
            poly = poly.with_precision(nxt)


def first_zero(zs):
    """alpha_1 = theta_1, the zero closest to the origin."""
    return zs.angles[0]


def periodic_zero_sum(zs, k, rel_tol=1e-7):
    """sum_j alpha_j^(-2k) over all positive zeros of Z(i h), with a certified error.

    The positive zeros are theta_j + 2 pi l and 2 pi - theta_j + 2 pi l for
    l >= 0.  Images up to l = L are summed directly; for each base angle a
    the remainder sum_{l > L} (a + 2 pi l)^(-2k) lies between the integrals of
    (a + 2 pi x)^(-2k) over [L+1, inf) and [L, inf), and the midpoint of that
    bracket is added.  L doubles until the half-width of the bracket is at
    most ``rel_tol`` times the value.  Returns (value, error_bound).
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    base = zs.all_positive_zeros_base()
    with mpmath.workdps(zs.precision + highreal.GUARD_DIGITS):
        two_pi = 2 * mpmath.pi
        p = 2 * k
        partial = mpmath.mpf(0)
        done = -1
        limit = 8
        while True:
            terms = []
            for l in range(done + 1, limit + 1):
                for a, mult in base:
                    terms.append(mult * (a + two_pi * l) ** (-p))
            partial += mpmath.fsum(terms)
            done = limit

            def integral(x, a):
                return (a + two_pi * x) ** (1 - p) / (two_pi * (p - 1))

            lo = mpmath.fsum(mult * integral(limit + 1, a) for a, mult in base)
            hi = mpmath.fsum(mult * integral(limit, a) for a, mult in base)
            value = partial + (lo + hi) / 2
            err = (hi - lo) / 2
            if err <= rel_tol * value:
                return value, err
            limit *= 2
