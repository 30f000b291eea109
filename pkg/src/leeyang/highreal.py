"""Extended-precision reals backed by :mod:`mpmath`.

Values are plain ``mpmath.mpf`` numbers.  A precision ``P`` is a number of
decimal digits; a value "at precision P" has been rounded to P digits
(relative representation error at most 10^-P).  Arithmetic that must not lose
those digits runs under :func:`working` with a few guard digits on top.
"""

import mpmath
from mpmath import libmp

HighReal = mpmath.mpf

DEFAULT_PRECISION = 30
MAX_PRECISION = 400
GUARD_DIGITS = 10


def check_precision(precision):
    p = int(precision)
    if p < 10 or p > MAX_PRECISION:
        raise ValueError(f"precision must be between 10 and {MAX_PRECISION} digits, got {precision}")
    return p


def working(precision, guard=GUARD_DIGITS):
    """Context manager running mpmath at ``precision + guard`` digits."""
    return mpmath.workdps(int(precision) + guard)


def rounded(x, precision):
    """Round an mpf (or anything mpmath accepts) to ``precision`` digits."""
    with mpmath.workdps(int(precision)):
        return mpmath.mpf(x)


def to_high(x, precision):
    """Convert a float, int, str or mpf to a HighReal at ``precision`` digits.

    Floats go through their shortest repr, so ``0.3`` means the decimal 0.3.
    """
    if isinstance(x, float):
        x = repr(x)
    with mpmath.workdps(int(precision)):
        return mpmath.mpf(x)


def to_json(x):
    """Lossless encoding: {"mantissa": signed decimal string, "exponent": int}."""
    sign, man, exp, _ = mpmath.mpf(x)._mpf_ if not isinstance(x, mpmath.mpf) else x._mpf_
    if man == 0 and exp == 0 and sign == 0:
        return {"mantissa": "0", "exponent": 0}
    if man == 0:
        raise ValueError(f"cannot encode non-finite value {x}")
    return {"mantissa": str(-man if sign else man), "exponent": int(exp)}


def from_json(obj):
    man = int(obj["mantissa"])
    return mpmath.mp.make_mpf(libmp.from_man_exp(man, int(obj["exponent"])))


def decimal(x, digits):
    """Deterministic decimal string with ``digits`` significant digits."""
    if isinstance(x, mpmath.mpc):
        return f"{decimal(x.real, digits)}{'+' if x.imag >= 0 else '-'}{decimal(abs(x.imag), digits)}j"
    if x == mpmath.inf:
        return "inf"
    with mpmath.workdps(int(digits) + 5):
        return mpmath.nstr(mpmath.mpf(x), int(digits), min_fixed=-5, max_fixed=6, strip_zeros=False)
