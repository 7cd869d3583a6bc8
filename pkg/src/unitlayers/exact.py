"""Exact rational handling of widths and comb thresholds."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

__all__ = ["to_fraction", "is_exact_input", "comb_threshold_sq", "sqrt_text", "float_slack"]

# floats are read as the shortest decimal that round-trips, then allowed this many ulps
_FLOAT_SLACK_ULPS = 4


def is_exact_input(x) -> bool:
    """Rational types and ``"num/den"`` / decimal strings are exact; floats are not."""
    return isinstance(x, (Rational, str)) and not isinstance(x, bool)


def to_fraction(x) -> Fraction:
    """Convert an int, Fraction, ``"3/5"``-style string or float to a Fraction.

    Floats go through ``repr`` so ``0.7`` becomes ``7/10`` rather than its
    binary expansion.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not widths")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse {x!r} as a rational number") from exc
    xf = float(x)
    if not math.isfinite(xf):
        raise ValueError(f"non-finite value {x!r}")
    return Fraction(repr(xf))


def float_slack(value: float) -> float:
    return _FLOAT_SLACK_ULPS * math.ulp(abs(value) or 1.0)


def comb_threshold_sq(N: int, M: int) -> Fraction:
    """``1 - N^2 / (4 M^2)``, the squared minimal comb width."""
    return 1 - Fraction(N * N, 4 * M * M)


def _square_part(k: int) -> tuple[int, int]:
    # k = f^2 * r with r squarefree
    f, r, d = 1, k, 2
    while d * d <= r:
        while r % (d * d) == 0:
            r //= d * d
            f *= d
        d += 1
    return f, r


def sqrt_text(N: int, M: int) -> str:
    """Closed form of ``sqrt(1 - N^2/(4M^2)) = sqrt(4M^2 - N^2) / (2M)`` as text.

    >>> sqrt_text(3, 2)
    'sqrt(7)/4'
    >>> sqrt_text(4, 5)
    'sqrt(21)/5'
    """
    rad = 4 * M * M - N * N
    den = 2 * M
    if rad < 0:
        raise ValueError("need 2M >= N")
    if rad == 0:
        return "0"
    f, r = _square_part(rad)
    g = math.gcd(f, den)
    f, den = f // g, den // g
    head = "" if f == 1 else f"{f}*"
    body = f"{head}sqrt({r})" if r != 1 else str(f)
    return body if den == 1 else f"{body}/{den}"
