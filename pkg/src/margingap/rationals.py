"""Exact rational scalars.

Everything numeric in this package is exact: integers stay Python ints,
ratios are reduced rationals.  gmpy2.mpq is used when present because the
simplex and branch-and-bound inner loops spend nearly all their time in
rational arithmetic; fractions.Fraction is the drop-in fallback.  Both
render as "p/q" (or a bare integer when the denominator is one), which is
the serialization format used throughout.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as QQ  # type: ignore[import-untyped]
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    QQ = Fraction

ZERO = QQ(0)
ONE = QQ(1)


def as_fraction(x) -> Fraction:
    """Normalize an exact scalar to fractions.Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x.numerator, x.denominator) if hasattr(x, "numerator") else Fraction(x)


def is_integral(x) -> bool:
    return x.denominator == 1


def floor_q(x) -> int:
    return x.numerator // x.denominator


def ceil_q(x) -> int:
    return -((-x.numerator) // x.denominator)


def format_q(x) -> str:
    """Render an exact scalar as "p/q", omitting "/1"."""
    s = str(QQ(x))
    return s


def parse_q(text: str):
    """Parse "p/q" or "p" into an exact scalar."""
    return QQ(text.strip())
