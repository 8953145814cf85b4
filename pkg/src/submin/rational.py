"""Exact rationals and their JSON text form ("p/q" or "k").

``Q`` is gmpy2's ``mpq`` when available (an order of magnitude faster than
``fractions.Fraction`` on the solver's hot paths) and ``Fraction`` otherwise.
Both are exact; mixing them with ints and each other is fine.
"""

from fractions import Fraction
from numbers import Rational

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

ZERO = Q(0)
ONE = Q(1)


def as_fraction(value):
    """Coerce an int, rational or "p/q" string to ``Q``; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rational values")
    if isinstance(value, float):
        raise TypeError("floating-point values are not accepted; pass an int, Fraction or 'p/q' string")
    if isinstance(value, (int, Rational)):
        return Q(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Q(Fraction(text))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a rational number: {value!r}") from None
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def is_rational(value) -> bool:
    return isinstance(value, Rational) and not isinstance(value, bool)


def format_fraction(q) -> str:
    q = Q(q)
    num, den = int(q.numerator), int(q.denominator)
    if den == 1:
        return str(num)
    return f"{num}/{den}"
