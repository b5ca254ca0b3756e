"""Working-precision contexts backed by independent mpmath contexts."""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction

import mpmath

MIN_DIGITS = 50


class PrecisionContext:
    """Fixed decimal working precision for all real arithmetic in a run.

    Each instance owns a private :class:`mpmath.MPContext`, so two contexts
    never interfere and nothing global is mutated.  The precision is fixed at
    construction; rounding is mpmath's round-to-nearest.
    """

    __slots__ = ("decimal_digits", "mp")

    def __init__(self, decimal_digits: int = 2005):
        if int(decimal_digits) != decimal_digits or decimal_digits < MIN_DIGITS:
            raise ValueError(
                f"decimal_digits must be an integer >= {MIN_DIGITS}, got {decimal_digits!r}"
            )
        self.decimal_digits = int(decimal_digits)
        self.mp = mpmath.MPContext()
        self.mp.dps = self.decimal_digits

    def __repr__(self):
        return f"PrecisionContext({self.decimal_digits})"

    def __eq__(self, other):
        if not isinstance(other, PrecisionContext):
            return NotImplemented
        return self.decimal_digits == other.decimal_digits

    def __hash__(self):
        return hash(self.decimal_digits)

    def real(self, value):
        """Convert ``value`` to a real at this precision.

        Strings, ints, Decimals and Fractions are converted exactly before the
        single rounding step.  Floats are accepted but carry binary noise
        (``real(1.6)`` is not ``real("1.6")``).
        """
        mp = self.mp
        if isinstance(value, Fraction):
            if value.denominator == 1:
                return mp.mpf(value.numerator)
            return mp.mpf(value.numerator) / value.denominator
        if isinstance(value, Decimal):
            return mp.mpf(str(value))
        if isinstance(value, (str, int, float)):
            return mp.mpf(value)
        # mpf from another context, or anything mpmath understands
        return mp.mpf(value)

    def power10(self, exponent: int):
        return self.mp.mpf(10) ** exponent

    @property
    def breakdown_threshold(self):
        """Below this |f'(x)| a Newton quotient has no significant digits."""
        return self.power10(-self.decimal_digits + 20)

    def format(self, x, digits: int | None = None) -> str:
        """Decimal string of ``x``; ``digits=None`` prints full precision."""
        n = self.decimal_digits if digits is None else min(digits, self.decimal_digits)
        return self.mp.nstr(self.mp.mpf(x), n, strip_zeros=False, min_fixed=-5, max_fixed=5)

    def format_sci(self, x, digits: int = 6) -> str:
        """Short scientific string, safe for magnitudes beyond float range."""
        x = self.mp.mpf(x)
        if x == 0:
            return "0"
        return self.mp.nstr(x, digits, min_fixed=1, max_fixed=0)
