"""Univariate Laurent polynomials with an exact/float mode split.

A coefficient is either an exact rational (`fractions.Fraction`, real) or a
Python complex in float mode.  Arithmetic across the two modes raises; call
:meth:`LaurentPoly.to_float` first.  This keeps the exact pipeline (symbol
determinants, resultants) honest and the floating pipeline explicit.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

EXACT = "exact"
FLOAT = "float"

FLOAT_TRIM_REL = 1e-12  # zero test: |c| <= rel * max coefficient magnitude


def parse_scalar(value):
    """Parse a JSON-style entry into (coefficient, mode).

    Integers and "a/b" strings become exact Fractions; floats stay floats.
    Anything else (booleans, complex strings, objects) is rejected.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a real scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value), EXACT
    if isinstance(value, float):
        if not np.isfinite(value):
            raise ValueError(f"non-finite entry: {value!r}")
        return value, FLOAT
    if isinstance(value, Fraction):
        return value, EXACT
    if isinstance(value, str):
        try:
            return Fraction(value), EXACT
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational entry: {value!r}") from exc
    raise ValueError(f"not a real scalar: {value!r}")


def _coerce(c, mode):
    if mode == EXACT:
        if isinstance(c, Fraction):
            return c
        if isinstance(c, int):
            return Fraction(c)
        raise TypeError(f"exact mode requires Fraction coefficients, got {type(c).__name__}")
    return complex(c)


class LaurentPoly:
    """Laurent polynomial sum(c_m z^m) stored as {exponent: coefficient}."""

    __slots__ = ("coeffs", "mode")

    def __init__(self, coeffs: dict, mode: str):
        if mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown mode {mode!r}")
        cleaned = {int(m): _coerce(c, mode) for m, c in coeffs.items()}
        if mode == EXACT:
            cleaned = {m: c for m, c in cleaned.items() if c != 0}
        else:
            top = max((abs(c) for c in cleaned.values()), default=0.0)
            cleaned = {m: c for m, c in cleaned.items() if abs(c) > FLOAT_TRIM_REL * top}
        self.coeffs = cleaned
        self.mode = mode

    @classmethod
    def zero(cls, mode: str = EXACT) -> "LaurentPoly":
        return cls({}, mode)

    @classmethod
    def monomial(cls, m: int, c, mode: str = EXACT) -> "LaurentPoly":
        return cls({m: c}, mode)

    # -- structure -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def order(self):
        """Smallest exponent with nonzero coefficient; None if zero."""
        return min(self.coeffs) if self.coeffs else None

    @property
    def degree(self):
        """Largest exponent with nonzero coefficient; None if zero."""
        return max(self.coeffs) if self.coeffs else None

    def coeff(self, m: int):
        zero = Fraction(0) if self.mode == EXACT else 0j
        return self.coeffs.get(m, zero)

    def __eq__(self, other):
        return (isinstance(other, LaurentPoly) and self.mode == other.mode
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.mode, frozenset(self.coeffs.items())))

    def __repr__(self):
        terms = " + ".join(f"({c})*z^{m}" for m, c in sorted(self.coeffs.items()))
        return f"LaurentPoly[{self.mode}]({terms or '0'})"

    # -- arithmetic --------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, LaurentPoly):
            raise TypeError("expected a LaurentPoly")
        if self.mode != other.mode:
            raise TypeError("mixed exact/float arithmetic; convert explicitly with to_float()")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return LaurentPoly(out, self.mode)

    def __sub__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) - c
        return LaurentPoly(out, self.mode)

    def __neg__(self):
        return LaurentPoly({m: -c for m, c in self.coeffs.items()}, self.mode)

    def __mul__(self, other):
        self._check(other)
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                out[m1 + m2] = out.get(m1 + m2, 0) + c1 * c2
        return LaurentPoly(out, self.mode)

    def scale(self, factor):
        if self.mode == EXACT and not isinstance(factor, (int, Fraction)):
            raise TypeError("exact polynomial scaled by non-rational; convert first")
        return LaurentPoly({m: c * factor for m, c in self.coeffs.items()}, self.mode)

    def to_float(self) -> "LaurentPoly":
        if self.mode == FLOAT:
            return self
        return LaurentPoly({m: complex(c) for m, c in self.coeffs.items()}, FLOAT)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, z):
        """Evaluate at a complex number or numpy array (nonzero if order < 0).

        Terms are summed in ascending exponent order for reproducibility.
        """
        arr = np.asarray(z, dtype=complex)
        total = np.zeros(arr.shape, dtype=complex)
        for m in sorted(self.coeffs):
            total = total + complex(self.coeffs[m]) * arr ** m
        return total.item() if total.ndim == 0 else total

    def exponents_and_coeffs(self):
        """Sorted exponent array and matching complex coefficient array."""
        ms = np.array(sorted(self.coeffs), dtype=int)
        cs = np.array([complex(self.coeffs[m]) for m in ms], dtype=complex)
        return ms, cs
