"""Sparse multivariate polynomial arithmetic over exact rationals or floats.

Everything in this package that needs exact polynomial algebra (determinant
expansion of matrix symbols, Sylvester resultants, Newton polygon supports)
goes through `MPoly`.  Supports here stay tiny (block size k <= 6, a few
hundred monomials), so plain dict convolution is the right tool; no attempt
is made at asymptotically clever multiplication.

Exponents are integer tuples and may be negative, which makes Laurent
polynomials in any subset of variables free.  Coefficients are either
`fractions.Fraction` (exact mode) or Python complex/float (float mode);
the two modes must not be mixed inside one polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

FLOAT_TRIM_REL = 1e-12  # a float coefficient is zero iff |c| <= rel * max|c|


def _is_exact(value) -> bool:
    return isinstance(value, (Fraction, int))


class MPoly:
    """Sparse polynomial in `nvars` variables, keyed by exponent tuples."""

    __slots__ = ("coeffs", "nvars")

    def __init__(self, coeffs: dict, nvars: int):
        self.coeffs = {e: c for e, c in coeffs.items() if c != 0}
        self.nvars = nvars

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "MPoly":
        return cls({}, nvars)

    @classmethod
    def constant(cls, value, nvars: int) -> "MPoly":
        return cls({(0,) * nvars: value}, nvars)

    @classmethod
    def monomial(cls, exps: tuple, value, nvars: int) -> "MPoly":
        if len(exps) != nvars:
            raise ValueError("exponent tuple length mismatch")
        return cls({tuple(exps): value}, nvars)

    @classmethod
    def variable(cls, index: int, nvars: int) -> "MPoly":
        exps = [0] * nvars
        exps[index] = 1
        return cls({tuple(exps): Fraction(1)}, nvars)

    # -- basic queries -------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(c) for c in self.coeffs.values())

    def support(self):
        return set(self.coeffs)

    def degree(self, var: int):
        """Largest exponent of `var`, or None for the zero polynomial."""
        if not self.coeffs:
            return None
        return max(e[var] for e in self.coeffs)

    def order(self, var: int):
        """Smallest exponent of `var`, or None for the zero polynomial."""
        if not self.coeffs:
            return None
        return min(e[var] for e in self.coeffs)

    def coeff(self, exps: tuple):
        return self.coeffs.get(tuple(exps), 0)

    def max_abs(self) -> float:
        if not self.coeffs:
            return 0.0
        return max(abs(complex(c)) for c in self.coeffs.values())

    # -- arithmetic ----------------------------------------------------

    def _check(self, other: "MPoly"):
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other: "MPoly") -> "MPoly":
        self._check(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return MPoly(out, self.nvars)

    def __sub__(self, other: "MPoly") -> "MPoly":
        self._check(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) - c
        return MPoly(out, self.nvars)

    def __neg__(self) -> "MPoly":
        return MPoly({e: -c for e, c in self.coeffs.items()}, self.nvars)

    def __mul__(self, other: "MPoly") -> "MPoly":
        self._check(other)
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, 0) + c1 * c2
        return MPoly(out, self.nvars)

    def scale(self, factor) -> "MPoly":
        if factor == 0:
            return MPoly.zero(self.nvars)
        return MPoly({e: c * factor for e, c in self.coeffs.items()}, self.nvars)

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise ValueError("negative power")
        out = MPoly.constant(Fraction(1) if self.is_exact else 1.0, self.nvars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, MPoly) and self.nvars == other.nvars and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.nvars, frozenset(self.coeffs.items())))

    def __repr__(self):
        terms = sorted(self.coeffs.items())
        return f"MPoly({terms!r})"

    # -- cleanup -------------------------------------------------------

    def trim(self, rel: float = FLOAT_TRIM_REL) -> "MPoly":
        """Drop float coefficients below `rel` times the largest magnitude.

        Exact polynomials are returned unchanged (exact zeros are already
        dropped at construction).
        """
        if self.is_exact or not self.coeffs:
            return self
        top = self.max_abs()
        return MPoly({e: c for e, c in self.coeffs.items() if abs(complex(c)) > rel * top},
                     self.nvars)

    # -- evaluation and views -------------------------------------------

    def eval(self, *args):
        """Evaluate at numbers or numpy arrays (one per variable).

        Negative exponents are fine as long as the corresponding argument
        is nonzero.  Terms are accumulated in sorted-exponent order so the
        result is reproducible bit-for-bit.
        """
        if len(args) != self.nvars:
            raise ValueError("argument count mismatch")
        arrs = [np.asarray(a, dtype=complex) for a in args]
        shape = np.broadcast_shapes(*(a.shape for a in arrs)) if arrs else ()
        total = np.zeros(shape, dtype=complex)
        for exps in sorted(self.coeffs):
            value = np.full(shape, complex(self.coeffs[exps]))
            for a, e in zip(arrs, exps):
                if e:
                    value = value * a ** e
            total = total + value
        return total.item() if total.ndim == 0 else total

    def collect(self, var: int) -> dict:
        """Group terms by the exponent of `var`; values drop that variable."""
        out: dict = {}
        for exps, c in self.coeffs.items():
            rest = exps[:var] + exps[var + 1:]
            bucket = out.setdefault(exps[var], {})
            bucket[rest] = bucket.get(rest, 0) + c
        return {e: MPoly(d, self.nvars - 1) for e, d in out.items()}

    def insert_var(self, var: int, exponent: int = 0) -> "MPoly":
        """Inverse of `collect` for one bucket: re-add a variable axis."""
        out = {}
        for exps, c in self.coeffs.items():
            out[exps[:var] + (exponent,) + exps[var:]] = c
        return MPoly(out, self.nvars + 1)


# -- determinants ------------------------------------------------------


def mpoly_det(rows: list) -> MPoly:
    """Determinant of a square matrix of MPoly entries.

    Laplace expansion memoized on the set of still-unused columns, so the
    cost is O(2^n) polynomial multiplies instead of n! products.  Exact for
    Fraction entries; for float entries the caller should trim afterwards.
    """
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    nvars = rows[0][0].nvars
    if any(len(r) != n for r in rows):
        raise ValueError("matrix is not square")
    memo: dict = {}

    def minor(cols: frozenset) -> MPoly:
        # expands along row index = n - len(cols)
        if not cols:
            return MPoly.constant(Fraction(1), nvars)
        got = memo.get(cols)
        if got is not None:
            return got
        i = n - len(cols)
        total = MPoly.zero(nvars)
        for sign_idx, j in enumerate(sorted(cols)):
            entry = rows[i][j]
            if entry.is_zero:
                continue
            term = entry * minor(cols - {j})
            total = total + (term if sign_idx % 2 == 0 else -term)
        memo[cols] = total
        return total

    return minor(frozenset(range(n)))


def sylvester_resultant(pu: list, pv: list) -> MPoly:
    """Resultant of two polynomials with MPoly coefficients.

    `pu` and `pv` list the coefficients in ascending order of the
    eliminated variable; leading entries must be nonzero.
    """
    while pu and pu[-1].is_zero:
        pu = pu[:-1]
    while pv and pv[-1].is_zero:
        pv = pv[:-1]
    a, b = len(pu) - 1, len(pv) - 1
    if a < 1 or b < 1:
        raise ValueError("both polynomials must have positive degree in the eliminated variable")
    nvars = pu[0].nvars
    size = a + b
    zero = MPoly.zero(nvars)
    rows = []
    for i in range(b):
        row = [zero] * size
        for j, c in enumerate(reversed(pu)):
            row[i + j] = c
        rows.append(row)
    for i in range(a):
        row = [zero] * size
        for j, c in enumerate(reversed(pv)):
            row[i + j] = c
        rows.append(row)
    return mpoly_det(rows)


# -- exact division and content ----------------------------------------


def try_exact_divide(num: MPoly, den: MPoly):
    """Return num/den if the division is exact, else None.

    Single-divisor multivariate division under lexicographic term order;
    for one divisor the algorithm is decisive: a nonzero remainder proves
    the division is not exact.  Requires nonnegative exponents.
    """
    if den.is_zero:
        raise ZeroDivisionError("division by zero polynomial")
    if num.is_zero:
        return MPoly.zero(num.nvars)
    for p in (num, den):
        if any(e < 0 for exps in p.coeffs for e in exps):
            raise ValueError("exact division requires nonnegative exponents")
    lead_den = max(den.coeffs)
    cden = den.coeffs[lead_den]
    work = dict(num.coeffs)
    quo: dict = {}
    while work:
        lead = max(work)
        diff = tuple(a - b for a, b in zip(lead, lead_den))
        if any(d < 0 for d in diff):
            return None
        factor = work[lead] / cden
        quo[diff] = factor
        for e, c in den.coeffs.items():
            key = tuple(a + b for a, b in zip(diff, e))
            value = work.get(key, 0) - factor * c
            if value == 0:
                work.pop(key, None)
            else:
                work[key] = value
    return MPoly(quo, num.nvars)


def integer_content(poly: MPoly):
    """Split an exact polynomial into (content, primitive part).

    The primitive part has integer coefficients with gcd 1 and a positive
    coefficient on the lexicographically largest monomial.
    """
    if poly.is_zero:
        return Fraction(0), poly
    if not poly.is_exact:
        raise ValueError("integer content requires exact coefficients")
    fracs = {e: Fraction(c) for e, c in poly.coeffs.items()}
    num_gcd = 0
    den_lcm = 1
    for c in fracs.values():
        num_gcd = gcd(num_gcd, abs(c.numerator))
        den_lcm = den_lcm * c.denominator // gcd(den_lcm, c.denominator)
    content = Fraction(num_gcd, den_lcm)
    if fracs[max(fracs)] < 0:
        content = -content
    prim = MPoly({e: int(c / content) for e, c in fracs.items()}, poly.nvars)
    return content, prim


# -- convex hulls of integer supports -----------------------------------


def convex_hull(points) -> list:
    """Convex hull of integer lattice points, counterclockwise.

    Andrew's monotone chain with exact integer arithmetic; collinear
    boundary points are dropped, so no three consecutive vertices are
    collinear.  Degenerate inputs return the point or segment endpoints.
    """
    pts = sorted(set((int(x), int(y)) for x, y in points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull
