"""Matrix-valued Laurent symbols and their characteristic functions.

A banded block Toeplitz matrix with k x k blocks is encoded by its symbol
B(z) = sum(A_m z^m, m = -r..s).  This module loads symbols, builds them from
the k diagonal sequences of the underlying banded matrix, expands the
bivariate characteristic function f(z, lam) = det(B(z) - lam*I) exactly, and
computes Newton polygons of the monomial support.

Entries must be real; determinant expansion is a memoized Laplace expansion
over the polynomial ring, so exact-mode results are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .laurent import EXACT, FLOAT, LaurentPoly, parse_scalar
from .polyring import MPoly, convex_hull, mpoly_det

FLOAT_TRIM_REL = 1e-12


class SymbolError(ValueError):
    """Raised for malformed symbol files or invalid symbol data."""


class DegenerateError(RuntimeError):
    """Raised when an analysis hits a degenerate configuration."""


# ---------------------------------------------------------------------------
# MatrixSymbol


class MatrixSymbol:
    """Immutable real matrix-valued Laurent polynomial.

    blocks maps the exponent m to a k x k tuple-of-tuples; the blocks at
    -r and s are nonzero and r, s >= 1.
    """

    __slots__ = ("k", "r", "s", "blocks", "mode", "_float_cache")

    def __init__(self, blocks: dict, k: int, mode: str):
        if k < 1:
            raise SymbolError("block size k must be >= 1")
        trimmed = {}
        scale = max((abs(complex(c)) for B in blocks.values() for row in B for c in row),
                    default=0.0)
        for m, B in blocks.items():
            B = tuple(tuple(row) for row in B)
            if len(B) != k or any(len(row) != k for row in B):
                raise SymbolError(f"block {m} is not {k}x{k}")
            if _block_is_zero(B, mode, scale):
                continue
            trimmed[int(m)] = B
        if not trimmed:
            raise SymbolError("all blocks are zero")
        lo, hi = min(trimmed), max(trimmed)
        if lo > -1 or hi < 1:
            raise SymbolError("band bounds r,s >= 1 required (symbol must have a z^-1 "
                              "and a z^+1 side)")
        self.k = k
        self.r = -lo
        self.s = hi
        self.blocks = trimmed
        self.mode = mode
        self._float_cache = None

    # -- access ---------------------------------------------------------

    def block(self, m: int):
        return self.blocks.get(m)

    def entry(self, i: int, j: int) -> LaurentPoly:
        """Laurent polynomial at position (i, j), zero-based."""
        coeffs = {}
        for m, B in self.blocks.items():
            if B[i][j] != 0:
                coeffs[m] = B[i][j]
        return LaurentPoly(coeffs, self.mode)

    def _float_blocks(self):
        if self._float_cache is None:
            self._float_cache = {m: np.array(B, dtype=float) for m, B in self.blocks.items()}
        return self._float_cache

    def eval(self, z):
        """B(z) for a scalar or array of nonzero complex z; shape (..., k, k)."""
        arr = np.asarray(z, dtype=complex)
        out = np.zeros(arr.shape + (self.k, self.k), dtype=complex)
        for m in sorted(self.blocks):
            out += (arr ** m)[..., None, None] * self._float_blocks()[m]
        return out

    def to_dict(self) -> dict:
        def enc(c):
            if isinstance(c, Fraction):
                return int(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            return float(c)

        return {"k": self.k,
                "blocks": {str(m): [[enc(c) for c in row] for row in B]
                           for m, B in sorted(self.blocks.items())}}

    def __repr__(self):
        return f"MatrixSymbol(k={self.k}, r={self.r}, s={self.s}, mode={self.mode})"


def _block_is_zero(B, mode, scale) -> bool:
    if mode == EXACT:
        return all(c == 0 for row in B for c in row)
    return all(abs(complex(c)) <= FLOAT_TRIM_REL * scale for row in B for c in row)


# ---------------------------------------------------------------------------
# Symbol ingestion (the single file format for the whole toolkit)


def symbol_from_dict(data: dict, substitutions: dict | None = None) -> MatrixSymbol:
    """Build a MatrixSymbol from the JSON symbol mapping.

    Format: {"k": int, "blocks": {"<m>": [[entry, ...], ...], ...}} with
    entries as integers, decimals, or exact-rational strings "a/b".  A
    string "$name" is a sweep placeholder and needs `substitutions`.
    """
    if not isinstance(data, dict):
        raise SymbolError("symbol file must contain a JSON object")
    try:
        k = int(data["k"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SymbolError("missing or invalid block size 'k'") from exc
    raw_blocks = data.get("blocks")
    if not isinstance(raw_blocks, dict) or not raw_blocks:
        raise SymbolError("missing or empty 'blocks' mapping")

    parsed = {}
    modes = set()
    for key, rows in raw_blocks.items():
        try:
            m = int(key)
        except ValueError as exc:
            raise SymbolError(f"block exponent {key!r} is not an integer") from exc
        if not isinstance(rows, list):
            raise SymbolError(f"block {key!r} is not a matrix")
        block = []
        for row in rows:
            if not isinstance(row, list):
                raise SymbolError(f"block {key!r} is not a matrix")
            out_row = []
            for cell in row:
                if isinstance(cell, str) and cell.startswith("$"):
                    name = cell[1:]
                    if substitutions is None or name not in substitutions:
                        raise SymbolError(f"placeholder {cell!r} has no substitution value")
                    cell = substitutions[name]
                try:
                    value, mode = parse_scalar(cell)
                except ValueError as exc:
                    raise SymbolError(f"bad entry in block {key!r}: {exc}") from exc
                modes.add(mode)
                out_row.append(value)
            block.append(out_row)
        parsed[m] = block

    mode = FLOAT if FLOAT in modes else EXACT
    if mode == FLOAT:
        parsed = {m: [[float(c) for c in row] for row in B] for m, B in parsed.items()}
    return MatrixSymbol(parsed, k, mode)


def load_symbol(path, substitutions: dict | None = None) -> MatrixSymbol:
    """Load a symbol JSON file; see `symbol_from_dict` for the format."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SymbolError(f"cannot read symbol file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SymbolError(f"symbol file {path} is not valid JSON: {exc}") from exc
    return symbol_from_dict(data, substitutions)


def from_periodic_sequences(seqs, p: int, q: int) -> MatrixSymbol:
    """Symbol of the banded matrix whose diagonals repeat with period k.

    `seqs` holds k sequences, each of length p+q+1 covering diagonal offsets
    n = -p..q: seqs[t][n+p] is the entry on the n-th diagonal at rows
    congruent to t+1.  Entry (i, j) of the symbol collects a_{km+i-j} with
    the sequence picked by the sign of m (row sequence below the diagonal,
    column sequence above, min(i, j) on the block diagonal).
    """
    k = len(seqs)
    if k < 1:
        raise SymbolError("need at least one sequence")
    if p < 0 or q < 0 or p + q < 1:
        raise SymbolError("sequence range -p..q must be nonempty with p+q >= 1")
    length = p + q + 1
    if any(len(s) != length for s in seqs):
        raise SymbolError("ragged sequences: all must cover the same range -p..q")

    parsed = []
    modes = set()
    for seq in seqs:
        row = []
        for cell in seq:
            value, mode = parse_scalar(cell)
            modes.add(mode)
            row.append(value)
        parsed.append(row)
    mode = FLOAT if FLOAT in modes else EXACT
    if mode == FLOAT:
        parsed = [[float(c) for c in row] for row in parsed]

    blocks: dict = {}
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            m_lo = -((p + i - j) // k)          # ceil((-p-i+j)/k)
            m_hi = (q - i + j) // k             # floor((q-i+j)/k)
            for m in range(m_lo, m_hi + 1):
                n = k * m + i - j
                t = i if m < 0 else (j if m > 0 else min(i, j))
                value = parsed[t - 1][n + p]
                if value == 0:
                    continue
                B = blocks.setdefault(m, [[Fraction(0) if mode == EXACT else 0.0] * k
                                          for _ in range(k)])
                B[i - 1][j - 1] = value
    if not blocks:
        raise SymbolError("all sequence entries are zero")
    return MatrixSymbol(blocks, k, mode)


# ---------------------------------------------------------------------------
# Characteristic function


@dataclass(eq=False)
class CharFunction:
    """Bivariate Laurent polynomial det(B(z) - lam*I).

    `poly` has variables (z, lam); p and q are the z-order and z-degree
    (f runs over z^-p .. z^q) derived from the expanded support.  Treated
    as immutable after construction (views are cached lazily).
    """

    k: int
    p: int
    q: int
    poly: MPoly
    mode: str

    @cached_property
    def lam_coeffs(self) -> tuple:
        """g_0..g_k with f = sum(g_l(z) lam^l); entries are LaurentPoly in z."""
        buckets = self.poly.collect(1)
        out = []
        for ell in range(self.k + 1):
            piece = buckets.get(ell)
            coeffs = {} if piece is None else {e[0]: c for e, c in piece.coeffs.items()}
            out.append(LaurentPoly(coeffs, self.mode))
        return tuple(out)

    @cached_property
    def z_coeffs(self) -> tuple:
        """f_{-p}..f_q with f = sum(f_m(lam) z^m); entries are polynomials in lam."""
        buckets = self.poly.collect(0)
        out = []
        for m in range(-self.p, self.q + 1):
            piece = buckets.get(m)
            coeffs = {} if piece is None else {e[0]: c for e, c in piece.coeffs.items()}
            out.append(LaurentPoly(coeffs, self.mode))
        return tuple(out)

    @cached_property
    def _fm_matrix(self) -> np.ndarray:
        """Real matrix F with F[m+p, l] = coefficient of z^m lam^l."""
        F = np.zeros((self.p + self.q + 1, self.k + 1))
        for (m, ell), c in self.poly.coeffs.items():
            F[m + self.p, ell] = float(complex(c).real)
        return F

    def eval(self, z, lam):
        """f(z, lam) for scalars or broadcastable arrays (z nonzero)."""
        return self.poly.eval(z, lam)

    def z_poly_coeffs(self, lam) -> np.ndarray:
        """Coefficients of z^p f(z, lam) in z, ascending, for an array of lam.

        Shape (..., p+q+1); column t is the coefficient of z^t.
        """
        lam = np.asarray(lam, dtype=complex)
        powers = lam[..., None] ** np.arange(self.k + 1)
        return powers @ self._fm_matrix.T.astype(complex)

    def lam_poly_coeffs(self, z) -> np.ndarray:
        """Coefficients of f(z, .) in lam, ascending, for an array of z."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + (self.k + 1,), dtype=complex)
        for ell, g in enumerate(self.lam_coeffs):
            out[..., ell] = g(z)
        return out


def char_function(S: MatrixSymbol) -> CharFunction:
    """Expand det(B(z) - lam*I_k); exact when the symbol is exact."""
    k = S.k
    one = Fraction(1) if S.mode == EXACT else 1.0
    rows = []
    for i in range(k):
        row = []
        for j in range(k):
            coeffs = {}
            for m, B in S.blocks.items():
                if B[i][j] != 0:
                    coeffs[(m, 0)] = B[i][j]
            if i == j:
                coeffs[(0, 1)] = coeffs.get((0, 1), 0) - one
            row.append(MPoly(coeffs, 2))
        rows.append(row)
    poly = mpoly_det(rows)
    if S.mode == FLOAT:
        poly = poly.trim(FLOAT_TRIM_REL)
    p = -poly.order(0)
    q = poly.degree(0)
    return CharFunction(k=k, p=p, q=q, poly=poly, mode=S.mode)


def scalar_symbol(S: MatrixSymbol) -> LaurentPoly:
    """det B(z) as a Laurent polynomial.

    A zero result (degenerate symbol) comes back as the zero polynomial;
    callers should treat `result.is_zero` as the degeneracy flag.
    """
    rows = []
    for i in range(S.k):
        row = []
        for j in range(S.k):
            coeffs = {(m,): B[i][j] for m, B in S.blocks.items() if B[i][j] != 0}
            row.append(MPoly(coeffs, 1))
        rows.append(row)
    det = mpoly_det(rows)
    if S.mode == FLOAT:
        det = det.trim(FLOAT_TRIM_REL)
    return LaurentPoly({e[0]: c for e, c in det.coeffs.items()}, S.mode)


# ---------------------------------------------------------------------------
# Coefficient order/degree and the generic profile


def coeff_ord_deg(F: CharFunction, ell: int) -> tuple:
    """(order, degree) of the stored lam^ell coefficient g_ell."""
    if not 0 <= ell <= F.k:
        raise ValueError(f"lambda exponent {ell} outside 0..{F.k}")
    g = F.lam_coeffs[ell]
    if g.is_zero:
        raise DegenerateError(f"coefficient of lam^{ell} is the zero polynomial")
    return g.order, g.degree


def expected_ord_deg(F: CharFunction, ell: int) -> tuple:
    """Generic (order, degree) of g_ell implied by the band structure."""
    k, p, q = F.k, F.p, F.q
    return -((p * (k - ell)) // k), (q * (k - ell)) // k


def is_generic(F: CharFunction, ell: int) -> bool:
    """Whether g_ell attains the generic order and degree."""
    try:
        actual = coeff_ord_deg(F, ell)
    except DegenerateError:
        return False
    return actual == expected_ord_deg(F, ell)


def generic_profile(F: CharFunction) -> tuple:
    return tuple(is_generic(F, ell) for ell in range(F.k + 1))


# ---------------------------------------------------------------------------
# Newton polygon


@dataclass(frozen=True)
class NewtonPolygon:
    """Convex hull of the monomial support, counterclockwise lattice points."""

    vertices: tuple

    def is_triangle(self, p: int, q: int, k: int) -> bool:
        return set(self.vertices) == {(-p, 0), (q, 0), (0, k)} and len(self.vertices) == 3

    def contains(self, point) -> bool:
        """Point-in-hull test with exact integer arithmetic (boundary counts)."""
        verts = self.vertices
        n = len(verts)
        if n == 1:
            return tuple(point) == verts[0]
        px, py = point
        if n == 2:
            (ax, ay), (bx, by) = verts
            cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
            if cross != 0:
                return False
            return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)
        for t in range(n):
            ax, ay = verts[t]
            bx, by = verts[(t + 1) % n]
            if (bx - ax) * (py - ay) - (by - ay) * (px - ax) < 0:
                return False
        return True


def newton_polygon(F: CharFunction) -> NewtonPolygon:
    """Newton polygon of f(z, lam) in the (z-exponent, lam-exponent) plane."""
    if F.poly.is_zero:
        raise DegenerateError("characteristic function is zero")
    hull = convex_hull(F.poly.support())
    return NewtonPolygon(vertices=tuple(hull))
