"""Finite truncations, their spectra, and the asymptotic limit machinery.

For a symbol B the truncation T_n(B) is the n x n block Toeplitz matrix with
blocks A_{i-j}.  As n grows the eigenvalues accumulate on a limit set that
splits into two pieces: the locus where the q-th and (q+1)-th moduli-sorted
z-roots of z^p f(z, lam) tie (detected through the gap ratio |z_{q+1}|/|z_q|
- 1), and isolated zeros of a block contour-integral determinant evaluated
on circles separating the two root groups.  This module samples the first
set on grids with edge refinement, renders reality verdicts, and computes
the contour determinant by trapezoidal quadrature with node doubling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rootsolve
from .symbolkit import CharFunction, DegenerateError, MatrixSymbol, char_function

GAP_DEGENERATE = 1e-6      # lam closer than this (in gap) to the tie locus is rejected
SCAN_GAP_FLOOR = 1e-3      # determinant scan skips points this close to the tie locus
SCAN_DET_CEIL = 1e-4       # |determinant| below this marks a zero candidate
MAX_QUAD_NODES = 2 ** 14


# ---------------------------------------------------------------------------
# Truncations and eigenvalues


@dataclass(frozen=True)
class Truncation:
    """Dense n-block truncation of the block Toeplitz operator."""

    n: int
    k: int
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)


def truncation(S: MatrixSymbol, n: int) -> Truncation:
    """Assemble T_n(B) as a dense real (nk) x (nk) matrix."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = S.k
    out = np.zeros((n * k, n * k))
    blocks = {m: np.array(B, dtype=float) for m, B in S.blocks.items()}
    for i in range(n):
        for j in range(n):
            blk = blocks.get(i - j)
            if blk is not None:
                out[i * k:(i + 1) * k, j * k:(j + 1) * k] = blk
    return Truncation(n=n, k=k, matrix=out)


def eigenvalues(T: Truncation) -> np.ndarray:
    """All nk eigenvalues, canonically sorted by (Re, Im)."""
    try:
        w = np.linalg.eigvals(T.matrix)
    except np.linalg.LinAlgError as exc:
        raise DegenerateError(f"eigenvalue iteration failed: {exc}") from exc
    return w[np.lexsort((w.imag, w.real))]


# ---------------------------------------------------------------------------
# The root-modulus tie locus


def limit_gap(F: CharFunction, lam: complex) -> float:
    """Gap ratio |z_{q+1}(lam)| / |z_q(lam)| - 1; zero exactly on the limit set."""
    rl = rootsolve.roots_in_z(F, lam)
    if rl.degenerate_leading or rl.origin_roots:
        raise DegenerateError("leading or trailing z-coefficient vanishes at this lam")
    mods = np.abs(rl.roots)
    return float(mods[F.q] / mods[F.q - 1] - 1.0)


def limit_gap_grid(F: CharFunction, lams: np.ndarray) -> np.ndarray:
    """Vectorized `limit_gap`; degenerate points come back as NaN."""
    lams = np.asarray(lams, dtype=complex)
    flat = lams.ravel()
    C = F.z_poly_coeffs(flat)
    scale = np.max(np.abs(C), axis=1)
    tol = rootsolve.COEFF_ZERO_REL * scale
    valid = (np.abs(C[:, -1]) > tol) & (np.abs(C[:, 0]) > tol) & (scale > 0)
    gaps = np.full(flat.shape, np.nan)
    if valid.any():
        rts = rootsolve.roots_stack(C[valid])
        mods = np.abs(rts)
        gaps[valid] = mods[:, F.q] / mods[:, F.q - 1] - 1.0
    return gaps.reshape(lams.shape)


@dataclass(frozen=True)
class LimitSetSample:
    """Grid-sampled points of the root-modulus tie locus."""

    box: tuple
    res: int
    threshold: float
    points: np.ndarray
    gaps: np.ndarray
    skipped: int

    def __post_init__(self):
        self.points.setflags(write=False)
        self.gaps.setflags(write=False)

    @property
    def cell_diagonal(self) -> float:
        x0, x1, y0, y1 = self.box
        dx = (x1 - x0) / (self.res - 1)
        dy = (y1 - y0) / (self.res - 1)
        return float(np.hypot(dx, dy))


def _check_box(box):
    x0, x1, y0, y1 = (float(v) for v in box)
    if not (x0 < x1 and y0 < y1):
        raise ValueError(f"empty box {box!r}")
    return x0, x1, y0, y1


def sample_limit_set(F: CharFunction, box, res: int, tau: float) -> LimitSetSample:
    """Sample the tie locus inside `box` on a res x res grid.

    Grid nodes with gap <= tau are stored directly.  The locus is a positive
    function's zero set, so thresholding alone misses it between nodes; every
    bracketing pair of grid edges around a one-dimensional local minimum of
    the gap is refined by ternary search and the minimizer is stored when its
    gap makes the threshold.  Degenerate nodes are skipped and counted.
    """
    x0, x1, y0, y1 = _check_box(box)
    if res < 16:
        raise ValueError("resolution must be >= 16")
    if tau <= 0:
        raise ValueError("threshold must be positive")
    xs = np.linspace(x0, x1, res)
    ys = np.linspace(y0, y1, res)
    lam = xs[None, :] + 1j * ys[:, None]
    gaps = limit_gap_grid(F, lam)
    skipped = int(np.isnan(gaps).sum())

    pts = [lam[gaps <= tau]] if np.any(gaps <= tau) else []
    vals = [gaps[gaps <= tau]] if np.any(gaps <= tau) else []

    a_ends, b_ends = _refinement_brackets(lam, gaps, tau)
    if a_ends.size:
        ref_pts, ref_gaps = _ternary_minimize(F, a_ends, b_ends)
        keep = np.isfinite(ref_gaps) & (ref_gaps <= tau)
        pts.append(ref_pts[keep])
        vals.append(ref_gaps[keep])

    points = np.concatenate(pts) if pts else np.empty(0, dtype=complex)
    values = np.concatenate(vals) if vals else np.empty(0)
    order = np.lexsort((points.imag, points.real))
    return LimitSetSample(box=(x0, x1, y0, y1), res=res, threshold=float(tau),
                          points=points[order], gaps=values[order], skipped=skipped)


def _refinement_brackets(lam, gaps, tau):
    """Segment endpoints worth a ternary pass: 1-D local minima of the gap
    along grid rows and columns, plus any edge whose endpoint already sits
    below 10*tau."""
    a_list, b_list = [], []
    work = np.where(np.isnan(gaps), np.inf, gaps)

    def add_axis(values, coords):
        inner = (values[:, 1:-1] <= values[:, :-2]) & (values[:, 1:-1] <= values[:, 2:])
        inner &= np.isfinite(values[:, 1:-1])
        rows, cols = np.nonzero(inner)
        a_list.append(coords[rows, cols])
        b_list.append(coords[rows, cols + 2])
        lo = np.minimum(values[:, :-1], values[:, 1:]) <= 10 * tau
        rows, cols = np.nonzero(lo)
        a_list.append(coords[rows, cols])
        b_list.append(coords[rows, cols + 1])

    add_axis(work, lam)
    add_axis(work.T, lam.T)
    a = np.concatenate(a_list) if a_list else np.empty(0, dtype=complex)
    b = np.concatenate(b_list) if b_list else np.empty(0, dtype=complex)
    return a, b


def _ternary_minimize(F, a, b, iterations: int = 60):
    a = a.astype(complex).copy()
    b = b.astype(complex).copy()
    for _ in range(iterations):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        g1 = limit_gap_grid(F, m1)
        g2 = limit_gap_grid(F, m2)
        g1 = np.where(np.isnan(g1), np.inf, g1)
        g2 = np.where(np.isnan(g2), np.inf, g2)
        take_left = g1 <= g2
        b = np.where(take_left, m2, b)
        a = np.where(take_left, a, m1)
    mid = 0.5 * (a + b)
    return mid, limit_gap_grid(F, mid)


@dataclass(frozen=True)
class RealityVerdict:
    verdict: str                 # "real" | "non-real"
    offenders: np.ndarray        # sample points with |Im| above the tolerance
    tolerance: float

    def __post_init__(self):
        self.offenders.setflags(write=False)

    @property
    def is_real(self) -> bool:
        return self.verdict == "real"


def reality_verdict(sample: LimitSetSample) -> RealityVerdict:
    """Declare the sampled limit set real iff every point hugs the real axis.

    The spatial tolerance is one grid cell diagonal; offenders are returned
    sorted by |Im| descending.
    """
    if sample.points.size == 0:
        raise DegenerateError("empty sample: grid too coarse or box misplaced")
    tol = sample.cell_diagonal
    bad = sample.points[np.abs(sample.points.imag) > tol]
    bad = bad[np.argsort(-np.abs(bad.imag), kind="stable")]
    return RealityVerdict(verdict="non-real" if bad.size else "real",
                          offenders=bad, tolerance=tol)


# ---------------------------------------------------------------------------
# Contour-integral determinant


@dataclass(frozen=True)
class ContourConfig:
    """Quadrature settings: node count (power of two >= 64) and radius rule."""

    nodes: int = 256
    radius: float | None = None   # None: geometric mean of the bracketing moduli

    def __post_init__(self):
        n = self.nodes
        if n < 64 or n & (n - 1):
            raise ValueError("node count must be a power of two >= 64")
        if self.radius is not None and self.radius <= 0:
            raise ValueError("radius must be positive")


def contour_determinant(S: MatrixSymbol, lam: complex, cfg: ContourConfig | None = None,
                        charfn: CharFunction | None = None) -> complex:
    """det of the r x r block matrix of circle integrals of z^(mu-nu) (B-lam)^-1 dz/z.

    The circle radius must separate the first q z-roots (plus the origin)
    from the rest; by default it is the geometric mean of the bracketing
    root moduli.  Trapezoidal quadrature on the circle is spectrally
    accurate for these periodic integrands.
    """
    cfg = cfg or ContourConfig()
    F = charfn if charfn is not None else char_function(S)
    rl = rootsolve.roots_in_z(F, lam)
    if rl.degenerate_leading or rl.origin_roots:
        raise DegenerateError("degenerate z-coefficients at this lam")
    mods = np.abs(rl.roots)
    inner, outer = float(mods[F.q - 1]), float(mods[F.q])
    if outer / inner - 1.0 < GAP_DEGENERATE:
        raise DegenerateError("lam is too close to the limit set for a separating circle")
    radius = cfg.radius if cfg.radius is not None else float(np.sqrt(inner * outer))
    if not inner < radius < outer:
        raise DegenerateError(f"radius {radius} does not separate the root moduli "
                              f"({inner:.6g}, {outer:.6g})")
    value = _quad_block_det(S, lam, radius, cfg.nodes, offset=0.0)
    if value is None:
        value = _quad_block_det(S, lam, radius, cfg.nodes, offset=0.5)
    if value is None:
        raise DegenerateError("symbol minus lam is singular on the quadrature nodes")
    return value


def _quad_block_det(S, lam, radius, nodes, offset):
    k, r = S.k, S.r
    theta = 2 * np.pi * (np.arange(nodes) + offset) / nodes
    z = radius * np.exp(1j * theta)
    A = S.eval(z) - complex(lam) * np.eye(k)
    try:
        inv = np.linalg.inv(A)
    except np.linalg.LinAlgError:
        return None
    big = np.zeros((r * k, r * k), dtype=complex)
    for mu in range(r):
        for nu in range(r):
            weights = z ** (mu - nu)
            big[mu * k:(mu + 1) * k, nu * k:(nu + 1) * k] = \
                np.mean(weights[:, None, None] * inv, axis=0)
    return complex(np.linalg.det(big))


def contour_determinant_converged(S: MatrixSymbol, lam: complex,
                                  start_nodes: int = 256,
                                  charfn: CharFunction | None = None,
                                  tol: float = 1e-8):
    """Double the node count until the determinant moves less than `tol`.

    Returns (value, nodes_used); exceeding 2^14 nodes is an error.
    """
    F = charfn if charfn is not None else char_function(S)
    nodes = start_nodes
    prev = contour_determinant(S, lam, ContourConfig(nodes=nodes), charfn=F)
    while nodes < MAX_QUAD_NODES:
        nodes *= 2
        cur = contour_determinant(S, lam, ContourConfig(nodes=nodes), charfn=F)
        if abs(cur - prev) <= tol:
            return cur, nodes
        prev = cur
    raise DegenerateError("quadrature failed to converge by 2^14 nodes")


@dataclass(frozen=True)
class DeterminantZeroScan:
    candidates: tuple            # ((lam, |det|), ...) canonically ordered
    skipped: int
    box: tuple
    res: int


def scan_determinant_zeros(S: MatrixSymbol, box, res: int,
                           charfn: CharFunction | None = None) -> DeterminantZeroScan:
    """Best-effort scan for zeros of the contour determinant off the tie locus.

    Evaluates |det| on the grid (skipping points within SCAN_GAP_FLOOR of
    the tie locus), keeps strict 8-neighbour local minima below
    SCAN_DET_CEIL, refines each by coordinate descent, and re-verifies
    survivors at doubled node count.  No zero-count certification.
    """
    x0, x1, y0, y1 = _check_box(box)
    if res < 8:
        raise ValueError("resolution must be >= 8")
    F = charfn if charfn is not None else char_function(S)
    xs = np.linspace(x0, x1, res)
    ys = np.linspace(y0, y1, res)
    lam = xs[None, :] + 1j * ys[:, None]
    gaps = limit_gap_grid(F, lam)
    usable = np.isfinite(gaps) & (gaps > SCAN_GAP_FLOOR)
    skipped = int(lam.size - usable.sum())

    vals = np.full(lam.shape, np.inf)
    cfg = ContourConfig(nodes=256)
    for iy, ix in zip(*np.nonzero(usable)):
        try:
            vals[iy, ix] = abs(contour_determinant(S, lam[iy, ix], cfg, charfn=F))
        except DegenerateError:
            skipped += 1

    candidates = []
    for iy in range(res):
        for ix in range(res):
            v = vals[iy, ix]
            if not np.isfinite(v) or v >= SCAN_DET_CEIL:
                continue
            neigh = vals[max(0, iy - 1):iy + 2, max(0, ix - 1):ix + 2]
            if v < np.min(neigh[neigh != v], initial=np.inf):
                candidates.append(lam[iy, ix])

    step0 = max((x1 - x0), (y1 - y0)) / (res - 1)
    results = []
    for lam0 in candidates:
        lam_best, v_best = _coordinate_descent(S, F, lam0, step0, cfg)
        try:
            v2 = abs(contour_determinant(S, lam_best, ContourConfig(nodes=2 * cfg.nodes),
                                         charfn=F))
        except DegenerateError:
            continue
        if v2 < SCAN_DET_CEIL:
            results.append((complex(lam_best), float(v2)))
    results.sort(key=lambda t: (t[0].real, t[0].imag))
    return DeterminantZeroScan(candidates=tuple(results), skipped=skipped,
                               box=(x0, x1, y0, y1), res=res)


def _coordinate_descent(S, F, lam0, step, cfg, rounds: int = 15):
    def val(l):
        try:
            return abs(contour_determinant(S, l, cfg, charfn=F))
        except DegenerateError:
            return np.inf

    best, vbest = lam0, val(lam0)
    for _ in range(rounds):
        moved = False
        for delta in (step, -step, 1j * step, -1j * step):
            v = val(best + delta)
            if v < vbest:
                best, vbest = best + delta, v
                moved = True
        if not moved:
            step /= 2.0
    return best, vbest


# ---------------------------------------------------------------------------
# Branch-composed gap (path arguments for the ray-crossing picture)


def branch_limit_gap(F: CharFunction, z: complex, j: int) -> float:
    """limit_gap evaluated at the j-th (moduli-sorted, 1-based) branch at z."""
    if not 1 <= j <= F.k:
        raise ValueError(f"branch index {j} outside 1..{F.k}")
    branches = rootsolve.eigenvalue_branches(F, z)
    return limit_gap(F, complex(branches.roots[j - 1]))
