"""Complex polynomial root finding with residual certificates.

Roots come from the companion-matrix eigenvalue method and are then polished
by Newton iteration on the original polynomial until the residual stagnates.
Lists are sorted by (modulus, argument in [0, 2*pi)) so results are total-
ordered and deterministic; equal-modulus ties are broken by the argument.

Two symbol-level root systems live here: the z-roots of z^p f(z, lam) for a
fixed spectral parameter, and the k eigenvalue branches of f(z, .) for a
fixed z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symbolkit import CharFunction, DegenerateError

COEFF_ZERO_REL = 1e-12     # coefficient is zero iff |c| <= rel * max|c|
RESIDUAL_CERT_REL = 1e-9   # residual certificate threshold (flags, not errors)
CLUSTER_REL = 1e-7         # pairwise root distance marking a cluster


@dataclass(frozen=True)
class RootList:
    """Moduli-sorted roots plus residual certificates and degeneracy flags."""

    roots: np.ndarray
    residuals: np.ndarray
    scale: float
    low_confidence: bool
    clustered: bool
    origin_roots: int = 0        # stripped roots at z = 0 (reported separately)
    at_infinity: int = 0         # degree drop from a vanished leading coefficient
    degenerate_leading: bool = False

    def __post_init__(self):
        self.roots.setflags(write=False)
        self.residuals.setflags(write=False)

    def __len__(self):
        return len(self.roots)


def _sort_key(roots: np.ndarray):
    mods = np.abs(roots)
    args = np.angle(roots)
    args = np.where(args < 0, args + 2 * np.pi, args)
    return np.lexsort((args, mods))


def sort_roots(roots: np.ndarray) -> np.ndarray:
    """Sort by modulus, ties by argument in [0, 2*pi)."""
    roots = np.asarray(roots, dtype=complex)
    return roots[_sort_key(roots)]


def _polyval(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    # Horner on ascending coefficients
    v = np.full_like(x, coeffs[-1])
    for c in coeffs[-2::-1]:
        v = v * x + c
    return v


def _newton_polish(coeffs: np.ndarray, roots: np.ndarray, max_iter: int = 20) -> np.ndarray:
    if len(coeffs) <= 2:
        return roots
    deriv = coeffs[1:] * np.arange(1, len(coeffs))
    x = roots.copy()
    best = np.abs(_polyval(coeffs, x))
    for _ in range(max_iter):
        px = _polyval(coeffs, x)
        dpx = _polyval(deriv, x)
        safe = np.abs(dpx) > 0
        step = np.zeros_like(x)
        step[safe] = px[safe] / dpx[safe]
        candidate = x - step
        cand_res = np.abs(_polyval(coeffs, candidate))
        improved = cand_res < best
        if not improved.any():
            break
        x = np.where(improved, candidate, x)
        best = np.minimum(best, cand_res)
    return x


def roots(coeffs) -> RootList:
    """All roots (with multiplicity) of sum(coeffs[t] * z^t).

    Trailing coefficients within COEFF_ZERO_REL of the largest magnitude are
    trimmed before solving; a zero or constant polynomial is an error.
    """
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size == 0:
        raise ValueError("zero polynomial has no well-defined roots")
    scale = float(np.max(np.abs(c)))
    if scale == 0.0:
        raise ValueError("zero polynomial has no well-defined roots")
    tol = COEFF_ZERO_REL * scale
    top = c.size - 1
    while top > 0 and abs(c[top]) <= tol:
        top -= 1
    if top == 0:
        raise ValueError("degree 0 polynomial has no roots")
    c = c[:top + 1]
    raw = np.roots(c[::-1])
    polished = _newton_polish(c, raw)
    ordered = sort_roots(polished)
    residuals = np.abs(_polyval(c, ordered))
    rscale = max(1.0, float(np.max(np.abs(ordered))) if ordered.size else 1.0)
    clustered = False
    if ordered.size > 1:
        diffs = np.abs(ordered[None, :] - ordered[:, None])
        np.fill_diagonal(diffs, np.inf)
        clustered = bool(diffs.min() < CLUSTER_REL * rscale)
    return RootList(roots=ordered, residuals=residuals, scale=scale,
                    low_confidence=bool((residuals > RESIDUAL_CERT_REL * scale).any()),
                    clustered=clustered)


def roots_in_z(F: CharFunction, lam: complex) -> RootList:
    """The p+q roots in z of z^p f(z, lam), moduli-sorted.

    If the top coefficient f_q(lam) vanishes, the missing roots are counted
    in `at_infinity` and the list is flagged degenerate; roots at the origin
    (f_{-p}(lam) = 0) are stripped and counted in `origin_roots` so the gap
    indexing, which counts from the origin side, stays aligned.
    """
    if F.p < 1 or F.q < 1:
        raise DegenerateError("characteristic function needs both a pole and a "
                              "positive-degree side in z")
    c = F.z_poly_coeffs(np.asarray(lam, dtype=complex)).ravel()
    scale = float(np.max(np.abs(c)))
    if scale == 0.0:
        raise DegenerateError("all z-coefficients vanish at this lam")
    tol = COEFF_ZERO_REL * scale
    top = c.size - 1
    at_inf = 0
    while top > 0 and abs(c[top]) <= tol:
        top -= 1
        at_inf += 1
    origin = 0
    low = 0
    while low < top and abs(c[low]) <= tol:
        low += 1
        origin += 1
    c = c[low:top + 1]
    if c.size < 2:
        raise DegenerateError("no finite nonzero roots at this lam")
    raw = np.roots(c[::-1])
    polished = _newton_polish(c, raw)
    ordered = sort_roots(polished)
    residuals = np.abs(_polyval(c, ordered))
    rscale = max(1.0, float(np.max(np.abs(ordered))))
    clustered = False
    if ordered.size > 1:
        diffs = np.abs(ordered[None, :] - ordered[:, None])
        np.fill_diagonal(diffs, np.inf)
        clustered = bool(diffs.min() < CLUSTER_REL * rscale)
    return RootList(roots=ordered, residuals=residuals, scale=scale,
                    low_confidence=bool((residuals > RESIDUAL_CERT_REL * scale).any()),
                    clustered=clustered, origin_roots=origin, at_infinity=at_inf,
                    degenerate_leading=at_inf > 0)


def eigenvalue_branches(F: CharFunction, z: complex) -> RootList:
    """The k roots in lam of f(z, .) for a fixed nonzero z, moduli-sorted.

    The lam^k coefficient is the constant (-1)^k, so exactly k branches
    exist for every nonzero z.
    """
    if z == 0:
        raise ValueError("branches are undefined at z = 0")
    c = F.lam_poly_coeffs(np.asarray(z, dtype=complex)).ravel()
    scale = float(np.max(np.abs(c)))
    if F.k == 1:
        ordered = np.array([-c[0] / c[1]])
        residuals = np.abs(_polyval(c, ordered))
        return RootList(roots=ordered, residuals=residuals, scale=scale,
                        low_confidence=bool((residuals > RESIDUAL_CERT_REL * scale).any()),
                        clustered=False)
    raw = np.roots(c[::-1])
    polished = _newton_polish(c, raw)
    ordered = sort_roots(polished)
    residuals = np.abs(_polyval(c, ordered))
    rscale = max(1.0, float(np.max(np.abs(ordered))))
    diffs = np.abs(ordered[None, :] - ordered[:, None])
    np.fill_diagonal(diffs, np.inf)
    return RootList(roots=ordered, residuals=residuals, scale=scale,
                    low_confidence=bool((residuals > RESIDUAL_CERT_REL * scale).any()),
                    clustered=bool(diffs.min() < CLUSTER_REL * rscale))


# ---------------------------------------------------------------------------
# Batched kernels for grid evaluation (shared by spectra and netcurve)


def roots_stack(C: np.ndarray) -> np.ndarray:
    """Roots of a stack of polynomials, sorted per row by (modulus, argument).

    C has shape (N, d+1), ascending coefficients, with nonvanishing leading
    column (the caller masks degenerate rows).  Returns shape (N, d).
    """
    C = np.asarray(C, dtype=complex)
    n, width = C.shape
    d = width - 1
    if d < 1:
        raise ValueError("degree must be >= 1")
    if d == 1:
        out = (-C[:, 0] / C[:, 1])[:, None]
        return out
    if d == 2:
        a, b, c = C[:, 2], C[:, 1], C[:, 0]
        sq = np.sqrt(b * b - 4 * a * c)
        sq = np.where(np.real(np.conj(b) * sq) < 0, -sq, sq)
        qq = -0.5 * (b + sq)
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = np.where(qq != 0, qq / a, 0.0)
            r2 = np.where(qq != 0, c / qq, 0.0)
        out = np.stack([r1, r2], axis=1)
    else:
        monic = C[:, :-1] / C[:, -1:]
        comp = np.zeros((n, d, d), dtype=complex)
        idx = np.arange(d - 1)
        comp[:, idx + 1, idx] = 1.0
        comp[:, :, -1] = -monic
        out = np.linalg.eigvals(comp)
    out = _polish_stack(C, out)
    order = np.lexsort(_stack_keys(out))
    return np.take_along_axis(out, order, axis=1)


def _stack_keys(roots: np.ndarray):
    mods = np.abs(roots)
    args = np.angle(roots)
    args = np.where(args < 0, args + 2 * np.pi, args)
    return (args, mods)


def _polish_stack(C: np.ndarray, roots: np.ndarray, iterations: int = 2) -> np.ndarray:
    d = C.shape[1] - 1
    if d < 2:
        return roots
    deriv = C[:, 1:] * np.arange(1, d + 1)
    x = roots
    for _ in range(iterations):
        v = np.repeat(C[:, -1:], x.shape[1], axis=1)
        for t in range(d - 1, -1, -1):
            v = v * x + C[:, t:t + 1]
        dv = np.repeat(deriv[:, -1:], x.shape[1], axis=1)
        for t in range(d - 2, -1, -1):
            dv = dv * x + deriv[:, t:t + 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(np.abs(dv) > 0, v / dv, 0.0)
        # guard against a wild step away from a multiple root
        step = np.where(np.abs(step) < 1.0 + np.abs(x), step, 0.0)
        x = x - step
    return x


def branch_stack(F: CharFunction, z: np.ndarray) -> np.ndarray:
    """Eigenvalue branches for an array of nonzero z; shape (..., k)."""
    z = np.asarray(z, dtype=complex)
    C = F.lam_poly_coeffs(z).reshape(-1, F.k + 1)
    out = roots_stack(C)
    return out.reshape(z.shape + (F.k,))
