"""Dense complex-matrix primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Most routines
accept a stack of matrices with arbitrary leading batch dimensions, so a
Monte Carlo block of channel draws can be processed in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError

__all__ = [
    "NullSpaceBasis",
    "GsvdResult",
    "hermitian",
    "gram",
    "sample_gaussian_matrix",
    "hermitian_eigenvalues",
    "null_space_basis",
    "projection_from_basis",
    "log_det_i_plus",
    "gsvd_values",
]

RANK_RTOL = 1e-12
CLAMP_RTOL = 1e-10
PSD_RTOL = 1e-8
HERMITIAN_RTOL = 1e-10


@dataclass(frozen=True)
class NullSpaceBasis:
    """Orthonormal basis of a null space, stored column-wise (m x d)."""

    basis: np.ndarray
    nullity: int


@dataclass(frozen=True)
class GsvdResult:
    """Finite generalized singular values (descending) and intersection dimension."""

    sigmas: np.ndarray
    p: int


def hermitian(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def gram(h: np.ndarray) -> np.ndarray:
    """Return ``h @ h^H`` for a (stack of) matrices."""
    return h @ hermitian(h)


def _as_complex(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim < 2:
        raise InvalidInputError(f"expected a matrix, got array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix has non-finite entries")
    return arr


def sample_gaussian_matrix(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a rows x cols matrix of i.i.d. circularly-symmetric CN(0, 1) entries.

    Real and imaginary parts are independent N(0, 1/2), so ``E|h|^2 = 1``.
    Zero-size shapes return an empty matrix without consuming randomness.
    """
    if rows < 0 or cols < 0:
        raise InvalidInputError("matrix dimensions must be nonnegative")
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) * np.sqrt(0.5)


def _eigvalsh_small(g: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a stack of Hermitian matrices.

    1x1 and 2x2 stacks use closed forms, which are much faster than LAPACK
    for the millions of tiny Gram matrices a sweep produces.
    """
    d = g.shape[-1]
    if d == 0:
        return np.zeros(g.shape[:-1])
    if d == 1:
        return g[..., 0, :].real.copy()
    if d == 2:
        a = g[..., 0, 0].real
        c = g[..., 1, 1].real
        b = g[..., 0, 1]
        half_tr = 0.5 * (a + c)
        rad = np.hypot(0.5 * (a - c), np.abs(b))
        hi = half_tr + rad
        det = a * c - (b.real**2 + b.imag**2)
        # small root from det / hi avoids cancellation in half_tr - rad
        with np.errstate(divide="ignore", invalid="ignore"):
            lo = np.where(hi > 0, det / np.where(hi > 0, hi, 1.0), half_tr - rad)
        return np.stack([lo, hi], axis=-1)
    return np.linalg.eigvalsh(g)


def _clamp_spectrum(w: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(w), axis=-1, keepdims=True) if w.shape[-1] else 0.0
    tiny = (w < 0) & (w >= -CLAMP_RTOL * scale)
    return np.where(tiny, 0.0, w)


def hermitian_eigenvalues(g) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix (or stack of them).

    Negative values within ``1e-10`` of the spectral norm are roundoff and are
    clamped to zero; larger negative eigenvalues of an indefinite input are
    returned unchanged.

    Raises
    ------
    InvalidInputError
        If the input is not square or not Hermitian to ``1e-10`` relative.
    """
    g = _as_complex(g)
    if g.shape[-1] != g.shape[-2]:
        raise InvalidInputError(f"matrix must be square, got shape {g.shape[-2:]}")
    asym = np.linalg.norm(g - hermitian(g), axis=(-2, -1))
    size = np.linalg.norm(g, axis=(-2, -1))
    if np.any(asym > HERMITIAN_RTOL * np.maximum(size, np.finfo(float).tiny)):
        raise InvalidInputError("matrix is not Hermitian within tolerance")
    return _clamp_spectrum(_eigvalsh_small(g))


def null_space_basis(h, tol: float = RANK_RTOL) -> NullSpaceBasis:
    """Orthonormal basis for ``Null(h)``.

    Singular values at or below ``tol * s_max * max(rows, cols)`` count as
    zero. A zero matrix yields the identity basis of full dimension.
    """
    h = _as_complex(h)
    if h.ndim != 2:
        raise InvalidInputError("null_space_basis takes a single matrix")
    rows, cols = h.shape
    if rows == 0 or cols == 0:
        return NullSpaceBasis(np.eye(cols, dtype=np.complex128), cols)
    _, s, vh = np.linalg.svd(h, full_matrices=True)
    cutoff = tol * s[0] * max(rows, cols)
    rank = int(np.count_nonzero(s > cutoff)) if s[0] > 0 else 0
    basis = np.ascontiguousarray(hermitian(vh[rank:]))
    return NullSpaceBasis(basis, cols - rank)


def projection_from_basis(a: NullSpaceBasis) -> np.ndarray:
    """Orthogonal projector ``A A^H`` onto the span of the basis columns."""
    return a.basis @ hermitian(a.basis)


def log_det_i_plus(m) -> float | np.ndarray:
    """``log2 det(I + M)`` for Hermitian PSD ``M``, computed as ``sum log2(1 + eig)``.

    Raises
    ------
    InvalidInputError
        If an eigenvalue is below ``-1e-8`` times the spectral norm.
    """
    w = hermitian_eigenvalues(m)
    if w.shape[-1] == 0:
        out = np.zeros(w.shape[:-1])
        return float(out) if out.ndim == 0 else out
    scale = np.max(np.abs(w), axis=-1, keepdims=True)
    if np.any(w < -PSD_RTOL * scale):
        raise InvalidInputError("matrix is not positive semidefinite")
    out = np.sum(np.log2(1.0 + np.maximum(w, 0.0)), axis=-1)
    return float(out) if out.ndim == 0 else out


def _cs_pairs(h_d: np.ndarray, h_e: np.ndarray, tol: float):
    """Cosine/sine pairs of the CS decomposition of an orthonormal basis of [h_d; h_e].

    Returns ``(c, s, rank)``; ``c`` and ``s`` have length ``rank``.
    """
    n = h_d.shape[0]
    stacked = np.vstack([h_d, h_e])
    if stacked.size == 0:
        return np.zeros(0), np.zeros(0), 0
    u, sv, _ = np.linalg.svd(stacked, full_matrices=False)
    if sv.size == 0 or sv[0] == 0:
        return np.zeros(0), np.zeros(0), 0
    rank = int(np.count_nonzero(sv > RANK_RTOL * sv[0] * max(stacked.shape)))
    q1 = u[:n, :rank]
    q2 = u[n:, :rank]
    _, v = np.linalg.eigh(hermitian(q1) @ q1)
    c = np.linalg.norm(q1 @ v, axis=0)
    s = np.linalg.norm(q2 @ v, axis=0)
    return c, s, rank


def gsvd_values(h_d, h_e, tol: float = 1e-10) -> GsvdResult:
    """Finite generalized singular values of the pair ``(h_d, h_e)``.

    An orthonormal basis ``Q = [Q1; Q2]`` of the column space of the stacked
    matrix is split by rows, and the CS decomposition of ``(Q1, Q2)`` gives
    cosine/sine pairs ``(c_j, s_j)``. Each pair with ``s_j > tol`` contributes
    ``sigma_j = c_j / s_j``; pairs with ``s_j <= tol`` are infinite and are not
    returned. When ``h_e`` is square and invertible the values coincide with
    the singular values of ``h_d @ inv(h_e)``.

    ``p`` is the geometric intersection dimension of ``Null(h_d)^perp`` and
    ``Null(h_e)`` (see :func:`wiretap_dmt.rates.intersection_dim`).
    """
    from .rates import intersection_dim_matrices

    h_d = _as_complex(h_d)
    h_e = _as_complex(h_e)
    if h_d.ndim != 2 or h_e.ndim != 2:
        raise InvalidInputError("gsvd_values takes two single matrices")
    if h_d.shape[1] != h_e.shape[1]:
        raise InvalidInputError(
            f"column counts differ: {h_d.shape[1]} vs {h_e.shape[1]}"
        )
    c, s, _ = _cs_pairs(h_d, h_e, tol)
    finite = s > tol
    sigmas = np.sort(c[finite] / s[finite])[::-1]
    return GsvdResult(sigmas, intersection_dim_matrices(h_d, h_e))
