"""Consistent orientation of an eigenvector basis.

An eigenvector matrix ``V`` returned by any eigen/SVD routine is post-processed
into ``Vor = V S = R`` where ``S`` is a diagonal matrix of reflection signs and
``R`` is a rotation built from a cascade of Givens rotations.  The rotation is
stored in polar form as a strictly upper triangular matrix of angles ``theta``
so that ``R^T V S = I``.

Conventions
-----------
* Subspace indices ``k`` are 1-based (``1 <= k <= n``), matching the focus
  argument of :func:`generate_oriented_eigenvectors`.  Axis indices passed to
  :func:`givens_rotation` are 0-based.
* A Givens rotation in the ``(i, j)`` plane with ``i < j`` carries ``-sin``
  at ``(i, j)`` and ``+sin`` at ``(j, i)``, so it turns axis ``i`` toward
  axis ``j`` for positive angles.
* The rotation for subspace ``k`` is the ordered product
  ``R_k = G(k-1, k) G(k-1, k+1) ... G(k-1, n-1)`` and the full rotation is
  ``R = R_1 R_2 ... R_n``.
* Angles are radians in ``[-pi/2, pi/2]``.
"""

from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    AxisOutOfRange,
    DimensionMismatch,
    NonOrthonormalInput,
    PivotNegative,
)

__all__ = [
    "EigenSystem",
    "OrientedEigensystem",
    "orthonormality_residual",
    "validate_angle_matrix",
    "sort_eigensystem",
    "givens_rotation",
    "solve_subspace_angles",
    "build_subspace_rotation",
    "generate_oriented_eigenvectors",
    "orient_eigenvectors",
    "ORTHONORMALITY_TOL",
    "R_FLOOR",
]

ORTHONORMALITY_TOL = 1e-8
R_FLOOR = 1e-12
CLAMP_TOL = 1e-9
_ASIN_SWITCH = 0.7
PIVOT_TOL = 1e-12


class EigenSystem(NamedTuple):
    """Raw decomposition output: eigenvectors in columns plus eigenvalues."""

    V: np.ndarray
    lambdas: np.ndarray


class OrientedEigensystem(NamedTuple):
    """Result of :func:`orient_eigenvectors`.

    Unpacks in the order ``Vor, Eor, signs, theta, sort_indices``.
    """

    Vor: np.ndarray
    Eor: np.ndarray
    signs: np.ndarray
    theta: np.ndarray
    sort_indices: np.ndarray

    @property
    def n(self):
        return self.Vor.shape[0]


def _as_eigenvalues(E, n):
    E = np.asarray(E, dtype=float)
    # a diagonal eigenvalue matrix is accepted as well as a vector
    if E.ndim == 2:
        if E.shape != (n, n):
            raise DimensionMismatch(f"eigenvalue matrix has shape {E.shape}, expected ({n}, {n})")
        E = np.diag(E).copy()
    if E.ndim != 1 or E.shape[0] != n:
        raise DimensionMismatch(f"expected {n} eigenvalues, got shape {E.shape}")
    return E


def _as_square(V):
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] < 1:
        raise DimensionMismatch(f"eigenvector matrix must be square and nonempty, got shape {V.shape}")
    if not np.all(np.isfinite(V)):
        raise DimensionMismatch("eigenvector matrix contains non-finite entries")
    return V


def orthonormality_residual(V):
    """Return ``max |V^T V - I|``."""
    V = np.asarray(V, dtype=float)
    return float(np.max(np.abs(V.T @ V - np.eye(V.shape[1]))))


def validate_angle_matrix(theta):
    """Check that `theta` is a valid angle matrix and return it as an array.

    The matrix must be square, strictly upper triangular and have every entry
    in ``[-pi/2, pi/2]``.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
        raise DimensionMismatch(f"angle matrix must be square, got shape {theta.shape}")
    if np.any(np.tril(theta) != 0.0):
        raise ValueError("angle matrix must be strictly upper triangular")
    if np.any(np.abs(theta) > np.pi / 2 + 1e-12):
        raise ValueError("angles must lie in [-pi/2, pi/2]")
    return theta


def _check_subspace(k, n):
    if not 1 <= k <= n:
        raise AxisOutOfRange(f"subspace index k={k} outside 1..{n}")


def sort_eigensystem(V, E):
    """Order eigenvalues by descending absolute value and permute `V` to match.

    Parameters
    ----------
    V : array_like, shape (n, n)
        Eigenvectors in columns.
    E : array_like, shape (n,) or (n, n)
        Eigenvalues as a vector or a diagonal matrix.

    Returns
    -------
    Vsort : ndarray, shape (n, n)
    Esort : ndarray, shape (n,)
        Signed eigenvalues ordered by ``|lambda|``.
    sort_indices : ndarray of int
        ``Vsort = V[:, sort_indices]``.  Ties keep their input order.
    """
    V = _as_square(V)
    E = _as_eigenvalues(E, V.shape[0])
    sort_indices = np.argsort(-np.abs(E), kind="stable")
    return V[:, sort_indices], E[sort_indices], sort_indices


def givens_rotation(n, i, j, angle):
    """Return the ``n x n`` Givens rotation acting in the ``(i, j)`` plane."""
    if not (0 <= i < j < n):
        raise AxisOutOfRange(f"need 0 <= i < j < n, got i={i}, j={j}, n={n}")
    c, s = np.cos(angle), np.sin(angle)
    R = np.eye(n)
    R[i, i] = c
    R[j, j] = c
    R[i, j] = -s
    R[j, i] = s
    return R


def _rotate_columns(M, i, j, angle):
    # M <- M @ givens_rotation(n, i, j, angle), in place
    c, s = np.cos(angle), np.sin(angle)
    mi = M[:, i].copy()
    M[:, i] = c * mi + s * M[:, j]
    M[:, j] = c * M[:, j] - s * mi


def _unrotate_rows(M, i, j, angle):
    # M <- givens_rotation(n, i, j, angle).T @ M, in place
    c, s = np.cos(angle), np.sin(angle)
    mi = M[i].copy()
    M[i] = c * mi + s * M[j]
    M[j] = c * M[j] - s * mi


def solve_subspace_angles(column, k, r_floor=R_FLOOR, pivot_tol=PIVOT_TOL):
    """Solve the Givens angles that carry axis ``k`` onto a working column.

    Entries ``column[k-1:]`` are the pivot ``a_1`` followed by ``a_2..a_d``.
    The angles are found by arcsine from the bottom entry upward::

        theta_d = asin(a_d / r_d)
        theta_j = asin(a_j / r_j),   r_j = r_{j+1} cos(theta_{j+1})

    with ``r_d`` the column norm.  The running cosine product ``r_j`` equals
    ``sqrt(a_1^2 + ... + a_j^2)`` and is evaluated in that form.  Quotients
    are clamped to ``[-1, 1]``.  Where ``|a_j / r_j| > 0.7`` the arcsine is
    ill-conditioned, so the same angle is taken from its cosine
    ``r_{j-1} / r_j`` instead.  Once ``r_j < r_floor`` the remaining angles
    are zero.

    Parameters
    ----------
    column : array_like, shape (n,)
    k : int
        1-based subspace index.

    Returns
    -------
    ndarray, shape (n - k,)
        ``theta_{k,k+1} .. theta_{k,n}``, each in ``[-pi/2, pi/2]``.
    """
    column = np.asarray(column, dtype=float)
    n = column.shape[0]
    _check_subspace(k, n)
    a = column[k - 1:]
    if a[0] < -pivot_tol:
        raise PivotNegative(f"pivot of subspace {k} is {a[0]:.3e}; reflect the column first")
    r = np.sqrt(np.cumsum(a * a))
    angles = np.zeros(n - k)
    for m in range(len(a) - 1, 0, -1):
        if r[m] < r_floor:
            break
        q = a[m] / r[m]
        if abs(q) > 1.0 + CLAMP_TOL:
            raise NonOrthonormalInput(abs(q) - 1.0, CLAMP_TOL)
        q = min(max(q, -1.0), 1.0)
        if abs(q) <= _ASIN_SWITCH:
            angles[m - 1] = np.arcsin(q)
        else:
            angles[m - 1] = np.copysign(np.arccos(min(r[m - 1] / r[m], 1.0)), q)
    return angles


def build_subspace_rotation(theta, k):
    """Return ``R_k``, the cascade of Givens rotations stored in row ``k`` of `theta`.

    ``R_k = G(k-1, k) G(k-1, k+1) ... G(k-1, n-1)``; its leading
    ``(k-1) x (k-1)`` block is the identity.
    """
    theta = validate_angle_matrix(theta)
    n = theta.shape[0]
    _check_subspace(k, n)
    i = k - 1
    R = np.eye(n)
    for j in range(i + 1, n):
        if theta[i, j] != 0.0:
            _rotate_columns(R, i, j, theta[i, j])
    return R


def generate_oriented_eigenvectors(theta, upto=None):
    """Reconstruct a rotation from its angle matrix.

    Parameters
    ----------
    theta : array_like, shape (n, n)
        Strictly upper triangular angle matrix in radians.
    upto : int, optional
        1-based subspace index.  When given, only ``R_upto`` is returned.

    Returns
    -------
    ndarray, shape (n, n)
        ``R_1 R_2 ... R_n`` (which equals ``Vor``) or ``R_upto``.
    """
    if upto is not None:
        return build_subspace_rotation(theta, upto)
    theta = validate_angle_matrix(theta)
    n = theta.shape[0]
    R = np.eye(n)
    for i in range(n - 1):
        for j in range(i + 1, n):
            if theta[i, j] != 0.0:
                _rotate_columns(R, i, j, theta[i, j])
    return R


def _orient_sorted(Vsort):
    """Run the descending-subspace reflect/rotate loop on an already sorted basis.

    Returns signs, angle matrix and the pivot seen at each step (after reflection).
    """
    n = Vsort.shape[0]
    W = Vsort.copy()
    signs = np.ones(n, dtype=int)
    theta = np.zeros((n, n))
    pivots = np.zeros(n)
    for i in range(n):
        # sign(0) = +1
        if W[i, i] < 0.0:
            signs[i] = -1
            W[:, i] = -W[:, i]
        pivots[i] = W[i, i]
        if i == n - 1:
            break
        angles = solve_subspace_angles(W[:, i], i + 1)
        theta[i, i + 1:] = angles
        sub = W[:, i:]
        for j, ang in zip(range(i + 1, n), angles):
            if ang != 0.0:
                _unrotate_rows(sub, i, j, ang)
    return signs, theta, pivots


def orient_eigenvectors(V, E, ortho_tol=ORTHONORMALITY_TOL, reorthonormalize=False):
    """Orient an eigenvector basis so that ``R^T V S = I``.

    Parameters
    ----------
    V : array_like, shape (n, n)
        Eigenvectors in columns, as returned by an eigen or SVD call.
    E : array_like, shape (n,) or (n, n)
        Eigenvalues (vector or diagonal matrix).  Used only for sorting.
    ortho_tol : float
        Allowed ``max |V^T V - I|``.
    reorthonormalize : bool
        Replace `V` by the Q factor of its QR decomposition (with the sign of
        each column preserved) before orienting.

    Returns
    -------
    OrientedEigensystem
        ``(Vor, Eor, signs, theta, sort_indices)`` where ``Vor = Vsort diag(signs)``
        and ``generate_oriented_eigenvectors(theta)`` reproduces ``Vor``.

    Raises
    ------
    DimensionMismatch
        `V` is not square or `E` does not have ``n`` entries.
    NonOrthonormalInput
        ``max |V^T V - I| > ortho_tol``.
    """
    V = _as_square(V)
    if reorthonormalize:
        Q, Rq = np.linalg.qr(V)
        d = np.sign(np.diag(Rq))
        d[d == 0] = 1.0
        V = Q * d
    residual = orthonormality_residual(V)
    if residual > ortho_tol:
        raise NonOrthonormalInput(residual, ortho_tol)
    Vsort, Esort, sort_indices = sort_eigensystem(V, E)
    signs, theta, _ = _orient_sorted(Vsort)
    Vor = Vsort * signs
    return OrientedEigensystem(Vor, Esort, signs, theta, sort_indices)
