"""Ground-truth generators for tests, demos and the acceptance suite."""

from dataclasses import dataclass

import numpy as np

from .dirstats import BasisEnsemble, KAPPA_MAX, _rng, vmf_sample
from .eigenflow import Decomposition, Panel
from .errors import PivotNegative
from .orient import (
    EigenSystem,
    OrientedEigensystem,
    build_subspace_rotation,
    generate_oriented_eigenvectors,
    solve_subspace_angles,
    validate_angle_matrix,
)

__all__ = [
    "random_orthonormal",
    "flip_columns",
    "random_flip_mask",
    "EllipsoidSpec",
    "ellipsoid_cloud",
    "random_angle_matrix",
    "inject_flips",
    "wobble_ensemble",
]


def random_orthonormal(n, seed=None):
    """Haar-distributed orthonormal ``n x n`` matrix from the QR of a Gaussian matrix."""
    rng = _rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d


def flip_columns(V, mask):
    """Negate the columns of `V` selected by `mask`.

    `mask` is either boolean (True flips) or a vector of +-1 multipliers.
    """
    V = np.asarray(V, dtype=float)
    mask = np.asarray(mask)
    mult = np.where(mask, -1.0, 1.0) if mask.dtype == bool else mask.astype(float)
    return V * mult


def random_flip_mask(n, seed=None):
    return _rng(seed).random(n) < 0.5


def random_angle_matrix(n, seed=None, scale=np.pi / 2):
    """Strictly upper triangular angles drawn uniformly from ``(-scale, scale)``."""
    rng = _rng(seed)
    return np.triu(rng.uniform(-scale, scale, (n, n)), 1)


@dataclass(frozen=True)
class EllipsoidSpec:
    """Zero-mean Gaussian point cloud with principal axes ``G(rotation_theta)``.

    ``axis_lengths`` are standard deviations along the principal axes and must
    be strictly descending.
    """

    axis_lengths: np.ndarray
    rotation_theta: np.ndarray
    m: int
    noise_sigma: float = 0.0
    seed: object = None

    def __post_init__(self):
        axes = np.asarray(self.axis_lengths, dtype=float)
        theta = validate_angle_matrix(self.rotation_theta)
        if axes.ndim != 1 or axes.shape[0] != theta.shape[0]:
            raise ValueError("axis_lengths must have one entry per dimension")
        if np.any(axes <= 0) or np.any(np.diff(axes) >= 0):
            raise ValueError("axis_lengths must be positive and strictly descending")
        if self.m <= axes.shape[0]:
            raise ValueError("need more observations than dimensions")
        object.__setattr__(self, "axis_lengths", axes)
        object.__setattr__(self, "rotation_theta", theta)

    @property
    def n(self):
        return self.axis_lengths.shape[0]


def ellipsoid_cloud(spec, center=True):
    """Draw the point cloud described by `spec`.

    Returns
    -------
    Panel
        ``m x n`` rows ``G(theta) diag(axes) z + noise_sigma * e`` with
        standard normal ``z`` and ``e``; column-centred unless ``center=False``.
    """
    rng = _rng(spec.seed)
    R = generate_oriented_eigenvectors(spec.rotation_theta)
    Z = rng.standard_normal((spec.m, spec.n)) * spec.axis_lengths
    P = Z @ R.T
    if spec.noise_sigma > 0:
        P = P + spec.noise_sigma * rng.standard_normal(P.shape)
    if center:
        return Panel.centered_from(P)
    return Panel(P)


def inject_flips(decomposition, mask):
    """Flip eigenvector columns of a decomposition together with the matching columns of ``U``.

    The panel ``U Lambda^{1/2} V^T`` is unchanged; this mimics an eigen routine
    that returns the opposite sign for some eigenvectors.
    """
    U, sqrt_l, (V, lam), rank_deficient, means = decomposition
    return Decomposition(flip_columns(U, mask), sqrt_l, EigenSystem(flip_columns(V, mask), lam),
                         rank_deficient, means)


def _angles_from_unit(x, n, k):
    col = np.zeros(n)
    col[k - 1:] = x
    return solve_subspace_angles(col, k)


def wobble_ensemble(theta_bar, kappa, count, seed=None, max_redraw=1000):
    """Ensemble of oriented bases scattered about ``G(theta_bar)``.

    Subspaces are visited in descending order.  For subspace ``k`` the vector
    ``x_k`` of ``G(theta_bar, k)`` is the mean direction and each member's
    ``x_k`` is drawn from a vMF distribution with concentration `kappa` about
    it; the member's row ``k`` of angles is solved from the draw.  Draws with a
    negative pivot (outside the oriented half-sphere) are redrawn.
    ``kappa >= KAPPA_MAX`` (or ``inf``) returns `count` copies of ``G(theta_bar)``.
    """
    theta_bar = validate_angle_matrix(theta_bar)
    n = theta_bar.shape[0]
    rng = _rng(seed)
    lam = np.arange(n, 0, -1, dtype=float)
    thetas = np.zeros((count, n, n))
    if not np.isfinite(kappa) or kappa >= KAPPA_MAX:
        thetas[:] = theta_bar
    else:
        for k in range(1, n):
            mu = build_subspace_rotation(theta_bar, k)[k - 1:, k - 1]
            X = vmf_sample(mu, kappa, count, rng)
            for _ in range(max_redraw):
                bad = X[:, 0] < 0
                if not bad.any():
                    break
                X[bad] = vmf_sample(mu, kappa, int(bad.sum()), rng)
            else:
                raise PivotNegative("could not draw subspace vectors with a nonnegative pivot")
            for i in range(count):
                thetas[i, k - 1, k:] = _angles_from_unit(X[i], n, k)
    members = [
        OrientedEigensystem(generate_oriented_eigenvectors(t), lam.copy(),
                            np.ones(n, dtype=int), t, np.arange(n))
        for t in thetas
    ]
    return BasisEnsemble(members)
