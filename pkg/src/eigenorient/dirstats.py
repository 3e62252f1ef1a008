"""Directional statistics over ensembles of oriented eigenbases.

Stretch variation (eigenvalues) is summarised by ordinary sample moments.
Wobble variation (eigenvectors) is summarised per descending subspace: the
subspace vector ``x_k`` is the first column of ``R_k = G(theta, k)`` restricted
to rows ``k..n``, and its ensemble is described by a mean resultant length,
a circular variance and a von Mises-Fisher concentration.
"""

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg, special

from .errors import (
    DegenerateEnsemble,
    DimensionMismatch,
    InvalidDimension,
    NonOrthogonalMean,
    UndefinedMeanDirection,
)
from .orient import (
    OrientedEigensystem,
    _orient_sorted,
    build_subspace_rotation,
    generate_oriented_eigenvectors,
    validate_angle_matrix,
)

__all__ = [
    "BasisEnsemble",
    "MeanBasisReport",
    "DispersionReport",
    "mean_direction",
    "mean_eigenbasis",
    "subspace_vectors",
    "bessel_ratio",
    "kappa_approx",
    "kappa_mle",
    "dispersion",
    "vmf_sample",
    "KAPPA_MAX",
]

KAPPA_MAX = 1e12
RESULTANT_FLOOR = 1e-12


@dataclass(frozen=True)
class BasisEnsemble:
    """Ordered sequence of oriented eigensystems of a common dimension."""

    members: Sequence[OrientedEigensystem]
    timestamps: Optional[Sequence] = None

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("ensemble must have at least one member")
        n = members[0].Vor.shape[0]
        if any(m.Vor.shape != (n, n) for m in members):
            raise DimensionMismatch("ensemble members must share one dimension")
        if self.timestamps is not None and len(self.timestamps) != len(members):
            raise DimensionMismatch("timestamps must match the number of members")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_thetas(cls, thetas, eigenvalues=None, timestamps=None):
        """Build an ensemble from angle matrices (and optional sorted eigenvalues)."""
        members = []
        for i, theta in enumerate(thetas):
            theta = validate_angle_matrix(theta)
            n = theta.shape[0]
            lam = np.arange(n, 0, -1, dtype=float) if eigenvalues is None else np.asarray(eigenvalues[i], float)
            members.append(OrientedEigensystem(
                generate_oriented_eigenvectors(theta), lam,
                np.ones(n, dtype=int), theta, np.arange(n)))
        return cls(members, timestamps)

    @property
    def n(self):
        return self.members[0].Vor.shape[0]

    def __len__(self):
        return len(self.members)

    @property
    def thetas(self):
        return np.stack([m.theta for m in self.members])

    @property
    def eigenvalues(self):
        return np.stack([m.Eor for m in self.members])


@dataclass(frozen=True)
class MeanBasisReport:
    V_bar: np.ndarray
    theta_bar: np.ndarray
    lambda_bar: np.ndarray
    resultant_norms: np.ndarray
    V_polar: np.ndarray
    lambda_cov: Optional[np.ndarray] = None


@dataclass(frozen=True)
class DispersionReport:
    r_bar: np.ndarray
    circular_variance: np.ndarray
    kappa_basis: np.ndarray
    counts: np.ndarray
    capped: np.ndarray = field(default=None)


def mean_direction(vectors, unit_tol=1e-8):
    """Mean direction of a set of unit vectors.

    Parameters
    ----------
    vectors : array_like, shape (N, d)
        One unit vector per row.

    Returns
    -------
    mean : ndarray, shape (d,)
        ``x_S / |x_S|`` with ``x_S`` the vector sum.
    resultant_norm : float
        ``|x_S|``.
    """
    X = np.atleast_2d(np.asarray(vectors, dtype=float))
    if X.shape[0] == 0:
        raise ValueError("need at least one vector")
    norms = np.linalg.norm(X, axis=1)
    if np.any(np.abs(norms - 1.0) > unit_tol):
        raise ValueError("all vectors must have unit norm")
    xs = X.sum(axis=0)
    norm = float(np.linalg.norm(xs))
    if norm < RESULTANT_FLOOR:
        raise UndefinedMeanDirection("resultant vector has zero length")
    return xs / norm, norm


def _polar_factor(A):
    U, _ = linalg.polar(A)
    return U


def mean_eigenbasis(ensemble, correction_tol=0.1):
    """Mean basis of an ensemble, its polar form and the mean eigenvalues.

    ``V_bar`` is the column-normalised sum of the members' ``Vor``.  Since a
    finite-sample ``V_bar`` is not exactly orthogonal, ``theta_bar`` is solved
    from its nearest orthogonal matrix (the orthogonal polar factor), reported
    as ``V_polar``.  ``theta_bar`` is not an average of the member angles.

    Raises
    ------
    UndefinedMeanDirection
        A column sum vanishes.
    NonOrthogonalMean
        ``max |V_polar - V_bar|`` exceeds `correction_tol`.
    """
    Vs = np.sum([m.Vor for m in ensemble.members], axis=0)
    norms = np.linalg.norm(Vs, axis=0)
    if np.any(norms < RESULTANT_FLOOR):
        raise UndefinedMeanDirection(
            f"mean direction undefined for columns {np.flatnonzero(norms < RESULTANT_FLOOR).tolist()}")
    V_bar = Vs / norms
    Q = _polar_factor(V_bar)
    correction = float(np.max(np.abs(Q - V_bar)))
    if correction > correction_tol:
        raise NonOrthogonalMean(
            f"orthogonal correction of the mean basis is {correction:.3g} (> {correction_tol})")
    signs, theta_bar, _ = _orient_sorted(Q)
    if np.any(signs < 0):
        warnings.warn("mean basis required reflections; ensemble members may not be consistently oriented")
    E = ensemble.eigenvalues
    lambda_cov = np.atleast_2d(np.cov(E, rowvar=False)) if len(E) > 1 else None
    return MeanBasisReport(V_bar, theta_bar, E.mean(axis=0), norms, Q, lambda_cov)


def subspace_vectors(ensemble, k):
    """Subspace vectors ``x_k[i]`` of every member, one per row.

    Returns
    -------
    ndarray, shape (N, n - k + 1)
    """
    n = ensemble.n
    if not 1 <= k <= n:
        raise IndexError(f"subspace index k={k} outside 1..{n}")
    return np.stack([build_subspace_rotation(m.theta, k)[k - 1:, k - 1] for m in ensemble.members])


def bessel_ratio(d, kappa):
    """``A_d(kappa) = I_{d/2}(kappa) / I_{d/2-1}(kappa)``.

    Evaluated with exponentially scaled Bessel functions, falling back to the
    small- and large-argument expansions where those under- or overflow.
    """
    kappa = float(kappa)
    nu = d / 2.0
    if kappa <= 0.0:
        return 0.0
    if kappa < 1e-8:
        return kappa / d
    num = special.ive(nu, kappa)
    den = special.ive(nu - 1.0, kappa)
    if np.isfinite(num) and np.isfinite(den) and den > 0 and num > 0:
        return float(num / den)
    if kappa < nu:
        return kappa / d
    # large kappa: 1 - (d-1)/(2 kappa) - (d-1)(d-3)/(8 kappa^2)
    return 1.0 - (d - 1) / (2 * kappa) - (d - 1) * (d - 3) / (8 * kappa * kappa)


def kappa_approx(r_bar, d):
    """Closed-form concentration estimate ``r(d - r^2) / (1 - r^2)``."""
    r_bar = float(r_bar)
    if r_bar >= 1.0:
        return KAPPA_MAX
    return min(r_bar * (d - r_bar ** 2) / (1.0 - r_bar ** 2), KAPPA_MAX)


def kappa_mle(r_bar, d, max_iter=25, tol=1e-10):
    """Solve ``A_d(kappa) = r_bar`` by Newton iteration from :func:`kappa_approx`."""
    kappa = kappa_approx(r_bar, d)
    if kappa >= KAPPA_MAX or r_bar <= 0.0:
        return kappa
    for _ in range(max_iter):
        a = bessel_ratio(d, kappa)
        f = a - r_bar
        if abs(f) < tol:
            break
        slope = 1.0 - a * a - (d - 1) / kappa * a
        if slope <= 0:
            break
        kappa = max(kappa - f / slope, 0.5 * kappa)
    return min(kappa, KAPPA_MAX)


def dispersion(ensemble, refine=False):
    """Per-subspace dispersion of an ensemble of oriented bases.

    For each subspace ``k`` of dimension ``d = n - k + 1`` the mean resultant
    length of the subspace vectors is ``r_bar = |sum_i x_k[i]| / N`` and the
    circular variance is ``1 - r_bar``.  The concentration uses the
    closed-form approximation, optionally refined to the maximum likelihood
    value with ``refine=True``.  ``r_bar == 1`` (always the case for the last,
    one-dimensional subspace) reports ``KAPPA_MAX`` and sets ``capped``.
    """
    N = len(ensemble)
    if N < 2:
        raise DegenerateEnsemble("dispersion needs at least two members")
    n = ensemble.n
    r_bar = np.zeros(n)
    kappa = np.zeros(n)
    for k in range(1, n + 1):
        X = subspace_vectors(ensemble, k)
        norm = np.linalg.norm(X.sum(axis=0))
        if norm < RESULTANT_FLOOR:
            raise DegenerateEnsemble(f"resultant of subspace {k} vanishes")
        r = min(norm / N, 1.0)
        # identical members within rounding
        if 1.0 - r < 1e-15:
            r = 1.0
        r_bar[k - 1] = r
        d = n - k + 1
        kappa[k - 1] = kappa_mle(r, d) if refine else kappa_approx(r, d)
    capped = kappa >= KAPPA_MAX
    return DispersionReport(r_bar, 1.0 - r_bar, kappa, np.full(n, N), capped)


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def vmf_sample(mu, kappa, count, seed=None):
    """Draw `count` unit vectors from the von Mises-Fisher distribution.

    Uses Wood's (1994) scheme: the component along `mu` is drawn by
    envelope rejection from a Beta proposal, the tangent component is uniform
    on the orthogonal sphere.

    Returns
    -------
    ndarray, shape (count, d)
    """
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 1 or mu.shape[0] < 2:
        raise InvalidDimension("vMF sampling needs a direction in d >= 2")
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    mu = mu / np.linalg.norm(mu)
    d = mu.shape[0]
    rng = _rng(seed)

    if kappa == 0:
        X = rng.standard_normal((count, d))
        return X / np.linalg.norm(X, axis=1, keepdims=True)

    b = (d - 1.0) / (2.0 * kappa + np.sqrt(4.0 * kappa * kappa + (d - 1.0) ** 2))
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + (d - 1.0) * np.log1p(-x0 * x0)
    w = np.empty(count)
    todo = np.arange(count)
    while todo.size:
        z = rng.beta((d - 1) / 2.0, (d - 1) / 2.0, size=todo.size)
        u = rng.uniform(size=todo.size)
        wt = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        ok = kappa * wt + (d - 1.0) * np.log1p(-x0 * wt) - c >= np.log(u)
        w[todo[ok]] = wt[ok]
        todo = todo[~ok]

    v = rng.standard_normal((count, d))
    v -= np.outer(v @ mu, mu)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    X = w[:, None] * mu + np.sqrt(np.clip(1.0 - w * w, 0.0, None))[:, None] * v
    return X / np.linalg.norm(X, axis=1, keepdims=True)
