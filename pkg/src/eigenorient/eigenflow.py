"""Oriented principal-component regression over evolving data.

Workflow for one panel ``P`` (``m`` observations by ``n`` features)::

    P = U Lambda^{1/2} V^T           decompose_panel
    R^T V S = I                      orient_eigenvectors
    y = U S Lambda^{1/2} beta + e    fit
    E y = (P_out R)[:, :q] beta      predict

Eigenvalue convention: ``lambda = sigma^2 / (m - 1)`` where ``sigma`` are the
singular values of the centred panel, so that ``Lambda`` is the sample
covariance spectrum and the columns of ``U`` have unit sample variance.
"""

from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
from scipy import linalg

from .errors import DimensionMismatch, SingularDesign
from .orient import EigenSystem, OrientedEigensystem, orient_eigenvectors

__all__ = [
    "Panel",
    "Decomposition",
    "RegressionModel",
    "TrackEntry",
    "TrackRecord",
    "decompose_panel",
    "fit",
    "predict",
    "fit_averaged",
    "predict_averaged",
    "regress",
    "sliding_windows",
    "rolling_track",
    "sign_changes",
    "RANK_TOL",
]

RANK_TOL = 1e-12


@dataclass(frozen=True)
class Panel:
    """An ``m x n`` data panel with feature labels."""

    data: np.ndarray
    column_names: Optional[Sequence[str]] = None
    centered: bool = False

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[None, :]
        if data.ndim != 2:
            raise DimensionMismatch("panel data must be two-dimensional")
        names = self.column_names
        if names is None:
            names = [f"p{j + 1}" for j in range(data.shape[1])]
        if len(names) != data.shape[1]:
            raise DimensionMismatch("one column name per feature is required")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "column_names", tuple(names))

    @classmethod
    def centered_from(cls, data, column_names=None):
        data = np.asarray(data, dtype=float)
        return cls(data - data.mean(axis=0), column_names, centered=True)

    @property
    def shape(self):
        return self.data.shape

    @property
    def means(self):
        return self.data.mean(axis=0)


class Decomposition(NamedTuple):
    U: np.ndarray
    sqrt_lambdas: np.ndarray
    system: EigenSystem
    rank_deficient: bool
    column_means: np.ndarray


@dataclass(frozen=True)
class RegressionModel:
    beta_hat: np.ndarray
    q: int
    signs_used: np.ndarray
    lambda_used: np.ndarray
    rotation_used: np.ndarray
    residual_rms: float
    column_means: np.ndarray
    mean_basis: bool = False


def _as_panel(panel):
    return panel if isinstance(panel, Panel) else Panel(panel)


def decompose_panel(panel, center=True):
    """SVD of a panel in eigen form.

    Parameters
    ----------
    panel : Panel or array_like, shape (m, n)
    center : bool
        Subtract column means first (skipped for panels already flagged centred).

    Returns
    -------
    Decomposition
        ``U`` (m x n, unit-variance columns), ``sqrt_lambdas``, the
        :class:`EigenSystem` ``(V, lambdas)``, a rank-deficiency flag and the
        column means that were removed.  ``U diag(sqrt_lambdas) V^T``
        reproduces the (centred) panel.
    """
    panel = _as_panel(panel)
    P = panel.data
    m, n = P.shape
    if m <= n:
        raise DimensionMismatch(f"decomposition needs m > n, got {m} x {n}")
    means = np.zeros(n)
    if center and not panel.centered:
        means = P.mean(axis=0)
        P = P - means
    Us, sigma, Vt = np.linalg.svd(P, full_matrices=False)
    scale = np.sqrt(m - 1.0)
    sqrt_lambdas = sigma / scale
    rank_deficient = bool(sigma[-1] < RANK_TOL * max(sigma[0], np.finfo(float).tiny))
    return Decomposition(Us * scale, sqrt_lambdas, EigenSystem(Vt.T, sqrt_lambdas ** 2),
                         rank_deficient, means)


def fit(y, U, signs, lambdas, q=None, rotation=None, column_means=None):
    """Least-squares weights on the oriented, scaled factors.

    Regresses `y` on the first `q` columns of ``U diag(signs) diag(sqrt(lambdas))``.
    `U`, `signs` and `lambdas` must already be in sorted order; the signs are
    applied after truncation.

    Parameters
    ----------
    rotation : ndarray, optional
        Rotation stored on the model for prediction (``Vor``).  Defaults to
        ``diag(signs)``, i.e. prediction straight in factor space.
    """
    y = np.asarray(y, dtype=float)
    U = np.asarray(U, dtype=float)
    signs = np.asarray(signs)
    lambdas = np.asarray(lambdas, dtype=float)
    m, n = U.shape
    q = n if q is None else int(q)
    if not 1 <= q <= n:
        raise ValueError(f"retained dimension q={q} outside 1..{n}")
    if y.shape != (m,):
        raise DimensionMismatch(f"y must have {m} entries, got shape {y.shape}")
    if signs.shape != (n,) or lambdas.shape != (n,):
        raise DimensionMismatch("signs and lambdas need one entry per column of U")
    root = np.sqrt(np.clip(lambdas[:q], 0.0, None))
    if np.any(root < RANK_TOL) or np.any(lambdas[:q] < 0):
        raise SingularDesign("retained eigenvalues must be positive")
    X = U[:, :q] * (signs[:q] * root)
    beta, *_ = linalg.lstsq(X, y)
    resid = y - X @ beta
    if rotation is None:
        rotation = np.diag(signs.astype(float))
    if column_means is None:
        column_means = np.zeros(rotation.shape[0])
    return RegressionModel(beta, q, signs[:q].copy(), lambdas[:q].copy(), np.asarray(rotation, float),
                           float(np.sqrt(np.mean(resid ** 2))), np.asarray(column_means, float))


def predict(panel_out, model):
    """``E y = (P_out R)[:, :q] beta``.

    The product ``P_out R`` is formed before truncation, which is the only
    association defined when ``q < n``.  The model's in-sample column means are
    subtracted from `panel_out` first.
    """
    P = _as_panel(panel_out).data
    n = model.rotation_used.shape[0]
    if P.shape[1] != n:
        raise DimensionMismatch(f"panel has {P.shape[1]} columns, model expects {n}")
    factors = (P - model.column_means) @ model.rotation_used
    return factors[:, :model.q] @ model.beta_hat


def fit_averaged(y, U, signs, lambda_bar, q=None, V_bar=None, column_means=None):
    """:func:`fit` with ensemble-averaged eigenvalues (and optionally the mean basis)."""
    model = fit(y, U, signs, lambda_bar, q, rotation=V_bar, column_means=column_means)
    if V_bar is None:
        return model
    return RegressionModel(model.beta_hat, model.q, model.signs_used, model.lambda_used,
                           model.rotation_used, model.residual_rms, model.column_means, True)


def predict_averaged(panel_out, V_bar, model):
    """``E y = (P_out V_bar)[:, :q] beta`` with the mean basis replacing ``R``."""
    V_bar = np.asarray(V_bar, dtype=float)
    averaged = RegressionModel(model.beta_hat, model.q, model.signs_used, model.lambda_used,
                               V_bar, model.residual_rms, model.column_means, True)
    return predict(panel_out, averaged)


def _orient(decomp, orient, ortho_tol):
    V, lam = decomp.system
    if orient:
        return orient_eigenvectors(V, lam, ortho_tol=ortho_tol)
    # baseline: keep the platform signs, sort only
    idx = np.argsort(-np.abs(lam), kind="stable")
    n = V.shape[0]
    return OrientedEigensystem(V[:, idx], lam[idx], np.ones(n, dtype=int), np.zeros((n, n)), idx)


def regress(panel, y, q=None, center=True, orient=True, ortho_tol=1e-8, decomposition=None):
    """Decompose, orient and fit one panel.

    Returns
    -------
    model : RegressionModel
    oriented : OrientedEigensystem
    decomposition : Decomposition

    ``orient=False`` skips orientation (platform signs kept), for baselines.
    A precomputed `decomposition` may be supplied, e.g. one with injected flips.
    """
    decomp = decompose_panel(panel, center=center) if decomposition is None else decomposition
    oe = _orient(decomp, orient, ortho_tol)
    U = decomp.U[:, oe.sort_indices]
    model = fit(y, U, oe.signs, oe.Eor, q, rotation=oe.Vor, column_means=decomp.column_means)
    return model, oe, decomp


def sliding_windows(data, y, window_len=None, stride=None):
    """Yield ``(start, panel_rows, y_rows)`` over a long panel.

    The default window length is ``8 n`` rows and the default stride equals
    the window length.
    """
    data = np.asarray(data, dtype=float)
    y = np.asarray(y, dtype=float)
    m, n = data.shape
    window_len = 8 * n if window_len is None else int(window_len)
    stride = window_len if stride is None else int(stride)
    if window_len <= n or stride < 1:
        raise ValueError("window length must exceed n and stride must be positive")
    for start in range(0, m - window_len + 1, stride):
        yield start, data[start:start + window_len], y[start:start + window_len]


@dataclass
class TrackEntry:
    k: int
    oriented: OrientedEigensystem
    beta_hat: np.ndarray
    model: RegressionModel
    timestamp: object = None


@dataclass
class TrackRecord:
    entries: List[TrackEntry] = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    @property
    def betas(self):
        return np.stack([e.beta_hat for e in self.entries])

    @property
    def signs(self):
        return np.stack([e.oriented.signs for e in self.entries])

    @property
    def thetas(self):
        return np.stack([e.oriented.theta for e in self.entries])

    @property
    def eigenvalues(self):
        return np.stack([e.oriented.Eor for e in self.entries])

    def ensemble(self):
        from .dirstats import BasisEnsemble

        return BasisEnsemble([e.oriented for e in self.entries],
                             [e.timestamp for e in self.entries])


def rolling_track(panels, ys, q=None, center=True, orient=True, timestamps=None,
                  decompositions=None, ortho_tol=1e-8):
    """Decompose, orient and fit every window in order.

    Parameters
    ----------
    panels : sequence of Panel or arrays
    ys : sequence of response vectors, one per panel
    decompositions : sequence of Decomposition, optional
        Precomputed decompositions (used to inject platform sign flips).

    Errors raised for a window get a ``window`` attribute and the index is
    prefixed to the message.
    """
    record = TrackRecord()
    n = None
    for k, (panel, y) in enumerate(zip(panels, ys)):
        try:
            decomp = None if decompositions is None else decompositions[k]
            model, oe, _ = regress(panel, y, q, center=center, orient=orient,
                                   ortho_tol=ortho_tol, decomposition=decomp)
            if n is None:
                n = oe.n
            elif oe.n != n:
                raise DimensionMismatch(f"window has {oe.n} features, expected {n}")
        except Exception as err:
            err.window = k
            err.args = (f"window {k}: {err}",) + err.args[1:]
            raise
        ts = None if timestamps is None else timestamps[k]
        record.entries.append(TrackEntry(k, oe, model.beta_hat, model, ts))
    return record


def sign_changes(series):
    """Number of sign changes down each column of a ``(T, q)`` series."""
    s = np.sign(np.asarray(series, dtype=float))
    return np.sum(s[1:] * s[:-1] < 0, axis=0)
