"""Staged, printable walkthroughs of the orientation algorithm.

:func:`walkthrough` records every intermediate matrix of the sequence
``V -> V S_1 -> R_1^T V S_1 -> R_1^T V S_1 S_2 -> ...`` using explicit dense
products, and :func:`reconstruction` builds ``Vor`` up one subspace rotation
at a time.  Both render to Markdown.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .orient import (
    build_subspace_rotation,
    generate_oriented_eigenvectors,
    orient_eigenvectors,
    solve_subspace_angles,
    sort_eigensystem,
)

__all__ = [
    "Stage",
    "Transcript",
    "left_handed_r3",
    "walkthrough",
    "walkthrough_r3",
    "reconstruction",
    "walkthrough_r4",
]


@dataclass
class Stage:
    label: str
    matrix: np.ndarray
    note: str = ""


@dataclass
class Transcript:
    title: str
    stages: List[Stage] = field(default_factory=list)
    signs: np.ndarray = None
    theta: np.ndarray = None
    rotations: List[np.ndarray] = field(default_factory=list)

    def add(self, label, matrix, note=""):
        self.stages.append(Stage(label, np.array(matrix, dtype=float), note))

    def __getitem__(self, label):
        for st in self.stages:
            if st.label == label:
                return st.matrix
        raise KeyError(label)

    def to_markdown(self, decimals=3):
        out = [f"## {self.title}", ""]
        for st in self.stages:
            out.append(f"**{st.label}**" + (f" ({st.note})" if st.note else ""))
            out.append("")
            out.append("```")
            out.append(_fmt(st.matrix, decimals))
            out.append("```")
            out.append("")
        if self.signs is not None:
            out.append("signs: (" + ", ".join(f"{int(s):+d}" for s in self.signs) + ")")
        if self.theta is not None:
            out.append("")
            out.append("theta (deg):")
            out.append("")
            out.append("```")
            out.append(_fmt(np.degrees(self.theta), decimals))
            out.append("```")
        return "\n".join(out) + "\n"


def _fmt(M, decimals):
    M = np.where(np.abs(M) < 0.5 * 10.0 ** -decimals, 0.0, M)
    width = decimals + 4
    return "\n".join(" ".join(f"{x:{width}.{decimals}f}" for x in row) for row in np.atleast_2d(M))


def left_handed_r3():
    """Left-handed basis whose second eigenvector needs reflecting.

    ``G(theta) diag(1, -1, 1)`` with angles of 30, -20 and 25 degrees, so
    ``det = -1`` and orientation yields signs ``(+1, -1, +1)``.
    """
    theta = np.zeros((3, 3))
    theta[0, 1], theta[0, 2], theta[1, 2] = np.radians([30.0, -20.0, 25.0])
    return generate_oriented_eigenvectors(theta) @ np.diag([1.0, -1.0, 1.0])


def _sub(k):
    return "".join("₀₁₂₃₄₅₆₇₈₉"[int(c)] for c in str(k))


def walkthrough(V, E=None, title="Orientation walkthrough"):
    """Record each reflect/rotate stage of orienting `V`.

    Stage labels follow ``V S₁``, ``R₁ᵀ V S₁``, ``R₁ᵀ V S₁ S₂`` and so on; the
    final stage is the identity up to rounding.
    """
    V = np.asarray(V, dtype=float)
    n = V.shape[0]
    if E is None:
        E = np.arange(n, 0, -1, dtype=float)
    Vsort, _, _ = sort_eigensystem(V, E)
    tr = Transcript(title)
    tr.add("V", Vsort)
    W = Vsort.copy()
    signs = np.ones(n, dtype=int)
    theta = np.zeros((n, n))
    rot = ""
    refl = ""
    for k in range(1, n + 1):
        i = k - 1
        signs[i] = 1 if W[i, i] >= 0 else -1
        W = W @ np.diag(np.where(np.arange(n) == i, signs[i], 1.0))
        refl += f" S{_sub(k)}"
        tr.add(f"{rot}V{refl}".strip(), W, f"s{_sub(k)} = {signs[i]:+d}")
        if k < n:
            theta[i, k:] = solve_subspace_angles(W[:, i], k)
        Rk = build_subspace_rotation(theta, k)
        tr.rotations.append(Rk)
        W = Rk.T @ W
        rot = f"R{_sub(k)}ᵀ " + rot
        tr.add(f"{rot}V{refl}".strip(), W)
    tr.signs = signs
    tr.theta = theta
    tr.add("V S", Vsort * signs, "oriented basis")
    R = np.eye(n)
    for Rk in tr.rotations:
        R = R @ Rk
    tr.add(" ".join(f"R{_sub(k)}" for k in range(1, n + 1)), R, "equals V S")
    return tr


def walkthrough_r3(V=None):
    """Walkthrough in R^3, by default on :func:`left_handed_r3`."""
    return walkthrough(left_handed_r3() if V is None else V, title="Orientation of a basis in R^3")


def reconstruction(theta, title="Reconstruction from rotations"):
    """Partial products ``R_1``, ``R_1 R_2``, ... built from an angle matrix."""
    theta = np.asarray(theta, dtype=float)
    n = theta.shape[0]
    tr = Transcript(title, theta=theta)
    W = np.eye(n)
    label = ""
    for k in range(1, n + 1):
        W = W @ generate_oriented_eigenvectors(theta, k)
        label += f"R{_sub(k)} "
        tr.add(label.strip(), W)
    return tr


def walkthrough_r4():
    """Reconstruction of the oriented basis built from ``qr`` of a matrix whose first column is uniform."""
    A = np.eye(4)
    A[:, 0] = 0.5
    V, _ = np.linalg.qr(A)
    oe = orient_eigenvectors(V, np.arange(4)[::-1])
    tr = reconstruction(oe.theta, "Reconstruction of an oriented basis in R^4")
    tr.signs = oe.signs
    tr.add("Vor", oe.Vor, "from orient_eigenvectors")
    return tr
