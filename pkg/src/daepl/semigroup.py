"""Reduced generator ``C = E^{-1} A`` on the consistent space and its semigroup.

With ``U`` the consistent space and ``B_U`` an orthonormal basis of it,
``C`` is represented by the ``dim U x dim U`` matrix solving
``E B_U C = A B_U``.  Mild solutions are ``u(t) = B_U exp(-t C) B_U^T u0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.integrate import cumulative_simpson

from .errors import DimensionError, DomainDefectError, InconsistentInitialValueError, InjectivityGapError
from .pencil import Pencil
from .subspace import EPS, Subspace, compare, default_tol, distance, image, preimage, sine_angle
from .wong import WongResult, stabilization_tol

__all__ = [
    "Generator",
    "SolutionTrace",
    "injectivity_gap",
    "default_gap_threshold",
    "build_generator",
    "evolve",
    "verify_mild",
    "verify_generator_relation",
    "check_consistent",
    "CONSISTENCY_TOL",
]

# sine-angle above which an initial value counts as inconsistent
CONSISTENCY_TOL = math.sqrt(EPS)


def injectivity_gap(p: Pencil, U: Subspace) -> float:
    """``sigma_min(E B_U)``; ``inf`` for the zero space."""
    if U.ambient_dim != p.n:
        raise DimensionError(f"subspace lives in R^{U.ambient_dim}, pencil in R^{p.n}")
    if U.is_zero:
        return math.inf
    return float(scipy.linalg.svd(p.E @ U.basis, compute_uv=False)[-1])


def default_gap_threshold(p: Pencil, U: Subspace) -> float:
    """``1e3 * tau`` with ``tau`` the default rank tolerance of ``E B_U``."""
    if U.is_zero:
        return 0.0
    eb = p.E @ U.basis
    return 1e3 * max(eb.shape) * EPS * float(np.linalg.norm(eb, 2))


@dataclass(frozen=True, eq=False)
class Generator:
    U: Subspace
    V: Subspace
    C_matrix: np.ndarray
    injectivity_gap: float

    @property
    def dim(self) -> int:
        return self.U.dim

    def semigroup(self, t: float) -> np.ndarray:
        """``exp(-t C)`` in U-coordinates."""
        return scipy.linalg.expm(-float(t) * self.C_matrix)

    def to_dict(self) -> dict:
        gap = self.injectivity_gap
        return {
            "U_dim": self.U.dim,
            "injectivity_gap": None if math.isinf(gap) else float(gap),
            "C_matrix": self.C_matrix.tolist(),
        }


def build_generator(
    p: Pencil,
    U: Subspace,
    w: WongResult | None = None,
    gap_threshold: float | None = None,
) -> Generator:
    """Represent ``C = E^{-1} A`` on ``U``.

    Raises
    ------
    InjectivityGapError
        ``sigma_min(E B_U)`` does not exceed ``gap_threshold`` (default
        :func:`default_gap_threshold`).
    DomainDefectError
        ``V = A^{-1}[E[U]]`` is not all of ``U``.
    """
    n = p.n
    tol = w.tol if w is not None else default_tol((n, n))
    ctol = w.compare_tol if w is not None else stabilization_tol(p, tol)
    gap = injectivity_gap(p, U)
    if U.is_zero:
        return Generator(U=U, V=U, C_matrix=np.zeros((0, 0)), injectivity_gap=gap)
    thr = default_gap_threshold(p, U) if gap_threshold is None else float(gap_threshold)
    if not gap > thr:
        raise InjectivityGapError(gap, thr)
    V = preimage(p.A, image(p.E, U, tol), tol)
    rel = compare(V, U, ctol)
    if rel.relation != "equal":
        raise DomainDefectError(
            f"generator domain V (dim {V.dim}) differs from U (dim {U.dim}): relation "
            f"'{rel.relation}', sin(V,U)={rel.sin_12:.2e}, sin(U,V)={rel.sin_21:.2e}"
        )
    eb = p.E @ U.basis
    ab = p.A @ U.basis
    C, *_ = np.linalg.lstsq(eb, ab, rcond=None)
    return Generator(U=U, V=V, C_matrix=C, injectivity_gap=gap)


@dataclass
class SolutionTrace:
    times: np.ndarray
    states: np.ndarray
    x0: np.ndarray
    provenance: str
    residual_profile: np.ndarray | None = None
    # set by the Laplace route so that the inversion can be re-evaluated
    pencil: Pencil | None = field(default=None, repr=False)
    contour: object | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def to_csv(self) -> str:
        n = self.n
        rows = ["t," + ",".join(f"x_{i + 1}" for i in range(n)) + ",residual"]
        res = self.residual_profile
        for i, t in enumerate(self.times):
            vals = [repr(float(t))] + [repr(float(v)) for v in self.states[i]]
            vals.append(repr(float(res[i])) if res is not None else "")
            rows.append(",".join(vals))
        return "\n".join(rows) + "\n"


def _check_times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a non-empty 1-D sequence")
    if np.any(t < 0):
        raise ValueError("time grid must be nonnegative")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return t


def check_consistent(U: Subspace, x0, tol: float = CONSISTENCY_TOL) -> None:
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (U.ambient_dim,):
        raise DimensionError(f"initial value has shape {x0.shape}, expected ({U.ambient_dim},)")
    s = sine_angle(U, x0)
    if s > tol:
        raise InconsistentInitialValueError(distance(U, x0), s)


def evolve(g: Generator, x0, times, tol: float = CONSISTENCY_TOL) -> SolutionTrace:
    """Mild solution ``u(t) = B_U exp(-t C) B_U^T x0`` on a time grid."""
    t = _check_times(times)
    x0 = np.asarray(x0, dtype=float)
    check_consistent(g.U, x0, tol)
    n = g.U.ambient_dim
    if g.U.is_zero:
        return SolutionTrace(t, np.zeros((t.size, n)), x0.copy(), "semigroup")
    B = g.U.basis
    c0 = B.T @ x0
    states = np.empty((t.size, n))
    for i, ti in enumerate(t):
        states[i] = B @ (g.semigroup(ti) @ c0) if ti > 0 else B @ c0
    return SolutionTrace(t, states, x0.copy(), "semigroup")


def verify_mild(p: Pencil, tr: SolutionTrace, min_density: float = 9.0) -> np.ndarray:
    """Mild-solution residual profile of a trace.

    ``r(t_i) = ||E u(t_i) + A Q(t_i) - E x0|| / max(1, ||E x0||)`` where
    ``Q`` is the cumulative composite-Simpson integral of the stored
    states.  The profile is stored on ``tr.residual_profile`` and returned.
    """
    t = np.asarray(tr.times, dtype=float)
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    if t.size > 1:
        density = (t.size - 1) / (t[-1] - t[0])
        if density < min_density:
            raise ValueError(
                f"time grid has {density:.2f} points per unit time; at least {min_density} needed"
            )
    u = np.asarray(tr.states, dtype=float)
    ex0 = p.E @ tr.x0
    if t.size == 1:
        q = np.zeros_like(u)
    else:
        q = cumulative_simpson(u, x=t, axis=0, initial=0.0)
    r = np.linalg.norm(u @ p.E.T + q @ p.A.T - ex0, axis=1) / max(1.0, float(np.linalg.norm(ex0)))
    tr.residual_profile = r
    return r


def verify_generator_relation(
    p: Pencil, g: Generator, samples: int = 20, rng: np.random.Generator | None = None
) -> float:
    """``max ||E(-C x) + A x||`` over random unit ``x`` in ``V``."""
    if g.V.is_zero:
        return 0.0
    rng = np.random.default_rng() if rng is None else rng
    c = rng.standard_normal((g.V.dim, samples))
    c /= np.linalg.norm(c, axis=0, keepdims=True)
    x = g.V.basis @ c
    B = g.U.basis
    cx = B @ (g.C_matrix @ (B.T @ x))
    return float(np.linalg.norm(-(p.E @ cx) + p.A @ x, axis=0).max())
