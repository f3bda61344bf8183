"""Tolerance-aware subspace arithmetic on R^n (or C^n).

A :class:`Subspace` stores an orthonormal basis as the columns of a
``(n, k)`` array.  All rank decisions are relative: a singular value ``s``
of the matrix being decomposed is kept when ``s > tol * scale``, where
``scale`` is the largest singular value of that matrix (for ``image`` and
``preimage``: of the map ``M`` itself, so that rounding noise in an almost
vanishing product is not mistaken for signal).

Passing ``tol=0`` selects the default rule ``max(rows, cols) * eps``.

Computed subspaces also carry ``accuracy``, an estimate of the sine error
of their basis (``max(shape) * eps`` times the condition number of the
kept part, plus propagated input error).  ``preimage`` never cuts below
``10 * accuracy`` of its target space: a basis that is only accurate to
``delta`` leaves residuals of size ``delta * ||M||`` on vectors that do
map into the space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionError

__all__ = [
    "Subspace",
    "Relation",
    "default_tol",
    "span",
    "zero",
    "full",
    "image",
    "preimage",
    "compare",
    "distance",
    "sine_angle",
    "random_unit_vectors",
]

EPS = np.finfo(float).eps


def default_tol(shape: Sequence[int]) -> float:
    """Relative numerical-rank tolerance ``max(shape) * eps``."""
    return max(1, *shape) * EPS


def _resolve(tol: float, shape) -> float:
    if tol < 0:
        raise ValueError(f"tol must be nonnegative, got {tol}")
    return tol if tol > 0 else default_tol(shape)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of an ``ambient_dim``-dimensional coordinate space.

    Parameters
    ----------
    basis : ndarray, shape (ambient_dim, dim)
        Orthonormal columns.  Use :func:`span` to build one from an
        arbitrary spanning set.
    tol : float
        Relative rank tolerance used when the basis was computed.
    accuracy : float
        Estimated sine error of the basis (0 for exactly known bases).
    """

    basis: np.ndarray
    tol: float = 0.0
    accuracy: float = 0.0
    _complement: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        b = np.asarray(self.basis)
        if b.ndim != 2 or b.shape[0] < 1:
            raise DimensionError(f"basis must be a 2-D array with >= 1 row, got shape {b.shape}")
        object.__setattr__(self, "basis", _frozen(b))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    @property
    def dtype(self):
        return self.basis.dtype

    def complement(self) -> np.ndarray:
        """Orthonormal basis of the orthogonal complement, shape ``(n, n - dim)``."""
        if self._complement is None:
            n, k = self.basis.shape
            if k == 0:
                q = np.eye(n, dtype=self.basis.dtype)
            elif k == n:
                q = np.zeros((n, 0), dtype=self.basis.dtype)
            else:
                u, _, _ = scipy.linalg.svd(self.basis, full_matrices=True)
                q = u[:, k:]
            object.__setattr__(self, "_complement", _frozen(q))
        return self._complement

    def project(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection of ``x`` (vector or columns) onto the subspace."""
        b = self.basis
        return b @ (b.conj().T @ x)

    def coordinates(self, x: np.ndarray) -> np.ndarray:
        """Coefficients of the projection of ``x`` in the stored basis."""
        return self.basis.conj().T @ x

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def __len__(self) -> int:
        return self.dim

    def __repr__(self) -> str:
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def zero(ambient_dim: int, dtype=float) -> Subspace:
    return Subspace(np.zeros((ambient_dim, 0), dtype=dtype))


def full(ambient_dim: int, dtype=float) -> Subspace:
    return Subspace(np.eye(ambient_dim, dtype=dtype))


def _range_basis(m: np.ndarray, tol: float, scale: float, in_err: float = 0.0):
    """Range basis of ``m`` and its estimated sine error.

    ``in_err`` is an absolute perturbation level of ``m`` (beyond rounding).
    """
    if m.shape[1] == 0:
        return np.zeros((m.shape[0], 0), dtype=m.dtype), 0.0
    u, s, _ = scipy.linalg.svd(m, full_matrices=False)
    rank = int(np.count_nonzero(s > tol * scale))
    if rank == 0:
        return u[:, :0], 0.0
    acc = (max(m.shape) * EPS * float(s[0]) + in_err) / float(s[rank - 1])
    return u[:, :rank], acc


def span(vectors, tol: float = 0.0, ambient_dim: int | None = None) -> Subspace:
    """Subspace spanned by ``vectors``.

    ``vectors`` is either a 2-D array whose columns are the spanning
    vectors or an iterable of 1-D vectors.  An empty spanning set needs
    ``ambient_dim``.

    >>> span([[1.0, 0.0], [2.0, 0.0]]).dim
    1
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        m = vectors
    else:
        vecs = [np.asarray(v) for v in vectors]
        if not vecs:
            if ambient_dim is None:
                raise DimensionError("empty spanning set needs an explicit ambient_dim")
            return zero(ambient_dim)
        n = vecs[0].shape[0]
        if any(v.ndim != 1 or v.shape[0] != n for v in vecs):
            raise DimensionError("all spanning vectors must be 1-D with a common length")
        m = np.column_stack(vecs)
    if ambient_dim is not None and m.shape[0] != ambient_dim:
        raise DimensionError(f"vectors have length {m.shape[0]}, expected {ambient_dim}")
    if m.dtype.kind not in "fc":
        m = m.astype(float)
    t = _resolve(tol, m.shape)
    if m.shape[1] == 0:
        return Subspace(np.zeros((m.shape[0], 0), dtype=m.dtype), tol=t)
    smax = np.linalg.norm(m, 2)
    b, acc = _range_basis(m, t, smax)
    return Subspace(b, tol=t, accuracy=acc)


def _check_map(m, in_dim=None, out_dim=None) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2:
        raise DimensionError(f"linear map must be a 2-D array, got shape {m.shape}")
    if in_dim is not None and m.shape[1] != in_dim:
        raise DimensionError(f"map has {m.shape[1]} columns, subspace lives in dimension {in_dim}")
    if out_dim is not None and m.shape[0] != out_dim:
        raise DimensionError(f"map has {m.shape[0]} rows, subspace lives in dimension {out_dim}")
    if m.dtype.kind not in "fc":
        m = m.astype(float)
    return m


def image(m, s: Subspace, tol: float = 0.0) -> Subspace:
    """``M[S]``: span of ``M b`` over the basis vectors ``b`` of ``S``."""
    m = _check_map(m, in_dim=s.ambient_dim)
    t = _resolve(tol, m.shape)
    if s.is_zero or m.shape[0] == 0:
        return Subspace(np.zeros((m.shape[0], 0), dtype=np.result_type(m, s.basis)), tol=t)
    scale = np.linalg.norm(m, 2)
    b, acc = _range_basis(m @ s.basis, t, scale, s.accuracy * scale)
    return Subspace(b, tol=t, accuracy=acc)


def preimage(m, s: Subspace, tol: float = 0.0) -> Subspace:
    """``M^{-1}[S] = {x : M x in S}``.

    Computed as the nullspace of ``Q^H M`` where ``Q`` spans the orthogonal
    complement of ``S``; this has the same nullspace and singular values as
    ``(I - P_S) M``.  Singular values up to ``max(tol, 10 * S.accuracy)``
    times ``||M||`` count as zero.
    """
    m = _check_map(m, out_dim=s.ambient_dim)
    n = m.shape[1]
    t = _resolve(tol, m.shape)
    dtype = np.result_type(m, s.basis)
    if s.is_full:
        return Subspace(np.eye(n, dtype=dtype), tol=t)
    r = s.complement().conj().T @ m
    scale = np.linalg.norm(m, 2)
    _, sv, vh = scipy.linalg.svd(r, full_matrices=True)
    cut = max(t, 10.0 * s.accuracy) * scale
    rank = int(np.count_nonzero(sv > cut))
    acc = 0.0
    if rank:
        acc = (max(m.shape) * EPS + s.accuracy) * scale / float(sv[rank - 1])
    return Subspace(vh[rank:].conj().T.astype(dtype, copy=False), tol=t, accuracy=acc)


def _sine_into(s1: Subspace, s2: Subspace) -> float:
    """Sine of the largest principal angle between ``S1`` and its projection on ``S2``."""
    if s1.is_zero or s2.is_full:
        return 0.0
    if s2.is_zero:
        return 1.0
    resid = s1.basis - s2.project(s1.basis)
    return float(min(1.0, np.linalg.norm(resid, 2)))


@dataclass(frozen=True)
class Relation:
    """Outcome of :func:`compare`.

    ``relation`` is one of ``"equal"``, ``"subset"`` (S1 a proper subspace
    of S2), ``"superset"`` or ``"incomparable"``.  ``sin_12`` measures how
    far S1 sticks out of S2, ``sin_21`` the converse.
    """

    relation: str
    sin_12: float
    sin_21: float
    tol: float

    @property
    def first_in_second(self) -> bool:
        return self.relation in ("equal", "subset")

    @property
    def second_in_first(self) -> bool:
        return self.relation in ("equal", "superset")


def compare(s1: Subspace, s2: Subspace, tol: float = 0.0) -> Relation:
    """Decide containment between two subspaces via principal angles.

    ``S1 <= S2`` iff the sine of the largest principal angle between ``S1``
    and its projection onto ``S2`` is at most ``tol`` (default
    ``10 * n * eps``).
    """
    if s1.ambient_dim != s2.ambient_dim:
        raise DimensionError(
            f"ambient dimensions differ: {s1.ambient_dim} vs {s2.ambient_dim}"
        )
    t = tol if tol > 0 else 10 * default_tol((s1.ambient_dim,))
    a = _sine_into(s1, s2)
    b = _sine_into(s2, s1)
    sub, sup = a <= t, b <= t
    if sub and sup:
        rel = "equal"
    elif sub:
        rel = "subset"
    elif sup:
        rel = "superset"
    else:
        rel = "incomparable"
    return Relation(rel, a, b, t)


def distance(s: Subspace, x: np.ndarray) -> float:
    """Euclidean distance from ``x`` to ``S``."""
    x = np.asarray(x)
    if x.shape[0] != s.ambient_dim:
        raise DimensionError(f"vector length {x.shape[0]} != ambient dimension {s.ambient_dim}")
    return float(np.linalg.norm(x - s.project(x)))


def sine_angle(s: Subspace, x: np.ndarray) -> float:
    """Sine of the angle between ``x`` and ``S``; zero for ``x = 0``."""
    nx = float(np.linalg.norm(x))
    if nx == 0.0:
        return 0.0
    return min(1.0, distance(s, x) / nx)


def random_unit_vectors(s: Subspace, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` vectors drawn uniformly from the unit sphere of ``S``, as columns."""
    if s.is_zero:
        return np.zeros((s.ambient_dim, 0))
    c = rng.standard_normal((s.dim, count))
    c /= np.linalg.norm(c, axis=0, keepdims=True)
    return s.basis @ c
