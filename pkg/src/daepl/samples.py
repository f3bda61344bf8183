"""Reference pencils and random pencils with known structure.

Random pencils are assembled in quasi-Weierstrass form with orthogonal
outer factors,

    E = P diag(S, N) Q^T,    A = P diag(S J, I) Q^T,

with ``S`` a positive diagonal scaling, ``J`` a real matrix whose
eigenvalues have real part in ``[lam_min, lam_max]`` and ``N`` nilpotent.
For such a pencil the consistent space is ``Q[:, :r]``, the reduced
generator there is ``J`` and the index equals (nilpotency order of N) - 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.stats import ortho_group

from .pencil import Pencil

__all__ = ["p1", "p2", "KnownPencil", "random_pencil", "random_index0_pencil"]


def p1() -> Pencil:
    """``E = diag(1, 0)``, ``A = diag(2, 1)``: index 0, ``U = span e1``."""
    return Pencil(np.diag([1.0, 0.0]), np.diag([2.0, 1.0]), label="P1")


def p2() -> Pencil:
    """Nilpotent ``E = [[0, 1], [0, 0]]``, ``A = I``: index 1, ``U = {0}``."""
    return Pencil(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2), label="P2")


@dataclass(frozen=True, eq=False)
class KnownPencil:
    pencil: Pencil
    Q: np.ndarray
    r: int
    J: np.ndarray
    index: int
    rho0: float

    @property
    def consistent_basis(self) -> np.ndarray:
        return self.Q[:, : self.r]


def _stable_block(r: int, rng, lam_min: float, lam_max: float) -> np.ndarray:
    # real Schur-like block: 1x1 and 2x2 rotation blocks plus mild coupling
    t = np.zeros((r, r))
    i = 0
    while i < r:
        a = rng.uniform(lam_min, lam_max)
        if i + 1 < r and rng.random() < 0.4:
            b = rng.uniform(0.2, 1.5)
            t[i:i + 2, i:i + 2] = [[a, b], [-b, a]]
            i += 2
        else:
            t[i, i] = a
            i += 1
    t += 0.3 * np.triu(rng.standard_normal((r, r)), 2)
    if r <= 1:
        return t
    q = ortho_group.rvs(r, random_state=rng)
    return q @ t @ q.T


def _nilpotent(blocks, rng) -> np.ndarray:
    m = sum(blocks)
    n = np.zeros((m, m))
    off = 0
    for b in blocks:
        for j in range(b - 1):
            n[off + j, off + j + 1] = rng.uniform(0.5, 1.5)
        off += b
    return n


def _orth(n, rng):
    return ortho_group.rvs(n, random_state=rng) if n > 1 else np.ones((1, 1))


def random_pencil(
    n: int,
    r: int,
    nilpotent_blocks=None,
    rng: np.random.Generator | None = None,
    lam_min: float = 0.5,
    lam_max: float = 3.0,
) -> KnownPencil:
    """Random ``n x n`` pencil with dynamic part of size ``r``.

    ``nilpotent_blocks`` lists Jordan block sizes of ``N`` (summing to
    ``n - r``); the default is all ones, i.e. ``N = 0`` and index 0.
    """
    rng = np.random.default_rng() if rng is None else rng
    m = n - r
    blocks = [1] * m if nilpotent_blocks is None else list(nilpotent_blocks)
    if sum(blocks) != m or any(b < 1 for b in blocks):
        raise ValueError(f"nilpotent blocks {blocks} must be positive and sum to n - r = {m}")
    J = _stable_block(r, rng, lam_min, lam_max) if r else np.zeros((0, 0))
    S = np.diag(rng.uniform(0.5, 2.0, r))
    N = _nilpotent(blocks, rng) if m else np.zeros((0, 0))
    P, Q = _orth(n, rng), _orth(n, rng)
    E = P @ scipy.linalg.block_diag(S, N) @ Q.T
    A = P @ scipy.linalg.block_diag(S @ J, np.eye(m)) @ Q.T
    index = max(blocks, default=1) - 1
    return KnownPencil(Pencil(E, A, label=f"random n={n} r={r} N={blocks}"), Q, r, J, index, rho0=0.0)


def random_index0_pencil(n: int, r: int | None = None, rng: np.random.Generator | None = None,
                         **kw) -> KnownPencil:
    rng = np.random.default_rng() if rng is None else rng
    if r is None:
        r = int(rng.integers(1, n + 1))
    return random_pencil(n, r, None, rng, **kw)
