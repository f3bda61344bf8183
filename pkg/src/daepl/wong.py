"""Wong sequences, consistent initial values and resolvent identity checks.

The Wong sequence of ``(E, A)`` is ``IV_0 = R^n`` and
``IV_{k+1} = A^{-1}[E[IV_k]]``.  The chain is nested and, in finite
dimensions, becomes stationary after at most ``ind(E, A) + 1`` steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ChainTooShortError, DimensionError, StabilizationError
from .pencil import IndexEstimate, Pencil, resolvent_apply
from .subspace import (
    Subspace,
    compare,
    default_tol,
    distance,
    full,
    image,
    preimage,
    random_unit_vectors,
    sine_angle,
)

__all__ = [
    "WongResult",
    "stabilization_tol",
    "wong_sequence",
    "consistent_space",
    "LemmaReport",
    "lemma_identity_check",
    "expansion_defects",
]


@dataclass
class WongResult:
    spaces: list
    stabilized_at: int | None
    tol: float
    compare_tol: float
    index_used: IndexEstimate | None = None

    @property
    def dims(self) -> list:
        return [s.dim for s in self.spaces]

    @property
    def limit(self) -> Subspace:
        """The last computed space (the stationary one once stabilized)."""
        return self.spaces[-1]

    def level(self, k: int) -> Subspace:
        """``IV_k``; beyond the computed chain only if the chain stabilized."""
        if k < len(self.spaces):
            return self.spaces[k]
        if self.stabilized_at is None:
            raise ChainTooShortError(
                f"chain has {len(self.spaces)} spaces and did not stabilize; IV_{k} unavailable"
            )
        return self.spaces[-1]

    def to_dict(self) -> dict:
        return {
            "dims": self.dims,
            "stabilized_at": self.stabilized_at,
            "bases": [s.basis.tolist() for s in self.spaces],
        }


def stabilization_tol(p: Pencil, tol: float = 0.0) -> float:
    """Sine threshold ``10 * tol * max(1, ||E||, ||A||)`` for subspace equality."""
    t = tol if tol > 0 else default_tol((p.n, p.n))
    return 10.0 * t * max(1.0, p.norm_E, p.norm_A)


def wong_sequence(
    p: Pencil,
    tol: float = 0.0,
    max_steps: int | None = None,
    index: IndexEstimate | None = None,
    strict: bool = True,
) -> WongResult:
    """Iterate ``IV_{k+1} = A^{-1}[E[IV_k]]`` until two consecutive spaces agree.

    Agreement is decided by :func:`compare` at ``10 * tau`` with
    ``tau = tol * max(1, ||E||, ||A||)`` (``tol`` being the relative rank
    tolerance, default ``n * eps``), not by dimension alone.
    Reaching the zero space ends the chain immediately, since every later
    space is contained in it.

    With ``strict`` (the default) a chain that has not stabilized after
    ``max_steps`` (default ``n + 1``) raises :class:`StabilizationError`;
    otherwise it is returned with ``stabilized_at = None``.
    """
    n = p.n
    t = tol if tol > 0 else default_tol((n, n))
    steps = n + 1 if max_steps is None else int(max_steps)
    if steps < 1:
        raise ValueError("max_steps must be >= 1")
    ctol = stabilization_tol(p, t)
    spaces = [full(n)]
    stabilized = None
    for k in range(steps):
        cur = spaces[-1]
        if cur.is_zero:
            stabilized = k
            break
        nxt = preimage(p.A, image(p.E, cur, t), t)
        spaces.append(nxt)
        if compare(nxt, cur, ctol).relation == "equal":
            stabilized = k
            break
    if stabilized is None and strict:
        raise StabilizationError(
            f"Wong sequence did not stabilize within {steps} steps (dims {[s.dim for s in spaces]}); "
            "the rank tolerance is probably inappropriate for this pencil"
        )
    return WongResult(spaces=spaces, stabilized_at=stabilized, tol=t, compare_tol=ctol, index_used=index)


def consistent_space(p: Pencil, w: WongResult, idx: IndexEstimate) -> Subspace:
    """``U = IV_{ind+1}`` (closures are trivial in finite dimensions)."""
    if not w.spaces or w.spaces[0].ambient_dim != p.n:
        raise DimensionError("Wong chain does not belong to this pencil")
    return w.level(idx.index + 1)


@dataclass
class LemmaReport:
    """Maxima of the three resolvent-identity defects.

    ``commutation`` is ``||E R A x - A R E x||`` with ``R = (zE+A)^{-1}``;
    ``commutation_scaled`` divides it by ``cond(zE+A)``.  ``membership`` is
    ``dist(R E x, IV_{k+1}) / (||R E|| ||x||)``; it coincides with the sine
    of the angle between ``R E x`` and ``IV_{k+1}`` (kept as
    ``membership_sine``) unless ``R E x`` suffers cancellation, in which
    case the raw sine only measures rounding noise.
    ``expansion`` is ``||z R E x - x||`` at the largest real sample ``z``,
    over levels ``k >= expansion_from``; per-level values are kept in
    ``expansion_per_level``.
    """

    commutation: float
    commutation_scaled: float
    membership: float
    membership_sine: float
    expansion: float | None
    expansion_z: float | None
    expansion_from: int
    expansion_per_level: dict = field(default_factory=dict)
    membership_per_level: dict = field(default_factory=dict)


def lemma_identity_check(
    p: Pencil,
    w: WongResult,
    z_samples,
    x_samples: int = 8,
    rng: np.random.Generator | None = None,
    expansion_from: int | None = None,
) -> LemmaReport:
    """Check the commutation, invariance and expansion identities on random data.

    For each level ``IV_k`` of the chain, ``x_samples`` unit vectors are
    drawn from its unit sphere and combined with every ``z`` in
    ``z_samples``.  The expansion defect ``||z R(z) E x - x||`` only decays
    like ``1/z`` on levels beyond the index, so by default it is reported
    for ``k >= max(1, index + 1)`` when ``w.index_used`` is known, else for
    ``k >= 1``.
    """
    rng = np.random.default_rng() if rng is None else rng
    zs = [complex(z) for z in z_samples]
    if any(z == 0 for z in zs):
        raise ValueError("z = 0 is not allowed (the expansion formula divides by z)")
    if expansion_from is None:
        expansion_from = 1 if w.index_used is None else max(1, w.index_used.index + 1)
    real_z = [z.real for z in zs if z.imag == 0 and z.real > 0]
    z_exp = max(real_z) if real_z else None

    E, A = p.E, p.A
    comm = comm_scaled = memb = memb_sine = 0.0
    exp_per_level, memb_per_level = {}, {}
    for z in zs:
        m = p.matrix(z)
        s = np.linalg.svd(m, compute_uv=False)
        cond = float(s[0] / s[-1])
        re_norm = float(np.linalg.norm(resolvent_apply(p, z, E), 2))
        for k, space in enumerate(w.spaces):
            xs = random_unit_vectors(space, x_samples, rng)
            if xs.shape[1] == 0:
                continue
            nxt = w.level(k + 1)
            rex = resolvent_apply(p, z, E @ xs)
            rax = resolvent_apply(p, z, A @ xs)
            c = np.linalg.norm(E @ rax - A @ rex, axis=0).max()
            comm = max(comm, float(c))
            comm_scaled = max(comm_scaled, float(c) / cond)
            dist = np.array([distance(nxt, rex[:, j]) for j in range(rex.shape[1])])
            dm = float(dist.max()) / re_norm if re_norm > 0 else 0.0
            memb = max(memb, dm)
            memb_sine = max(memb_sine, max(sine_angle(nxt, rex[:, j]) for j in range(rex.shape[1])))
            memb_per_level[k] = max(memb_per_level.get(k, 0.0), dm)
            if z_exp is not None and z.real == z_exp and z.imag == 0 and k >= expansion_from:
                d = np.linalg.norm(z * rex - xs, axis=0).max()
                exp_per_level[k] = max(exp_per_level.get(k, 0.0), float(d))
    expansion = max(exp_per_level.values()) if exp_per_level else None
    return LemmaReport(
        commutation=comm,
        commutation_scaled=comm_scaled,
        membership=memb,
        membership_sine=memb_sine,
        expansion=expansion,
        expansion_z=z_exp,
        expansion_from=expansion_from,
        expansion_per_level=exp_per_level,
        membership_per_level=memb_per_level,
    )


def expansion_defects(p: Pencil, x, z_grid) -> tuple[np.ndarray, float]:
    """``||z (zE+A)^{-1} E x - x||`` on a real grid and its log-log slope.

    For ``x`` in the stationary Wong space the defect decays like ``1/z``.
    The slope is ``-inf`` when every defect vanishes.
    """
    x = np.asarray(x, dtype=float)
    z_grid = np.asarray(z_grid, dtype=float)
    ex = p.E @ x
    d = np.array([np.linalg.norm(z * resolvent_apply(p, z, ex) - x) for z in z_grid])
    pos = d > 0
    if pos.sum() < 2:
        return d, -np.inf
    slope, _ = np.polyfit(np.log(z_grid[pos]), np.log(d[pos]), 1)
    return d, float(slope)
