"""Mild solutions by numerical Fourier-Laplace inversion.

For a consistent initial value ``x`` the transform of the mild solution
along ``Re z = rho`` is ``v(z) = (zE+A)^{-1} E x``.  Its expansion
``v(z) = x/z + c/z^2 + O(|z|^-3)`` has ``c = -lim z (zE+A)^{-1} A x``,
estimated by Richardson extrapolation on the real axis.  The two leading
terms (inverse ``(x + c t) * 1[t >= 0]``) are inverted exactly and only the
remainder ``w(z) = v(z) - x/z - c/z^2`` goes through the truncated Bromwich
integral

    u(t) = (x + c t) 1[t >= 0] + (1/2pi) int_{-Omega}^{Omega} e^{(i w + rho) t} w(i w + rho) dw,

discretised with the composite trapezoid rule on ``n_nodes`` equispaced
nodes.  Real pencils give ``v(conj z) = conj v(z)``, so only the nodes
with ``w > 0`` are evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContourError, DimensionError, TruncationError
from .pencil import Pencil
from .semigroup import CONSISTENCY_TOL, SolutionTrace, check_consistent
from .subspace import EPS, Subspace
from .wong import wong_sequence

__all__ = [
    "ContourSpec",
    "default_contour",
    "transform",
    "laplace_solution",
    "laplace_derivative",
    "invert",
    "hardy_profile",
    "hardy_norm_estimate",
    "support_residual",
    "second_coefficient",
]


@dataclass(frozen=True)
class ContourSpec:
    """Truncated Bromwich line ``rho + i w``, ``|w| <= omega_max``."""

    rho: float
    omega_max: float
    n_nodes: int = 4096

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"contour abscissa must be positive, got {self.rho}")
        if not self.omega_max > 0:
            raise ValueError(f"omega_max must be positive, got {self.omega_max}")
        if self.n_nodes < 64 or self.n_nodes % 2:
            raise ValueError(f"n_nodes must be even and >= 64, got {self.n_nodes}")

    def half_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Positive frequencies and their trapezoid weights."""
        w = np.linspace(-self.omega_max, self.omega_max, self.n_nodes)
        dw = w[1] - w[0]
        wt = np.full(self.n_nodes, dw)
        wt[0] = wt[-1] = dw / 2
        half = self.n_nodes // 2
        return w[half:], wt[half:]

    def nodes(self) -> np.ndarray:
        w, _ = self.half_nodes()
        return self.rho + 1j * w

    def with_nodes(self, n_nodes: int) -> "ContourSpec":
        return ContourSpec(self.rho, self.omega_max, n_nodes)


def default_contour(p: Pencil, rho0: float = 0.5, rho: float | None = None,
                    omega_max: float | None = None, n_nodes: int = 4096) -> ContourSpec:
    """Defaults ``rho = max(1, rho0 + 1)``, ``Omega = 200 (1 + ||A||/||E||)``."""
    if rho is None:
        rho = max(1.0, rho0 + 1.0)
    if omega_max is None:
        ne = p.norm_E
        omega_max = 200.0 * (1.0 + (p.norm_A / ne if ne > 0 else 0.0))
    return ContourSpec(float(rho), float(omega_max), int(n_nodes))


def transform(p: Pencil, x, z) -> np.ndarray:
    """``v(z) = (zE+A)^{-1} E x`` for an array of nodes ``z``; rows are nodes.

    Raises :class:`ContourError` at a node where ``zE+A`` is numerically
    singular.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    x = np.asarray(x, dtype=float)
    mats = z[:, None, None] * p.E[None] + p.A[None]
    rhs = np.broadcast_to((p.E @ x).astype(complex), (z.size, p.n))
    try:
        v = np.linalg.solve(mats, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        for zi, m in zip(z, mats):
            try:
                np.linalg.solve(m, rhs[0])
            except np.linalg.LinAlgError:
                raise ContourError(zi) from None
        raise
    # ||v|| <= ||Ex|| / sigma_min, so a larger solution means sigma_min <= threshold
    nrm_b = np.linalg.norm(rhs[0])
    if nrm_b > 0:
        nrm_m = np.linalg.norm(mats, ord="fro", axis=(1, 2))
        thr = p.n * EPS * nrm_m
        bad = ~np.isfinite(v).all(axis=1) | (np.linalg.norm(v, axis=1) * thr > nrm_b)
        if bad.any():
            raise ContourError(z[np.argmax(bad)])
    return v


def second_coefficient(p: Pencil, x, z_ref: float) -> np.ndarray:
    """``c`` in ``v(z) = x/z + c/z^2 + ...``, from ``f(z) = z (zE+A)^{-1} A x``.

    ``f(z) = -c + O(1/z)``; the estimate ``-(2 f(2 z_ref) - f(z_ref))``
    removes the ``1/z`` term.  Any value of ``c`` keeps the inversion exact
    (it only changes how fast the remainder decays).
    """
    x = np.asarray(x, dtype=float)
    ax = p.A @ x
    f = [z * transform_rhs(p, ax, z) for z in (z_ref, 2.0 * z_ref)]
    return -np.real(2.0 * f[1] - f[0])


def transform_rhs(p: Pencil, b, z: float) -> np.ndarray:
    """``(zE+A)^{-1} b`` at one real node, with the contour singularity check."""
    m = z * p.E + p.A
    try:
        y = np.linalg.solve(m, b)
    except np.linalg.LinAlgError:
        raise ContourError(z) from None
    if np.linalg.norm(y) * p.n * EPS * np.linalg.norm(m, ord="fro") > np.linalg.norm(b) > 0:
        raise ContourError(z)
    return y


def _remainder(p: Pencil, x, c: ContourSpec, tail_bound: float | None):
    om, wt = c.half_nodes()
    z = c.rho + 1j * om
    v = transform(p, x, z)
    if tail_bound is not None:
        nx = float(np.linalg.norm(x))
        tail = float(np.linalg.norm(v[-1])) * c.omega_max
        if tail > tail_bound * nx:
            raise TruncationError(
                f"||v(rho + i Omega)|| * Omega = {tail:.3e} exceeds {tail_bound} * ||x0|| = "
                f"{tail_bound * nx:.3e}; the transform does not decay like 1/|z|"
            )
    x = np.asarray(x, dtype=float)
    c2 = second_coefficient(p, x, c.omega_max)
    rem = v - x[None, :] / z[:, None] - c2[None, :] / (z * z)[:, None]
    return z, wt, rem, c2


def _bromwich(z, wt, values, times) -> np.ndarray:
    """``(1/pi) Re sum_j wt_j e^{z_j t} values_j`` for each time (rows)."""
    times = np.asarray(times, dtype=float)
    out = np.empty((times.size, values.shape[1]))
    for i, t in enumerate(times):
        out[i] = np.real((wt * np.exp(z * t)) @ values) / np.pi
    return out


def invert(p: Pencil, x0, c: ContourSpec, times, tail_bound: float | None = 2.0) -> np.ndarray:
    """Evaluate the inversion formula at arbitrary (also negative) times."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (p.n,):
        raise DimensionError(f"initial value has shape {x0.shape}, expected ({p.n},)")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if not np.any(x0):
        return np.zeros((times.size, p.n))
    z, wt, rem, c2 = _remainder(p, x0, c, tail_bound)
    u = _bromwich(z, wt, rem, times)
    pos = times >= 0
    u[pos] += x0[None, :] + times[pos, None] * c2[None, :]
    return u


def laplace_solution(
    p: Pencil,
    x0,
    c: ContourSpec | None = None,
    times=None,
    space: Subspace | None = None,
    rho0: float = 0.5,
    tail_bound: float | None = 2.0,
    tol: float = CONSISTENCY_TOL,
) -> SolutionTrace:
    """Mild solution from the transform ``v(z) = (zE+A)^{-1} E x0``.

    ``x0`` must lie in ``space`` (default: the stationary Wong space of
    ``p``); the route is not attempted otherwise.
    """
    x0 = np.asarray(x0, dtype=float)
    if space is None:
        space = wong_sequence(p).limit
    check_consistent(space, x0, tol)
    c = default_contour(p, rho0) if c is None else c
    if times is None:
        times = np.linspace(0.0, 1.0, 201)
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0 or np.any(t < 0) or np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be nonnegative and strictly increasing")
    states = invert(p, x0, c, t, tail_bound)
    return SolutionTrace(t, states, x0.copy(), "laplace", pencil=p, contour=c)


def laplace_derivative(p: Pencil, x0, c: ContourSpec, times) -> np.ndarray:
    """Inversion of ``z v(z) - x0``, i.e. ``u'`` for ``t > 0``.

    ``z v(z) - x0 = c/z + z w(z)``, so ``u'(t) = c + L^{-1}[z w](t)``.
    """
    x0 = np.asarray(x0, dtype=float)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if not np.any(x0):
        return np.zeros((times.size, p.n))
    z, wt, rem, c2 = _remainder(p, x0, c, None)
    du = _bromwich(z, wt, z[:, None] * rem, times)
    du[times > 0] += c2
    return du


def support_residual(tr: SolutionTrace, negative_times) -> float:
    """Largest ``||u(t)||`` of the inversion formula at negative times.

    A causal solution vanishes for ``t < 0``; the returned value measures
    quadrature and truncation error of the contour used for ``tr``.
    """
    if tr.provenance != "laplace" or tr.pencil is None or tr.contour is None:
        raise ValueError("support_residual needs a trace produced by laplace_solution")
    t = np.asarray(negative_times, dtype=float)
    if np.any(t >= 0):
        raise ValueError("support check times must be negative")
    u = invert(tr.pencil, tr.x0, tr.contour, t, tail_bound=None)
    return float(np.linalg.norm(u, axis=1).max()) if t.size else 0.0


def hardy_profile(p: Pencil, x0, mu_samples, omega_max: float, n_nodes: int = 4096):
    """Truncated ``int ||v(it + mu)||^2 dt`` per ``mu`` plus a tail estimate.

    Returns ``(integrals, tails)``; the tail assumes ``||v|| ~ K/|t|`` beyond
    the truncation, giving ``2 ||v(i Omega + mu)||^2 Omega``.
    """
    x0 = np.asarray(x0, dtype=float)
    mus = np.asarray(mu_samples, dtype=float)
    ints = np.zeros(mus.size)
    tails = np.zeros(mus.size)
    if not np.any(x0):
        return ints, tails
    for i, mu in enumerate(mus):
        c = ContourSpec(mu, omega_max, n_nodes)
        om, wt = c.half_nodes()
        v = transform(p, x0, mu + 1j * om)
        ints[i] = 2.0 * float(wt @ np.sum(np.abs(v) ** 2, axis=1))
        tails[i] = 2.0 * float(np.sum(np.abs(v[-1]) ** 2)) * omega_max
    return ints, tails


def hardy_norm_estimate(p: Pencil, x0, rho: float, mu_samples, omega_max: float | None = None,
                        n_nodes: int = 4096) -> float:
    """``max_mu`` of the truncated squared Hardy-space integral along ``Re z = mu``."""
    mus = np.asarray(mu_samples, dtype=float)
    if np.any(mus < rho):
        raise ValueError("all mu samples must satisfy mu >= rho")
    if omega_max is None:
        omega_max = default_contour(p, rho=max(rho, 1e-12)).omega_max
    ints, _ = hardy_profile(p, x0, mus, omega_max, n_nodes)
    return float(ints.max()) if ints.size else 0.0
