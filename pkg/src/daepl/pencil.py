"""Matrix pencils ``z -> zE + A``, resolvent solves and index estimation.

The index of a pencil is the smallest integer ``k`` with
``||(zE+A)^{-1}|| <= C |z|^k`` on a right half-plane ``Re z >= rho0``.
It is estimated here from the growth rate of the sampled resolvent norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._parallel import ordered_map
from .errors import DimensionError, SingularPencilError
from .subspace import EPS

__all__ = [
    "Pencil",
    "IndexEstimate",
    "singularity_threshold",
    "resolvent_apply",
    "resolvent_matrix",
    "resolvent_norm",
    "index_grid",
    "estimate_index",
]


@dataclass(frozen=True, eq=False)
class Pencil:
    """Square real pencil ``(E, A)`` acting on ``R^n``."""

    E: np.ndarray
    A: np.ndarray
    label: str = ""

    def __post_init__(self):
        E = np.array(self.E, dtype=float)
        A = np.array(self.A, dtype=float)
        if E.ndim != 2 or E.shape[0] != E.shape[1]:
            raise DimensionError(f"E must be square, got shape {E.shape}")
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"A must be square, got shape {A.shape}")
        if E.shape != A.shape:
            raise DimensionError(f"E is {E.shape[0]}x{E.shape[1]} but A is {A.shape[0]}x{A.shape[1]}")
        if E.shape[0] < 1:
            raise DimensionError("pencil dimension must be positive")
        E.flags.writeable = False
        A.flags.writeable = False
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.E.shape[0]

    @property
    def norm_E(self) -> float:
        return float(np.linalg.norm(self.E, 2))

    @property
    def norm_A(self) -> float:
        return float(np.linalg.norm(self.A, 2))

    @property
    def tau(self) -> float:
        """Absolute rank tolerance ``n * eps * max(||E||, ||A||)``."""
        return self.n * EPS * max(self.norm_E, self.norm_A, 1e-300)

    def matrix(self, z: complex) -> np.ndarray:
        """``zE + A`` as a complex array."""
        return complex(z) * self.E + self.A

    def scaled(self, c: float) -> "Pencil":
        return Pencil(c * self.E, c * self.A, label=self.label)


def singularity_threshold(m: np.ndarray, sigma_max: float | None = None) -> float:
    if sigma_max is None:
        sigma_max = float(np.linalg.norm(m, 2))
    return max(m.shape) * EPS * sigma_max


def _sigma(p: Pencil, z: complex):
    s = scipy.linalg.svd(p.matrix(z), compute_uv=False)
    return float(s[0]), float(s[-1])


def _checked_sigma_min(p: Pencil, z: complex) -> float:
    smax, smin = _sigma(p, z)
    thr = max(p.n * EPS * smax, np.finfo(float).tiny)
    if not smin > thr:
        raise SingularPencilError(z, smin, thr)
    return smin


def resolvent_apply(p: Pencil, z: complex, b) -> np.ndarray:
    """Solve ``(zE + A) x = b``.

    Raises
    ------
    SingularPencilError
        If ``sigma_min(zE+A) <= n * eps * sigma_max(zE+A)``.
    """
    b = np.asarray(b)
    if b.shape[0] != p.n:
        raise DimensionError(f"right-hand side has length {b.shape[0]}, pencil dimension is {p.n}")
    _checked_sigma_min(p, z)
    return scipy.linalg.solve(p.matrix(z), b.astype(complex))


def resolvent_matrix(p: Pencil, z: complex) -> np.ndarray:
    """Dense ``(zE + A)^{-1}``."""
    return resolvent_apply(p, z, np.eye(p.n))


def resolvent_norm(p: Pencil, z: complex) -> float:
    """Spectral norm ``1 / sigma_min(zE + A)`` of the resolvent."""
    return 1.0 / _checked_sigma_min(p, z)


@dataclass
class IndexEstimate:
    """Index of a pencil estimated from sampled resolvent norms.

    ``samples`` holds ``(z, ||(zE+A)^{-1}||)`` pairs; ``fitted_exponent`` is
    the log-log slope over the top decade of ``|z|``.
    """

    rho0: float
    samples: list
    fitted_exponent: float
    index: int
    constant_C: float
    ambiguous: bool = False
    decades: float = 4.0
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rho0": float(self.rho0),
            "index": int(self.index),
            "fitted_exponent": float(self.fitted_exponent),
            "constant_C": float(self.constant_C),
            "samples": [
                {"re": float(z.real), "im": float(z.imag), "norm": float(nrm)}
                for z, nrm in self.samples
            ],
        }


def index_grid(rho0: float, decades: float = 4.0, points: int = 40) -> np.ndarray:
    """Probe points: ``|z|`` geometric on ``[r0, r0*10**decades]``, ``r0 = max(1, rho0)``.

    Each radius is sampled once on the real axis (``z = r``) and once on
    the line ``Re z = rho0`` (``z = rho0 + i r``).
    """
    r0 = max(1.0, float(rho0))
    radii = np.geomspace(r0, r0 * 10.0**decades, points)
    return np.concatenate([radii.astype(complex), rho0 + 1j * radii])


def _fit_slope(samples, top_decade_from: float) -> float:
    sel = [(abs(z), nrm) for z, nrm in samples if abs(z) >= top_decade_from]
    x = np.log([a for a, _ in sel])
    y = np.log([nrm for _, nrm in sel])
    if np.ptp(x) == 0.0:
        return 0.0
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def estimate_index(
    p: Pencil,
    rho0: float,
    decades: float = 4.0,
    points: int = 40,
    max_extra_decades: int = 2,
    deadband: float = 0.25,
) -> IndexEstimate:
    """Estimate ``ind(E, A)`` from resolvent growth on ``Re z >= rho0``.

    The slope ``s`` of ``log ||(zE+A)^{-1}||`` against ``log |z|`` is fitted
    over the top decade of the grid.  If ``s`` lies within ``deadband`` of an
    integer it is rounded; otherwise the grid is extended by one decade at a
    time (up to ``max_extra_decades``) and the fit repeated.  A slope that
    stays ambiguous is rounded up and flagged.

    Raises
    ------
    SingularPencilError
        If any probe point is numerically outside the resolvent set.
    """
    if decades < 2:
        raise ValueError("the probe grid must span at least two decades")
    per_decade = points / decades

    def norm_at(z):
        return resolvent_norm(p, z)

    grid = index_grid(rho0, decades, points)
    norms = ordered_map(norm_at, grid)
    samples = list(zip(grid.tolist(), norms))
    span = decades
    warnings = []
    while True:
        rmax = max(1.0, float(rho0)) * 10.0**span
        slope = _fit_slope(samples, rmax / 10.0)
        frac = slope - math.floor(slope)
        ambiguous = deadband < frac < 1.0 - deadband
        if not ambiguous or span >= decades + max_extra_decades:
            break
        # extend by one decade above the current top
        k = max(2, int(round(per_decade)))
        radii = np.geomspace(rmax, rmax * 10.0, k + 1)[1:]
        ext = np.concatenate([radii.astype(complex), rho0 + 1j * radii])
        samples += list(zip(ext.tolist(), ordered_map(norm_at, ext)))
        span += 1
    if ambiguous:
        index = max(0, math.ceil(slope))
        warnings.append(
            f"fitted exponent {slope:.3f} is not within {deadband} of an integer; rounded up to {index}"
        )
    else:
        index = max(0, int(round(slope)))
    const = max(nrm / abs(z) ** index for z, nrm in samples)
    return IndexEstimate(
        rho0=float(rho0),
        samples=samples,
        fitted_exponent=slope,
        index=index,
        constant_C=float(const),
        ambiguous=ambiguous,
        decades=span,
        warnings=warnings,
    )
