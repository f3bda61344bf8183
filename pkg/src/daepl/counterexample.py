"""Discretisation of the indicator/periodic-derivative pencil on L2(-2, 2).

``E`` multiplies by the indicator of ``[-1, 1]``; ``A`` multiplies by the
indicator of the complement and adds the periodic derivative.  The
derivative is discretised by central differences on the cell-midpoint grid
of ``(-2, 2]`` with wraparound, which keeps it exactly skew-symmetric.
Then ``Re <(zE+A)u, u> = Re z ||u_in||^2 + ||u_out||^2`` holds verbatim,
so ``||(zE+A)^{-1}|| <= 1/min(Re z, 1)`` at every grid size.

The pencil has index 0 for every ``n`` and ``E`` is injective on the
discrete ``IV_1``, but the injectivity gap shrinks as the mesh is refined:
the profile ``v = e^{-t}`` on ``[-2,-1]``, ``e^{4-t}`` on ``[1,2]``, zero
in between, is annihilated by ``E`` and approached by ``IV_1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from .pencil import Pencil, estimate_index, resolvent_norm
from .semigroup import injectivity_gap
from .subspace import Subspace, distance, full, image, preimage

__all__ = [
    "DiscretizedExample",
    "build_example",
    "witness_profile",
    "first_wong_space",
    "BoundReport",
    "verify_resolvent_bound",
    "energy_defect",
    "WitnessReport",
    "noninjectivity_witness",
    "witness_projection",
    "example_report",
]


@dataclass(frozen=True, eq=False)
class DiscretizedExample:
    n: int
    h: float
    grid: np.ndarray
    inside: np.ndarray
    pencil: Pencil
    D: np.ndarray


def _periodic_central_difference(n: int, h: float) -> np.ndarray:
    k = np.zeros((n, n))
    i = np.arange(n)
    k[i, (i + 1) % n] = 1.0 / (2.0 * h)
    return k - k.T


def build_example(n: int) -> DiscretizedExample:
    """Grid of ``n`` cells on ``(-2, 2]``; ``n`` must be even and ``>= 8``."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError("n must be an integer")
    if n < 8 or n % 2:
        raise ValueError(f"grid size must be even and >= 8, got {n}")
    n = int(n)
    h = 4.0 / n
    i = np.arange(n)
    grid = -2.0 + (i + 0.5) * h
    # midpoint 2(2i+1-n)/n lies in [-1, 1]; integer test, no rounding ties
    inside = 2 * np.abs(2 * i + 1 - n) <= n
    D = _periodic_central_difference(n, h)
    D.flags.writeable = False
    E = np.diag(inside.astype(float))
    A = np.diag((~inside).astype(float)) + D
    inside.flags.writeable = False
    grid.flags.writeable = False
    return DiscretizedExample(n, h, grid, inside, Pencil(E, A, label=f"indicator-periodic n={n}"), D)


def witness_profile(t) -> np.ndarray:
    """``e^{-t}`` on ``[-2,-1]``, ``e^{4-t}`` on ``[1,2]``, ``0`` elsewhere."""
    t = np.asarray(t, dtype=float)
    return np.where(t <= -1.0, np.exp(-t), 0.0) + np.where(t >= 1.0, np.exp(4.0 - t), 0.0)


def _witness_vector(d: DiscretizedExample) -> np.ndarray:
    v = witness_profile(d.grid)
    v[d.inside] = 0.0
    return v


def first_wong_space(d: DiscretizedExample) -> Subspace:
    """``IV_1 = A^{-1}[E[R^n]]`` of the discretised pencil."""
    p = d.pencil
    return preimage(p.A, image(p.E, full(d.n)))


@dataclass
class BoundReport:
    """Per-sample resolvent norms against ``1/min(Re z, 1)``."""

    z: list
    norms: list
    bounds: list
    passed: list
    slack: float = 1e-10

    @property
    def all_passed(self) -> bool:
        return all(self.passed)


def verify_resolvent_bound(d: DiscretizedExample, z_samples, slack: float = 1e-10) -> BoundReport:
    zs = [complex(z) for z in z_samples]
    bad = [z for z in zs if not z.real > 0]
    if bad:
        raise ValueError(f"resolvent bound needs Re z > 0; offending samples: {bad}")
    norms = ordered_map(lambda z: resolvent_norm(d.pencil, z), zs)
    bounds = [1.0 / min(z.real, 1.0) for z in zs]
    passed = [nr <= b + slack for nr, b in zip(norms, bounds)]
    return BoundReport(zs, norms, bounds, passed, slack)


def energy_defect(d: DiscretizedExample, u, z: complex) -> float:
    """``Re <(zE+A)u, u> - min(Re z, 1) ||u||^2`` (nonnegative up to rounding)."""
    u = np.asarray(u, dtype=complex)
    lhs = np.real(np.vdot(u, d.pencil.matrix(z) @ u))
    return float(lhs - min(complex(z).real, 1.0) * np.vdot(u, u).real)


@dataclass
class WitnessReport:
    n_list: list
    Ev_norm: list
    dist: list
    gap: list
    iv1_dims: list = field(default_factory=list)

    @staticmethod
    def _strictly_decreasing(xs) -> bool:
        return all(b < a for a, b in zip(xs, xs[1:]))

    @property
    def dist_decreasing(self) -> bool:
        return self._strictly_decreasing(self.dist)

    @property
    def gap_decreasing(self) -> bool:
        return self._strictly_decreasing(self.gap)

    @property
    def trend_holds(self) -> bool:
        return all(e == 0.0 for e in self.Ev_norm) and self.dist_decreasing and self.gap_decreasing


def _witness_one(n: int):
    d = build_example(n)
    v = _witness_vector(d)
    iv1 = first_wong_space(d)
    ev = float(np.linalg.norm(d.pencil.E @ v))
    rel = distance(iv1, v) / float(np.linalg.norm(v))
    return ev, rel, injectivity_gap(d.pencil, iv1), iv1.dim


def noninjectivity_witness(n_list) -> WitnessReport:
    """Trend of ``||E v_n||``, ``dist(v_n, IV_1)/||v_n||`` and ``sigma_min(E|IV_1)``."""
    ns = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_list must be strictly increasing")
    rows = ordered_map(_witness_one, ns)
    return WitnessReport(
        n_list=ns,
        Ev_norm=[r[0] for r in rows],
        dist=[r[1] for r in rows],
        gap=[r[2] for r in rows],
        iv1_dims=[r[3] for r in rows],
    )


def witness_projection(d: DiscretizedExample) -> tuple[np.ndarray, np.ndarray]:
    """``v_n`` and its orthogonal projection onto the discrete ``IV_1``."""
    v = _witness_vector(d)
    return v, first_wong_space(d).project(v)


DEFAULT_BOUND_SAMPLES = [complex(re, im) for re in (0.25, 0.5, 1.0, 2.0, 5.0)
                         for im in (-100.0, -10.0, 0.0, 10.0, 100.0)]


def example_report(n: int, n_list=(100, 200, 400, 800), rho0: float = 0.5, z_samples=None) -> dict:
    """JSON-ready summary of index, resolvent bound and the non-injectivity trend."""
    d = build_example(n)
    est = estimate_index(d.pencil, rho0)
    zs = DEFAULT_BOUND_SAMPLES if z_samples is None else z_samples
    bound = verify_resolvent_bound(d, zs)
    wit = noninjectivity_witness(n_list)
    return {
        "schema": 1,
        "n": n,
        "index": est.index,
        "fitted_exponent": est.fitted_exponent,
        "bound_check": [
            {"re": z.real, "im": z.imag, "norm": nr, "bound": b, "result": "pass" if ok else "fail"}
            for z, nr, b, ok in zip(bound.z, bound.norms, bound.bounds, bound.passed)
        ],
        "n_list": wit.n_list,
        "Ev_per_n": wit.Ev_norm,
        "gap_per_n": wit.gap,
        "dist_per_n": wit.dist,
        "gap_decreasing": wit.gap_decreasing,
        "dist_decreasing": wit.dist_decreasing,
    }
