import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from daepl import samples
from daepl.counterexample import build_example, first_wong_space
from daepl.errors import ContourError, InconsistentInitialValueError, TruncationError
from daepl.laplace import (
    ContourSpec,
    default_contour,
    hardy_norm_estimate,
    hardy_profile,
    invert,
    laplace_derivative,
    laplace_solution,
    support_residual,
    transform,
)
from daepl.pencil import Pencil
from daepl.semigroup import verify_mild
from daepl.subspace import span

E1 = np.array([1.0, 0.0])
T = np.linspace(0.0, 1.0, 201)


def _rel_l2(u, ref, t):
    return math.sqrt(trapezoid(np.sum((u - ref) ** 2, axis=1), t) / trapezoid(np.sum(ref**2, axis=1), t))


def test_contour_validation():
    for kw in ({"rho": 0.0, "omega_max": 1.0}, {"rho": 1.0, "omega_max": -1.0},
               {"rho": 1.0, "omega_max": 1.0, "n_nodes": 63}, {"rho": 1.0, "omega_max": 1.0, "n_nodes": 32}):
        with pytest.raises(ValueError):
            ContourSpec(**kw)


def test_contour_defaults():
    c = default_contour(samples.p1(), rho0=0.5)
    assert c.rho == 1.5 and c.omega_max == pytest.approx(600.0) and c.n_nodes == 4096
    assert default_contour(samples.p1(), rho0=-3.0).rho == 1.0
    w, wt = c.half_nodes()
    assert w.size == 2048 and np.all(w > 0)
    # the half nodes carry half of the full trapezoid weight
    assert 2 * wt.sum() == pytest.approx(2 * c.omega_max)


def test_p1_closed_form():
    p = samples.p1()
    c = ContourSpec(1.5, 200.0, 4096)
    tr = laplace_solution(p, E1, c, T)
    ref = np.column_stack([np.exp(-2 * T), np.zeros_like(T)])
    assert _rel_l2(tr.states, ref, T) <= 1e-3
    assert tr.provenance == "laplace"


def test_zero_initial_value():
    p = samples.p1()
    tr = laplace_solution(p, np.zeros(2), times=T)
    assert not tr.states.any()
    assert support_residual(tr, [-1.0, -0.5]) == 0.0


def test_p2_not_attempted():
    p = samples.p2()
    with pytest.raises(InconsistentInitialValueError):
        laplace_solution(p, E1)


def test_contour_through_pole():
    # zE + A is singular at z = 1.5, a contour abscissa
    p = Pencil(np.diag([1.0, 0.0]), np.diag([-1.5, 1.0]))
    with pytest.raises(ContourError):
        transform(p, E1, [1.5 + 0j])


def test_truncation_diagnostic():
    p = samples.p1()
    with pytest.raises(TruncationError):
        invert(p, E1, ContourSpec(1.5, 200.0, 4096), T, tail_bound=0.5)


def refinement_family(c, counts):
    """Contours with the node spacing of ``c`` and the given node counts."""
    dw = 2 * c.omega_max / (c.n_nodes - 1)
    return [ContourSpec(c.rho, dw * (n - 1) / 2, n) for n in counts]


NEG = np.linspace(-1.0, 0.0, 200, endpoint=False)


def test_support_residual_default_contour():
    p = samples.p1()
    tr = laplace_solution(p, E1, times=T)
    assert support_residual(tr, [-1.0, -0.5, -0.1]) <= 1e-3
    assert support_residual(tr, NEG) <= 1e-3


def test_support_residual_refinement():
    p = samples.p1()
    fam = refinement_family(default_contour(p), (64, 256, 1024, 4096))
    res = [support_residual(laplace_solution(p, E1, c, T), NEG) for c in fam]
    assert res[0] > 1e-3
    assert all(a / b >= 4 for a, b in zip(res, res[1:]))


def test_coarse_contour_aliases():
    # 64 nodes on [-600, 600]: the trapezoid period pi * 63 / 600 is shorter than [-1, 0)
    p = samples.p1()
    tr = laplace_solution(p, E1, default_contour(p).with_nodes(64), T)
    assert support_residual(tr, NEG) > 1e-2


def test_support_residual_needs_laplace_trace():
    from daepl.semigroup import build_generator, evolve

    p = samples.p1()
    tr = evolve(build_generator(p, span([E1])), E1, T)
    with pytest.raises(ValueError):
        support_residual(tr, [-1.0])
    tr2 = laplace_solution(p, E1, times=T)
    with pytest.raises(ValueError):
        support_residual(tr2, [0.5])


def test_laplace_mild_residual():
    p = samples.p1()
    tr = laplace_solution(p, E1, times=T)
    assert verify_mild(p, tr).max() <= 1e-3
    assert _rel_l2(tr.states, np.column_stack([np.exp(-2 * T), 0 * T]), T) <= 1e-6


def test_derivative_relation():
    p = samples.p1()
    c = ContourSpec(1.5, 200.0, 4096)
    t = np.linspace(0.2, 0.8, 61)
    u = laplace_solution(p, E1, c, np.concatenate([[0.0], t])).states[1:]
    du = laplace_derivative(p, E1, c, t)
    h = t[1] - t[0]
    fd = np.gradient(u, h, axis=0)
    err = np.abs(fd[1:-1] - du[1:-1]).max()
    ref = np.abs(-2 * np.exp(-2 * t)).max()
    assert err <= 5 * h**2 * 8 + 1e-3 * ref


def test_initial_value_recovered_as_contour_refines():
    p = samples.p1()
    errs = []
    for om in (50.0, 200.0, 800.0):
        tr = laplace_solution(p, E1, ContourSpec(1.5, om, 4 * int(om) * 4), [0.0, 1e-9])
        errs.append(np.linalg.norm(tr.states[1] - E1))
    assert errs[0] > errs[1] > errs[2]


def test_hardy_closed_form():
    p = samples.p1()
    mus = np.array([1.0, 1.5, 3.0])
    om = 2000.0
    ints, tails = hardy_profile(p, E1, mus, om, 16384)
    exact_trunc = 2 * np.arctan(om / (mus + 2)) / (mus + 2)
    assert np.allclose(ints, exact_trunc, rtol=1e-6)
    assert np.allclose(ints + tails, np.pi / (mus + 2), rtol=1e-3)
    assert hardy_norm_estimate(p, E1, 1.0, mus, om, 16384) == pytest.approx(ints[0])
    assert hardy_norm_estimate(p, np.zeros(2), 1.0, mus, om) == 0.0
    with pytest.raises(ValueError):
        hardy_norm_estimate(p, E1, 2.0, mus, om)


def test_hardy_example_decreasing():
    d = build_example(200)
    x0 = first_wong_space(d).basis[:, 0]
    mus = [1.0, 1.5, 2.0, 4.0]
    ints, _ = hardy_profile(d.pencil, x0, mus, 400.0, 4096)
    assert np.all(np.isfinite(ints)) and np.all(np.diff(ints) < 0)
