"""``daepl`` command-line interface.

Subcommands
-----------
analyze   index, Wong chain, consistent space and generator of a pencil
solve     mild solution by semigroup evolution and/or Laplace inversion
example   discretised indicator/periodic-derivative counterexample
check     resolvent-identity and solution property checks with residual maxima

Exit codes: 0 success, 1 input error, 2 the requested object does not exist
for this pencil (uncertified generator, inconsistent initial value, contour
failure).
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

from . import io
from .counterexample import build_example, example_report, witness_projection
from .errors import (
    ContourError,
    DaeplError,
    DimensionError,
    DomainDefectError,
    InconsistentInitialValueError,
    InjectivityGapError,
    MatrixMarketError,
    SingularPencilError,
    StabilizationError,
    TruncationError,
)
from .laplace import ContourSpec, default_contour, laplace_solution
from .pencil import Pencil, estimate_index
from .semigroup import (
    Generator,
    build_generator,
    default_gap_threshold,
    evolve,
    injectivity_gap,
    verify_generator_relation,
    verify_mild,
)
from .subspace import random_unit_vectors, sine_angle
from .wong import WongResult, consistent_space, lemma_identity_check, wong_sequence

__all__ = ["AnalysisReport", "main", "build_parser"]

EXIT_OK, EXIT_INPUT, EXIT_NOT_CERTIFIED = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class AnalysisReport:
    pencil_label: str
    n: int
    rho0: float
    index: int
    fitted_exponent: float
    wong_dims: list
    stabilized_at: int | None
    U_dim: int
    injectivity_gap: float | None
    generator_built: bool
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"schema": 1, **asdict(self)}


@dataclass
class _Analysis:
    pencil: Pencil
    report: AnalysisReport
    wong: WongResult
    generator: Generator | None
    failure: str | None


def _load_pencil(e_path: str, a_path: str) -> Pencil:
    E = io.read_matrix(e_path)
    A = io.read_matrix(a_path)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise DimensionError(f"E must be square, got shape {E.shape}")
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"A must be square, got shape {A.shape}")
    if E.shape != A.shape:
        raise DimensionError(f"dimension mismatch: E is {E.shape[0]}x{E.shape[1]}, A is {A.shape[0]}x{A.shape[1]}")
    return Pencil(E, A, label=f"{Path(e_path).stem},{Path(a_path).stem}")


def _analyze(p: Pencil, args) -> _Analysis:
    tol = args.tol or 0.0
    try:
        est = estimate_index(p, args.rho0, decades=args.grid_decades)
    except SingularPencilError as exc:
        raise CliError(f"resolvent set probe failed: {exc}", EXIT_INPUT) from None
    try:
        w = wong_sequence(p, tol=tol, index=est)
    except StabilizationError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    warnings = list(est.warnings)
    U = consistent_space(p, w, est)
    gap = injectivity_gap(p, U)
    gen, failure = None, None
    try:
        gen = build_generator(p, U, w)
    except InjectivityGapError as exc:
        failure = str(exc)
    except DomainDefectError as exc:
        failure = str(exc)
    if failure:
        warnings.append(f"generator not certified: {failure}")
    elif not U.is_zero:
        thr = default_gap_threshold(p, U)
        if gap < 1e3 * thr:
            warnings.append(f"injectivity gap {gap:.3e} is within a factor 1e3 of the threshold {thr:.3e}")
    report = AnalysisReport(
        pencil_label=p.label,
        n=p.n,
        rho0=float(args.rho0),
        index=est.index,
        fitted_exponent=est.fitted_exponent,
        wong_dims=w.dims,
        stabilized_at=w.stabilized_at,
        U_dim=U.dim,
        injectivity_gap=None if math.isinf(gap) else gap,
        generator_built=gen is not None,
        warnings=warnings,
    )
    return _Analysis(p, report, w, gen, failure)


def _emit(text: str, out: str | None) -> None:
    if out:
        io.atomic_write(out, text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    an = _analyze(_load_pencil(args.E, args.A), args)
    _emit(io.dumps_json(an.report.to_dict()), args.out)
    if not an.report.generator_built:
        print(f"error: {an.failure}", file=sys.stderr)
        return EXIT_NOT_CERTIFIED
    return EXIT_OK


def _time_grid(t_end: float, dt: float) -> np.ndarray:
    if not t_end > 0 or not dt > 0:
        raise CliError("--t-end and --dt must be positive", EXIT_INPUT)
    steps = int(round(t_end / dt))
    if steps < 1 or not math.isclose(steps * dt, t_end, rel_tol=1e-9):
        raise CliError(f"--t-end {t_end} is not an integer multiple of --dt {dt}", EXIT_INPUT)
    return np.linspace(0.0, t_end, steps + 1)


def _contour(p: Pencil, args) -> ContourSpec:
    return default_contour(
        p, args.rho0, rho=args.contour_rho, omega_max=args.contour_omega, n_nodes=args.contour_nodes
    )


def _l2_discrepancy(t, u, ref) -> float:
    num = math.sqrt(trapezoid(np.sum((u - ref) ** 2, axis=1), t))
    den = math.sqrt(trapezoid(np.sum(ref**2, axis=1), t))
    return num / den if den > 0 else num


def cmd_solve(args) -> int:
    p = _load_pencil(args.E, args.A)
    x0 = io.read_vector(args.x0)
    if x0.shape != (p.n,):
        raise DimensionError(f"initial value has {x0.size} entries, pencil dimension is {p.n}")
    t = _time_grid(args.t_end, args.dt)
    an = _analyze(p, args)
    if an.generator is None:
        raise CliError(f"generator not certified: {an.failure}", EXIT_NOT_CERTIFIED)
    U = an.generator.U
    routes = ["semigroup", "laplace"] if args.route == "both" else [args.route]
    traces = {}
    try:
        for r in routes:
            if r == "semigroup":
                tr = evolve(an.generator, x0, t)
            else:
                tr = laplace_solution(p, x0, _contour(p, args), t, space=U, rho0=args.rho0)
            verify_mild(p, tr)
            traces[r] = tr
    except InconsistentInitialValueError as exc:
        raise CliError(str(exc), EXIT_NOT_CERTIFIED) from None
    except (ContourError, TruncationError) as exc:
        raise CliError(f"laplace route failed: {exc}", EXIT_NOT_CERTIFIED) from None
    summary = {
        "schema": 1,
        "pencil_label": p.label,
        "t_end": float(args.t_end),
        "dt": float(args.dt),
        "routes": routes,
        "residual_max": {r: float(tr.residual_profile.max()) for r, tr in traces.items()},
    }
    if len(traces) == 2:
        summary["l2_discrepancy"] = _l2_discrepancy(t, traces["laplace"].states, traces["semigroup"].states)
    if "laplace" in traces:
        c = traces["laplace"].contour
        summary["contour"] = {"rho": c.rho, "omega_max": c.omega_max, "n_nodes": c.n_nodes}
    prefix = args.out or "trace"
    # everything is computed before the first file is written
    for r, tr in traces.items():
        io.atomic_write(f"{prefix}_{r}.csv", tr.to_csv())
    text = io.dumps_json(summary)
    io.atomic_write(f"{prefix}_summary.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def _parse_n_list(s: str) -> list:
    try:
        return [int(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{s}'") from None


def cmd_example(args) -> int:
    try:
        rep = example_report(args.n, args.n_list, rho0=args.rho0)
    except (TypeError, ValueError) as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    csv_text = None
    if args.csv:
        d = build_example(args.n)
        v, proj = witness_projection(d)
        rows = ["x,v,projection"] + [
            f"{float(x)!r},{float(a)!r},{float(b)!r}" for x, a, b in zip(d.grid, v, proj)
        ]
        csv_text = "\n".join(rows) + "\n"
    text = io.dumps_json(rep)
    if csv_text is not None:
        io.atomic_write(args.csv, csv_text)
    _emit(text, args.out)
    ok = all(b["result"] == "pass" for b in rep["bound_check"]) and rep["index"] == 0
    return EXIT_OK if ok else EXIT_NOT_CERTIFIED


def _check_z_samples(p: Pencil, rho0: float, rng, count: int) -> list:
    zs = [complex(rho0 + rng.uniform(0.5, 3.0), rng.uniform(-5.0, 5.0)) for _ in range(count)]
    zs.append(complex(max(10.0, 10.0 * (rho0 + 1.0)), 0.0))
    return zs


def cmd_check(args) -> int:
    p = _load_pencil(args.E, args.A)
    an = _analyze(p, args)
    rng = np.random.default_rng(args.seed)
    est = an.wong.index_used
    try:
        lem = lemma_identity_check(p, an.wong, _check_z_samples(p, args.rho0, rng, 4), args.samples, rng)
    except SingularPencilError as exc:
        raise CliError(f"resolvent set probe failed: {exc}", EXIT_INPUT) from None
    out = {
        "schema": 1,
        "pencil_label": p.label,
        "seed": args.seed,
        "index": est.index,
        "tau": p.tau,
        "commutation_max": lem.commutation,
        "commutation_over_cond_max": lem.commutation_scaled,
        "membership_max": lem.membership,
        "membership_sine_max": lem.membership_sine,
        "expansion_max": lem.expansion,
        "generator_built": an.generator is not None,
    }
    g = an.generator
    if g is not None and not g.U.is_zero:
        out["generator_relation_max"] = verify_generator_relation(p, g, args.samples, rng)
        t = np.linspace(0.0, 1.0, 201)
        mild = law = inv = 0.0
        for x0 in random_unit_vectors(g.U, args.samples, rng).T:
            tr = evolve(g, x0, t)
            mild = max(mild, float(verify_mild(p, tr).max()))
            s, tt = rng.uniform(0.0, 1.0, 2)
            ut = evolve(g, x0, [tt]).states[0]
            law = max(law, float(np.linalg.norm(evolve(g, x0, [s + tt]).states[0] - evolve(g, ut, [s]).states[0])))
            inv = max(inv, sine_angle(g.U, ut))
        out["mild_residual_max"] = mild
        out["semigroup_law_max"] = law
        out["invariance_sine_max"] = inv
    _emit(io.dumps_json(out), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rho0", type=float, default=0.5, help="resolvent half-plane abscissa (default 0.5)")
    common.add_argument("--tol", type=float, default=None, help="relative rank tolerance (default n*eps)")
    common.add_argument("--grid-decades", type=int, default=4, help="decades of |z| in the index probe")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--out", default=None, help="output file (analyze/example/check) or prefix (solve)")

    ap = argparse.ArgumentParser(prog="daepl", description="Analyse and solve linear DAE pencils (E, A).")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="index, Wong chain and generator")
    a.add_argument("E")
    a.add_argument("A")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("solve", parents=[common], help="mild solution traces")
    s.add_argument("E")
    s.add_argument("A")
    s.add_argument("x0")
    s.add_argument("--t-end", type=float, default=1.0)
    s.add_argument("--dt", type=float, default=0.005)
    s.add_argument("--route", choices=["semigroup", "laplace", "both"], default="both")
    s.add_argument("--contour-rho", type=float, default=None)
    s.add_argument("--contour-omega", type=float, default=None)
    s.add_argument("--contour-nodes", type=int, default=4096)
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("example", parents=[common], help="discretised counterexample report")
    e.add_argument("--n", type=int, default=200)
    e.add_argument("--n-list", type=_parse_n_list, default=[100, 200, 400, 800])
    e.add_argument("--csv", default=None, help="write v_n and its IV_1 projection to this CSV")
    e.set_defaults(func=cmd_example)

    c = sub.add_parser("check", parents=[common], help="property checks with residual maxima")
    c.add_argument("E")
    c.add_argument("A")
    c.add_argument("--samples", type=int, default=8)
    c.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (MatrixMarketError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, DaeplError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
