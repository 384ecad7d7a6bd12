"""Command line entry point: ``sblfem {mu,mesh,solve,sweep,paper}``."""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from dataclasses import fields
from pathlib import Path

from .approximation import EnergyQuadrature, energy_norm_error, reference_solution
from .assembly import DiscreteSolution, assemble_global, dump_matrix_csv, solve_linear
from .harness import (PAPER_PAIRS, SweepConfig, emit_csv, emit_svg_semilog, fit_rate,
                      group_by_pair, run_paper, run_sweep)
from .mesh import build_sbl_mesh
from .problem import compute_layer_parameters, constant_coefficient_exact, get_problem


class UsageError(Exception):
    pass


def _pairs(text: str):
    pairs = []
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        try:
            a, b = item.split(":")
            pairs.append((float(a), float(b)))
        except ValueError:
            raise UsageError(f"bad pair {item!r}; expected eps1:eps2") from None
    return tuple(pairs)


def read_config(path) -> dict:
    """key = value lines; '#' starts a comment."""
    conf = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            conf[k.replace("-", "_")] = v
    return conf


def _common(sp, with_p=True):
    sp.add_argument("--example", default="1", help="1 or 2 (default 1)")
    sp.add_argument("--eps1", type=float, default=None)
    sp.add_argument("--eps2", type=float, default=None)
    sp.add_argument("--kappa", type=float, default=None)
    if with_p:
        sp.add_argument("--p", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sblfem", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("mu", help="print mu0, mu1 and the regime")
    _common(sp, with_p=False)

    sp = sub.add_parser("mesh", help="print the Spectral Boundary Layer mesh")
    _common(sp)

    sp = sub.add_parser("solve", help="one solve, with error if a truth is available")
    _common(sp)
    sp.add_argument("--error-mode", choices=("exact", "reference"), default=None)
    sp.add_argument("--dump-matrix", metavar="PATH", default=None)

    sp = sub.add_parser("sweep", help="convergence sweep to CSV/SVG")
    _common(sp, with_p=False)
    sp.add_argument("--pairs", default=None, help="eps1:eps2[,eps1:eps2...]")
    sp.add_argument("--p-min", type=int, default=None)
    sp.add_argument("--p-max", type=int, default=None)
    sp.add_argument("--error-mode", choices=("exact", "reference"), default=None)
    sp.add_argument("--out", default=None, help="output directory")
    sp.add_argument("--config", default=None, help="key = value config file")
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--no-timing", action="store_true")

    sp = sub.add_parser("paper", help="canonical reproduction of both examples")
    sp.add_argument("--out", default="results")
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--timing", action="store_true", help="record wall times (output no longer byte-stable)")
    return ap


def _problem(args):
    e1 = 1.0 if args.eps1 is None else args.eps1
    e2 = 1.0 if args.eps2 is None else args.eps2
    try:
        return get_problem(args.example, e1, e2)
    except KeyError as exc:
        raise UsageError(str(exc)) from None


def _cmd_mu(args):
    layer = compute_layer_parameters(_problem(args))
    print(f"mu0 = {layer.mu0:.10g}")
    print(f"mu1 = {layer.mu1:.10g}")
    print(f"regime = {layer.regime.value} (eps1/eps2^2 = {layer.ratio:.6g})")
    if layer.degenerate:
        print("note: c vanishes on [0, 1]; local layer scales used")


def _mesh(args, problem):
    p = 1 if args.p is None else args.p
    kappa = 1.0 if args.kappa is None else args.kappa
    return build_sbl_mesh(compute_layer_parameters(problem), kappa, p), p, kappa


def _cmd_mesh(args):
    mesh, _, _ = _mesh(args, _problem(args))
    print(" | ".join(f"{v:.6g}" for v in mesh.breakpoints))


def _cmd_solve(args):
    problem = _problem(args)
    mesh, p, kappa = _mesh(args, problem)
    system = assemble_global(problem, mesh, p)
    if args.dump_matrix:
        dump_matrix_csv(system, args.dump_matrix)
    sol = DiscreteSolution(mesh, p, solve_linear(system), system.dofmap)
    print(f"mesh = {' | '.join(f'{v:.6g}' for v in mesh.breakpoints)}")
    print(f"p = {p}, DOF = {sol.dof}")
    mode = args.error_mode or ("exact" if problem.is_constant else "reference")
    truth = (constant_coefficient_exact(problem) if mode == "exact"
             else reference_solution(problem, kappa, p, mesh=mesh))
    _, rel = energy_norm_error(truth, sol, problem.eps1, EnergyQuadrature())
    print(f"relative energy error ({mode}) = {rel:.6e} %")


_INT_KEYS = {"p_min", "p_max", "threads", "energy_levels", "energy_points"}


def _cmd_sweep(args):
    conf = read_config(args.config) if args.config else {}
    known = {f.name for f in fields(SweepConfig)} | {"eps1", "eps2", "example", "out", "no_timing"}
    unknown = set(conf) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    flags = {k: v for k, v in vars(args).items() if v is not None and v is not False}
    merged = {**conf, **flags}
    kw = {}
    if "example" in flags or "problem" not in merged:
        ex = str(merged.get("example", "1"))
        kw["problem"] = ex if ex.startswith("example") else f"example{ex}"
    else:
        kw["problem"] = merged["problem"]
    if "pairs" in merged:
        kw["pairs"] = _pairs(merged["pairs"])
    elif "eps1" in merged or "eps2" in merged:
        kw["pairs"] = ((float(merged.get("eps1", 1.0)), float(merged.get("eps2", 1.0))),)
    else:
        kw["pairs"] = PAPER_PAIRS
    for key in ("p_min", "p_max", "kappa", "error_mode", "threads", "energy_levels",
                "energy_points"):
        if key in merged:
            v = merged[key]
            kw[key] = int(v) if key in _INT_KEYS else (float(v) if key == "kappa" else v)
    kw["timing"] = not (merged.get("no_timing") in (True, "1", "true", "yes"))
    try:
        cfg = SweepConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    records = run_sweep(cfg)
    for r in records:
        print(f"{r.eps1:.3g} {r.eps2:.3g} p={r.p:2d} DOF={r.dof:3d} err={r.rel_err_pct:.6e}%"
              + (f"  FAILED: {r.error}" if r.error else ""))
    for (e1, e2), rows in group_by_pair(records).items():
        try:
            fit = fit_rate(rows, p_min=max(cfg.p_min, 2))
            print(f"fit eps1={e1:g} eps2={e2:g}: sigma={fit.sigma_hat:.4f} R2={fit.r_squared:.4f}")
        except ValueError as exc:
            print(f"fit eps1={e1:g} eps2={e2:g}: {exc}")
    out = merged.get("out")
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        emit_csv(records, Path(out) / f"{cfg.problem}.csv")
        emit_svg_semilog(group_by_pair(records), Path(out) / f"{cfg.problem}.svg", cfg.problem)
    return 0 if all(r.ok for r in records) else 1


def _cmd_paper(args):
    files = run_paper(args.out, threads=args.threads, timing=args.timing)
    for name in files:
        print(files[name])


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore", UserWarning)
    handler = {"mu": _cmd_mu, "mesh": _cmd_mesh, "solve": _cmd_solve,
               "sweep": _cmd_sweep, "paper": _cmd_paper}[args.cmd]
    try:
        return handler(args) or 0
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sblfem {args.cmd}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"sblfem {args.cmd}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
