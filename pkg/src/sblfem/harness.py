"""Convergence sweeps over (eps1, eps2, p), rate fits, CSV and SVG output."""

from __future__ import annotations

import csv
import logging
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .approximation import EnergyQuadrature, energy_norm_error, reference_solution
from .assembly import DiscreteSolution, assemble_global, solve_linear
from .mesh import build_sbl_mesh
from .problem import (classify_regime, compute_layer_parameters, constant_coefficient_exact,
                      get_problem)

log = logging.getLogger(__name__)

__all__ = ["PAPER_PAIRS", "REGIME_EXTRA_PAIRS", "SweepConfig", "ConvergenceRecord", "RateFit",
           "run_sweep", "fit_rate", "emit_csv", "read_csv", "emit_svg_semilog",
           "group_by_pair", "run_paper", "CSV_HEADER"]

# one pair per regime: eps1 << eps2^2, eps1 ~ eps2^2, eps1 >> eps2^2
PAPER_PAIRS = ((1e-9, 1e-4), (1e-10, 1e-5), (1e-12, 1e-12))

# two extra pairs per regime for the per-regime figures
REGIME_EXTRA_PAIRS = (
    ((1e-10, 1e-4), (1e-11, 1e-4)),
    ((1e-8, 1e-4), (1e-12, 1e-6)),
    ((1e-8, 1e-8), (1e-10, 1e-10)),
)

CSV_HEADER = ("eps1", "eps2", "p", "dof", "rel_err_pct", "wall_time_s", "regime")


@dataclass(frozen=True)
class SweepConfig:
    problem: str = "example1"
    pairs: tuple[tuple[float, float], ...] = PAPER_PAIRS
    p_min: int = 1
    p_max: int = 11
    kappa: float = 1.0
    error_mode: str | None = None      # "exact" | "reference"; None picks exact when available
    energy_levels: int = 40
    energy_points: int | None = None
    threads: int | None = None         # None reads SBLFEM_THREADS, default 1
    timing: bool = True                # False writes nan wall times (byte-stable output)

    def __post_init__(self):
        if self.p_min < 1 or self.p_max < self.p_min:
            raise ValueError(f"bad p range {self.p_min}..{self.p_max}")
        if not self.pairs:
            raise ValueError("no (eps1, eps2) pairs given")
        for e1, e2 in self.pairs:
            if not (0.0 < e1 <= e2 <= 1.0):
                raise ValueError(f"need 0 < eps1 <= eps2 <= 1, got eps1={e1!r}, eps2={e2!r}")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.error_mode not in (None, "exact", "reference"):
            raise ValueError(f"unknown error mode {self.error_mode!r}")

    @property
    def p_values(self):
        return range(self.p_min, self.p_max + 1)

    def quadrature(self) -> EnergyQuadrature:
        return EnergyQuadrature(self.energy_levels, self.energy_points)

    def n_threads(self) -> int:
        if self.threads is not None:
            return max(1, int(self.threads))
        return max(1, int(os.environ.get("SBLFEM_THREADS", "1") or 1))


@dataclass(frozen=True)
class ConvergenceRecord:
    eps1: float
    eps2: float
    p: int
    dof: int
    rel_err_pct: float
    wall_time_s: float
    regime: str
    error: str | None = field(default=None, compare=False)

    @property
    def ok(self) -> bool:
        return self.error is None and math.isfinite(self.rel_err_pct)


@dataclass(frozen=True)
class RateFit:
    sigma_hat: float
    r_squared: float
    p_range: tuple[int, int]
    n_points: int


def _cell(cfg: SweepConfig, e1: float, e2: float, p: int) -> ConvergenceRecord:
    regime = classify_regime(e1, e2)[0].value
    dof = -1
    try:
        problem = get_problem(cfg.problem, e1, e2)
        mode = cfg.error_mode or ("exact" if problem.is_constant else "reference")
        layer = compute_layer_parameters(problem)
        mesh = build_sbl_mesh(layer, cfg.kappa, p)
        t0 = time.perf_counter()
        system = assemble_global(problem, mesh, p)
        sol = DiscreteSolution(mesh, p, solve_linear(system), system.dofmap)
        wall = time.perf_counter() - t0
        dof = sol.dof
        if mode == "exact":
            truth = constant_coefficient_exact(problem)
        else:
            truth = reference_solution(problem, cfg.kappa, p, mesh=mesh)
        _, rel = energy_norm_error(truth, sol, e1, cfg.quadrature())
        return ConvergenceRecord(e1, e2, p, dof, rel, wall if cfg.timing else math.nan, regime)
    except Exception as exc:  # a failed cell must not stop the sweep
        log.warning("cell eps1=%g eps2=%g p=%d failed: %s", e1, e2, p, exc)
        return ConvergenceRecord(e1, e2, p, dof, math.nan, math.nan, regime, error=str(exc))


def run_sweep(cfg: SweepConfig) -> list[ConvergenceRecord]:
    """All (pair, p) cells, ordered by pair index then p whatever the thread count."""
    cells = [(e1, e2, p) for e1, e2 in cfg.pairs for p in cfg.p_values]
    with warnings.catch_warnings():
        # registry problems may violate the data assumptions on purpose
        warnings.simplefilter("ignore", UserWarning)
        n = cfg.n_threads()
        if n == 1:
            return [_cell(cfg, *c) for c in cells]
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(lambda c: _cell(cfg, *c), cells))


def fit_rate(records, p_min: int | None = None, p_max: int | None = None) -> RateFit:
    """Least squares fit of ln(err) = a - sigma p over the usable rows."""
    rows = [r for r in records
            if r.ok and r.rel_err_pct > 0
            and (p_min is None or r.p >= p_min) and (p_max is None or r.p <= p_max)]
    if len(rows) < 4:
        raise ValueError(f"need at least 4 usable rows for a rate fit, got {len(rows)}")
    p = np.array([r.p for r in rows], dtype=float)
    y = np.log([r.rel_err_pct for r in rows])
    slope, icept = np.polyfit(p, y, 1)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((y - (slope * p + icept)) ** 2))
    if ss_tot <= 1e-300:
        sigma, r2 = 0.0, 0.0
    else:
        sigma, r2 = -float(slope), 1.0 - ss_res / ss_tot
    return RateFit(sigma, r2, (int(p.min()), int(p.max())), len(rows))


def _fmt(v: float) -> str:
    return format(v, ".17g")


def emit_csv(records, path) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in records:
                w.writerow([_fmt(r.eps1), _fmt(r.eps2), r.p, r.dof, _fmt(r.rel_err_pct),
                            _fmt(r.wall_time_s), r.regime])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path) -> list[ConvergenceRecord]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [ConvergenceRecord(float(r["eps1"]), float(r["eps2"]), int(r["p"]), int(r["dof"]),
                              float(r["rel_err_pct"]), float(r["wall_time_s"]), r["regime"])
            for r in rows]


def group_by_pair(records) -> dict[tuple[float, float], list[ConvergenceRecord]]:
    groups: dict[tuple[float, float], list[ConvergenceRecord]] = {}
    for r in records:
        groups.setdefault((r.eps1, r.eps2), []).append(r)
    return groups


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def emit_svg_semilog(groups, path, title: str = "") -> Path:
    """Relative energy error (%) against DOF, log10 vertical axis, one polyline per pair."""
    if isinstance(groups, (list, tuple)):
        groups = group_by_pair(groups)
    series = []
    for (e1, e2), rows in groups.items():
        pts = [(r.dof, math.log10(r.rel_err_pct)) for r in rows
               if r.ok and r.rel_err_pct > 0]
        if not pts:
            warnings.warn(f"no positive errors for eps1={e1:g}, eps2={e2:g}; skipped", stacklevel=2)
            continue
        series.append(((e1, e2), pts))
    if not groups:
        raise ValueError("nothing to plot")

    W, H = 640, 440
    left, right, top, bottom = 70, 200, 40, 50
    pw, ph = W - left - right, H - top - bottom
    xs = [x for _, pts in series for x, _ in pts] or [0, 1]
    ys = [y for _, pts in series for _, y in pts] or [0, 1]
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    y0, y1 = math.floor(min(ys)), math.ceil(max(ys))
    if y1 == y0:
        y1 = y0 + 1

    def X(v):
        return left + (v - x0) / (x1 - x0) * pw

    def Y(v):
        return top + (y1 - v) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>']
    if title:
        out.append(f'<text x="{left + pw / 2:.2f}" y="22" text-anchor="middle" '
                   f'font-size="14">{title}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for k in range(y0, y1 + 1):
        y = Y(k)
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" '
                   f'stroke="#dddddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" text-anchor="end">1e{k}</text>')
    for v in np.linspace(x0, x1, 6):
        x = X(v)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">{v:.0f}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{H - 10}" text-anchor="middle">DOF</text>')
    out.append(f'<text x="18" y="{top + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2:.2f})">relative energy error (%)</text>')
    for i, ((e1, e2), pts) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{X(x):.2f},{Y(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        for x, y in pts:
            out.append(f'<circle cx="{X(x):.2f}" cy="{Y(y):.2f}" r="2.5" fill="{color}"/>')
        ly = top + 16 + 18 * i
        out.append(f'<line x1="{left + pw + 12}" y1="{ly - 4}" x2="{left + pw + 32}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 38}" y="{ly}">eps1={e1:.0e}, eps2={e2:.0e}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path


def run_paper(out_dir, threads: int | None = None, timing: bool = False) -> dict[str, Path]:
    """Both examples, kappa = 1, p = 1..11 on the three canonical pairs.

    Example 1 also runs two extra pairs per regime for the per-regime
    figures; they are listed in ``pairs.txt``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    extra = tuple(pair for group in REGIME_EXTRA_PAIRS for pair in group)
    cfg1 = SweepConfig("example1", PAPER_PAIRS + extra, error_mode="exact",
                       threads=threads, timing=timing)
    cfg2 = SweepConfig("example2", PAPER_PAIRS, error_mode="reference",
                       threads=threads, timing=timing)
    rec1 = run_sweep(cfg1)
    rec2 = run_sweep(cfg2)
    files = {"example1.csv": emit_csv(rec1, out / "example1.csv"),
             "example2.csv": emit_csv(rec2, out / "example2.csv")}
    g1 = group_by_pair(rec1)
    files["example1.svg"] = emit_svg_semilog({k: g1[k] for k in PAPER_PAIRS}, out / "example1.svg",
                                             "Example 1: energy norm convergence")
    names = ("eps1 << eps2^2", "eps1 ~ eps2^2", "eps1 >> eps2^2")
    for i, (pair, more) in enumerate(zip(PAPER_PAIRS, REGIME_EXTRA_PAIRS), start=1):
        name = f"example1_regime{i}.svg"
        files[name] = emit_svg_semilog({k: g1[k] for k in (pair,) + more}, out / name,
                                       f"Example 1, {names[i - 1]}")
    files["example2.svg"] = emit_svg_semilog(group_by_pair(rec2), out / "example2.svg",
                                             "Example 2: energy norm convergence (reference)")
    lines = ["# (eps1, eps2) pairs used by `sblfem paper`", "canonical: " + ", ".join(
        f"{a:g}:{b:g}" for a, b in PAPER_PAIRS)]
    for i, more in enumerate(REGIME_EXTRA_PAIRS, start=1):
        lines.append(f"regime{i} extra: " + ", ".join(f"{a:g}:{b:g}" for a, b in more))
    (out / "pairs.txt").write_text("\n".join(lines) + "\n")
    files["pairs.txt"] = out / "pairs.txt"
    return files
