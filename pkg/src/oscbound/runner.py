"""Experiment orchestration: solve -> norms -> verify pipelines, sweeps,
CSV reports and SVG plots.

Verify and sweep share one pipeline; sweep additionally fans runs out
over a worker pool (rows are still written in config order).  Exit
status is 0 iff every gated check passed.  Rough-coefficient fields are
exploratory by default: their mean-value constants reuse the constant-
coefficient surrogate and never gate.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import BoundarySpec, ExperimentConfig
from .errors import OscboundError
from .geometry import Disk, Ellipse, Polygon, cone_parameters, interior_sphere_radius, john_parameters
from .inequality import (GeometryKind, ball_kind, cone_kind, john_kind, k_bound,
                         mean_value_constants, optimal_sigma, rhs_of_sigma, smooth_kind,
                         verify_inequality)
from .meanvalue import check_mean_value_property
from .meshing import mesh_domain, write_mesh
from .norms import compute_norm_report
from .solver import (SolutionSample, assemble_and_solve_dirichlet, evaluate_reference,
                     fourier_harmonic, l2_error, reference_solution)
from .svgplot import line_plot

SLACK_GATE = 1.02

INEQ_HEADER = ("run_id,kind,alpha,p,c,C,k_bound,lhs,rhs,sigma_star,branch,slack,"
               "h,seed,domain,field,boundary,l2_error,status")


def resolve_geometry(cfg: ExperimentConfig) -> GeometryKind:
    """Turn the configured geometry name into a validated certificate."""
    dom = cfg.domain
    name = cfg.geometry
    if name == "auto":
        name = "ball" if isinstance(dom, Disk) else ("smooth" if isinstance(dom, Ellipse) else "cone")
    if name == "ball":
        if not isinstance(dom, Disk):
            raise OscboundError("geometry `ball` needs a disk domain")
        return ball_kind()
    if name == "smooth":
        return smooth_kind(dom.diameter, interior_sphere_radius(dom))
    if name == "cone":
        cert = cone_parameters(dom)
        return cone_kind(dom.diameter, cert.theta, cert.h)
    cert = john_parameters(dom)
    return john_kind(dom.diameter, cert.b0, cert.R)


def random_fourier_coefficients(degree: int, seed: int) -> tuple:
    rng = np.random.Generator(np.random.PCG64(seed))
    return tuple(rng.normal(size=2 * degree + 1))


def boundary_function(spec: BoundarySpec, domain):
    """(callable point -> value, exact-solution callable or None for identity A)."""
    if spec.kind == "reference":
        def g(p):
            return float(evaluate_reference(spec.ref_id, np.atleast_2d(p), domain)[0][0])
        exact = None
        if spec.ref_id.split()[0] in ("linear", "harmonic") or (
                spec.ref_id.split()[0] == "fourier" and isinstance(domain, Disk)):
            def exact(P):
                return evaluate_reference(spec.ref_id, P, domain)[0]
        return g, exact
    coeffs = (spec.coefficients if spec.kind == "fourier"
              else random_fourier_coefficients(spec.degree, spec.seed))
    center = domain.centroid()

    def g(p):
        phi = math.atan2(p[1] - center[1], p[0] - center[0])
        out = coeffs[0] if coeffs else 0.0
        k, idx = 1, 1
        while idx < len(coeffs):
            out += coeffs[idx] * math.cos(k * phi)
            if idx + 1 < len(coeffs):
                out += coeffs[idx + 1] * math.sin(k * phi)
            idx += 2
            k += 1
        return out

    exact = None
    if isinstance(domain, Disk):
        def exact(P):
            return fourier_harmonic(list(coeffs), domain, P)
    return g, exact


@dataclass
class RunRow:
    run_id: str
    csv: str
    slack: float | None
    status: str
    gate_ok: bool


def _echo(cfg: ExperimentConfig, h: float) -> str:
    return (f"{h:.15g},{cfg.seed},{cfg.domain.kind},"
            f"\"{cfg.field.spec}\",\"{cfg.boundary.label()}\"")


def _one_verify_run(cfg, kind, c, C, mesh, sample, p, l2, exploratory, seminorm=None):
    run_id = f"h{mesh.h:g}-p{p:g}"
    rep = verify_inequality(sample, kind, cfg.alpha, p, c, C, run_id=run_id, seminorm=seminorm)
    gate_ok = (not cfg.gated) or exploratory or rep.branch == "degenerate" or rep.slack <= SLACK_GATE
    status = "ok" if not exploratory else "exploratory"
    csv = (f"{rep.csv_row()},{_echo(cfg, mesh.h)},"
           f"{'' if l2 is None else format(l2, '.15g')},{status}")
    return RunRow(run_id, csv, rep.slack, status, gate_ok), rep


def run_verify(cfg: ExperimentConfig, workers: int = 1, out_dir: str | None = None) -> int:
    out = _ensure_out(out_dir or cfg.out)
    kind = resolve_geometry(cfg)
    c, C = mean_value_constants(cfg.field)
    exploratory = cfg.field.kind not in ("identity", "constant")
    g, exact = boundary_function(cfg.boundary, cfg.domain)
    meshes = {h: mesh_domain(cfg.domain, h) for h in cfg.h_list}

    def solve_for(h):
        mesh = meshes[h]
        sample = assemble_and_solve_dirichlet(mesh, cfg.field, g)
        l2 = None
        if exact is not None and cfg.field.kind == "identity":
            l2 = l2_error(sample, exact)
        elif exact is not None and cfg.boundary.kind == "reference" \
                and cfg.boundary.ref_id.startswith("linear") and cfg.field.is_constant:
            l2 = l2_error(sample, exact)
        return sample, l2

    solved: dict[float, tuple] = {}
    errors: dict[float, str] = {}
    if workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(cfg.h_list))) as pool:
            futs = {h: pool.submit(solve_for, h) for h in cfg.h_list}
            for h, fut in futs.items():
                try:
                    solved[h] = fut.result()
                except OscboundError as exc:
                    errors[h] = str(exc)
    else:
        for h in cfg.h_list:
            try:
                solved[h] = solve_for(h)
            except OscboundError as exc:
                errors[h] = str(exc)

    rows: list[RunRow] = []
    reports = {}
    norm_rows = []
    for h in cfg.h_list:
        if h in errors:
            for p in cfg.p_list:
                rid = f"h{h:g}-p{p:g}"
                rows.append(RunRow(rid, f"{rid},{kind.label()},{cfg.alpha:.15g},{p:.15g},"
                                        f"{c:.15g},{C:.15g},,,,,,,{_echo(cfg, h)},,"
                                        f"error:{errors[h]}", None, "error", False))
            continue
        sample, l2 = solved[h]
        if cfg.dump_mesh:
            write_mesh(sample.mesh, os.path.join(out, f"mesh-h{h:g}.txt"), sample.values)
        from .norms import holder_seminorm
        sem = holder_seminorm(sample, cfg.alpha)
        for p in cfg.p_list:
            row, rep = _one_verify_run(cfg, kind, c, C, sample.mesh, sample, p, l2,
                                       exploratory, seminorm=sem)
            rows.append(row)
            reports[(h, p)] = rep
            norm_rows.append(compute_norm_report(sample, cfg.alpha, p, row.run_id,
                                                 seminorm=sem).csv_row())

    _write_csv(os.path.join(out, "inequality.csv"), INEQ_HEADER, [r.csv for r in rows])
    from .norms import NormReport
    _write_csv(os.path.join(out, "norms.csv"), NormReport.CSV_HEADER, norm_rows)
    _plot_slack_vs_h(out, cfg, reports)
    _plot_rhs_profile(out, cfg, kind, c, C, reports)
    failed = [r for r in rows if not r.gate_ok] + [r for r in rows if r.status.startswith("error")]
    return 1 if failed else 0


def _plot_slack_vs_h(out, cfg, reports):
    if len(cfg.h_list) < 2:
        return
    series = []
    for p in cfg.p_list:
        hs = [h for h in cfg.h_list if (h, p) in reports]
        sl = [reports[(h, p)].slack for h in hs]
        if hs:
            series.append((hs, sl, f"p={p:g}"))
    if series:
        line_plot(os.path.join(out, "slack_vs_h.svg"), series,
                  title="slack vs h", xlabel="h", ylabel="slack", logx=True, logy=True)


def _plot_rhs_profile(out, cfg, kind, c, C, reports):
    for p in cfg.p_list:
        key = (cfg.h_list[-1], p)
        if key not in reports:
            continue
        rep = reports[key]
        if rep.branch == "degenerate":
            continue
        sigmas = np.linspace(0.005, 0.995, 199)
        vals = [rhs_of_sigma(s, rep.seminorm, rep.lp_centered, 2, cfg.alpha, p, c, C)
                for s in sigmas]
        marks = []
        if 0 < rep.sigma_star < 1:
            marks = [(rep.sigma_star, rhs_of_sigma(rep.sigma_star, rep.seminorm,
                                                   rep.lp_centered, 2, cfg.alpha, p, c, C),
                      "sigma*")]
        line_plot(os.path.join(out, f"rhs_of_sigma_p{p:g}.svg"),
                  [(list(sigmas), vals, "rhs(sigma)")],
                  title=f"two-term bound vs probe ratio (p={p:g})",
                  xlabel="sigma ratio", ylabel="rhs", marks=marks)


def run_meanvalue(cfg: ExperimentConfig, out_dir: str | None = None) -> int:
    out = _ensure_out(out_dir or cfg.out)
    h = cfg.h_list[-1]
    mesh = mesh_domain(cfg.domain, h)
    if cfg.boundary.kind == "reference":
        sample = reference_solution(cfg.boundary.ref_id, mesh, cfg.alpha)
    else:
        g, _ = boundary_function(cfg.boundary, cfg.domain)
        sample = assemble_and_solve_dirichlet(mesh, cfg.field, g)
    report = check_mean_value_property(sample, cfg.field, cfg.mv_x0, cfg.mv_radii)
    from .meanvalue import MeanValueReport
    _write_csv(os.path.join(out, "meanvalue.csv"), MeanValueReport.CSV_HEADER, report.csv_rows())
    line_plot(os.path.join(out, "averages_vs_r.svg"),
              [(list(report.radii), list(report.averages), "average"),
               ([report.radii[0], report.radii[-1]], [report.v_at_x0, report.v_at_x0], "v(x0)")],
              title="set averages vs radius", xlabel="r", ylabel="average")
    status_path = os.path.join(out, "meanvalue_status.txt")
    with open(status_path, "w", encoding="utf-8") as f:
        f.write(f"lower_bound_ok={report.lower_bound_ok}\nmonotone_ok={report.monotone_ok}\n"
                f"inclusion_ok={report.inclusion_ok}\nsubsolution_verified={report.subsolution_verified}\n"
                f"note={report.note}\n")
    return 0 if (report.ok or not cfg.gated) else 1


def run_extremal(cfg: ExperimentConfig, out_dir: str | None = None) -> int:
    from .inequality import extremal_search

    out = _ensure_out(out_dir or cfg.out)
    res = extremal_search(cfg.domain, cfg.field, cfg.alpha, cfg.p_list[0],
                          degree=cfg.ex_degree, population=cfg.ex_population,
                          iterations=cfg.ex_iterations, seed=cfg.seed, h=cfg.ex_h)
    rows = [f"{i},{v:.15g}" for i, v in enumerate(res.trace)]
    _write_csv(os.path.join(out, "extremal.csv"), "iteration,best_objective", rows)
    line_plot(os.path.join(out, "extremal_trace.svg"),
              [(list(range(len(res.trace))), list(res.trace), "best objective"),
               ([0, len(res.trace) - 1], [res.k_bound, res.k_bound], "k bound")],
              title=f"extremal search (K_est={res.k_est:.5f})",
              xlabel="iteration", ylabel="objective")
    monotone = bool(np.all(np.diff(res.trace) >= -1e-12))
    sandwich = res.k_est <= res.k_bound + 1e-9
    return 0 if ((monotone and sandwich) or not cfg.gated) else 1


def run(cfg: ExperimentConfig, workers: int = 1, out_dir: str | None = None) -> int:
    """Dispatch on mode; returns the process exit status."""
    env_workers = os.environ.get("OSCBOUND_WORKERS")
    if env_workers:
        workers = max(1, int(env_workers))
    if cfg.mode in ("verify", "sweep"):
        return run_verify(cfg, workers=(workers if cfg.mode == "sweep" else 1), out_dir=out_dir)
    if cfg.mode == "meanvalue":
        return run_meanvalue(cfg, out_dir=out_dir)
    if cfg.mode == "extremal":
        return run_extremal(cfg, out_dir=out_dir)
    raise OscboundError(f"mode {cfg.mode!r} is not runnable directly")


# ---------------------------------------------------------------------------
# refinement comparison


@dataclass
class CompareReport:
    orders: dict
    slack_trends: dict
    warnings: list

    def summary(self) -> str:
        lines = []
        for key, order in sorted(self.orders.items()):
            lines.append(f"p={key}: observed L2 order {order:.3f}" if order is not None
                         else f"p={key}: no refinement (order undefined)")
        for key, trend in sorted(self.slack_trends.items()):
            lines.append(f"p={key}: slack trend {trend}")
        lines.extend(f"warning: {w}" for w in self.warnings)
        return "\n".join(lines)


def _read_csv(path):
    with open(path, encoding="utf-8") as f:
        lines = [ln.rstrip("\n") for ln in f if ln.strip()]
    header = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        rows.append(dict(zip(header, _split_csv(ln))))
    return rows


def _split_csv(line):
    out, cur, quoted = [], [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        elif ch == "," and not quoted:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def compare_runs(paths) -> CompareReport:
    """Refinement summary across >= 2 verify CSVs differing only in h."""
    if len(paths) < 2:
        raise OscboundError("compare needs at least two CSV paths")
    tables = [_read_csv(p) for p in paths]
    keys = ("kind", "alpha", "c", "C", "domain", "field", "boundary", "seed")
    sig0 = {(r["p"], k): r.get(k) for t in tables[:1] for r in t for k in keys}
    for t in tables[1:]:
        sig = {(r["p"], k): r.get(k) for r in t for k in keys}
        if sig.keys() != sig0.keys() or any(sig[k] != sig0[k] for k in sig0):
            raise OscboundError("mismatched configurations across CSVs (only h may differ)")
    merged: dict[str, list] = {}
    for t in tables:
        for r in t:
            if r.get("status", "ok").startswith("error"):
                continue
            merged.setdefault(r["p"], []).append(r)
    orders, trends, warnings = {}, {}, []
    for p, rows in merged.items():
        rows = sorted(rows, key=lambda r: -float(r["h"]))
        hs = [float(r["h"]) for r in rows]
        if len(set(hs)) < 2:
            orders[p] = None
            trends[p] = "no refinement"
            continue
        errs = [float(r["l2_error"]) for r in rows if r.get("l2_error")]
        if len(errs) == len(rows) and all(e > 0 for e in errs):
            # least-squares slope of log err vs log h
            lh, le = np.log(hs), np.log(errs)
            orders[p] = float(np.polyfit(lh, le, 1)[0])
        else:
            orders[p] = None
        slacks = [float(r["slack"]) for r in rows]
        nonincreasing = all(s2 <= s1 + 1e-9 for s1, s2 in zip(slacks, slacks[1:]))
        trends[p] = "non-increasing" if nonincreasing else "degrading"
        if not nonincreasing:
            warnings.append(f"slack increases under refinement for p={p}")
    return CompareReport(orders, trends, warnings)


# ---------------------------------------------------------------------------


def _ensure_out(out):
    os.makedirs(out, exist_ok=True)
    return out


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8") as f:
        f.write(header + "\n")
        for row in rows:
            f.write(row + "\n")
