"""Command-line entry point: ``mosaic-doublon <command> [flags]``.

Exit codes: 0 success, 2 validation error, 3 resource error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .bands import bound_energy, critical_lambda, decay_rate, doublon_zero_energy, j_eff, mobility_edges
from .config import COMMANDS, ExperimentConfig, RunManifest, artifact_versions, atomic_write_text
from .dynamics import (
    Propagator,
    curve_to_csv,
    default_times,
    evolve,
    fit_decay_rate,
    initial_state,
    lambda_c_scan,
    markovian_window,
    me_from_dynamics,
)
from .effective import DoublonChainSpec, calibrate_chi
from .errors import AmbiguityError, ResourceError, ValidationError
from .export import band_table, bands_to_csv, write_rows
from .model import build_emitter_h, build_two_photon_basis, build_two_photon_h
from .spectral import eigensolve, fd_map, numerical_me, records_to_csv, spatial_profile
from . import plots

log = logging.getLogger("mosaic_doublon")

WAVEFUNCTION_LAMBDAS = (0.3, 0.4, 0.6, 0.8)
PFSCAN_LINES = (-5.77, -5.72)
MEFIT_LINES = (-5.87, -5.83, -5.80, -5.77, -5.76)


def _write(out: Path, name: str, text: str, files: list) -> None:
    atomic_write_text(out / name, text)
    files.append(name)


def _svg(files: list, path) -> None:
    if path is not None:
        files.append(Path(path).name)


def run_bands(cfg: ExperimentConfig, out: Path):
    spec = cfg.lattice_spec()
    files: list = []
    table = band_table(spec, cfg.run.k_steps)
    _write(out, "bands.csv", bands_to_csv(table), files)
    K = np.linspace(-np.pi, np.pi, cfg.run.k_steps)
    hop = 4 * spec.J * np.abs(np.cos(K / 2))
    _svg(files, plots.plot_bands(out / "bands.svg", K, 2 * spec.omega_c - hop, 2 * spec.omega_c + hop,
                                 bound_energy(K, spec, +1), bound_energy(K, spec, -1)))
    return files, {"E_S_width": float(np.ptp(table[:, 2]))}


def _edge_overlay(spec, lams):
    """Analytic mobility-edge branches over the lambda grid, for plotting."""
    lams = lams[lams > 0]
    rows = [mobility_edges(spec.replace(lam=l)).branches for l in lams]
    width = max((len(r) for r in rows), default=0)
    overlay = {}
    for b in range(width):
        x = [l for l, r in zip(lams, rows) if len(r) > b]
        y = [r[b] for r in rows if len(r) > b]
        overlay[f"edge {b}"] = (np.array(x), np.array(y))
    return overlay


def run_fdmap(cfg: ExperimentConfig, out: Path):
    spec = cfg.lattice_spec()
    lams = cfg.run.lambda_grid()
    target = DoublonChainSpec(spec, cfg.run.chi) if cfg.run.model == "chain" else spec
    kwargs = {} if cfg.run.model == "chain" else {"doublon_only": True, "measure": "diagonal"}
    records = fd_map(target, lams, workers=cfg.run.workers, **kwargs)
    files: list = []
    _write(out, "fdmap.csv", records_to_csv(records), files)
    metrics = {"n_records": len(records)}
    if len(lams) >= 10:
        edges = numerical_me(records)
        rows = [(lam, e) for lam in sorted(edges) for e in edges[lam]]
        _write(out, "numerical_me.csv", write_rows(("lambda", "E"), rows), files)
    _svg(files, plots.plot_fdmap(out / "fdmap.svg", [r.lam for r in records], [r.E for r in records],
                                 [r.fd for r in records], _edge_overlay(spec, lams)))
    return files, metrics


def run_wavefunction(cfg: ExperimentConfig, out: Path):
    spec0 = cfg.lattice_spec()
    w2 = cfg.emitters.two_omega_e
    lams = cfg.run.lambdas if cfg.run.lambdas is not None else WAVEFUNCTION_LAMBDAS
    basis = build_two_photon_basis(spec0.L)
    rows, panels = [], []
    for lam in lams:
        dec = eigensolve(build_two_photon_h(spec0.replace(lam=float(lam))))
        i = int(np.argmin(np.abs(dec.values - w2)))
        prof = spatial_profile(dec.vectors[:, i], basis)
        rows.extend((float(lam), float(dec.values[i]), int(j), float(w)) for j, w in zip(prof.site, prof.weight))
        panels.append((f"lambda={lam:g}, E={dec.values[i]:.4f}", prof.site, prof.weight))
    files: list = []
    _write(out, "wavefunction.csv", write_rows(("lambda", "E", "site", "weight"), rows), files)
    _svg(files, plots.plot_profiles(out / "wavefunction.svg", panels))
    return files, {}


def run_dynamics(cfg: ExperimentConfig, out: Path):
    spec = cfg.lattice_spec()
    em = cfg.emitters.to_spec()
    times = default_times(cfg.run.t_final)
    traj = evolve(Propagator(build_emitter_h(spec, em)), initial_state(em, spec.L), times)
    files: list = []
    _write(out, "trajectory.csv", traj.to_csv(), files)
    metrics = {"pf": float(traj.pe[-1])}
    if em.N == 2:
        try:
            fit = fit_decay_rate(traj, markovian_window(traj, spec))
            metrics.update(gamma_fit=fit.gamma, r2=fit.r2, gamma_formula=decay_rate(spec, em).Gamma)
        except ValidationError as exc:
            log.info("decay fit skipped: %s", exc)
    _svg(files, plots.plot_curves(out / "trajectory.svg", {"P_e": (times[1:], traj.pe[1:])}, "t J", "P_e", logx=True))
    return files, metrics


def _lines(cfg: ExperimentConfig, default):
    return list(cfg.run.two_omega_es) if cfg.run.two_omega_es is not None else list(default)


def run_pfscan(cfg: ExperimentConfig, out: Path):
    spec = cfg.lattice_spec()
    lines = _lines(cfg, PFSCAN_LINES + (doublon_zero_energy(spec),))
    lams = cfg.run.lambda_grid()
    files, curves, summary = [], {}, []
    for i, w2 in enumerate(lines):
        scan = lambda_c_scan(spec, cfg.emitters.to_spec(w2), lams, cfg.run.onset_threshold,
                             cfg.run.t_final, workers=cfg.run.workers)
        _write(out, f"pfscan_{i}.csv", scan.to_csv(), files)
        curves[f"2w_e={w2:.4f}"] = (lams, scan.pf)
        summary.append((w2, scan.lambda_c, scan.degenerate))
    _write(out, "lambda_c.csv", write_rows(("two_omega_e", "lambda_c", "degenerate"), summary), files)
    _svg(files, plots.plot_curves(out / "pfscan.svg", curves, "lambda", "P_f"))
    return files, {"lambda_c": {repr(w): lc for w, lc, _ in summary}}


def run_mefit(cfg: ExperimentConfig, out: Path):
    spec = cfg.lattice_spec()
    lines = _lines(cfg, MEFIT_LINES)
    curve = me_from_dynamics(spec, lines, cfg.run.lambda_grid(), g=cfg.emitters.g, n1=cfg.emitters.n1,
                             onset_threshold=cfg.run.onset_threshold, t_final=cfg.run.t_final,
                             workers=cfg.run.workers)
    files: list = []
    _write(out, "me_curve.csv", curve_to_csv(curve), files)
    w_grid = np.linspace(min(lines), max(lines), 101)
    analytic = [critical_lambda(w, spec) for w in w_grid]
    keep = [a is not None for a in analytic]
    _svg(files, plots.plot_curves(out / "me_curve.svg", {
        "analytic": (w_grid[keep], np.array([a for a in analytic if a is not None])),
        "dynamics": ([p.two_omega_e for p in curve], [p.lambda_c_numeric for p in curve]),
    }, "2 omega_e / J", "lambda_c"))
    return files, {"points": len(curve)}


def run_calibrate(cfg: ExperimentConfig, out: Path):
    spec = cfg.lattice_spec()
    files: list = []
    try:
        cal = calibrate_chi(spec, cfg.run.chi_candidates)
    except AmbiguityError as exc:
        # keep the residual table so the ambiguity can be inspected
        _write(out, "calibrate.csv", write_rows(("chi", "residual"), sorted(exc.residuals.items())), files)
        raise
    residuals = cal.residuals
    _write(out, "calibrate.csv", write_rows(("chi", "residual"), sorted(residuals.items())), files)
    ch = sorted(residuals)
    _svg(files, plots.plot_curves(out / "calibrate.svg", {"residual": (ch, [residuals[c] for c in ch])}, "chi", "residual"))
    return files, {"chi": cal.chi, "J_eff": j_eff(spec)}


RUNNERS = {
    "bands": run_bands,
    "fdmap": run_fdmap,
    "wavefunction": run_wavefunction,
    "dynamics": run_dynamics,
    "pfscan": run_pfscan,
    "mefit": run_mefit,
    "calibrate": run_calibrate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mosaic-doublon", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="JSON config with lattice/emitters/run sections")
    p.add_argument("--out", type=Path, help="output directory (overrides run.output_dir)")
    p.add_argument("--kappa", type=int)
    p.add_argument("--u", type=float, dest="U")
    p.add_argument("--lambda", type=float, dest="lam", help="single lambda value")
    p.add_argument("--lambda-min", type=float)
    p.add_argument("--lambda-max", type=float)
    p.add_argument("--lambda-steps", type=int)
    p.add_argument("--two-omega-e", type=float, nargs="+", help="one or more 2*omega_e values")
    p.add_argument("--g", type=float)
    p.add_argument("--l-index", type=int, help="Fibonacci index n, L = F_n")
    p.add_argument("--t-final", type=float)
    p.add_argument("--c-mod", type=float)
    p.add_argument("--model", choices=("chain", "full"))
    p.add_argument("--workers", type=int)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    lat, em, run = cfg.lattice, cfg.emitters, cfg.run
    run.command = args.command
    for name in ("kappa", "U", "c_mod", "l_index"):
        if getattr(args, name) is not None:
            setattr(lat, name, getattr(args, name))
    if args.lam is not None:
        lat.lam = args.lam
        if args.command in ("fdmap", "pfscan", "mefit", "wavefunction"):
            run.lambdas = [args.lam]
    for name in ("lambda_min", "lambda_max", "lambda_steps"):
        if getattr(args, name) is not None:
            setattr(run, name, getattr(args, name))
            run.lambdas = None
    if args.two_omega_e is not None:
        em.two_omega_e = args.two_omega_e[0]
        run.two_omega_es = list(args.two_omega_e)
    if args.g is not None:
        em.g = args.g
    if args.t_final is not None:
        run.t_final = args.t_final
    if args.model is not None:
        run.model = args.model
    if args.workers is not None:
        run.workers = args.workers
    if args.out is not None:
        run.output_dir = str(args.out)
    return cfg


def execute(cfg: ExperimentConfig) -> RunManifest:
    cfg.validate()
    out = Path(cfg.run.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    atomic_write_text(out / "config.json", cfg.to_json())
    files, metrics = RUNNERS[cfg.run.command](cfg, out)
    manifest = RunManifest(
        command=cfg.run.command,
        config_sha256=cfg.sha256(),
        versions=artifact_versions(),
        wall_time_s=time.perf_counter() - t0,
        outputs=["config.json", *files],
        metrics=metrics,
    )
    manifest.write(out)
    return manifest


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        manifest = execute(cfg)
    except (ValidationError, AmbiguityError) as exc:
        print(f"validation error [{args.command}]: {exc}", file=sys.stderr)
        return 2
    except (ResourceError, MemoryError) as exc:
        print(f"resource error [{args.command}]: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error [{args.command}]: {exc}", file=sys.stderr)
        return 3
    print(f"{manifest.command}: wrote {len(manifest.outputs)} files to {cfg.run.output_dir} "
          f"in {manifest.wall_time_s:.1f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
