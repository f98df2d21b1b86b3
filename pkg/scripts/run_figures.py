"""Run the standard figure pipeline into ``runs/<name>/``.

Each entry is a dataclass config passed to :func:`mosaic_doublon.cli.execute`,
so every output directory carries its own ``config.json`` and ``manifest.json``.

    python scripts/run_figures.py             # everything
    python scripts/run_figures.py bands fdmap2
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from mosaic_doublon.cli import execute
from mosaic_doublon.config import ExperimentConfig


def _cfg(command, **sections) -> ExperimentConfig:
    cfg = ExperimentConfig()
    cfg.run.command = command
    for section, values in sections.items():
        for key, value in values.items():
            setattr(getattr(cfg, section), key, value)
    return cfg


FIGURES = {
    "bands": _cfg("bands", lattice={"U": -5.0}),
    "fdmap2": _cfg("fdmap", lattice={"kappa": 2, "U": -5.0, "l_index": 16},
                   run={"lambda_min": 0.1, "lambda_max": 2.0, "lambda_steps": 40}),
    "fdmap3": _cfg("fdmap", lattice={"kappa": 3, "U": -5.0, "l_index": 16},
                   run={"lambda_min": 0.1, "lambda_max": 2.0, "lambda_steps": 40}),
    "wavefunction": _cfg("wavefunction", lattice={"kappa": 3, "U": -5.0, "l_index": 10}),
    "dynamics": _cfg("dynamics", lattice={"kappa": 3, "U": -5.0, "l_index": 11}, run={"t_final": 200.0}),
    "pfscan": _cfg("pfscan", lattice={"kappa": 3, "U": -5.0},
                   run={"lambda_min": 0.0, "lambda_max": 1.0, "lambda_steps": 21}),
    "mefit": _cfg("mefit", lattice={"kappa": 3, "U": -5.0},
                  run={"lambda_min": 0.0, "lambda_max": 0.7, "lambda_steps": 15}),
    "calibrate": _cfg("calibrate", lattice={"kappa": 3, "U": -5.0, "l_index": 10, "lam": 0.8}),
}


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("names", nargs="*", help="subset of figures (default: all)")
    p.add_argument("--root", type=Path, default=Path("runs"))
    args = p.parse_args(argv)
    unknown = sorted(set(args.names) - set(FIGURES))
    if unknown:
        p.error(f"unknown figures {unknown}; choose from {sorted(FIGURES)}")
    for name in args.names or FIGURES:
        cfg = FIGURES[name]
        cfg.run.output_dir = str(args.root / name)
        manifest = execute(cfg)
        print(f"{name}: {len(manifest.outputs)} files in {manifest.wall_time_s:.1f} s {manifest.metrics or ''}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
