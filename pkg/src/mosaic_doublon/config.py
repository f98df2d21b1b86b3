"""Experiment configuration files and run manifests.

A configuration is a JSON document with three sections, ``lattice``,
``emitters`` and ``run``.  Command-line flags override file values.  The
configuration is validated in full before any computation starts.
"""

from __future__ import annotations

import hashlib
import json
import os
import platform
import tempfile
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, UnsupportedKappaError, ValidationError
from .model import EmitterSpec, LatticeSpec, SectorLayout, build_two_photon_basis, sector_for
from .spectral import check_budget

COMMANDS = ("bands", "fdmap", "wavefunction", "dynamics", "pfscan", "mefit", "calibrate")
FULL_ED_COMMANDS = ("wavefunction", "dynamics", "pfscan", "mefit", "calibrate")
T_MAX = 1e5


@dataclass
class LatticeConfig:
    l_index: int = 10
    kappa: int = 3
    lam: float = 0.0
    U: float = -5.0
    J: float = 1.0
    omega_c: float = 0.0
    c_mod: float = 1.0
    theta: float = 0.0
    boundary: str = "periodic"

    def to_spec(self) -> LatticeSpec:
        return LatticeSpec.from_fibonacci(
            self.l_index,
            kappa=self.kappa,
            lam=self.lam,
            U=self.U,
            J=self.J,
            omega_c=self.omega_c,
            c_mod=self.c_mod,
            theta=self.theta,
            boundary=self.boundary,
        )


@dataclass
class EmitterConfig:
    N: int = 2
    two_omega_e: float = -5.77
    g: float = 0.1
    n1: int = 0
    n2: int | None = None

    def to_spec(self, two_omega_e: float | None = None) -> EmitterSpec:
        w2 = self.two_omega_e if two_omega_e is None else two_omega_e
        return EmitterSpec(N=self.N, omega_e=w2 / 2, g=self.g, n1=self.n1, n2=self.n2)


@dataclass
class RunConfig:
    """``lambdas`` and ``two_omega_es``, when given, replace the default grids."""

    command: str = "bands"
    lambda_min: float = 0.0
    lambda_max: float = 1.0
    lambda_steps: int = 21
    lambdas: list | None = None
    two_omega_es: list | None = None
    k_steps: int = 101
    t_final: float = 2e4
    model: str = "chain"
    chi: float | None = None
    chi_candidates: list = field(default_factory=lambda: [0.5, 1.0, 1.5, 2.0])
    onset_threshold: float = 0.1
    workers: int = 1
    output_dir: str = "runs"
    deterministic: bool = True

    def lambda_grid(self) -> np.ndarray:
        if self.lambdas is not None:
            return np.asarray(self.lambdas, dtype=float)
        return np.linspace(self.lambda_min, self.lambda_max, self.lambda_steps)


def _section(cls, data: dict | None, name: str):
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f"unknown keys in [{name}]: {sorted(unknown)}")
    return cls(**data)


@dataclass
class ExperimentConfig:
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    emitters: EmitterConfig = field(default_factory=EmitterConfig)
    run: RunConfig = field(default_factory=RunConfig)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        unknown = set(data) - {"lattice", "emitters", "run"}
        if unknown:
            raise ConfigurationError(f"unknown config sections: {sorted(unknown)}")
        return cls(
            _section(LatticeConfig, data.get("lattice"), "lattice"),
            _section(EmitterConfig, data.get("emitters"), "emitters"),
            _section(RunConfig, data.get("run"), "run"),
        )

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path}: top level must be an object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {"lattice": asdict(self.lattice), "emitters": asdict(self.emitters), "run": asdict(self.run)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()

    def lattice_spec(self) -> LatticeSpec:
        return self.lattice.to_spec()

    def validate(self) -> None:
        """Check every precondition of the configured command."""
        run = self.run
        if run.command not in COMMANDS:
            raise ConfigurationError(f"unknown command {run.command!r}; choose from {COMMANDS}")
        spec = self.lattice_spec()
        em = self.emitters.to_spec()
        em.check_sites(spec.L)
        if run.model not in ("chain", "full"):
            raise ConfigurationError(f"run.model must be 'chain' or 'full', got {run.model!r}")
        if run.workers < 1:
            raise ConfigurationError("run.workers must be >= 1")
        if run.command == "bands":
            if run.k_steps < 1:
                raise ValidationError("momentum grid is empty (k_steps < 1)")
            return
        lams = run.lambda_grid()
        if lams.size == 0 or (run.lambdas is None and run.lambda_steps < 1):
            raise ValidationError("lambda grid is empty")
        if np.any(lams < 0) or not np.all(np.isfinite(lams)):
            raise ValidationError("lambda values must be finite and >= 0")
        if np.any(np.diff(lams) <= 0):
            raise ValidationError("lambda grid must be strictly ascending")
        if not 0 < run.t_final <= T_MAX:
            raise ValidationError(f"t_final must be in (0, {T_MAX:g}], got {run.t_final}")
        if run.command == "fdmap":
            if spec.kappa not in (2, 3):
                raise UnsupportedKappaError(f"fdmap overlays mobility edges for kappa in (2, 3); got {spec.kappa}")
            spec.check_doublon_regime()
            if run.model == "full":
                check_budget(build_two_photon_basis(spec.L).size)
            return
        spec.check_doublon_regime()
        if run.command == "calibrate":
            from .effective import CALIBRATION_MAX_L

            if spec.L > CALIBRATION_MAX_L:
                raise ValidationError(f"calibrate needs L <= {CALIBRATION_MAX_L}, got {spec.L}")
            if len(run.chi_candidates) < 2:
                raise ValidationError("calibrate needs at least two chi candidates")
        if run.command == "wavefunction":
            check_budget(build_two_photon_basis(spec.L).size)
        elif run.command in FULL_ED_COMMANDS:
            check_budget(SectorLayout(sector_for(em), spec.L).dim)


def artifact_versions() -> dict:
    from . import __version__

    versions = {"mosaic_doublon": __version__, "numpy": np.__version__, "python": platform.python_version()}
    try:
        import matplotlib

        versions["matplotlib"] = matplotlib.__version__
    except ImportError:
        pass
    return versions


@dataclass
class RunManifest:
    command: str
    config_sha256: str
    versions: dict
    wall_time_s: float
    outputs: list
    metrics: dict = field(default_factory=dict)

    def write(self, directory) -> Path:
        return atomic_write_text(Path(directory) / "manifest.json", json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


def atomic_write_text(path, text: str) -> Path:
    """Write ``text`` to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
