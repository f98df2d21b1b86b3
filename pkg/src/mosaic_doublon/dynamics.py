"""Emitter decay into the waveguide by exact spectral propagation.

The Hamiltonian of a sector is diagonalized once; every time sample is then
``psi(t) = V exp(-i E t) V^T psi(0)`` with no time-step error.  ``P_e`` is the
population of the head state (all emitters excited, no photons), which is
row 0 of every emitter sector.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bands import critical_lambda, group_velocity
from .errors import ConfigurationError, NormalizationError, ValidationError, WindowError
from .model import (
    EmitterSpec,
    HamiltonianMatrix,
    LatticeSpec,
    SectorLayout,
    build_emitter_h,
    build_two_photon_basis,
    build_two_photon_h,
    sector_for,
)
from .spectral import EigenDecomposition, eigensolve, spatial_profile, sweep

T_FINAL = 2e4
N_SAMPLES = 400
HEAD = 0


@dataclass(frozen=True)
class QuantumState:
    amplitudes: np.ndarray
    basis_tag: str
    time: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if abs(np.linalg.norm(amps) - 1) > 1e-10:
            raise NormalizationError(f"state norm {np.linalg.norm(amps):.12g} differs from 1")
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    pe: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("t", "pe"))
        for t, p in zip(self.times, self.pe):
            w.writerow((repr(float(t)), repr(float(p))))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Trajectory":
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls(np.array([float(r["t"]) for r in rows]), np.array([float(r["pe"]) for r in rows]))


@dataclass(frozen=True)
class PfScan:
    lambdas: np.ndarray
    pf: np.ndarray
    lambda_c: float | None
    degenerate: bool = False

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("lambda", "pf"))
        for lam, p in zip(self.lambdas, self.pf):
            w.writerow((repr(float(lam)), repr(float(p))))
        return buf.getvalue()


@dataclass(frozen=True)
class DecayFit:
    gamma: float
    r2: float
    window: tuple[float, float]


@dataclass(frozen=True)
class MEPoint:
    two_omega_e: float
    lambda_c_numeric: float
    lambda_c_analytic: float | None
    degenerate: bool = False


def default_times(t_final: float = T_FINAL, n: int = N_SAMPLES) -> np.ndarray:
    """``t = 0`` followed by ``n - 1`` log-spaced samples from ``1/J`` to ``t_final``."""
    if t_final <= 1:
        return np.linspace(0, t_final, n)
    return np.concatenate([[0.0], np.geomspace(1.0, t_final, n - 1)])


def initial_state(em: EmitterSpec, L: int, sector: str | None = None) -> QuantumState:
    sector = sector or sector_for(em)
    if sector != sector_for(em):
        raise ConfigurationError(f"sector {sector!r} is inconsistent with N={em.N}")
    lay = SectorLayout(sector, L)
    amps = np.zeros(lay.dim, dtype=complex)
    amps[HEAD] = 1.0
    return QuantumState(amps, sector)


class Propagator:
    """Spectral propagator; the decomposition is computed once and shared."""

    def __init__(self, H: HamiltonianMatrix | EigenDecomposition):
        self.dec = H if isinstance(H, EigenDecomposition) else eigensolve(H)

    @property
    def basis_tag(self) -> str:
        return self.dec.basis_tag

    def _coefficients(self, psi0: QuantumState) -> np.ndarray:
        if psi0.amplitudes.shape[0] != self.dec.values.shape[0]:
            raise ValidationError("state and Hamiltonian dimensions differ")
        return self.dec.vectors.T @ psi0.amplitudes

    def states(self, psi0: QuantumState, times) -> np.ndarray:
        """Full amplitude vectors, one row per time."""
        c = self._coefficients(psi0)
        times = np.asarray(times, dtype=float)
        phases = np.exp(-1j * np.outer(times - psi0.time, self.dec.values))
        return (phases * c) @ self.dec.vectors.T

    def evolve_state(self, psi0: QuantumState, t: float) -> QuantumState:
        amps = self.states(psi0, [t])[0]
        return QuantumState(amps, psi0.basis_tag, float(t))

    def amplitude(self, psi0: QuantumState, times, index: int = HEAD) -> np.ndarray:
        c = self._coefficients(psi0)
        times = np.asarray(times, dtype=float)
        phases = np.exp(-1j * np.outer(times - psi0.time, self.dec.values))
        return phases @ (self.dec.vectors[index] * c)


def evolve(H, psi0: QuantumState, times) -> Trajectory:
    """``P_e(t)`` on ``times`` (must be ascending) starting from ``psi0``."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or np.any(np.diff(times) < 0):
        raise ValidationError("times must be a non-empty ascending grid")
    prop = H if isinstance(H, Propagator) else Propagator(H)
    pe = np.abs(prop.amplitude(psi0, times)) ** 2
    return Trajectory(times, pe)


def pf(traj: Trajectory, t_final: float = T_FINAL) -> float:
    """``P_e`` at the sample nearest ``t_final``."""
    if traj.times.size == 0:
        raise ValidationError("empty trajectory")
    if t_final > traj.times.max() * (1 + 1e-12):
        raise ValidationError(f"t_final = {t_final} beyond the last sample {traj.times.max()}")
    return float(traj.pe[np.argmin(np.abs(traj.times - t_final))])


def fit_decay_rate(traj: Trajectory, window: tuple[float, float]) -> DecayFit:
    """Least-squares slope of ``ln P_e`` over ``window``; ``gamma = -slope``."""
    t0, t1 = window
    mask = (traj.times >= t0) & (traj.times <= t1)
    if mask.sum() < 3:
        raise WindowError(f"window {window} holds fewer than 3 samples")
    t, p = traj.times[mask], traj.pe[mask]
    if np.any(p <= 0):
        raise WindowError("non-positive P_e inside the fit window")
    y = np.log(p)
    slope, intercept = np.polyfit(t, y, 1)
    ss_tot = np.sum((y - y.mean()) ** 2)
    ss_res = np.sum((y - (slope * t + intercept)) ** 2)
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return DecayFit(gamma=float(-slope), r2=float(r2), window=(float(t0), float(t1)))


def return_time(spec: LatticeSpec) -> float:
    """Earliest time an emitted doublon can come back to the emitters.

    ``L / max v_g`` on a ring, ``2 L / max v_g`` with open ends (worst case
    emitter at a boundary).
    """
    K = np.linspace(0, np.pi, 2001)
    vmax = float(np.max(group_velocity(K, spec)))
    return (spec.L if spec.boundary == "periodic" else 2 * spec.L) / vmax


def markovian_window(traj: Trajectory, spec: LatticeSpec, t_start: float = 10.0) -> tuple[float, float]:
    """From ``t_start`` to the first decade of decay, cut at the return time."""
    t_end = return_time(spec)
    p_start = traj.pe[np.argmin(np.abs(traj.times - t_start))]
    below = np.nonzero((traj.times > t_start) & (traj.pe <= p_start / 10))[0]
    if below.size:
        t_end = min(t_end, float(traj.times[below[0]]))
    return (t_start, t_end)


@dataclass(frozen=True)
class _PfTask:
    spec: LatticeSpec
    em: EmitterSpec
    t_final: float

    def __call__(self, lam: float) -> float:
        spec = self.spec.replace(lam=lam)
        H = build_emitter_h(spec, self.em)
        traj = evolve(H, initial_state(self.em, spec.L), default_times(self.t_final))
        return pf(traj, self.t_final)


def onset_index(pf_values: Sequence[float], threshold: float, persistence: int = 2) -> int | None:
    """First index whose value and the next ``persistence`` values exceed ``threshold``."""
    v = np.asarray(pf_values)
    for i in range(len(v)):
        if np.all(v[i : i + persistence + 1] > threshold):
            return i
    return None


def lambda_c_scan(
    spec: LatticeSpec,
    em: EmitterSpec,
    lambdas: Sequence[float],
    onset_threshold: float = 0.1,
    t_final: float = T_FINAL,
    persistence: int = 2,
    workers: int = 1,
) -> PfScan:
    """Long-time ``P_f`` over a lambda grid and the onset ``lambda_c``.

    ``degenerate`` is set when ``P_f`` already exceeds the threshold at the
    first grid point, so no transition was bracketed.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(np.diff(lambdas) <= 0):
        raise ValidationError("lambda grid must be strictly ascending")
    values = np.array(sweep(_PfTask(spec, em, t_final), list(lambdas), workers))
    i = onset_index(values, onset_threshold, persistence)
    lam_c = None if i is None else float(lambdas[i])
    return PfScan(lambdas, values, lam_c, degenerate=(i == 0))


def me_from_dynamics(
    spec: LatticeSpec,
    two_omega_es: Sequence[float],
    lambdas: Sequence[float],
    g: float = 0.1,
    n1: int = 0,
    **scan_kwargs,
) -> list[MEPoint]:
    """Dynamics-based mobility-edge curve; points with no onset are omitted."""
    curve = []
    for w2 in two_omega_es:
        em = EmitterSpec(N=2, omega_e=w2 / 2, g=g, n1=n1)
        scan = lambda_c_scan(spec, em, lambdas, **scan_kwargs)
        if scan.lambda_c is None:
            continue
        curve.append(MEPoint(float(w2), scan.lambda_c, critical_lambda(w2, spec), scan.degenerate))
    return curve


def curve_to_csv(curve: Sequence[MEPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("two_omega_e", "lambda_c_numeric", "lambda_c_analytic"))
    for p in curve:
        analytic = "" if p.lambda_c_analytic is None else repr(p.lambda_c_analytic)
        w.writerow((repr(p.two_omega_e), repr(p.lambda_c_numeric), analytic))
    return buf.getvalue()


def resonant_eigenstate(spec: LatticeSpec, energy: float) -> tuple[float, np.ndarray]:
    """Two-photon eigenpair closest to ``energy``."""
    dec = eigensolve(build_two_photon_h(spec))
    i = int(np.argmin(np.abs(dec.values - energy)))
    return float(dec.values[i]), dec.vectors[:, i]


def select_coupling_sites(spec: LatticeSpec, two_omega_e: float) -> tuple[int, int]:
    """Coupling positions for the localized regime.

    First: the site where the resonant localized doublon has most weight.
    Second: the modulated site (``j = 0 mod kappa``) where it has least.
    """
    _, vec = resonant_eigenstate(spec, two_omega_e)
    prof = spatial_profile(vec, build_two_photon_basis(spec.L))
    mosaic = np.nonzero(prof.site % spec.kappa == 0)[0]
    return prof.peak(), int(mosaic[np.argmin(prof.weight[mosaic])])


def count_local_maxima(traj: Trajectory, after: float = 100.0, prominence: float = 1e-3) -> int:
    """Local maxima of ``P_e`` after ``after`` whose topographic prominence exceeds ``prominence``.

    The prominence of a peak is its height above the higher of the two lowest
    points separating it from the nearest taller sample on either side.
    """
    p = traj.pe[traj.times > after]
    count = 0
    for i in range(1, p.size - 1):
        if not (p[i] > p[i - 1] and p[i] >= p[i + 1]):
            continue
        left = p[:i][::-1]
        right = p[i + 1 :]
        bases = []
        for side in (left, right):
            taller = np.nonzero(side > p[i])[0]
            stop = taller[0] if taller.size else side.size
            bases.append(side[:stop].min() if stop else p[i])
        if p[i] - max(bases) > prominence:
            count += 1
    return count
