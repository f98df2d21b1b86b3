"""Closed-form two-photon results for the uniform Bose-Hubbard chain.

Bands, effective doublon hopping, mobility-edge formulas for the mosaic
potential, the supercorrelated decay rate and the relative-coordinate
wavefunctions.  Functions broadcast over numpy arrays where that makes sense.

Conventions: ``K`` is the centre-of-mass momentum in ``[-pi, pi]``, ``k`` the
relative momentum, ``r = m - n`` the relative coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BranchCutError,
    DomainError,
    NonNormalizableError,
    ResonanceError,
    SingularParameterError,
    UnsupportedKappaError,
    ValidationError,
)
from .model import EmitterSpec, LatticeSpec


@dataclass(frozen=True)
class BandPoint:
    K: float
    k: float
    E: float


@dataclass(frozen=True)
class MobilityEdgePair:
    kappa: int
    branches: tuple[float, ...]
    E0: float
    J_eff: float


@dataclass(frozen=True)
class DecayPrediction:
    Gamma: float
    K0: float
    v_g: float
    f_factor: float


def _hop_K(K, spec):
    return 4 * spec.J * np.cos(np.asarray(K) / 2)


def scattering_energy(K, k, spec: LatticeSpec):
    return 2 * spec.omega_c - _hop_K(K, spec) * np.cos(k)


def bound_energy(K, spec: LatticeSpec, sign: int = -1):
    """Doublon band ``2 omega_c +/- sqrt(U^2 + (4 J cos(K/2))^2)``.

    ``sign=-1`` is the band below the continuum (the physical one for U < 0).
    """
    if sign not in (1, -1):
        raise ValidationError("sign must be +1 or -1")
    return 2 * spec.omega_c + sign * np.sqrt(spec.U**2 + _hop_K(K, spec) ** 2)


def physical_branch(spec: LatticeSpec) -> int:
    """Sign of the bound band split off by the interaction."""
    if spec.U == 0:
        raise DomainError("no bound band at U = 0")
    return 1 if spec.U > 0 else -1


def doublon_band_edges(spec: LatticeSpec) -> tuple[float, float]:
    s = physical_branch(spec)
    inner = 2 * spec.omega_c + s * abs(spec.U)
    outer = 2 * spec.omega_c + s * np.sqrt(spec.U**2 + 16 * spec.J**2)
    return (min(inner, outer), max(inner, outer))


def j_eff(spec: LatticeSpec) -> float:
    """Second-order doublon hopping ``2 J^2 / sqrt(U^2 + 8 J^2)``."""
    return 2 * spec.J**2 / np.sqrt(spec.U**2 + 8 * spec.J**2)


def doublon_zero_energy(spec: LatticeSpec) -> float:
    """Band centre ``E_0``: the lower doublon band at ``K = pi/2``."""
    return 2 * spec.omega_c - np.sqrt(spec.U**2 + 8 * spec.J**2)


def check_kappa(kappa: int) -> None:
    if kappa not in (2, 3):
        msg = "model is trivial for kappa = 1" if kappa == 1 else f"no closed form for kappa = {kappa}"
        raise UnsupportedKappaError(f"mobility edges available for kappa in {{2, 3}}: {msg}")


def mobility_edges(spec: LatticeSpec) -> MobilityEdgePair:
    """Critical energies of the doublon band, sorted ascending.

    kappa = 2: ``E_0 +/- J_eff / lambda``.
    kappa = 3: ``E_0 +/- J_eff sqrt(1 +/- J_eff / lambda)``, real branches only.
    """
    check_kappa(spec.kappa)
    if not spec.lam > 0:
        raise DomainError(f"mobility edges need lambda > 0, got {spec.lam}")
    E0, t = doublon_zero_energy(spec), j_eff(spec)
    ratio = t / spec.lam
    if spec.kappa == 2:
        offsets = [ratio]
    else:
        offsets = [t * np.sqrt(1 + ratio)]
        if 1 - ratio >= 0:
            offsets.append(t * np.sqrt(1 - ratio))
    branches = sorted([E0 - d for d in offsets] + [E0 + d for d in offsets])
    return MobilityEdgePair(spec.kappa, tuple(float(b) for b in branches), float(E0), float(t))


def critical_lambda(two_omega_e: float, spec: LatticeSpec) -> float | None:
    """Smallest lambda at which a mobility edge reaches ``two_omega_e``.

    Returns ``None`` when no finite lambda exists (the band centre, and for
    kappa = 3 the asymptote ``|2 omega_e - E_0| = J_eff``).
    """
    check_kappa(spec.kappa)
    lo, hi = doublon_band_edges(spec)
    if not lo < two_omega_e < hi:
        raise DomainError(f"2*omega_e = {two_omega_e} outside the doublon band ({lo:.6g}, {hi:.6g})")
    E0, t = doublon_zero_energy(spec), j_eff(spec)
    eps = abs(two_omega_e - E0)
    if eps <= 1e-12 * max(1.0, abs(E0)):
        return None
    if spec.kappa == 2:
        return t / eps
    x = (eps / t) ** 2
    if x < 1:
        return t / (1 - x)  # inner pair, E_0 +/- J_eff sqrt(1 - J_eff/lambda)
    if x > 1:
        return t / (x - 1)  # outer pair, E_0 +/- J_eff sqrt(1 + J_eff/lambda)
    return None


def group_velocity(K, spec: LatticeSpec):
    """``|dE_B/dK| = 4 J^2 sin K / sqrt(U^2 + 16 J^2 cos^2(K/2))``."""
    K = np.asarray(K)
    return 4 * spec.J**2 * np.sin(K) / np.sqrt(spec.U**2 + 16 * spec.J**2 * np.cos(K / 2) ** 2)


def resonant_momentum(two_omega_e: float, spec: LatticeSpec) -> float:
    """``K_0`` in ``(0, pi)`` solving ``E_B(K_0) = 2 omega_e`` on the physical branch."""
    s = physical_branch(spec)
    detuning = two_omega_e - 2 * spec.omega_c
    if s * detuning <= 0:
        raise ResonanceError(f"2*omega_e = {two_omega_e} is on the wrong side of the continuum")
    c2 = (detuning**2 - spec.U**2) / (16 * spec.J**2)
    if not 0 < c2 < 1:
        raise ResonanceError(f"2*omega_e = {two_omega_e} is not resonant with the doublon band")
    return float(2 * np.arccos(np.sqrt(c2)))


def decay_rate(spec: LatticeSpec, em: EmitterSpec, f_factor: float = 1.0) -> DecayPrediction:
    """Supercorrelated rate ``(2 g^4 / J^3) rho(K_0) f^2``, ``rho = J / v_g``.

    The geometric factor ``f`` is supplied by the caller; ``f = 1`` is the
    co-located default.
    """
    K0 = resonant_momentum(em.two_omega_e, spec)
    vg = float(group_velocity(K0, spec))
    rho = spec.J / vg
    gamma = 2 * em.g**4 / spec.J**3 * rho * f_factor**2
    return DecayPrediction(Gamma=float(gamma), K0=K0, v_g=vg, f_factor=float(f_factor))


def greens_function_r0(E, K, spec: LatticeSpec):
    """Local relative-coordinate Green's function outside the continuum.

    ``sign(E - 2 omega_c) / sqrt((E - 2 omega_c)^2 - 16 J^2 cos^2(K/2))``.
    """
    a = np.asarray(E, dtype=float) - 2 * spec.omega_c
    b = _hop_K(K, spec)
    disc = a**2 - b**2
    if np.any(disc <= 0):
        raise BranchCutError("energy inside the scattering continuum at this K")
    return np.sign(a) / np.sqrt(disc)


def bound_decay_ratio(K, spec: LatticeSpec) -> float:
    """``rho = (sqrt(U^2 + 16 J_K^2) - |U|) / (4 J_K)`` with ``J_K = J cos(K/2)``."""
    JK = spec.J * np.cos(K / 2)
    if abs(JK) < 1e-15:
        return 0.0
    return float((np.sqrt(spec.U**2 + 16 * JK**2) - abs(spec.U)) / (4 * JK))


def bound_wavefunction(r, K, spec: LatticeSpec):
    """Normalized bound-pair amplitude ``psi(0) s^|r|``.

    ``s = rho`` for attractive and ``s = -rho`` for repulsive interaction,
    where the pair sits above the continuum and alternates in sign.  At
    ``K = pi`` the pair is a single doubly occupied site (``delta_{r,0}``).
    """
    r = np.asarray(r)
    rho = bound_decay_ratio(K, spec)
    if spec.U > 0:
        rho = -rho
    if rho == 0.0:
        return np.where(r == 0, 1.0, 0.0)
    if abs(rho) >= 1:
        raise NonNormalizableError(f"|rho| = {abs(rho):.6g} >= 1: pair is unbound")
    psi0 = np.sqrt((1 - rho**2) / (1 + rho**2))
    return psi0 * rho ** np.abs(r)


def scattering_wavefunction(r, k, K, spec: LatticeSpec, A: float = 1.0):
    """``A [cos(k r) + U sin(k|r|) / (4 J sin k cos(K/2))]``."""
    denom = 4 * spec.J * np.sin(k) * np.cos(K / 2)
    if abs(denom) < 1e-14:
        raise SingularParameterError("sin(k) cos(K/2) vanishes")
    r = np.asarray(r)
    return A * (np.cos(k * r) + spec.U * np.sin(k * np.abs(r)) / denom)

