"""Effective single-particle chain for a tightly bound photon pair.

The doublon hops with ``J_eff`` and sits at ``2 omega_c + U - 2 J_eff`` plus
``chi * lambda_j`` on modulated sites.  Scattering states are dropped, so
comparisons with the full two-photon model use only its doublon band.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .bands import check_kappa, j_eff
from .errors import AmbiguityError, DomainError, ValidationError
from .model import HamiltonianMatrix, LatticeSpec, _chain, build_two_photon_basis, build_two_photon_h, mosaic_profile
from .spectral import doublon_window, eigensolve, fd_records

CALIBRATION_MAX_L = 89
AMBIGUITY_RTOL = 0.05


@dataclass(frozen=True)
class DoublonChainSpec:
    """``chi`` defaults to ``2 * base.c_mod``, the bare on-site doublon shift."""

    base: LatticeSpec
    chi: float | None = None

    def __post_init__(self):
        if self.chi is None:
            object.__setattr__(self, "chi", 2.0 * self.base.c_mod)
        if not self.chi > 0:
            raise ValidationError(f"chi must be > 0, got {self.chi}")

    def with_lambda(self, lam: float) -> "DoublonChainSpec":
        return replace(self, base=self.base.replace(lam=lam))

    @property
    def center(self) -> float:
        b = self.base
        return 2 * b.omega_c + b.U - 2 * j_eff(b)


def build_doublon_h(dspec: DoublonChainSpec) -> HamiltonianMatrix:
    b = dspec.base
    onsite = dspec.center + dspec.chi * mosaic_profile(b)
    return HamiltonianMatrix(_chain(b.L, onsite, j_eff(b), b.boundary), "doublon-chain")


def chain_mobility_edges(dspec: DoublonChainSpec) -> tuple[float, ...]:
    """Exact mobility edges of the chain from its Lyapunov exponent, ascending.

    With hopping ``t``, site energy ``c`` and modulation ``chi * lambda_j``:
    kappa = 2 gives ``|E - c| = 2 t^2 / (chi lambda)``, kappa = 3 gives
    ``E - c = +/- t sqrt(1 +/- 2 t / (chi lambda))`` (real branches only).
    """
    b = dspec.base
    check_kappa(b.kappa)
    if not b.lam > 0:
        raise DomainError(f"mobility edges need lambda > 0, got {b.lam}")
    c, t, v = dspec.center, j_eff(b), dspec.chi * b.lam
    if b.kappa == 2:
        offsets = [2 * t * t / v]
    else:
        offsets = [t * np.sqrt(1 + 2 * t / v)]
        if 2 * t / v <= 1:
            offsets.append(t * np.sqrt(1 - 2 * t / v))
    return tuple(sorted(float(c + s * d) for d in offsets for s in (-1, 1)))


@dataclass(frozen=True)
class ChiCalibration:
    chi: float
    residuals: dict


def full_model_doublon_fd(base: LatticeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Energies and diagonal-profile fd of the full model's doublon band."""
    basis = build_two_photon_basis(base.L)
    dec = eigensolve(build_two_photon_h(base))
    sel = doublon_window(dec.values, base)
    recs = fd_records(dec, base.lam, base.L, sel, profile_basis=basis)
    return np.array([r.E for r in recs]), np.array([r.fd for r in recs])


def calibrate_chi(base: LatticeSpec, candidates: Sequence[float]) -> ChiCalibration:
    """Pick the chain factor ``chi`` that best reproduces the full model.

    The residual for each candidate is the mean squared difference between
    the fractal dimensions of the full model's doublon band and of the chain,
    paired in ascending energy order.  Raises :class:`AmbiguityError` when the
    two best residuals are within 5% of each other.
    """
    if base.L > CALIBRATION_MAX_L:
        raise ValidationError(f"calibration runs full ED; need L <= {CALIBRATION_MAX_L}, got {base.L}")
    candidates = [float(c) for c in candidates]
    if len(candidates) < 2:
        raise ValidationError("need at least two candidates")
    _, fd_full = full_model_doublon_fd(base)
    residuals = {}
    for chi in candidates:
        dec = eigensolve(build_doublon_h(DoublonChainSpec(base, chi)))
        fd_chain = np.array([r.fd for r in fd_records(dec, base.lam, base.L)])
        residuals[chi] = float(np.mean((fd_full - fd_chain) ** 2))
    ranked = sorted(residuals, key=residuals.get)
    best, second = residuals[ranked[0]], residuals[ranked[1]]
    if second - best <= AMBIGUITY_RTOL * max(second, best):
        raise AmbiguityError(f"candidates {ranked[0]} and {ranked[1]} are indistinguishable", residuals)
    return ChiCalibration(chi=ranked[0], residuals=residuals)
