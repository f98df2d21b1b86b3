"""Exact diagonalization and localization diagnostics.

``fd = -ln(IPR) / ln(L_eff)`` is evaluated directly at finite size and
classified with fixed margins (0.2 / 0.8 by default); there is no L -> inf
extrapolation.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .bands import doublon_zero_energy
from .errors import DegenerateProfileError, NormalizationError, ResourceError, ValidationError
from .model import HamiltonianMatrix, LatticeSpec, TwoPhotonBasis, build_two_photon_basis, build_two_photon_h

DENSE_BUDGET = 5000
NORM_TOL = 1e-8

EXTENDED = "extended"
LOCALIZED = "localized"
MARGIN = "margin"


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray
    basis_tag: str

    def residual(self, H: HamiltonianMatrix) -> np.ndarray:
        """Per-pair ``||H v - E v||``, in the order of ``values``."""
        R = H.entries @ self.vectors - self.vectors * self.values
        return np.linalg.norm(R, axis=0)

    def orthonormality_error(self) -> float:
        V = self.vectors
        return float(np.max(np.abs(V.T @ V - np.eye(V.shape[1]))))


def check_budget(dim: int) -> None:
    if dim > DENSE_BUDGET:
        raise ResourceError(
            f"dense eigensolve of dimension {dim} exceeds the budget of {DENSE_BUDGET}; "
            "use the effective doublon chain or a smaller L"
        )


def eigensolve(H: HamiltonianMatrix) -> EigenDecomposition:
    check_budget(H.dim)
    values, vectors = np.linalg.eigh(H.entries)
    return EigenDecomposition(values, vectors, H.basis_tag)


def ipr(v) -> float:
    v = np.asarray(v)
    norm = np.linalg.norm(v)
    if abs(norm - 1) > NORM_TOL:
        raise NormalizationError(f"state norm {norm:.12g} differs from 1")
    return float(np.sum(np.abs(v) ** 4))


def fractal_dim(ipr_value, L_eff: int):
    if L_eff < 2:
        raise ValidationError("fractal dimension needs L_eff >= 2")
    return np.clip(-np.log(ipr_value) / np.log(L_eff), 0.0, 1.0)


def classify(fd: float, lo: float = 0.2, hi: float = 0.8) -> str:
    if fd < lo:
        return LOCALIZED
    if fd > hi:
        return EXTENDED
    return MARGIN


@dataclass(frozen=True)
class FdRecord:
    E: float
    ipr: float
    fd: float
    lam: float
    cls: str


@dataclass(frozen=True)
class SpatialProfile:
    site: np.ndarray
    weight: np.ndarray

    def participation(self) -> float:
        """Effective number of occupied sites, ``1 / sum w^2``."""
        return float(1.0 / np.sum(self.weight**2))

    def peak(self) -> int:
        return int(self.site[np.argmax(self.weight)])


def spatial_profile(state, basis: TwoPhotonBasis) -> SpatialProfile:
    """Doublon occupation ``|Psi(j, j)|^2`` renormalized over the diagonal."""
    state = np.asarray(state)
    if abs(np.linalg.norm(state) - 1) > NORM_TOL:
        raise NormalizationError("state must be normalized")
    w = np.abs(state[basis.diagonal_indices]) ** 2
    total = w.sum()
    if total < 1e-14:
        raise DegenerateProfileError("state has no weight on doubly occupied sites")
    return SpatialProfile(np.arange(basis.L), w / total)


def doublon_window(values: np.ndarray, spec: LatticeSpec) -> np.ndarray:
    """Indices of the ``L`` eigenvalues closest to the band centre ``E_0``, ascending."""
    E0 = doublon_zero_energy(spec)
    idx = np.argsort(np.abs(values - E0), kind="stable")[: spec.L]
    return np.sort(idx)


def fd_records(
    dec: EigenDecomposition,
    lam: float,
    L_eff: int,
    select: np.ndarray | None = None,
    profile_basis: TwoPhotonBasis | None = None,
    thresholds: tuple[float, float] = (0.2, 0.8),
) -> list[FdRecord]:
    """One record per selected eigenstate.

    With ``profile_basis`` the IPR is taken over the diagonal doublon profile
    instead of the full amplitude vector.
    """
    idx = np.arange(len(dec.values)) if select is None else np.asarray(select)
    V = dec.vectors[:, idx]
    if profile_basis is not None:
        w = np.abs(V[profile_basis.diagonal_indices, :]) ** 2
        w = w / w.sum(axis=0)
        iprs = np.sum(w**2, axis=0)
    else:
        iprs = np.sum(np.abs(V) ** 4, axis=0)
    fds = fractal_dim(iprs, L_eff)
    lo, hi = thresholds
    return [
        FdRecord(float(dec.values[i]), float(p), float(f), float(lam), classify(f, lo, hi))
        for i, p, f in zip(idx, iprs, fds)
    ]


def sweep(fn: Callable, items: Sequence, workers: int = 1) -> list:
    """Map ``fn`` over ``items`` in order, optionally on a bounded process pool."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class _FdTask:
    spec: object
    doublon_only: bool
    measure: str
    thresholds: tuple[float, float]

    def __call__(self, lam: float) -> list[FdRecord]:
        from .effective import DoublonChainSpec, build_doublon_h

        if isinstance(self.spec, DoublonChainSpec):
            d = self.spec.with_lambda(lam)
            dec = eigensolve(build_doublon_h(d))
            return fd_records(dec, lam, d.base.L, thresholds=self.thresholds)
        spec = self.spec.replace(lam=lam)
        basis = build_two_photon_basis(spec.L)
        dec = eigensolve(build_two_photon_h(spec))
        select = doublon_window(dec.values, spec) if self.doublon_only else None
        if self.measure == "diagonal":
            return fd_records(dec, lam, spec.L, select, profile_basis=basis, thresholds=self.thresholds)
        return fd_records(dec, lam, basis.size, select, thresholds=self.thresholds)


def fd_map(
    spec,
    lambdas: Iterable[float],
    doublon_only: bool = False,
    measure: str = "basis",
    thresholds: tuple[float, float] = (0.2, 0.8),
    workers: int = 1,
) -> list[FdRecord]:
    """Eigenvalues and fractal dimensions over a lambda grid.

    ``spec`` is a :class:`LatticeSpec` (full two-photon model) or a
    ``DoublonChainSpec``.  For the full model ``measure="basis"`` uses the
    basis dimension as ``L_eff``; ``measure="diagonal"`` uses the doublon
    profile along ``m = n`` with ``L_eff = L``.
    """
    lambdas = [float(x) for x in lambdas]
    if any(b < a for a, b in zip(lambdas, lambdas[1:])):
        raise ValidationError("lambda grid must be sorted ascending")
    if measure not in ("basis", "diagonal"):
        raise ValidationError(f"unknown measure {measure!r}")
    if isinstance(spec, LatticeSpec):
        check_budget(build_two_photon_basis(spec.L).size)
    task = _FdTask(spec, doublon_only, measure, tuple(thresholds))
    out: list[FdRecord] = []
    for recs in sweep(task, lambdas, workers):
        out.extend(recs)
    return out


def numerical_me(records: Sequence[FdRecord], min_points: int = 10) -> dict[float, list[float]]:
    """Energies where the class flips between localized and extended.

    For each lambda the states are sorted by energy, margin states are
    skipped, and each flip between consecutive classified states yields the
    midpoint of their two eigenvalues.  Lambdas without a flip map to ``[]``.
    """
    by_lam: dict[float, list[FdRecord]] = {}
    for rec in records:
        by_lam.setdefault(rec.lam, []).append(rec)
    if len(by_lam) < min_points:
        raise ValidationError(f"need records on >= {min_points} lambda points, got {len(by_lam)}")
    out = {}
    for lam in sorted(by_lam):
        recs = sorted((r for r in by_lam[lam] if r.cls != MARGIN), key=lambda r: r.E)
        edges = [
            0.5 * (a.E + b.E) for a, b in zip(recs, recs[1:]) if a.cls != b.cls
        ]
        out[lam] = edges
    return out


FD_COLUMNS = ("lambda", "E", "ipr", "fd", "class")


def records_to_csv(records: Iterable[FdRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FD_COLUMNS)
    for r in records:
        w.writerow([repr(r.lam), repr(r.E), repr(r.ipr), repr(r.fd), r.cls])
    return buf.getvalue()


def records_from_csv(text: str) -> list[FdRecord]:
    rows = csv.DictReader(io.StringIO(text))
    if tuple(rows.fieldnames or ()) != FD_COLUMNS:
        raise ValidationError(f"expected columns {FD_COLUMNS}, got {rows.fieldnames}")
    return [
        FdRecord(E=float(r["E"]), ipr=float(r["ipr"]), fd=float(r["fd"]), lam=float(r["lambda"]), cls=r["class"])
        for r in rows
    ]
