"""Parameter types and dense Hamiltonian builders.

Energies are in units of the hopping ``J`` (default 1) with hbar = 1.  All
builders are pure functions of their arguments.

Two-photon states are stored on the ordered pairs ``m <= n``:
``|m,n> = a_m^+ a_n^+ |vac>`` for ``m != n`` and
``|m,m> = (a_m^+)^2 / sqrt(2) |vac>``.  With this normalization a hop that
creates or destroys a double occupancy carries an extra factor ``sqrt(2)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from .errors import ConfigurationError, ValidationError

Boundary = Literal["periodic", "open"]
Sector = Literal["one-excitation", "two-excitation"]

BASIS_TAGS = ("single-photon", "two-photon", "doublon-chain", "one-excitation", "two-excitation")
SYMMETRY_TOL = 1e-12
FIBONACCI_MAX_INDEX = 40


@dataclass(frozen=True)
class FibonacciIndex:
    n: int
    value: int


def fibonacci(n: int) -> int:
    """``F_n`` indexed so that ``F_10 = 55`` and ``F_16 = 987`` (``F_1 = F_2 = 1``)."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValidationError(f"Fibonacci index must be an integer, got {n!r}")
    if not 0 <= n <= FIBONACCI_MAX_INDEX:
        raise ValidationError(f"Fibonacci index {n} outside [0, {FIBONACCI_MAX_INDEX}]")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


@dataclass(frozen=True)
class LatticeSpec:
    """Waveguide and mosaic-potential parameters.

    ``c_mod`` multiplies ``sum_j lambda_j a_j^+ a_j^+ a_j a_j``; a doublon on a
    modulated site is shifted by ``2 * c_mod * lambda_j``.  The default
    ``c_mod = 1`` gives the shift ``2 lambda_j`` under which the kappa = 3
    mobility-edge formula is exact for the effective chain.
    """

    L: int
    kappa: int = 2
    omega_num: int = 0
    omega_den: int = 1
    theta: float = 0.0
    lam: float = 0.0
    omega_c: float = 0.0
    J: float = 1.0
    U: float = -5.0
    c_mod: float = 1.0
    boundary: Boundary = "periodic"

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 2:
            raise ValidationError(f"L must be an integer >= 2, got {self.L}")
        if int(self.kappa) != self.kappa or self.kappa < 1:
            raise ValidationError(f"kappa must be an integer >= 1, got {self.kappa}")
        if self.omega_den == 0:
            raise ValidationError("omega_den must be nonzero")
        if self.boundary not in ("periodic", "open"):
            raise ValidationError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")
        if self.boundary == "periodic" and self.omega_den != self.L:
            raise ValidationError(
                f"periodic boundary needs omega_den == L (rational approximant), "
                f"got omega_den={self.omega_den}, L={self.L}"
            )
        if not self.c_mod > 0:
            raise ValidationError(f"c_mod must be > 0, got {self.c_mod}")
        for name in ("theta", "lam", "omega_c", "J", "U", "c_mod"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")

    @classmethod
    def from_fibonacci(cls, n: int, **kwargs) -> "LatticeSpec":
        """Ring of ``L = F_n`` sites with ``omega = F_{n-1} / F_n``."""
        if n < 3:
            raise ValidationError("Fibonacci approximant needs n >= 3 (L >= 2)")
        return cls(L=fibonacci(n), omega_num=fibonacci(n - 1), omega_den=fibonacci(n), **kwargs)

    @property
    def omega(self) -> float:
        return self.omega_num / self.omega_den

    @property
    def M(self) -> int:
        """Number of mosaic cells (modulated sites)."""
        return -(-self.L // self.kappa)

    def replace(self, **changes) -> "LatticeSpec":
        from dataclasses import replace

        return replace(self, **changes)

    def check_doublon_regime(self) -> None:
        """Doublon analyses assume an isolated bound band, |U| >= 4J."""
        if abs(self.U) < 4 * abs(self.J):
            raise ValidationError(f"doublon runs need |U| >= 4J, got U={self.U}, J={self.J}")


@dataclass(frozen=True)
class EmitterSpec:
    N: int = 2
    omega_e: float = -5.77 / 2
    g: float = 0.1
    n1: int = 0
    n2: int | None = None

    def __post_init__(self):
        if self.N not in (1, 2):
            raise ValidationError(f"N must be 1 or 2, got {self.N}")
        if self.n2 is None:
            object.__setattr__(self, "n2", self.n1)
        if not (math.isfinite(self.omega_e) and math.isfinite(self.g)):
            raise ValidationError("omega_e and g must be finite")

    @property
    def x(self) -> int:
        return self.n1 - self.n2

    @property
    def two_omega_e(self) -> float:
        return 2.0 * self.omega_e

    def check_sites(self, L: int) -> None:
        for site in (self.n1, self.n2):
            if not 0 <= site < L:
                raise ValidationError(f"coupling site {site} outside [0, {L})")


@dataclass(frozen=True)
class TwoPhotonBasis:
    L: int
    pairs: tuple[tuple[int, int], ...]
    index_of: dict = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def diagonal_indices(self) -> np.ndarray:
        """Row indices of the doubly occupied states ``|j,j>``, ordered by j."""
        return np.array([self.index_of[(j, j)] for j in range(self.L)])

    def __len__(self):
        return len(self.pairs)


def build_two_photon_basis(L: int) -> TwoPhotonBasis:
    if L < 2:
        raise ValidationError(f"L must be >= 2, got {L}")
    pairs = tuple((m, n) for m in range(L) for n in range(m, L))
    return TwoPhotonBasis(L=L, pairs=pairs, index_of={p: i for i, p in enumerate(pairs)})


@dataclass(frozen=True)
class HamiltonianMatrix:
    entries: np.ndarray
    basis_tag: str

    def __post_init__(self):
        H = np.asarray(self.entries, dtype=float)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValidationError(f"Hamiltonian must be square, got shape {H.shape}")
        if self.basis_tag not in BASIS_TAGS:
            raise ValidationError(f"unknown basis tag {self.basis_tag!r}")
        if not np.all(np.isfinite(H)):
            raise ValidationError("Hamiltonian has non-finite entries")
        asym = np.max(np.abs(H - H.T)) if H.size else 0.0
        if asym >= SYMMETRY_TOL:
            raise ValidationError(f"Hamiltonian not symmetric: max |H - H^T| = {asym:.3e}")
        object.__setattr__(self, "entries", H)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def save(self, path) -> Path:
        """Write a debugging dump.

        ``.npz`` stores ``entries`` and ``basis_tag`` arrays; ``.csv`` writes a
        ``# basis_tag=<tag>`` comment line followed by one row per matrix row.
        """
        path = Path(path)
        if path.suffix == ".npz":
            np.savez(path, entries=self.entries, basis_tag=np.array(self.basis_tag))
        elif path.suffix == ".csv":
            buf = io.StringIO()
            buf.write(f"# basis_tag={self.basis_tag}\n")
            writer = csv.writer(buf, lineterminator="\n")
            for row in self.entries:
                writer.writerow([repr(float(x)) for x in row])
            path.write_text(buf.getvalue())
        else:
            raise ValidationError(f"unsupported dump format {path.suffix!r} (use .npz or .csv)")
        return path

    @classmethod
    def load(cls, path) -> "HamiltonianMatrix":
        path = Path(path)
        if path.suffix == ".npz":
            with np.load(path) as data:
                return cls(entries=data["entries"], basis_tag=str(data["basis_tag"]))
        lines = path.read_text().splitlines()
        if not lines or not lines[0].startswith("# basis_tag="):
            raise ValidationError(f"{path}: missing basis_tag header")
        tag = lines[0].split("=", 1)[1].strip()
        rows = [[float(x) for x in row] for row in csv.reader(lines[1:])]
        return cls(entries=np.array(rows, dtype=float).reshape(len(rows), -1), basis_tag=tag)


def mosaic_potential(j, spec: LatticeSpec):
    """``lambda cos(2 pi (omega j + theta))`` on sites ``j = 0 mod kappa``, else 0.

    Accepts a scalar site or an integer array.
    """
    j_arr = np.asarray(j)
    # reduce omega*j mod 1 in exact integer arithmetic before the cosine
    phase = (j_arr * spec.omega_num % spec.omega_den) / spec.omega_den + spec.theta
    value = np.where(j_arr % spec.kappa == 0, spec.lam * np.cos(2 * np.pi * phase), 0.0)
    return float(value) if value.ndim == 0 else value


def mosaic_profile(spec: LatticeSpec) -> np.ndarray:
    return mosaic_potential(np.arange(spec.L), spec)


def _neighbors(L: int, boundary: str) -> list[list[int]]:
    out = []
    for j in range(L):
        nb = {j - 1, j + 1} if boundary == "periodic" else {s for s in (j - 1, j + 1) if 0 <= s < L}
        out.append(sorted({s % L for s in nb} - {j}))
    return out


def _chain(L: int, onsite, hopping: float, boundary: str) -> np.ndarray:
    H = np.diag(np.broadcast_to(np.asarray(onsite, dtype=float), (L,)).copy())
    for j, nbs in enumerate(_neighbors(L, boundary)):
        for s in nbs:
            H[j, s] = -hopping
    return H


def build_single_photon_h(spec: LatticeSpec) -> HamiltonianMatrix:
    """Tight-binding block; the interaction terms vanish for one photon."""
    return HamiltonianMatrix(_chain(spec.L, spec.omega_c, spec.J, spec.boundary), "single-photon")


def _two_photon_entries(spec: LatticeSpec, basis: TwoPhotonBasis) -> np.ndarray:
    L, J = spec.L, spec.J
    lam_j = mosaic_profile(spec)
    nbs = _neighbors(L, spec.boundary)
    idx = basis.index_of
    H = np.zeros((basis.size, basis.size))
    root2 = math.sqrt(2.0)
    for i, (m, n) in enumerate(basis.pairs):
        if m == n:
            H[i, i] = 2 * spec.omega_c + spec.U + 2 * spec.c_mod * lam_j[m]
            for s in nbs[m]:
                H[idx[(min(m, s), max(m, s))], i] -= root2 * J
            continue
        H[i, i] = 2 * spec.omega_c
        for mover, spectator in ((m, n), (n, m)):
            for s in nbs[mover]:
                a, b = min(s, spectator), max(s, spectator)
                H[idx[(a, b)], i] -= (root2 if a == b else 1.0) * J
    return H


def build_two_photon_h(spec: LatticeSpec) -> HamiltonianMatrix:
    basis = build_two_photon_basis(spec.L)
    return HamiltonianMatrix(_two_photon_entries(spec, basis), "two-photon")


@dataclass(frozen=True)
class SectorLayout:
    """Row offsets of the blocks in an emitter sector.

    one-excitation: ``[head | photon(L)]``;
    two-excitation: ``[head | eg(L) | ge(L) | gg pairs(L(L+1)/2)]``.
    The head state (all emitters excited, no photons) is always row 0.
    """

    sector: str
    L: int
    head: int = 0

    @property
    def eg(self) -> slice:
        return slice(1, 1 + self.L)

    @property
    def ge(self) -> slice:
        if self.sector != "two-excitation":
            raise ConfigurationError("ge block exists only in the two-excitation sector")
        return slice(1 + self.L, 1 + 2 * self.L)

    @property
    def pairs(self) -> slice:
        if self.sector != "two-excitation":
            raise ConfigurationError("photon-pair block exists only in the two-excitation sector")
        return slice(1 + 2 * self.L, self.dim)

    @property
    def dim(self) -> int:
        if self.sector == "one-excitation":
            return 1 + self.L
        return 1 + 2 * self.L + self.L * (self.L + 1) // 2


def sector_for(em: EmitterSpec) -> str:
    return "one-excitation" if em.N == 1 else "two-excitation"


def build_emitter_h(spec: LatticeSpec, em: EmitterSpec, sector: Sector | None = None) -> HamiltonianMatrix:
    """Emitter-waveguide Hamiltonian in a fixed excitation-number sector.

    Energies are relative to the all-ground vacuum; each excited emitter adds
    ``omega_e``.  In the two-excitation sector ``|eg; 1_j>`` means emitter 1
    excited and one photon on site j.
    """
    sector = sector or sector_for(em)
    if sector not in ("one-excitation", "two-excitation"):
        raise ConfigurationError(f"unknown sector {sector!r}")
    if (sector == "one-excitation") != (em.N == 1):
        raise ConfigurationError(f"sector {sector!r} is inconsistent with N={em.N}")
    em.check_sites(spec.L)
    L, g = spec.L, em.g
    lay = SectorLayout(sector, L)
    H1 = build_single_photon_h(spec).entries
    H = np.zeros((lay.dim, lay.dim))

    if sector == "one-excitation":
        H[0, 0] = em.omega_e
        H[lay.eg, lay.eg] = H1
        H[0, 1 + em.n1] = H[1 + em.n1, 0] = g
        return HamiltonianMatrix(H, "one-excitation")

    basis = build_two_photon_basis(L)
    H[0, 0] = 2 * em.omega_e
    H[lay.eg, lay.eg] = em.omega_e * np.eye(L) + H1
    H[lay.ge, lay.ge] = em.omega_e * np.eye(L) + H1
    H[lay.pairs, lay.pairs] = _two_photon_entries(spec, basis)

    # |ee> -> |eg; 1_{n2}> (emitter 2 decays) and |ge; 1_{n1}> (emitter 1 decays)
    H[0, 1 + em.n2] = H[1 + em.n2, 0] = g
    H[0, 1 + L + em.n1] = H[1 + L + em.n1, 0] = g
    off = lay.pairs.start
    for block_start, site in ((1, em.n1), (1 + L, em.n2)):
        for j in range(L):
            p = (min(j, site), max(j, site))
            amp = g * math.sqrt(2.0) if j == site else g
            r, c = block_start + j, off + basis.index_of[p]
            H[r, c] = H[c, r] = amp
    return HamiltonianMatrix(H, "two-excitation")
