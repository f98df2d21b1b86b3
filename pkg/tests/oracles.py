"""Independent reference implementations used only by the test suite.

Nothing here imports the Hamiltonian builders of the package; each oracle
starts from the bosonic operators, a quadrature, or a transfer matrix.
"""

from __future__ import annotations

import itertools
import math

import mpmath
import numpy as np


# ----------------------------------------------------------------- Fock space


def _boson_ops(L: int, nmax: int):
    """Truncated annihilation operators on ``L`` sites, each of local dim ``nmax + 1``."""
    d = nmax + 1
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    eye = np.eye(d)
    ops = []
    for j in range(L):
        mats = [a if s == j else eye for s in range(L)]
        op = mats[0]
        for m in mats[1:]:
            op = np.kron(op, m)
        ops.append(op)
    return ops


def _bonds(L: int, periodic: bool):
    bonds = {(j, j + 1) for j in range(L - 1)}
    if periodic and L > 2:
        bonds.add((L - 1, 0))
    return sorted(bonds)


def mosaic_values(L, kappa, lam, omega, theta):
    """``lambda_j`` from mpmath cosines at 30 digits."""
    mpmath.mp.dps = 30
    out = []
    for j in range(L):
        if j % kappa:
            out.append(0.0)
        else:
            out.append(float(lam * mpmath.cos(2 * mpmath.pi * (mpmath.mpf(omega) * j + theta))))
    return np.array(out)


def fock_photon_hamiltonian(L, J, U, omega_c, lam_j, c_mod, periodic, nmax=2):
    """Bose-Hubbard waveguide built from ladder operators."""
    a = _boson_ops(L, nmax)
    dim = a[0].shape[0]
    H = np.zeros((dim, dim))
    for j in range(L):
        n = a[j].T @ a[j]
        pair = a[j].T @ a[j].T @ a[j] @ a[j]
        H += omega_c * n + 0.5 * U * pair + c_mod * lam_j[j] * pair
    for i, j in _bonds(L, periodic):
        hop = a[i].T @ a[j]
        H -= J * (hop + hop.T)
    number = sum(op.T @ op for op in a)
    return H, number


def two_photon_spectrum(L, J, U, omega_c, lam_j, c_mod, periodic):
    H, number = fock_photon_hamiltonian(L, J, U, omega_c, lam_j, c_mod, periodic)
    sel = np.isclose(np.diag(number), 2)
    return np.linalg.eigvalsh(H[np.ix_(sel, sel)])


def emitter_sector_spectrum(L, J, U, omega_c, lam_j, c_mod, periodic, omega_e, g, sites, excitations):
    """Photons x two-level emitters, restricted to fixed total excitation number."""
    Hph, nph = fock_photon_hamiltonian(L, J, U, omega_c, lam_j, c_mod, periodic)
    n_em = len(sites)
    sm = np.array([[0.0, 1.0], [0.0, 0.0]])  # |g> = (1,0), |e> = (0,1): sigma^- maps e -> g
    eye2 = np.eye(2)
    dph = Hph.shape[0]
    sig = []
    for k in range(n_em):
        mats = [sm if s == k else eye2 for s in range(n_em)]
        op = mats[0]
        for m in mats[1:]:
            op = np.kron(op, m)
        sig.append(op)
    dem = 2**n_em
    a = _boson_ops(L, 2)
    H = np.kron(Hph, np.eye(dem))
    N = np.kron(nph, np.eye(dem))
    for k, site in enumerate(sites):
        ne = sig[k].T @ sig[k]
        H += omega_e * np.kron(np.eye(dph), ne)
        N += np.kron(np.eye(dph), ne)
        c = np.kron(a[site].T, sig[k])  # a^+ sigma^-
        H += g * (c + c.T)
    sel = np.isclose(np.diag(N), excitations)
    return np.linalg.eigvalsh(H[np.ix_(sel, sel)])


def ring_single_photon_spectrum(L, J, omega_c):
    q = np.arange(L)
    return np.sort(omega_c - 2 * J * np.cos(2 * np.pi * q / L))


def ring_two_photon_u0_spectrum(L, J, omega_c):
    """U = 0, lambda = 0: symmetric sums of two ring energies."""
    e = ring_single_photon_spectrum(L, J, omega_c)
    return np.sort([e[p] + e[q] for p, q in itertools.combinations_with_replacement(range(L), 2)])


# --------------------------------------------------------- quadrature oracles


def greens_quadrature(E, K, J, omega_c, n=4096):
    """Trapezoid rule for ``(1/2pi) int dk / (E - E_S(K, k))`` (periodic integrand)."""
    k = 2 * np.pi * np.arange(n) / n
    ES = 2 * omega_c - 4 * J * np.cos(K / 2) * np.cos(k)
    return float(np.mean(1.0 / (E - ES)))


def bound_band_fd_velocity(K, J, U, omega_c, h=1e-5):
    """Central difference of the lower doublon band."""

    def E(K):
        return 2 * omega_c - math.sqrt(U**2 + 16 * J**2 * math.cos(K / 2) ** 2)

    return (E(K + h) - E(K - h)) / (2 * h)


# ------------------------------------------------------------- golden rule


def golden_rule_rate(U, omega_e, g, r_max=400):
    """Second-order golden-rule rate for two co-located emitters (J = 1, omega_c = 0).

    The pair ``|ee>`` couples to a bound doublon of momentum K through the
    virtual state ``|eg; 1_j>``; the one-photon propagator at ``omega_e`` is
    ``G1(r) = -x^|r| / sqrt(omega_e^2 - 4)``.  The doublon relative
    wavefunction is found by diagonalizing the relative-coordinate problem
    on a large box (not from the closed form).
    """
    two_w = 2 * omega_e
    c2 = (two_w**2 - U**2) / 16
    K = 2 * math.acos(math.sqrt(c2))
    JK = 2 * math.cos(K / 2)  # relative hopping 2 J cos(K/2)
    n = 2 * r_max + 1
    r = np.arange(-r_max, r_max + 1)
    Hrel = np.diag(np.where(r == 0, U, 0.0)) - JK * (np.eye(n, k=1) + np.eye(n, k=-1))
    vals, vecs = np.linalg.eigh(Hrel)
    psi = vecs[:, 0] * np.sign(vecs[r_max, 0])
    x = (abs(omega_e) - math.sqrt(omega_e**2 - 4)) / 2
    G1 = -(x ** np.abs(r)) / math.sqrt(omega_e**2 - 4)
    S = float(np.sum(G1 * np.cos(K * r / 2) * psi))
    v_g = 4 * math.sin(K) / math.sqrt(U**2 + 16 * math.cos(K / 2) ** 2)
    return 16 * g**4 * S**2 / v_g, float(vals[0])


def single_emitter_residue(omega_e, g, L, J=1.0, omega_c=0.0):
    """Weight ``Z`` of the emitter in its out-of-band bound state on a ring."""
    eps = ring_single_photon_spectrum(L, J, omega_c)
    E = omega_e
    for _ in range(200):  # fixed point of E = omega_e + g^2/L sum 1/(E - eps)
        E = omega_e + g**2 * np.mean(1.0 / (E - eps))
    dS = g**2 * np.mean(1.0 / (E - eps) ** 2)
    return 1.0 / (1.0 + dS)


# ------------------------------------------------------------ transfer matrix


def lyapunov_exponent(E, t, onsite, kappa, n_cells=20000, omega=(math.sqrt(5) - 1) / 2, theta=0.1234):
    """Lyapunov exponent of ``-t(psi_{j+1} + psi_{j-1}) + V_j psi_j = E psi_j``.

    ``onsite(j)`` returns the potential at modulated sites ``j = 0 mod kappa``;
    other sites have zero potential.  Reported per site.
    """
    v = np.array([1.0, 0.0])
    log_norm = 0.0
    n = n_cells * kappa
    for j in range(n):
        V = onsite(j, omega, theta) if j % kappa == 0 else 0.0
        v = np.array([((V - E) / t) * v[0] - v[1], v[0]])
        s = abs(v[0]) + abs(v[1])
        log_norm += math.log(s)
        v /= s
    return log_norm / n


def rk4_evolve(H, psi0, t, steps):
    """Fixed-step fourth-order Runge-Kutta for ``i dpsi/dt = H psi``."""
    psi = np.asarray(psi0, dtype=complex)
    dt = t / steps

    def f(p):
        return -1j * (H @ p)

    for _ in range(steps):
        k1 = f(psi)
        k2 = f(psi + 0.5 * dt * k1)
        k3 = f(psi + 0.5 * dt * k2)
        k4 = f(psi + dt * k3)
        psi = psi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi
