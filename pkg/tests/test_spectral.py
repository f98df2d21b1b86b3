import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from mosaic_doublon.effective import DoublonChainSpec, chain_mobility_edges
from mosaic_doublon.errors import DegenerateProfileError, NormalizationError, ResourceError, ValidationError
from mosaic_doublon.model import HamiltonianMatrix, LatticeSpec, build_two_photon_basis, build_two_photon_h
from mosaic_doublon.spectral import (
    EXTENDED,
    LOCALIZED,
    MARGIN,
    FdRecord,
    check_budget,
    classify,
    eigensolve,
    fd_map,
    fractal_dim,
    ipr,
    numerical_me,
    records_from_csv,
    records_to_csv,
    spatial_profile,
)


def test_eigensolve_residual_and_orthonormality():
    H = build_two_photon_h(LatticeSpec.from_fibonacci(8, kappa=3, lam=0.9))
    dec = eigensolve(H)
    assert np.max(dec.residual(H)) < 1e-10
    assert dec.orthonormality_error() < 1e-10
    assert np.all(np.diff(dec.values) >= 0)


def test_budget():
    check_budget(5000)
    with pytest.raises(ResourceError):
        check_budget(5001)
    big = HamiltonianMatrix.__new__(HamiltonianMatrix)
    object.__setattr__(big, "entries", np.zeros((5001, 1)))
    object.__setattr__(big, "basis_tag", "two-photon")
    with pytest.raises(ResourceError):
        eigensolve(big)


@given(arrays(np.float64, st.integers(2, 60), elements=st.floats(-1, 1)))
def test_ipr_bounds(v):
    n = np.linalg.norm(v)
    if n < 1e-6:
        return
    v = v / n
    p = ipr(v)
    assert 1 / len(v) - 1e-12 <= p <= 1 + 1e-12


def test_ipr_limits_and_normalization():
    assert ipr(np.ones(16) / 4) == pytest.approx(1 / 16)
    assert ipr(np.eye(16)[3]) == 1.0
    with pytest.raises(NormalizationError):
        ipr(np.ones(4))


def test_fractal_dimension_limits():
    assert fractal_dim(1 / 55, 55) == pytest.approx(1.0)
    assert fractal_dim(1.0, 55) == pytest.approx(0.0)
    with pytest.raises(ValidationError):
        fractal_dim(0.5, 1)


@pytest.mark.parametrize("fd,expected", [(0.1, LOCALIZED), (0.2, MARGIN), (0.5, MARGIN), (0.8, MARGIN), (0.9, EXTENDED)])
def test_classify(fd, expected):
    assert classify(fd) == expected


def test_spatial_profile_of_doublon():
    basis = build_two_photon_basis(6)
    v = np.zeros(basis.size)
    v[basis.index_of[(2, 2)]] = 0.6
    v[basis.index_of[(1, 3)]] = 0.8
    prof = spatial_profile(v, basis)
    assert prof.peak() == 2 and prof.participation() == pytest.approx(1.0)
    w = np.zeros(basis.size)
    w[basis.index_of[(0, 1)]] = 1.0
    with pytest.raises(DegenerateProfileError):
        spatial_profile(w, basis)


def test_fd_map_validation():
    base = LatticeSpec.from_fibonacci(6)
    with pytest.raises(ValidationError):
        fd_map(base, [0.5, 0.2])
    with pytest.raises(ValidationError):
        fd_map(base, [0.2], measure="other")
    with pytest.raises(ResourceError):
        fd_map(LatticeSpec.from_fibonacci(12), [0.2])


def test_fd_map_modes():
    base = LatticeSpec.from_fibonacci(7, kappa=2)
    assert len(fd_map(base, [0.0, 0.5])) == 2 * build_two_photon_basis(base.L).size
    assert len(fd_map(base, [0.5], doublon_only=True, measure="diagonal")) == base.L
    chain = fd_map(DoublonChainSpec(base), [0.1, 0.5, 0.9])
    assert len(chain) == 3 * base.L
    assert {r.lam for r in chain} == {0.1, 0.5, 0.9}


def test_fd_map_parallel_matches_serial():
    d = DoublonChainSpec(LatticeSpec.from_fibonacci(10, kappa=3))
    lams = [0.2, 0.6, 1.0, 1.4]
    assert fd_map(d, lams, workers=2) == fd_map(d, lams)


def test_chain_states_extended_at_zero_and_localized_at_strong_modulation():
    d = DoublonChainSpec(LatticeSpec.from_fibonacci(14, kappa=1))
    recs0 = fd_map(d, [0.0])
    assert all(r.fd > 0.8 for r in recs0)
    recs = fd_map(d, [5.0])
    assert all(r.fd < 0.2 for r in recs)


def _rec(E, cls, lam=1.0):
    fd = {LOCALIZED: 0.05, EXTENDED: 0.95, MARGIN: 0.5}[cls]
    return FdRecord(E, 0.0, fd, lam, cls)


def test_numerical_me_midpoint_skips_margin():
    recs = []
    for lam in np.linspace(0.1, 1.0, 10):
        recs += [_rec(0.0, LOCALIZED, lam), _rec(1.0, MARGIN, lam), _rec(2.0, EXTENDED, lam), _rec(3.0, LOCALIZED, lam)]
    me = numerical_me(recs)
    assert all(edges == [1.0, 2.5] for edges in me.values())


def test_numerical_me_needs_points():
    with pytest.raises(ValidationError):
        numerical_me([_rec(0.0, LOCALIZED, lam) for lam in range(9)])


def test_numerical_me_tracks_exact_chain_edges():
    d = DoublonChainSpec(LatticeSpec.from_fibonacci(16, kappa=2, U=-5.0))
    lams = np.linspace(0.6, 1.5, 10)
    me = numerical_me(fd_map(d, lams))
    for lam in lams:
        exact = chain_mobility_edges(d.with_lambda(lam))
        assert len(me[lam]) == len(exact)
        assert np.max(np.abs(np.array(me[lam]) - exact)) < 0.1


def test_records_csv_round_trip():
    recs = fd_map(DoublonChainSpec(LatticeSpec.from_fibonacci(8, kappa=2)), [0.3, 0.7])
    text = records_to_csv(recs)
    assert text.splitlines()[0] == "lambda,E,ipr,fd,class"
    assert records_from_csv(text) == recs
    with pytest.raises(ValidationError):
        records_from_csv("a,b\n1,2\n")
