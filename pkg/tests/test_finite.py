import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from altchain import ed, fermions, finite
from altchain.itebd import Schedule
from altchain.model import ModelParams, spin_operators

SCHED = Schedule(tau_initial=0.1, tau_floor=1e-3, sweeps_per_tau=3000, energy_tol=1e-12, check_every=100, order=2)


def test_exact_vector_roundtrip(rng):
    psi = rng.standard_normal(2**6) + 1j * rng.standard_normal(2**6)
    psi /= np.linalg.norm(psi)
    mps = finite.from_vector(psi, 6)
    assert abs(np.vdot(finite.to_vector(mps), psi)) == pytest.approx(1.0)


@pytest.mark.parametrize("point", [(0.5, 1.0, 0.3), (-1.0, 1.0, 0.8), (0.2, 0.0, 0.4)])
def test_mps_energy_of_exact_state(point):
    p = ModelParams(*point)
    r = ed.ed_ground_state(p, 8, "open")
    assert finite.mps_energy(finite.from_vector(r.ground_vector, 8), p) == pytest.approx(r.energy, abs=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8))
def test_schmidt_profile_symmetric_for_reflection_invariant_state(seed, chi):
    # |psi> + its mirror image has S_L = S_{N-L}
    rng = np.random.default_rng(seed)
    n = 8
    psi = rng.standard_normal((2,) * n)
    psi = psi + np.transpose(psi, list(range(n))[::-1])
    psi = psi.reshape(-1) / np.linalg.norm(psi)
    prof = finite.entropy_profile(finite.from_vector(psi, n))
    np.testing.assert_allclose(prof.entropies, prof.entropies[::-1], atol=1e-10)


def test_canonical_form_truncates():
    mps = finite.random_mps(10, 16, 0)
    small = finite.canonical_form(mps, 4)
    assert max(small.bond_dims) <= 4
    for s in small.schmidt:
        assert np.sum(s**2) == pytest.approx(1.0)


def test_tebd_matches_ed():
    p = ModelParams(0.5, 1.0, 0.3)
    r = ed.ed_ground_state(p, 8, "open")
    mps = finite.tebd_ground_state(p, 8, 16, SCHED)
    assert mps.energy == pytest.approx(r.energy, abs=1e-8)


def test_dmrg_matches_ed():
    p = ModelParams(-1.0, 1.0, 0.8)
    r = ed.ed_ground_state(p, 10, "open")
    mps = finite.finite_ground_state(p, 10, 32, method="dmrg")
    assert mps.energy == pytest.approx(r.energy, abs=1e-9)


def test_open_xx_chain_profile_matches_fermions():
    p = ModelParams(0.5, 0.0, 0.5)
    n = 12
    mps = finite.finite_ground_state(p, n, 64, method="dmrg")
    corr = fermions.correlation_matrix(n, 0.5, 0.5, "open")
    np.testing.assert_allclose(finite.entropy_profile(mps).entropies, fermions.entropy_profile(corr), atol=1e-6)
    assert mps.energy / n == pytest.approx(fermions.open_chain_energy(n, 0.5, 0.5), abs=1e-9)


def test_string_expectation_matches_ed():
    p = ModelParams(-1.0, 1.0, 0.3)
    r = ed.ed_ground_state(p, 8, "open")
    mps = finite.from_vector(r.ground_vector, 8)
    o = spin_operators()
    ops = {2: o.sx, 3: 2j * o.sx, 4: 2j * o.sx, 5: o.sx}
    direct = ed.ed_expectation(r, list(ops.items()))
    assert finite.string_expectation(mps, ops) == pytest.approx(direct, abs=1e-12)


def test_chain_hamiltonian_field_counts_each_site_once():
    p = ModelParams(0.0, 0.0, 1.0)
    hs = finite.chain_bond_hamiltonians(p, 6)
    up = np.zeros(4)
    up[0] = 1
    assert sum(up @ h.matrix.real @ up for h in hs) == pytest.approx(-0.5 * 6)


def test_central_charge_fit_on_synthetic_profile():
    n = 64
    L = np.arange(1, n)
    s = (1.0 / 6) * finite.chord_log2(n, L) + 0.7
    fit = finite.fit_central_charge(finite.EntropyProfile(n, s), "even")
    assert fit.c == pytest.approx(1.0, abs=1e-12)
    assert fit.a_const == pytest.approx(0.7)
    assert fit.l_window == (8, 56)
    periodic = finite.EntropyProfile(n, 2 * s - 0.7, boundary="periodic")
    assert finite.fit_central_charge(periodic).c == pytest.approx(1.0, abs=1e-12)


def test_fit_window_validation():
    prof = finite.EntropyProfile(16, np.zeros(15))
    with pytest.raises(ValueError):
        finite.fit_central_charge(prof, l_window=(0, 20))
    with pytest.raises(ValueError):
        finite.fit_central_charge(prof, parity="middle")


def test_profile_csv(tmp_path):
    prof = finite.EntropyProfile(8, np.linspace(0.1, 0.7, 7))
    path = tmp_path / "s.csv"
    prof.write_csv(path)
    assert path.read_text().splitlines()[0] == "L,S_L,chord_log2,fitted"


def test_odd_length_rejected():
    with pytest.raises(ValueError):
        finite.finite_ground_state(ModelParams(0.5, 1.0, 0.0), 7, 8)
