import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from altchain.model import (
    ModelParams,
    bond_hamiltonian,
    dimer_hamiltonian,
    exchange,
    spin_operators,
    trotter_gate,
)

finite_floats = st.floats(-3, 3, allow_nan=False)


def test_params_reject_non_finite():
    with pytest.raises(ValueError):
        ModelParams(float("nan"), 1.0, 0.0)
    with pytest.raises(ValueError):
        ModelParams(0.5, float("inf"), 0.0)


def test_params_fix_odd_coupling():
    with pytest.raises(ValueError):
        ModelParams(0.5, 1.0, 0.0, j=2.0)


def test_coupling_by_parity():
    p = ModelParams(-0.7, 1.0, 0.3)
    assert p.coupling("odd") == 1.0
    assert p.coupling("even") == -0.7
    with pytest.raises(ValueError):
        p.coupling("middle")


def test_spin_algebra():
    o = spin_operators()
    comm = o.sx @ o.sy - o.sy @ o.sx
    np.testing.assert_allclose(comm, 1j * o.sz)
    np.testing.assert_allclose(o.sx @ o.sx + o.sy @ o.sy + o.sz @ o.sz, 0.75 * np.eye(2))
    with pytest.raises(ValueError):
        o.sx[0, 0] = 1


def test_dimer_levels_match_singlet_and_triplets():
    # isolated dimer at delta=1, B=0.5: singlet -3/4, triplets 1/4 - B m
    h = dimer_hamiltonian(ModelParams(0.0, 1.0, 0.5))
    w = np.sort(np.linalg.eigvalsh(h.matrix))
    np.testing.assert_allclose(w, sorted([-0.75, 0.25, 0.25 - 0.5, 0.25 + 0.5]), atol=1e-14)


def test_default_split_gives_half_field_per_bond():
    p = ModelParams(0.0, 1.0, 0.5)
    w = np.sort(np.linalg.eigvalsh(bond_hamiltonian(p, "odd").matrix))
    np.testing.assert_allclose(w, sorted([-0.75, 0.25, 0.0, 0.5]), atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(finite_floats, finite_floats, finite_floats, st.floats(0, 1))
def test_bond_pair_sums_to_full_field(lam, delta, b, share):
    p = ModelParams(lam, delta, b)
    ho = bond_hamiltonian(p, "odd", share).matrix
    he = bond_hamiltonian(p, "even", share).matrix
    o = spin_operators()
    zfield = np.kron(o.sz, o.identity) + np.kron(o.identity, o.sz)
    expected = (1 + lam) * exchange(delta) - b * zfield
    np.testing.assert_allclose(ho + he, expected, atol=1e-12)
    np.testing.assert_allclose(ho, ho.conj().T)


@settings(max_examples=50, deadline=None)
@given(finite_floats, finite_floats, finite_floats, st.floats(0, 2))
def test_trotter_gate_properties(lam, delta, b, tau):
    h = bond_hamiltonian(ModelParams(lam, delta, b), "even")
    g = trotter_gate(h, tau).matrix
    np.testing.assert_allclose(g, g.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(g).min() > 0
    # commutes with total Sz
    o = spin_operators()
    sz = np.kron(o.sz, o.identity) + np.kron(o.identity, o.sz)
    np.testing.assert_allclose(g @ sz, sz @ g, atol=1e-12)


def test_trotter_gate_zero_tau_is_identity():
    h = bond_hamiltonian(ModelParams(0.3, 1.0, 0.2), "odd")
    np.testing.assert_allclose(trotter_gate(h, 0.0).matrix, np.eye(4), atol=1e-15)


@pytest.mark.parametrize("tau", [-0.1, float("nan"), float("inf")])
def test_trotter_gate_rejects_bad_tau(tau):
    h = bond_hamiltonian(ModelParams(0.3, 1.0, 0.2), "odd")
    with pytest.raises(ValueError):
        trotter_gate(h, tau)


def test_field_share_range():
    with pytest.raises(ValueError):
        bond_hamiltonian(ModelParams(0.3, 1.0, 0.2), "odd", 1.5)
