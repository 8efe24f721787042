import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from altchain import imps, observables
from altchain.imps import DensityMatrix
from conftest import random_density_matrix

SINGLET = np.array([0, 1, -1, 0]) / np.sqrt(2)
SINGLET_RHO = np.outer(SINGLET, SINGLET).astype(complex)


def brute_concurrence(rho):
    """Spin-flip definition: square roots of the eigenvalues of rho rho~."""
    ev = np.linalg.eigvals(rho @ observables.spin_flip(rho))
    lam = np.sort(np.sqrt(np.clip(ev.real, 0, None)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def test_concurrence_singlet_and_product():
    assert observables.concurrence(SINGLET_RHO) == pytest.approx(1.0)
    prod = np.kron(np.diag([0.3, 0.7]), np.diag([1.0, 0.0])).astype(complex)
    assert observables.concurrence(prod) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.5, 0.8, 1.0])
def test_concurrence_werner(p):
    rho = p * SINGLET_RHO + (1 - p) * np.eye(4) / 4
    assert observables.concurrence(rho) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-10)


def test_concurrence_dual_formula_on_random_states(rng):
    for _ in range(1000):
        rho = random_density_matrix(rng, 4)
        assert observables.concurrence(rho) == pytest.approx(brute_concurrence(rho), abs=1e-10)


def test_concurrence_pure_states(rng):
    # pure state: C = |<psi| sy x sy |psi*>|
    yy = np.kron(observables.SIGMA_Y, observables.SIGMA_Y)
    for _ in range(200):
        psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        psi /= np.linalg.norm(psi)
        expected = abs(psi @ yy @ psi)
        assert observables.concurrence(np.outer(psi, psi.conj())) == pytest.approx(expected, abs=1e-12)


def test_concurrence_rejects_invalid():
    with pytest.raises(ValueError):
        observables.concurrence(np.diag([1.2, -0.2, 0, 0]))
    with pytest.raises(ValueError):
        observables.concurrence(np.eye(2) / 2)


def test_entropy_examples():
    assert observables.entropy(np.diag([1.0, 0.0])) == pytest.approx(0.0)
    assert observables.entropy(np.eye(2) / 2) == pytest.approx(1.0)
    assert observables.entropy(SINGLET_RHO) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.integers(1, 3))
def test_entropy_additive(seed, qa, qb):
    rng = np.random.default_rng(seed)
    ra = random_density_matrix(rng, 2**qa)
    rb = random_density_matrix(rng, 2**qb)
    total = observables.entropy(np.kron(ra, rb))
    assert total == pytest.approx(observables.entropy(ra) + observables.entropy(rb), abs=1e-10)


def test_l1_coherence_examples():
    assert observables.l1_coherence(np.diag([0.5, 0.5])) == 0
    plus = np.full((2, 2), 0.5)
    assert observables.l1_coherence(plus) == pytest.approx(1.0)
    assert observables.l1_coherence(SINGLET_RHO) == pytest.approx(1.0)
    # the signed sum cancels for the singlet
    assert observables.l1_coherence(SINGLET_RHO, absolute=False) == pytest.approx(-1.0)


def test_wysi_examples():
    up = np.diag([1.0, 0.0]).astype(complex)
    assert observables.wysi(up, observables.SIGMA_X) == pytest.approx(0.5)
    assert observables.wysi(np.eye(2) / 2, observables.SIGMA_X) == pytest.approx(0.0)
    assert observables.wysi(up, np.diag([1.0, -1.0])) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        observables.wysi(up, np.eye(4))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-10, 10))
def test_wysi_shift_invariant(seed, c):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(rng, 4)
    k = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    k = k + k.conj().T
    a = observables.wysi(rho, k)
    b = observables.wysi(rho, k + c * np.eye(4))
    assert a >= 0
    assert a == pytest.approx(b, abs=1e-12)


def test_density_matrix_wrapper_accepted():
    dm = DensityMatrix(SINGLET_RHO, ("A", "B"))
    assert observables.concurrence(dm) == pytest.approx(1.0)


def test_fidelity_self_and_orthogonal():
    s = imps.init_random(4, 5)
    assert observables.fidelity_per_site(s, s) == pytest.approx(1.0, abs=1e-10)
    up = imps.product_state([1, 0])
    down = imps.product_state([0, 1])
    assert observables.fidelity_per_site(up, down) == 0.0


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 1000), st.integers(0, 1000))
def test_fidelity_symmetric_and_bounded(s1, s2):
    a, b = imps.init_random(3, s1), imps.init_random(3, s2)
    d12 = observables.fidelity_per_site(a, b)
    d21 = observables.fidelity_per_site(b, a)
    assert 0 <= d12 <= 1 + 1e-10
    assert d12 == pytest.approx(d21, abs=1e-10)


def test_product_state_fidelity_is_overlap():
    theta = 0.3
    a = imps.product_state([1, 0])
    b = imps.product_state([np.cos(theta), np.sin(theta)])
    assert observables.fidelity_per_site(a, b) == pytest.approx(np.cos(theta), abs=1e-10)


def test_string_order_dimer_and_product():
    # singlets on the odd bonds: the string between an odd site and the next
    # dimer's even partner gives O(1) = -4 <Sx Sx> for r = 1
    s = imps.dimer_state("odd")
    assert observables.string_order(s, 1) == pytest.approx(1.0, abs=1e-12)
    assert observables.string_order(imps.product_state([1, 0]), 3) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        observables.string_order(s, 4)


def test_site_wysi_options():
    s = imps.product_state([1, 0], [1, 1])
    assert observables.site_wysi(s, "A") == pytest.approx(0.5)
    assert observables.site_wysi(s, "B") == pytest.approx(0.0, abs=1e-12)
    assert observables.site_wysi(s) == pytest.approx(0.25)
