import numpy as np
import pytest

from altchain import ed, fermions
from altchain.model import ModelParams


@pytest.mark.parametrize("boundary", ["open", "periodic"])
@pytest.mark.parametrize("point", [(0.5, 1.0, 0.3), (-1.0, 1.0, 0.8), (0.2, 0.0, 0.4), (1.0, 0.5, 0.0)])
def test_sector_blocks_match_full_hamiltonian(point, boundary):
    p = ModelParams(*point)
    full = np.linalg.eigvalsh(ed.full_hamiltonian(p, 8, boundary))
    r = ed.ed_ground_state(p, 8, boundary)
    assert r.energy == pytest.approx(full[0], abs=1e-12)


def test_isolated_dimers():
    r = ed.ed_ground_state(ModelParams(0.0, 1.0, 0.2), 8, "open")
    assert r.energy == pytest.approx(4 * -0.75, abs=1e-12)
    assert r.degeneracy == 1
    assert r.magnetization == 0


def test_polarized_above_saturation():
    p = ModelParams(0.5, 1.0, 3.0)
    r = ed.ed_ground_state(p, 8, "periodic")
    # 4 odd + 4 even bonds of 1/4 each, minus B N / 2
    assert r.energy == pytest.approx(0.25 * 4 * (1 + 0.5) - 3.0 * 4, abs=1e-12)
    assert r.magnetization == 4


@pytest.mark.parametrize("n", [8, 12])
@pytest.mark.parametrize("lam, b", [(0.5, 0.1), (0.5, 0.5), (-1.0, 0.3), (1.0, 0.0), (0.3, 0.9)])
def test_xx_chain_matches_free_fermions(n, lam, b):
    r = ed.ed_ground_state(ModelParams(lam, 0.0, b), n, "periodic")
    assert r.energy / n == pytest.approx(fermions.periodic_chain_energy(n, lam, b), abs=1e-10)


def test_expectation_and_rdm_consistent():
    r = ed.ed_ground_state(ModelParams(0.5, 1.0, 0.3), 8, "open")
    o = ModelParams  # noqa: F841
    sz = np.diag([0.5, -0.5]).astype(complex)
    rho = ed.ed_rdm(r, [2, 3])
    direct = ed.ed_expectation(r, [(2, sz), (3, sz)])
    assert np.trace(rho @ np.kron(sz, sz)).real == pytest.approx(direct.real, abs=1e-12)
    assert np.trace(rho).real == pytest.approx(1.0)


def test_operator_string_site_collision():
    r = ed.ed_ground_state(ModelParams(0.5, 1.0, 0.3), 4, "open")
    with pytest.raises(ValueError):
        ed.ed_expectation(r, [(1, np.eye(2)), (1, np.eye(2))])


@pytest.mark.parametrize("n", [3, 16, 0])
def test_size_limits(n):
    with pytest.raises(ValueError):
        ed.ed_ground_state(ModelParams(0.5, 1.0, 0.3), n)


def test_spectrum_sectors():
    spec = ed.ed_spectrum(ModelParams(0.5, 1.0, 0.0), 6, "open", levels=2)
    assert [sz for sz, _ in spec] == [3, 2, 1, 0, -1, -2, -3]
    # zero field: +Sz and -Sz sectors are degenerate
    for (sz1, w1), (sz2, w2) in zip(spec, spec[::-1]):
        np.testing.assert_allclose(w1, w2, atol=1e-12)
