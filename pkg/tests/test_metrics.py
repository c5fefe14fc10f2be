import numpy as np
import pytest
from scipy.linalg import sqrtm

from bathflow.channels import dephase_qubit, pure_density
from bathflow.metrics import entropy, fidelity_pure_mixed, purity, state_fidelity, trace_distance

from conftest import random_density


@pytest.mark.parametrize("f", [0.0, 0.3, 0.5, 1.0])
def test_dephased_plus_state(f):
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    rho = dephase_qubit(pure_density(plus), 0, f)
    assert fidelity_pure_mixed(plus, rho) == pytest.approx((1 + f) / 2, abs=1e-15)
    assert fidelity_pure_mixed(plus, rho, "root") == pytest.approx(np.sqrt((1 + f) / 2), abs=1e-15)
    assert purity(rho) == pytest.approx((1 + f**2) / 2, abs=1e-15)
    assert trace_distance(pure_density(plus), rho) == pytest.approx((1 - f) / 2, abs=1e-15)
    p = np.array([(1 + f) / 2, (1 - f) / 2])
    p = p[p > 0]
    assert entropy(rho) == pytest.approx(-np.sum(p * np.log2(p)), abs=1e-12)


def test_pure_state_values():
    rng = np.random.default_rng(0)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    rho = pure_density(psi)
    assert purity(rho) == pytest.approx(1.0, abs=1e-14)
    assert entropy(rho) == pytest.approx(0.0, abs=1e-10)
    assert fidelity_pure_mixed(psi, rho) == pytest.approx(1.0, abs=1e-14)
    assert trace_distance(rho, rho) == 0.0


def test_maximally_mixed():
    rho = np.eye(8) / 8
    assert entropy(rho) == pytest.approx(3.0, abs=1e-14)
    assert entropy(rho, "e") == pytest.approx(3 * np.log(2), abs=1e-14)
    assert entropy(rho, "nats") == pytest.approx(3 * np.log(2), abs=1e-14)
    assert purity(rho) == pytest.approx(1 / 8)


def test_fidelity_matches_uhlmann_for_pure_argument():
    rng = np.random.default_rng(5)
    for _ in range(10):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        rho = random_density(rng, 2)
        s = sqrtm(pure_density(psi))
        uhlmann = np.trace(sqrtm(s @ rho @ s)).real ** 2
        assert fidelity_pure_mixed(psi, rho) == pytest.approx(uhlmann, abs=1e-7)


def test_trace_distance_against_full_eigendecomposition():
    rng = np.random.default_rng(6)
    for _ in range(10):
        a, b = random_density(rng, 3), random_density(rng, 3, rank=2)
        expected = 0.5 * np.abs(np.linalg.eigvalsh(a - b)).sum()
        assert trace_distance(a, b) == pytest.approx(expected, abs=1e-12)


def test_support_restriction_is_exact():
    rng = np.random.default_rng(7)
    sub = random_density(rng, 2)
    rho = np.zeros((8, 8), dtype=complex)
    idx = np.array([1, 2, 4, 7])
    rho[np.ix_(idx, idx)] = sub
    assert entropy(rho) == pytest.approx(entropy(sub), abs=1e-12)


def test_state_fidelity():
    a = np.array([1.0, 0.0])
    b = np.array([1.0, 1.0]) / np.sqrt(2)
    assert state_fidelity(a, b) == pytest.approx(0.5)
    assert state_fidelity(a, b, "root") == pytest.approx(np.sqrt(0.5))
    assert state_fidelity(a, -a) == 1.0


def test_errors():
    with pytest.raises(ValueError):
        entropy(np.eye(2) / 2, base=10)
    with pytest.raises(ValueError):
        entropy(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        fidelity_pure_mixed(np.ones(2) / np.sqrt(2), np.eye(2) / 2, "bogus")
    with pytest.raises(ValueError):
        trace_distance(np.eye(2) / 2, np.eye(4) / 4)
