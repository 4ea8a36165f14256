import numpy as np
import pytest

from gaussqfi.core import GaussianState
from gaussqfi.errors import StructuralError
from gaussqfi.fidelity import bures_qfi_fd, two_mode_fidelity
from gaussqfi.qfi import qfi_two_mode
from gaussqfi.sampling import random_analytic_family, random_state, squeezer


def test_identical_states(rng):
    for _ in range(10):
        st = random_state(2, rng)
        assert two_mode_fidelity(st, st).value == pytest.approx(1.0, abs=1e-10)


def test_symmetric(rng):
    a, b = random_state(2, rng), random_state(2, rng)
    assert two_mode_fidelity(a, b).value == pytest.approx(two_mode_fidelity(b, a).value, rel=1e-10)


def test_bounded(rng):
    for _ in range(20):
        f = two_mode_fidelity(random_state(2, rng), random_state(2, rng)).value
        assert 0.0 <= f <= 1.0 + 1e-10


def test_coherent_states():
    a = GaussianState.from_amplitudes([0.3, -0.2j], np.eye(4))
    b = GaussianState.from_amplitudes([0.8, 0.4], np.eye(4))
    expected = np.exp(-(abs(0.3 - 0.8) ** 2 + abs(-0.2j - 0.4) ** 2))
    assert two_mode_fidelity(a, b).value == pytest.approx(expected, rel=1e-12)


def test_product_squeezed_vacuum():
    # F(|0>, S_r|0>) = 1/cosh r for each mode
    r1, r2 = 0.3, 0.7
    s = squeezer([r1, r2])
    sq = GaussianState(np.zeros(4), s @ s.conj().T)
    f = two_mode_fidelity(GaussianState.vacuum(2), sq).value
    # for pure pairs the square-root argument vanishes, so roughly half the digits cancel
    assert f == pytest.approx(1 / (np.cosh(r1) * np.cosh(r2)), rel=1e-7)


def test_thermal_product():
    # one-mode thermal fidelity 2 / (l1 l2 + 1 - sqrt((l1^2-1)(l2^2-1))), vacuum on the second mode
    l1, l2 = 2.0, 3.0
    a = GaussianState(np.zeros(4), np.diag([l1, 1, l1, 1]).astype(complex))
    b = GaussianState(np.zeros(4), np.diag([l2, 1, l2, 1]).astype(complex))
    expected = 2.0 / (l1 * l2 + 1 - np.sqrt((l1 ** 2 - 1) * (l2 ** 2 - 1)))
    assert two_mode_fidelity(a, b).value == pytest.approx(expected, rel=1e-10)


def test_rejects_one_mode():
    with pytest.raises(StructuralError):
        two_mode_fidelity(GaussianState.vacuum(1), GaussianState.vacuum(1))


def test_bures_limit_matches_exact(rng):
    for _ in range(5):
        fam = random_analytic_family(2, rng)
        exact = qfi_two_mode(fam, 0.0).value
        assert bures_qfi_fd(fam, 0.0, 1e-3) == pytest.approx(exact, rel=1e-5)
