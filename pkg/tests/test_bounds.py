import math

import numpy as np
import pytest
from scipy.stats import norm

from oracles import helstrom_fock, heterodyne_error_sampled
from psk_receiver._validation import InvalidParameterError
from psk_receiver.bounds import (
    bound_curve,
    gram_eigenvalues,
    helstrom_mpsk,
    heterodyne_capacity,
    holevo_bound,
    qnl,
    qnl_heterodyne,
)

GRID = np.geomspace(0.05, 10, 50)


def test_qnl_values():
    assert qnl_heterodyne(4, 0.0) == pytest.approx(0.75, abs=1e-12)
    values = [qnl_heterodyne(4, n) for n in (0.5, 1, 2, 5, 20, 40)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-9


@pytest.mark.parametrize("n", [0.1, 0.5, 1.0, 3.0])
def test_qnl_four_psk_closed_form(n):
    # the four wedges are quadrants rotated by 45 degrees
    assert qnl_heterodyne(4, n) == pytest.approx(1 - norm.cdf(math.sqrt(n)) ** 2, abs=1e-12)


def test_qnl_rejects_two_states():
    with pytest.raises(InvalidParameterError):
        qnl_heterodyne(2, 1.0)
    assert qnl(2, 1.0) == pytest.approx(0.5 * math.erfc(math.sqrt(2)), abs=1e-15)


def test_qnl_efficiency_scaling():
    for n in GRID:
        assert qnl_heterodyne(4, n, 0.7) == qnl_heterodyne(4, 0.7 * n, 1.0)


def test_helstrom_values():
    assert helstrom_mpsk(4, 0.0) == pytest.approx(0.75, abs=1e-15)
    for n in np.linspace(0.01, 4, 20):
        closed = (1 - math.sqrt(1 - math.exp(-4 * n))) / 2
        assert helstrom_mpsk(2, n) == pytest.approx(closed, abs=1e-12)


def test_gram_eigenvalues_match_fft():
    for M in (2, 3, 4, 8):
        for n in (0.3, 1.0, 4.0):
            k = np.arange(M)
            first_row = np.exp(-n * (1 - np.exp(2j * np.pi * k / M)))
            np.testing.assert_allclose(np.sort(gram_eigenvalues(M, n)), np.sort(np.fft.fft(first_row).real), atol=1e-12)
            assert gram_eigenvalues(M, n).sum() == pytest.approx(M)


def test_helstrom_matches_truncated_fock():
    assert helstrom_mpsk(4, 1.0) == pytest.approx(helstrom_fock(4, 1.0), abs=1e-9)


@pytest.mark.parametrize("M", [3, 4, 8])
def test_bound_ordering_and_monotonicity(M):
    hel = [helstrom_mpsk(M, n) for n in GRID]
    q = [qnl_heterodyne(M, n) for n in GRID]
    assert all(h <= v for h, v in zip(hel, q))
    assert all(b <= a + 1e-9 for a, b in zip(hel, hel[1:]))
    assert all(b <= a + 1e-9 for a, b in zip(q, q[1:]))


def test_capacities():
    assert holevo_bound(0) == 0
    assert holevo_bound(1) == pytest.approx(2.0)
    assert holevo_bound(3) == pytest.approx(4 * math.log2(4) - 3 * math.log2(3))
    assert heterodyne_capacity(0) == 0
    assert heterodyne_capacity(1) == pytest.approx(1.0)
    assert heterodyne_capacity(3) == pytest.approx(2.0)
    for n in GRID:
        assert heterodyne_capacity(n) <= holevo_bound(n)


def test_bound_curve():
    curve = bound_curve("helstrom", [0.0, 1.0], M=4)
    assert curve.points[0] == (0.0, pytest.approx(0.75))


@pytest.mark.slow
def test_qnl_against_sampler_quick():
    p, se = heterodyne_error_sampled(4, 1.0, 2 * 10**6, seed=11)
    assert abs(p - qnl_heterodyne(4, 1.0)) < 4 * se
