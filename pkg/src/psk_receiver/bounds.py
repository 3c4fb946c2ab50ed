"""Reference curves: heterodyne QNL, Helstrom bound, Holevo bound, heterodyne capacity.

Heterodyne convention: the outcome for input ``|a>`` is distributed as the
Husimi function ``Q(g) = exp(-|g - a|^2) / pi``, i.e. each quadrature carries
variance 1/2 (unit total added noise).
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erf, erfc, gammaln, xlogy

from ._validation import InvalidParameterError, check_int, check_real

BOUND_KINDS = ("qnl", "qnl-scaled", "helstrom", "holevo", "heterodyne-capacity")


@dataclass(frozen=True)
class BoundCurve:
    kind: str
    points: tuple  # ((mean_photon, value), ...)


def _wedge_radial(theta, a):
    # integral over r >= 0 of r exp(-|r e^{i theta} - a|^2) dr, for real a >= 0
    c = a * np.cos(theta)
    s2 = (a * np.sin(theta)) ** 2
    return 0.5 * np.exp(-a * a) + 0.5 * np.sqrt(np.pi) * c * np.exp(-s2) * (1.0 + erf(c))


def qnl_heterodyne(M, mean_photon, efficiency=1.0):
    """Error probability of ideal heterodyne detection with nearest-phase decisions.

    The radial part of the wedge integral is done in closed form; the angular
    part uses adaptive quadrature to an absolute tolerance of 1e-12.
    """
    M = check_int(M, "M")
    if M < 3:
        raise InvalidParameterError("heterodyne QNL is defined here for M >= 3")
    n = check_real(mean_photon, "mean_photon", low=0.0)
    eta = check_real(efficiency, "efficiency", 0.0, 1.0)
    if eta == 0:
        raise InvalidParameterError("efficiency must be positive")
    a = np.sqrt(eta * n)
    half = np.pi / M
    value, _ = quad(_wedge_radial, 0.0, half, args=(a,), epsabs=1e-13, epsrel=1e-13, limit=200)
    p_correct = 2.0 * value / np.pi
    return float(min(max(1.0 - p_correct, 0.0), 1.0))


def qnl_homodyne(mean_photon, efficiency=1.0):
    """Homodyne error probability for binary PSK, ``erfc(sqrt(2 eta n)) / 2``."""
    n = check_real(mean_photon, "mean_photon", low=0.0)
    eta = check_real(efficiency, "efficiency", 0.0, 1.0)
    return float(0.5 * erfc(np.sqrt(2.0 * eta * n)))


def qnl(M, mean_photon, efficiency=1.0):
    """Conventional-receiver limit: homodyne for two states, heterodyne otherwise."""
    if M == 2:
        return qnl_homodyne(mean_photon, efficiency)
    return qnl_heterodyne(M, mean_photon, efficiency)


def gram_eigenvalues(M, mean_photon):
    """Eigenvalues of the circulant Gram matrix of the M-PSK ensemble.

    The DFT of ``exp(-n (1 - e^{i 2 pi k / M}))`` over ``k`` is done
    analytically: ``lambda_m = M e^{-n} sum_{p = m mod M} n^p / p!``, which has
    no cancellation and stays accurate when some eigenvalues are tiny.
    """
    n = mean_photon
    lam = np.zeros(M)
    if n == 0:
        lam[0] = M
        return lam
    p_max = int(np.ceil(n + 40.0 * np.sqrt(n) + 60.0))
    p = np.arange(p_max + 1)
    log_terms = p * np.log(n) - gammaln(p + 1) - n
    terms = np.exp(log_terms)
    for m in range(M):
        lam[m] = M * terms[m::M].sum()
    return lam


def helstrom_mpsk(M, mean_photon):
    """Minimum error probability for equiprobable M-PSK coherent states.

    Square-root measurement, which is optimal for this symmetric pure-state
    ensemble: ``1 - (sum_m sqrt(lambda_m))**2 / M**2``.
    """
    M = check_int(M, "M", minimum=2)
    n = check_real(mean_photon, "mean_photon", low=0.0)
    lam = gram_eigenvalues(M, n)
    if np.any(lam < -1e-12):
        raise ArithmeticError(f"negative Gram eigenvalue {lam.min()}")
    root = np.sqrt(np.clip(lam, 0.0, None)).sum()
    return float(max(1.0 - root * root / (M * M), 0.0))


def holevo_bound(mean_photon):
    """``g(n) = (n + 1) log2(n + 1) - n log2 n`` in bits per use."""
    n = check_real(mean_photon, "mean_photon", low=0.0)
    return float((xlogy(n + 1.0, n + 1.0) - xlogy(n, n)) / np.log(2.0))


def heterodyne_capacity(mean_photon):
    """``log2(1 + n)``: heterodyne capacity with Gaussian-modulated coherent inputs."""
    n = check_real(mean_photon, "mean_photon", low=0.0)
    return float(np.log2(1.0 + n))


def bound_value(kind, mean_photon, M=4, efficiency=1.0):
    if kind == "qnl":
        return qnl(M, mean_photon, 1.0)
    if kind == "qnl-scaled":
        return qnl(M, mean_photon, efficiency)
    if kind == "helstrom":
        return helstrom_mpsk(M, mean_photon)
    if kind == "holevo":
        return holevo_bound(mean_photon)
    if kind == "heterodyne-capacity":
        return heterodyne_capacity(mean_photon)
    raise InvalidParameterError(f"unknown bound kind {kind!r}")


def bound_curve(kind, grid, M=4, efficiency=1.0):
    return BoundCurve(kind, tuple((float(n), bound_value(kind, n, M, efficiency)) for n in grid))
