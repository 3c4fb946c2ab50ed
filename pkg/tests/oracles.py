"""Independent reference computations used to check the package.

Nothing here imports the evaluator, optimizer or bounds code: the brute-force
enumerator walks every detection history with scalar arithmetic, the QNL and
Helstrom checks use sampling and an explicit Fock-space construction.
"""

import cmath
import itertools
import math

import numpy as np


def _argmax_lowest(values, rtol=1e-12):
    top = max(values)
    for i, v in enumerate(values):
        if v >= top * (1 - rtol):
            return i
    return 0


def brute_force_error(M, mean_photon, N, ratio_of, efficiency=1.0, visibility=1.0, dark=0.0, priors=None):
    """Error probability and ``P(history | k)`` by explicit enumeration.

    ``ratio_of(depth, prefix)`` gives ``|beta|/|alpha|`` for slice ``depth``
    after the outcomes ``prefix`` (a tuple of 0/1).
    """
    priors = [1.0 / M] * M if priors is None else list(priors)
    mod = math.sqrt(mean_photon)
    alphas = [mod * cmath.exp(1j * 2 * math.pi * k / M) for k in range(1, M + 1)]
    likelihood = {}
    success = 0.0
    for history in itertools.product((0, 1), repeat=N):
        lik = [1.0] * M
        for j in range(N):
            belief = [priors[k] * lik[k] for k in range(M)]
            target = _argmax_lowest(belief)
            beta = ratio_of(j, history[:j]) * mod * cmath.exp(1j * cmath.phase(alphas[target]))
            for k in range(M):
                a, b = alphas[k], beta
                nbar = abs(a) ** 2 + abs(b) ** 2 - 2 * visibility * abs(a) * abs(b) * math.cos(
                    cmath.phase(a) - cmath.phase(b)
                )
                nbar = max(nbar, 0.0)
                p_none = math.exp(-(efficiency * nbar / N + dark / N))
                lik[k] *= p_none if history[j] == 0 else 1.0 - p_none
        likelihood[history] = lik
        success += max(priors[k] * lik[k] for k in range(M))
    return 1.0 - success, likelihood


def heterodyne_error_sampled(M, mean_photon, samples, seed, chunk=10_000_000):
    """Sample heterodyne outcomes for the state with phase zero; count wedge misses.

    Each quadrature has variance 1/2. Returns ``(p_hat, stderr)``.
    """
    rng = np.random.default_rng(seed)
    a = math.sqrt(mean_photon)
    errors = 0
    done = 0
    half = math.pi / M
    while done < samples:
        n = min(chunk, samples - done)
        x = a + rng.normal(0.0, math.sqrt(0.5), n)
        y = rng.normal(0.0, math.sqrt(0.5), n)
        errors += int(np.count_nonzero(np.abs(np.arctan2(y, x)) > half))
        done += n
    p = errors / samples
    return p, math.sqrt(p * (1 - p) / samples)


def coherent_fock(alpha, dim):
    n = np.arange(dim)
    logs = np.array([-abs(alpha) ** 2 / 2 - 0.5 * math.lgamma(k + 1) for k in n])
    vec = np.exp(logs) * np.array([alpha**k if k else 1.0 for k in n], dtype=complex)
    return vec


def helstrom_fock(M, mean_photon, tail=1e-12):
    """Square-root measurement built from density matrices in a truncated Fock space."""
    dim = 1
    while True:
        # Poisson tail beyond dim
        mass = sum(math.exp(k * math.log(mean_photon) - mean_photon - math.lgamma(k + 1)) for k in range(dim)) if mean_photon > 0 else 1.0
        if 1 - mass < tail:
            break
        dim += 1
    dim += 10
    states = [coherent_fock(math.sqrt(mean_photon) * cmath.exp(2j * math.pi * k / M), dim) for k in range(1, M + 1)]
    states = [s / np.linalg.norm(s) for s in states]
    rho = sum(np.outer(s, s.conj()) for s in states) / M
    w, v = np.linalg.eigh(rho)
    keep = w > 1e-14 * w.max()
    inv_sqrt = (v[:, keep] / np.sqrt(w[keep])) @ v[:, keep].conj().T
    p_correct = 0.0
    for s in states:
        mu = inv_sqrt @ s / math.sqrt(M)
        p_correct += abs(np.vdot(mu, s)) ** 2 / M
    return 1.0 - p_correct


def poisson_click_sampled(mean, samples, seed):
    rng = np.random.default_rng(seed)
    return np.count_nonzero(rng.poisson(mean, samples) > 0) / samples
