"""On/off photon counting of displaced coherent states and the Bayesian update.

All slice quantities refer to one of the ``N`` equal time slices of the pulse:
the displaced mean photon number of the whole pulse is divided by ``N`` before
detector efficiency and the per-slice dark-count mean are applied.
"""

import numpy as np
from scipy.special import logsumexp
from scipy.stats import poisson

from ._validation import DegenerateEvidenceError, check_probability_vector, check_real

# Above this mean the click likelihood is formed as log1p(-exp(-x)).
_LOG_SPACE_THRESHOLD = 30.0


def displaced_mean(alpha_k, beta, visibility=1.0):
    """Mean photon number of ``D(-beta)|alpha_k>`` with imperfect interference.

    ``|a|^2 + |b|^2 - 2 V |a||b| cos(arg a - arg b)``, clamped at zero.
    """
    visibility = check_real(visibility, "visibility", 0.0, 1.0)
    a, b = complex(alpha_k), complex(beta)
    nbar = abs(a) ** 2 + abs(b) ** 2 - 2 * visibility * abs(a) * abs(b) * np.cos(np.angle(a) - np.angle(b))
    return max(float(nbar), 0.0)


def click_probability(nbar, model):
    """Probability that an on/off detector fires in one slice.

    ``nbar`` is the slice's displaced mean photon number. Efficiency scales it
    and the per-slice dark mean is added before taking the Poisson complement.
    """
    nbar = check_real(nbar, "nbar", low=0.0)
    return float(-np.expm1(-(model.efficiency * nbar + model.dark_per_slice)))


def photon_count_pmf(nbar, n):
    """Poisson probability of ``n`` counts at mean ``nbar``."""
    return float(poisson.pmf(n, nbar))


def slice_exponents(ensemble, model, nulled, ratios):
    """Per-slice Poisson exponent for every (node, hypothesis) pair.

    Parameters
    ----------
    nulled : int array, shape (n,)
        Zero-based index of the state each node's displacement is phased to.
    ratios : float array, shape (n,)
        Displacement amplitude over input amplitude, ``|beta| / |alpha|``.

    Returns
    -------
    ndarray, shape (n, M)
        ``eta * nbar / N + nu / N`` so the no-click probability is ``exp(-x)``.
    """
    m = ensemble.n_states
    cos_rel = ensemble.relative_cosines()
    d = (np.arange(m)[None, :] - np.asarray(nulled)[:, None]) % m
    r = np.asarray(ratios, dtype=float)[:, None]
    nbar = ensemble.mean_photon * (1.0 + r * r - 2.0 * model.visibility * r * cos_rel[d])
    np.maximum(nbar, 0.0, out=nbar)
    return (model.efficiency * nbar + model.dark_per_pulse) / model.slices


def _hypothesis_exponents(beta, ensemble, model):
    nbar = np.array([displaced_mean(a, beta, model.visibility) for a in ensemble.amplitudes])
    return model.efficiency * nbar / model.slices + model.dark_per_slice


def log_likelihoods(beta, clicked, ensemble, model):
    """Log-probability of one slice outcome under each hypothesis."""
    x = _hypothesis_exponents(beta, ensemble, model)
    if not clicked:
        return -x
    with np.errstate(divide="ignore"):
        return np.where(x > _LOG_SPACE_THRESHOLD, np.log1p(-np.exp(-x)), np.log(-np.expm1(-x)))


def bayes_update(prior, beta, clicked, ensemble, model):
    """Posterior over the ``M`` hypotheses after one slice outcome.

    Parameters
    ----------
    prior : array_like, shape (M,)
        Belief before the slice.
    beta : complex
        Displacement amplitude applied during the slice.
    clicked : bool
        On/off detector outcome.

    Raises
    ------
    DegenerateEvidenceError
        If the outcome has zero probability under every hypothesis with
        non-zero prior weight.
    """
    prior = check_probability_vector(prior, "prior", size=ensemble.n_states)
    with np.errstate(divide="ignore"):
        log_joint = np.log(prior) + log_likelihoods(beta, clicked, ensemble, model)
    norm = logsumexp(log_joint)
    if not np.isfinite(norm):
        raise DegenerateEvidenceError(f"outcome clicked={clicked} is impossible under every hypothesis")
    posterior = np.exp(log_joint - norm)
    return posterior / posterior.sum()
