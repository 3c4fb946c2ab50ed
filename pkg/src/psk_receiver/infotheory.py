"""Mutual information of the discrete channel a receiver induces."""

import numpy as np
from scipy.special import xlogy

from ._validation import check_channel, check_probability_vector


def mutual_information(channel, input_dist=None):
    """``I(X;Y)`` in bits for ``channel[k, j] = P(j | k)`` and input distribution ``p(k)``.

    Uniform inputs by default; ``0 log 0`` is taken as zero.
    """
    c = check_channel(channel)
    m = c.shape[0]
    p = np.full(m, 1.0 / m) if input_dist is None else check_probability_vector(input_dist, "input_dist", m)
    q = p @ c
    # H(Y) - H(Y|X)
    h_y = -xlogy(q, q).sum()
    h_y_given_x = -(p * xlogy(c, c).sum(axis=1)).sum()
    return float(max(h_y - h_y_given_x, 0.0) / np.log(2.0))


def entropy(dist):
    d = np.asarray(dist, dtype=float)
    return float(-xlogy(d, d).sum() / np.log(2.0))
