"""Exact evaluation of adaptive displacement receivers over the detection-history tree.

Histories are indexed as integers whose binary digits are the slice outcomes,
first slice most significant, with ``0`` for no-click and ``1`` for click.
History-conditioned schedules use heap order: the node reached after the
prefix ``p`` of length ``j`` has index ``2**j - 1 + p``.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import InvalidParameterError, ShapeMismatchError, check_real, frozen_array

KINDS = ("non-optimized", "flat", "sequential", "historical")
DEFAULT_R_MAX = 5.0
TIE_RTOL = 1e-12
HISTORY_TABLE_CAP = 12


def tie_argmax(weights):
    """Row-wise argmax that resolves ties (to ``TIE_RTOL``) to the lowest index."""
    w = np.asarray(weights)
    top = w.max(axis=-1, keepdims=True)
    return np.argmax(w >= top * (1.0 - TIE_RTOL), axis=-1)


def map_phase(belief, ensemble=None):
    """Zero-based index of the most probable hypothesis (lowest index on ties).

    The displacement for the next slice is phased to this state, and the
    final decision is the same rule applied to the terminal belief.
    """
    belief = np.asarray(belief, dtype=float)
    if ensemble is not None and belief.shape != (ensemble.n_states,):
        raise InvalidParameterError("belief length does not match the ensemble")
    return int(tie_argmax(belief))


def heap_slice(depth, local=0, subtree_depth=0):
    """Heap-index slice of the nodes at ``depth`` below node ``(subtree_depth, local)``."""
    width = 1 << (depth - subtree_depth)
    start = (1 << depth) - 1 + local * width
    return slice(start, start + width)


@dataclass(frozen=True, eq=False)
class Strategy:
    """Displacement amplitude schedule, as ratios ``|beta| / |alpha|``.

    ``flat`` and ``non-optimized`` hold one ratio, ``sequential`` one per
    slice and ``historical`` one per history-tree node (``2**N - 1``).
    Phases are never stored: they follow the MAP rule at run time.
    """

    kind: str
    ratios: np.ndarray
    r_max: float = DEFAULT_R_MAX

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown strategy kind {self.kind!r}; expected one of {KINDS}")
        r_max = check_real(self.r_max, "r_max", low=0.0)
        ratios = np.atleast_1d(np.asarray(self.ratios, dtype=float))
        if ratios.ndim != 1 or ratios.size == 0:
            raise ShapeMismatchError("ratios must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(ratios)) or np.any(ratios < 0) or np.any(ratios > r_max):
            raise InvalidParameterError(f"ratios must lie in [0, {r_max}]")
        if self.kind in ("flat", "non-optimized") and ratios.size != 1:
            raise ShapeMismatchError(f"{self.kind} schedule takes a single ratio")
        if self.kind == "non-optimized" and ratios[0] != 1.0:
            raise InvalidParameterError("non-optimized schedule has ratio exactly 1")
        if self.kind == "historical" and (ratios.size + 1) & ratios.size:
            raise ShapeMismatchError("historical schedule length must be 2**N - 1")
        object.__setattr__(self, "r_max", r_max)
        object.__setattr__(self, "ratios", frozen_array(ratios))

    @property
    def n_slices(self):
        """Slice count implied by the schedule, or ``None`` for scalar schedules."""
        if self.kind == "sequential":
            return self.ratios.size
        if self.kind == "historical":
            return int(self.ratios.size + 1).bit_length() - 1
        return None

    def node_ratios(self, n_slices):
        """Expand to one ratio per history-tree node for ``n_slices`` slices."""
        n = self.n_slices
        if n is not None and n != n_slices:
            raise ShapeMismatchError(f"{self.kind} schedule is for N={n}, model has N={n_slices}")
        if self.kind == "historical":
            return np.array(self.ratios)
        if self.kind == "sequential":
            return np.repeat(self.ratios, 1 << np.arange(n_slices))
        return np.full((1 << n_slices) - 1, self.ratios[0])

    def ratio_at(self, depth, prefix):
        """Ratio used at slice ``depth`` (zero-based) after history ``prefix``."""
        if self.kind == "historical":
            return float(self.ratios[(1 << depth) - 1 + prefix])
        if self.kind == "sequential":
            return float(self.ratios[depth])
        return float(self.ratios[0])


def non_optimized_strategy(N=None):
    """Displacement that exactly nulls the most likely state, ``|beta| = |alpha|``."""
    return Strategy("non-optimized", [1.0])


def flat_strategy(ratio, r_max=DEFAULT_R_MAX):
    return Strategy("flat", [ratio], r_max)


class TreeEvaluator:
    """Vectorized propagation of per-hypothesis likelihoods through the history tree.

    All entry points accept a batch of ``K`` schedules given as a ``(K, 2**N - 1)``
    array of node ratios and return one result per schedule.
    """

    def __init__(self, ensemble, model):
        self.ensemble = ensemble
        self.model = model
        self.n_slices = model.slices
        self.priors = np.asarray(ensemble.priors)
        m = ensemble.n_states
        cos_rel = ensemble.relative_cosines()
        # row i: cosine of the phase offset of every state from state i
        self._cos_by_null = cos_rel[(np.arange(m)[None, :] - np.arange(m)[:, None]) % m]
        self._scale = model.efficiency * ensemble.mean_photon / model.slices
        self._dark = model.dark_per_pulse / model.slices
        self._two_v = 2.0 * model.visibility

    def split(self, lik, ratios):
        """Children likelihoods of every node in ``lik``.

        ``lik`` has shape ``(K, w, M)`` and ``ratios`` shape ``(K, w)``;
        returns shape ``(K, 2w, M)`` with no-click child first.
        """
        nulled = tie_argmax(lik * self.priors)
        r = ratios[..., None]
        x = self._scale * (1.0 + r * r - self._two_v * r * self._cos_by_null[nulled])
        np.maximum(x, 0.0, out=x)
        x += self._dark
        p0 = np.exp(-x)
        p1 = -np.expm1(-x)
        k, w, m = lik.shape
        out = np.empty((k, w, 2, m))
        np.multiply(lik, p0, out=out[:, :, 0])
        np.multiply(lik, p1, out=out[:, :, 1])
        return out.reshape(k, 2 * w, m)

    def leaves(self, node_ratios, start_lik=None):
        """Leaf likelihoods ``P(history | state)`` for a batch of heap-ordered schedules.

        ``node_ratios`` has shape ``(K, 2**L - 1)`` and describes a tree of
        ``L`` levels, either the whole receiver (``L = N``) or the subtree
        hanging off a node whose likelihood row is ``start_lik``.
        """
        node_ratios = np.atleast_2d(node_ratios)
        k, size = node_ratios.shape
        levels = (size + 1).bit_length() - 1
        if (1 << levels) - 1 != size:
            raise ShapeMismatchError(f"{size} node ratios do not form a complete tree")
        m = self.ensemble.n_states
        if start_lik is None:
            lik = np.ones((k, 1, m))
        else:
            lik = np.broadcast_to(np.asarray(start_lik, dtype=float), (k, 1, m)).copy()
        for d in range(levels):
            lik = self.split(lik, node_ratios[:, heap_slice(d)])
        return lik

    def success(self, node_ratios, start_lik=None):
        """``sum over leaves of max_k prior_k P(history | k)`` for each schedule."""
        lik = self.leaves(node_ratios, start_lik)
        return (lik * self.priors).max(axis=-1).sum(axis=-1)

    def p_error(self, node_ratios):
        return 1.0 - self.success(node_ratios)

    def level_likelihoods(self, node_ratios, depth):
        """Likelihood rows, shape ``(2**depth, M)``, of the nodes at ``depth``."""
        node_ratios = np.atleast_2d(node_ratios)
        lik = np.ones((1, 1, self.ensemble.n_states))
        for d in range(depth):
            lik = self.split(lik, node_ratios[:, heap_slice(d)])
        return lik[0]


def subtree(node_ratios, depth, local, n_slices):
    """Compact heap array of the subtree rooted at node ``(depth, local)``."""
    return np.concatenate([node_ratios[heap_slice(d, local, depth)] for d in range(depth, n_slices)])


@dataclass(frozen=True, eq=False)
class ErrorReport:
    """Exact outcome statistics of one strategy.

    ``likelihoods[h, k]`` is ``P(history h | state k)``; ``decisions[h]`` the
    zero-based decided state for history ``h``.
    """

    p_error: float
    likelihoods: np.ndarray
    decisions: np.ndarray
    priors: np.ndarray
    n_slices: int

    @property
    def leaf_probability(self):
        """Occurrence probability of each detection history."""
        return self.likelihoods @ self.priors

    @property
    def channel(self):
        """``channel[k, j] = P(decide j | sent k)``."""
        m = self.priors.size
        onehot = np.zeros((self.decisions.size, m))
        onehot[np.arange(self.decisions.size), self.decisions] = 1.0
        return self.likelihoods.T @ onehot

    def history_table(self):
        """One record per history: outcomes, probability, 1-based decision, correct mass."""
        n = self.n_slices
        joint = self.likelihoods * self.priors
        rows = []
        for h, (p, dec) in enumerate(zip(self.leaf_probability, self.decisions)):
            outcomes = tuple(bool((h >> (n - 1 - j)) & 1) for j in range(n))
            rows.append(
                {
                    "history": "".join("1" if o else "0" for o in outcomes),
                    "probability": float(p),
                    "decision": int(dec) + 1,
                    "correct": float(joint[h, dec]),
                }
            )
        return rows

    def to_dict(self, include_histories=False, force=False):
        """JSON-ready record; the history table is refused above N=12 unless forced."""
        record = {
            "p_error": float(self.p_error),
            "n_slices": self.n_slices,
            "priors": self.priors.tolist(),
            "channel": self.channel.tolist(),
        }
        if include_histories:
            if self.n_slices > HISTORY_TABLE_CAP and not force:
                raise InvalidParameterError(
                    f"history table has 2**{self.n_slices} rows; pass force=True to emit it"
                )
            record["histories"] = self.history_table()
        return record


def evaluate_strategy(strategy, ensemble, model):
    """Exact error probability of ``strategy`` by enumerating all ``2**N`` histories."""
    evaluator = TreeEvaluator(ensemble, model)
    nodes = strategy.node_ratios(model.slices)
    lik = evaluator.leaves(nodes)[0]
    priors = np.asarray(ensemble.priors)
    joint = lik * priors
    decisions = tie_argmax(joint)
    p_error = 1.0 - joint[np.arange(joint.shape[0]), decisions].sum()
    return ErrorReport(float(p_error), lik, decisions, priors, model.slices)


def induced_channel(strategy, ensemble, model, symmetrize=False):
    """Channel matrix ``P(decide j | sent k)`` realised by the receiver.

    The first slice always nulls state 1 when priors are uniform, so the
    channel is not circulant in general. ``symmetrize=True`` averages over the
    ``M`` rotations, i.e. the channel of a receiver whose first phase is drawn
    uniformly at random; its error probability is unchanged for uniform priors.
    """
    channel = evaluate_strategy(strategy, ensemble, model).channel
    if symmetrize:
        m = channel.shape[0]
        channel = sum(np.roll(np.roll(channel, s, axis=0), s, axis=1) for s in range(m)) / m
    return channel
