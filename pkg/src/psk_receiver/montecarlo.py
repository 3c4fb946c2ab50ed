"""Seeded Monte Carlo trials of an adaptive receiver.

Trials are processed in fixed-size chunks. Chunk ``i`` draws from its own
generator spawned from ``SeedSequence(seed)``, so results depend only on the
seed and the trial count, never on how many worker threads run the chunks.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._validation import DegenerateEvidenceError, check_int
from .receiver import tie_argmax

CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class TrialBatchResult:
    trials: int
    errors: int
    seed: int
    confusion: np.ndarray  # confusion[k, j]: sent k, decided j

    @property
    def p_hat(self):
        return self.errors / self.trials

    @property
    def stderr(self):
        p = self.p_hat
        return float(np.sqrt(p * (1.0 - p) / self.trials))

    def merge(self, other):
        """Pool two batches, e.g. four runs of 1e5 trials."""
        return TrialBatchResult(
            self.trials + other.trials,
            self.errors + other.errors,
            self.seed,
            self.confusion + other.confusion,
        )


def replay(strategy, ensemble, model, clicks, sent=None, rng=None):
    """Run the adaptive receiver along detection records.

    With ``clicks`` given (shape ``(n, N)``) the outcomes are replayed; with
    ``clicks=None`` they are sampled from ``rng`` for the states ``sent``.
    Returns ``(clicks, belief)`` where ``belief`` is the terminal posterior.
    """
    m = ensemble.n_states
    priors = np.asarray(ensemble.priors)
    cos_rel = ensemble.relative_cosines()
    cos_by_null = cos_rel[(np.arange(m)[None, :] - np.arange(m)[:, None]) % m]
    scale = model.efficiency * ensemble.mean_photon / model.slices
    dark = model.dark_per_slice
    nodes = strategy.node_ratios(model.slices)

    size = len(sent) if clicks is None else clicks.shape[0]
    record = np.zeros((size, model.slices), dtype=bool) if clicks is None else np.asarray(clicks, dtype=bool)
    belief = np.broadcast_to(priors, (size, m)).copy()
    prefix = np.zeros(size, dtype=np.int64)
    rows = np.arange(size)
    for depth in range(model.slices):
        nulled = tie_argmax(belief)
        r = nodes[(1 << depth) - 1 + prefix][:, None]
        x = scale * (1.0 + r * r - 2.0 * model.visibility * r * cos_by_null[nulled])
        np.maximum(x, 0.0, out=x)
        x += dark
        p_click = -np.expm1(-x)
        if clicks is None:
            record[:, depth] = rng.random(size) < p_click[rows, sent]
        clicked = record[:, depth]
        belief *= np.where(clicked[:, None], p_click, np.exp(-x))
        total = belief.sum(axis=1, keepdims=True)
        if np.any(total <= 0):
            raise DegenerateEvidenceError("detection record has zero likelihood under every state")
        belief /= total
        prefix = 2 * prefix + clicked
    return record, belief


def sample_histories(strategy, ensemble, model, size, rng):
    """Draw ``size`` sent states and their detection records."""
    sent = rng.choice(ensemble.n_states, size=size, p=np.asarray(ensemble.priors))
    record, belief = replay(strategy, ensemble, model, None, sent, rng)
    return sent, record, belief


def _run_chunk(strategy, ensemble, model, size, rng):
    m = ensemble.n_states
    sent, _, belief = sample_histories(strategy, ensemble, model, size, rng)
    decided = tie_argmax(belief)
    confusion = np.zeros((m, m), dtype=np.int64)
    np.add.at(confusion, (sent, decided), 1)
    return confusion


def simulate_trials(strategy, ensemble, model, trials, seed=0, threads=1):
    """Run ``trials`` independent discrimination experiments.

    Each trial draws the sent state from the priors, samples click/no-click
    in every slice from the sent state's click probability under the MAP-phased,
    scheduled displacement, updates the belief by Bayes' rule and finally
    decides the MAP state.
    """
    trials = check_int(trials, "trials", minimum=1)
    seed = check_int(seed, "seed", minimum=0)
    sizes = [CHUNK] * (trials // CHUNK)
    if trials % CHUNK:
        sizes.append(trials % CHUNK)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def work(i):
        return _run_chunk(strategy, ensemble, model, sizes[i], np.random.default_rng(children[i]))

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    else:
        parts = [work(i) for i in range(len(sizes))]
    confusion = np.sum(parts, axis=0)
    errors = int(trials - np.trace(confusion))
    return TrialBatchResult(trials, errors, seed, confusion)
