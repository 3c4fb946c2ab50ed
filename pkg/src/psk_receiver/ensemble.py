"""M-PSK coherent-state constellations and the detector/system noise model.

States are stored zero-based: state ``i`` (``i = 0..M-1``) carries the label
``k = i + 1`` and the phase ``2*pi*k/M``. For ``M = 4`` the amplitudes are
therefore ``(i, -1, -i, 1) * |alpha|``.
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import (
    InvalidParameterError,
    check_int,
    check_probability_vector,
    check_real,
    frozen_array,
)


@dataclass(frozen=True, eq=False)
class StateEnsemble:
    """Equal-modulus phase-shift-keyed coherent states with prior weights."""

    n_states: int
    mean_photon: float
    priors: np.ndarray = field(default=None)

    def __post_init__(self):
        m = check_int(self.n_states, "n_states", minimum=2)
        n = check_real(self.mean_photon, "mean_photon", low=0.0)
        if self.priors is None:
            priors = np.full(m, 1.0 / m)
        else:
            priors = check_probability_vector(self.priors, "priors", size=m)
        object.__setattr__(self, "n_states", m)
        object.__setattr__(self, "mean_photon", n)
        object.__setattr__(self, "priors", frozen_array(priors))

    @property
    def modulus(self):
        return float(np.sqrt(self.mean_photon))

    @property
    def labels(self):
        """One-based state labels ``k``."""
        return np.arange(1, self.n_states + 1)

    @property
    def phases(self):
        return 2 * np.pi * self.labels / self.n_states

    @property
    def amplitudes(self):
        return self.modulus * np.exp(1j * self.phases)

    def relative_cosines(self):
        """``cos(2*pi*d/M)`` for ``d = 0..M-1``, exactly mirror-symmetric in ``d``.

        Using ``min(d, M - d)`` keeps hypotheses that are mathematically
        equidistant from the nulled state bitwise equal, so tie-breaks do not
        depend on rounding in ``cos``.
        """
        d = np.arange(self.n_states)
        return np.cos(2 * np.pi * np.minimum(d, self.n_states - d) / self.n_states)

    def with_mean_photon(self, mean_photon):
        return StateEnsemble(self.n_states, mean_photon, self.priors)


@dataclass(frozen=True)
class SystemModel:
    """Detection efficiency, displacement visibility, dark counts and slice count.

    ``dark_per_pulse`` is the Poisson mean of dark counts over the whole pulse;
    each of the ``slices`` adaptive measurements sees ``dark_per_pulse / slices``.
    """

    efficiency: float = 1.0
    visibility: float = 1.0
    dark_per_pulse: float = 0.0
    slices: int = 10

    def __post_init__(self):
        object.__setattr__(self, "efficiency", check_real(self.efficiency, "efficiency", 0.0, 1.0))
        object.__setattr__(self, "visibility", check_real(self.visibility, "visibility", 0.0, 1.0))
        object.__setattr__(self, "dark_per_pulse", check_real(self.dark_per_pulse, "dark_per_pulse", 0.0))
        object.__setattr__(self, "slices", check_int(self.slices, "slices", minimum=1))

    @property
    def dark_per_slice(self):
        return self.dark_per_pulse / self.slices

    @property
    def is_ideal(self):
        return self.efficiency == 1.0 and self.visibility == 1.0 and self.dark_per_pulse == 0.0

    def replace(self, **changes):
        return SystemModel(**{**asdict(self), **changes})


IDEAL = SystemModel()
EXPERIMENT = SystemModel(efficiency=0.70, visibility=0.996, dark_per_pulse=0.001)


def make_mpsk_ensemble(M, mean_photon, priors=None):
    """Build the ``M``-PSK ensemble with ``<n> = mean_photon``.

    Priors default to uniform. Raises ``InvalidParameterError`` for ``M < 2``,
    negative ``mean_photon`` or malformed priors.
    """
    return StateEnsemble(M, mean_photon, priors)


CONFIG_KEYS = ("M", "mean_photon", "priors", "efficiency", "visibility", "dark_per_pulse", "slices")


def to_config(ensemble, model):
    """Flat, JSON-friendly record describing an ensemble and system model."""
    return {
        "M": ensemble.n_states,
        "mean_photon": ensemble.mean_photon,
        "priors": [float(p) for p in ensemble.priors],
        "efficiency": model.efficiency,
        "visibility": model.visibility,
        "dark_per_pulse": model.dark_per_pulse,
        "slices": model.slices,
    }


def from_config(record):
    """Inverse of :func:`to_config`; ``priors`` may be omitted or null."""
    unknown = set(record) - set(CONFIG_KEYS)
    if unknown:
        raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
    try:
        ensemble = make_mpsk_ensemble(record["M"], record["mean_photon"], record.get("priors"))
    except KeyError as exc:
        raise InvalidParameterError(f"missing config key {exc}") from None
    model = SystemModel(
        efficiency=record.get("efficiency", 1.0),
        visibility=record.get("visibility", 1.0),
        dark_per_pulse=record.get("dark_per_pulse", 0.0),
        slices=record.get("slices", 10),
    )
    return ensemble, model
