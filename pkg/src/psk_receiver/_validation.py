"""Input validation helpers and exception types shared across the package."""

import numbers

import numpy as np

PRIOR_TOL = 1e-12


class InvalidParameterError(ValueError):
    """A physical or numerical parameter is outside its allowed range."""


class ShapeMismatchError(ValueError):
    """A displacement schedule does not match the number of slices."""


class DegenerateEvidenceError(ArithmeticError):
    """Every hypothesis assigns zero likelihood to an observed outcome."""


class DimensionCapError(ValueError):
    """Too many slices for a history-conditioned schedule."""


class FormatVersionError(ValueError):
    """A schedule or dataset file has an unknown format or version."""


def check_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise InvalidParameterError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_real(value, name, low=None, high=None):
    """Return ``value`` as a finite float inside ``[low, high]``."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise InvalidParameterError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value}")
    if low is not None and value < low:
        raise InvalidParameterError(f"{name} must be >= {low}, got {value}")
    if high is not None and value > high:
        raise InvalidParameterError(f"{name} must be <= {high}, got {value}")
    return value


def check_probability_vector(p, name="priors", size=None):
    """Validate a probability vector and renormalize it to sum to exactly one."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise InvalidParameterError(f"{name} must be one-dimensional")
    if size is not None and p.shape[0] != size:
        raise InvalidParameterError(f"{name} must have length {size}, got {p.shape[0]}")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise InvalidParameterError(f"{name} entries must be finite and non-negative")
    total = p.sum()
    if abs(total - 1.0) > PRIOR_TOL * max(1, p.shape[0]):
        raise InvalidParameterError(f"{name} must sum to 1, got {total!r}")
    return p / total


def check_channel(channel, tol=1e-10):
    c = np.asarray(channel, dtype=float)
    if c.ndim != 2:
        raise InvalidParameterError("channel must be a 2-D matrix")
    if not np.all(np.isfinite(c)) or np.any(c < -tol) or np.any(c > 1 + tol):
        raise InvalidParameterError("channel entries must lie in [0, 1]")
    if np.any(np.abs(c.sum(axis=1) - 1) > tol):
        raise InvalidParameterError("channel rows must sum to 1")
    return np.clip(c, 0.0, 1.0)


def frozen_array(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr
