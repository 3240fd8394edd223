"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils import check_array

from .core import Example


def check_int_param(value, name, min_val=0):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < min_val:
        raise ValueError(f"{name}={value} must be >= {min_val}")
    return int(value)


def check_real_param(value, name, low=None, high=None, low_open=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if low is not None and (value < low or (low_open and value == low)):
        raise ValueError(f"{name}={value} out of range")
    if high is not None and value > high:
        raise ValueError(f"{name}={value} out of range")
    return value


def as_examples(X, lookup=None) -> list[Example]:
    """Coerce a stream to a list of :class:`Example`.

    ``X`` may already hold examples; otherwise it is a 0/1 array of shape
    ``(n_samples, d)``.  ``lookup`` maps a bit row to a known example (so ids
    line up with a teacher's instance); without it, rows get their index as id.
    """
    X = list(X) if not isinstance(X, np.ndarray) else X
    if len(X) and all(isinstance(x, Example) for x in X):
        return list(X)
    arr = check_array(X, dtype=np.int64, ensure_min_samples=1)
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("feature values must be 0 or 1")
    if lookup is not None:
        return [lookup(row) for row in arr.tolist()]
    return [Example(i, tuple(row)) for i, row in enumerate(arr.tolist())]
