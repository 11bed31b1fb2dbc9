"""Input validation helpers in the spirit of ``sklearn.utils.check_array``."""

import numpy as np
from sklearn.utils import check_array


def check_matrix(value, name, shape=None):
    """Return ``value`` as a finite 2-D float array, optionally shape-checked."""
    try:
        arr = check_array(
            value, ensure_2d=True, dtype=np.float64, ensure_min_samples=1,
            ensure_min_features=1, copy=True,
        )
    except ValueError as exc:
        raise ValueError(f"{name}: {exc}") from exc
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"{name}: expected shape {tuple(shape)}, got {arr.shape}")
    return arr


def check_vector(value, name, size=None):
    arr = np.array(value, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise ValueError(f"{name}: expected a 1-D vector, got ndim={arr.ndim}")
    if arr.size == 0:
        raise ValueError(f"{name}: empty vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: contains NaN or infinity")
    if size is not None and arr.size != size:
        raise ValueError(f"{name}: expected length {size}, got {arr.size}")
    return arr


def check_square(value, name):
    arr = check_matrix(value, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name}: expected a square matrix, got {arr.shape}")
    return arr


def freeze(arr):
    """Mark an array read-only and return it."""
    arr.setflags(write=False)
    return arr
