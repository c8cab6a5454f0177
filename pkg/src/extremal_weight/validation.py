"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import numpy as np
from gmpy2 import mpq
from sklearn.utils.validation import check_array

from .weightlab import FULL_DEPTH_MAX_K

__all__ = ["check_k", "check_nu", "check_positive", "check_window", "check_points", "check_digits"]


def check_k(k) -> int:
    if k is None:
        return None
    if int(k) != k:
        raise ValueError("k must be an integer")
    k = int(k)
    if k < 2:
        raise ValueError("k must be >= 2")
    return k


def check_nu(nu, k: int | None) -> int | None:
    """Depth, defaulting to full depth only where the piece count stays small."""
    if nu is None:
        if k is not None and k > FULL_DEPTH_MAX_K:
            raise ValueError(f"nu must be given explicitly for k > {FULL_DEPTH_MAX_K}")
        return None
    if int(nu) != nu or nu < 0:
        raise ValueError("nu must be a non-negative integer")
    return int(nu)


def check_positive(name: str, value) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be positive")
    return value


def check_window(window) -> int:
    if int(window) != window or window < 2:
        raise ValueError("window must be an integer >= 2")
    return int(window)


def check_digits(digits) -> int:
    if int(digits) != digits or not 10 <= digits <= 1000:
        raise ValueError("precision must be between 10 and 1000 digits")
    return int(digits)


def check_points(X) -> np.ndarray:
    """Points as a flat float array; accepts shape ``(n,)`` or ``(n, 1)``."""
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    arr = check_array(arr, dtype=np.float64, ensure_2d=True)
    if arr.shape[1] != 1:
        raise ValueError("expected a single column of points")
    return arr[:, 0]


def exact_point(x) -> mpq:
    return mpq(x) if not isinstance(x, float) else mpq(*x.as_integer_ratio())
