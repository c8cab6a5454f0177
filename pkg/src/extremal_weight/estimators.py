"""scikit-learn style wrappers: build a weight on ``fit``, evaluate it on ``transform``."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .ops.hilbert import HilbertEvaluator, hilbert_float
from .validation import check_digits, check_k, check_nu, check_points, exact_point
from .weightlab import build_weight, derive_params

__all__ = ["ExtremalWeight", "HilbertTransform"]


def _periodic_lookup(fn, x: np.ndarray) -> np.ndarray:
    edges, vals = fn.float_arrays()
    frac = x - np.floor(x)
    idx = np.searchsorted(edges, frac, side="right") - 1
    return vals[np.clip(idx, 0, len(vals) - 1)]


class ExtremalWeight(TransformerMixin, BaseEstimator):
    """Period-one extremal weight; ``transform`` returns columns ``[w, sigma, w_tilde]``.

    Give either ``k`` or a target ``t``; ``nu`` defaults to full depth.
    """

    def __init__(self, k=2, t=None, nu=None):
        self.k = k
        self.t = t
        self.nu = nu

    def fit(self, X=None, y=None):
        k = check_k(self.k) if self.t is None else None
        nu = check_nu(self.nu, k)
        self.params_ = derive_params(k=k, t=self.t, nu=nu)
        self.weight_ = build_weight(self.params_)
        self.n_pieces_ = len(self.weight_)
        return self

    def transform(self, X):
        check_is_fitted(self, "weight_")
        x = check_points(X)
        cw = self.weight_
        return np.column_stack(
            [_periodic_lookup(cw.w, x), _periodic_lookup(cw.sigma, x), _periodic_lookup(cw.w_tilde, x)]
        )


class HilbertTransform(TransformerMixin, BaseEstimator):
    """``H(w chi_[0,1))`` at given points for the weight built from ``k``/``t``/``nu``.

    ``certified=True`` evaluates in ball arithmetic at ``precision`` digits
    and treats each float input as the exact binary rational it stores.
    """

    def __init__(self, k=2, t=None, nu=None, precision=50, certified=False):
        self.k = k
        self.t = t
        self.nu = nu
        self.precision = precision
        self.certified = certified

    def fit(self, X=None, y=None):
        self.weight_ = ExtremalWeight(self.k, self.t, self.nu).fit().weight_
        if self.certified:
            self.evaluator_ = HilbertEvaluator(self.weight_.w, check_digits(self.precision))
        else:
            self.evaluator_ = None
        return self

    def transform(self, X):
        check_is_fitted(self, "weight_")
        x = check_points(X)
        if self.evaluator_ is None:
            edges, vals = self.weight_.w.float_arrays()
            return hilbert_float(edges, vals, x).reshape(-1, 1)
        out = np.array([self.evaluator_.at(exact_point(float(v))).value for v in x])
        return out.reshape(-1, 1)
