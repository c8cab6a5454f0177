import numpy as np
import pytest
from sklearn.base import clone

from extremal_weight import ExtremalWeight, HilbertTransform


def test_fit_transform_columns():
    est = ExtremalWeight(k=2)
    out = est.fit_transform(np.array([[1 / 6], [17 / 18], [1 + 1 / 6], [-5 / 6]]))
    assert out.shape == (4, 3)
    np.testing.assert_allclose(out[:, 0], [5 / 9, 2 / 9, 5 / 9, 5 / 9])
    np.testing.assert_allclose(out[:, 0] * out[:, 1], 1.0)
    np.testing.assert_allclose(out[:, 2], [2, 2, 2, 2])
    assert est.n_pieces_ == 11


def test_rejects_bad_k():
    with pytest.raises(ValueError, match="k must be >= 2"):
        ExtremalWeight(k=1).fit()


def test_target_t():
    assert ExtremalWeight(k=None, t=10).fit().params_.k == 3


def test_clone_params():
    est = clone(HilbertTransform(k=3, nu=2, precision=30, certified=True))
    assert est.get_params()["precision"] == 30


def test_unfitted():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        ExtremalWeight().transform([[0.5]])


def test_hilbert_float_and_certified(k2_fix):
    x = np.array([17 / 18, 0.1, 2.5])
    fast = HilbertTransform(k=2).fit().transform(x)
    sure = HilbertTransform(k=2, certified=True).fit().transform(x)
    assert fast.shape == sure.shape == (3, 1)
    np.testing.assert_allclose(fast, sure, rtol=1e-12)
    assert sure[0, 0] == pytest.approx(float(k2_fix["hilbert_17_18"]), rel=1e-14)


def test_bad_points():
    with pytest.raises(ValueError):
        ExtremalWeight().fit().transform(np.zeros((3, 2)))
