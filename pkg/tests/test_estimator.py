import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from sl2prism import PrismTiling
from sl2prism.core_model import HPoint
from sl2prism.estimator import check_points
from sl2prism.exceptions import InadmissibleQ
from sl2prism.isometry import apply, fibre_translation


def test_params_round_trip():
    est = PrismTiling(p=4, q=6, phi_tau=0.3)
    assert est.get_params()["q"] == 6
    est.set_params(q=7)
    assert clone(est).get_params() == est.get_params()


def test_fit_sets_attributes():
    est = PrismTiling(p=4, q=6).fit()
    assert est.x3_ == pytest.approx((np.sqrt(6) - np.sqrt(2)) / 2, abs=1e-9)
    assert len(est.vertices_) == 4 and len(est.generators_) == 4
    assert est.contains_fibre(est.rotated_vertex_, 3)
    assert est.contains_fibre(apply(fibre_translation(0.4), est.vertices_[1]), 2)


def test_fit_validates_parameters():
    with pytest.raises(InadmissibleQ):
        PrismTiling(p=3, q=6).fit()
    with pytest.raises(ValueError):
        PrismTiling(p=3, q=7, resolution=1).fit()


def test_not_fitted():
    with pytest.raises(NotFittedError):
        PrismTiling().patch()


def test_transform_gives_trace_coordinates():
    est = PrismTiling(p=3, q=7).fit()
    X = np.array([v.coords @ fibre_translation(0.3).m for v in est.vertices_])
    np.testing.assert_allclose(est.transform(X), [v.coords[2:] for v in est.vertices_], atol=1e-14)


def test_check_points():
    assert check_points([1, 0, 0, 0]).shape == (1, 4)
    with pytest.raises(ValueError):
        check_points(np.zeros((2, 4)))
    with pytest.raises(ValueError):
        check_points(np.ones((2, 3)))
    with pytest.raises(ValueError):
        check_points([[1, 0, 2, 0]], interior=True)


def test_downstream_helpers():
    est = PrismTiling(p=3, q=7, phi_tau=0.5, resolution=4).fit()
    assert len(est.patch(1)) == 6
    assert len(est.mesh(0).objects) == 1
    assert est.face_to_face().verdict.value == "NON_FACE_TO_FACE"
    assert est.report().is_consistent()
