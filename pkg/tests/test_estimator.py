from fractions import Fraction

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from caseclust import CaseClusterer
from caseclust.estimator import check_case_values
from caseclust.exceptions import PreconditionError
from caseclust.layout import DEFAULT


def test_get_and_set_params():
    est = CaseClusterer(density="1/2", max_entries=10)
    params = est.get_params()
    assert params == {
        "density": "1/2",
        "max_entries": 10,
        "strict_density": False,
        "paper_literal_range": False,
        "algorithm": "windowed",
        "entry_width": 4,
    }
    est.set_params(max_entries=3)
    assert est.max_entries == 3
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est


def test_fit_attributes():
    est = CaseClusterer(density="1/2", max_entries=10).fit([102, 0, 1, 2, 100, 101, 0])
    assert est.n_clusters_ == 2
    assert est.duplicates_dropped_ == 1
    assert est.partition_.ranges == ((0, 2), (3, 5))
    assert est.labels_.tolist() == [1, 0, 0, 0, 1, 1, 0]
    assert est.params_.density_min == Fraction(1, 2)
    assert est.violations() == []
    assert est.plan_.table_count == 2


def test_fit_predict_and_predict():
    est = CaseClusterer(density="1/2", max_entries=10)
    assert est.fit_predict([0, 1, 2, 100, 101, 102]).tolist() == [0, 0, 0, 1, 1, 1]
    assert est.predict([1, 50, 101, 102, 103]).tolist() == [0, DEFAULT, 1, 1, DEFAULT]
    assert est.dispatch([1, 50, 101]).tolist() == [1, DEFAULT, 4]


def test_transform_reports_dispatch_cost():
    est = CaseClusterer(density="1/2", max_entries=10).fit([0, 1, 2, 100, 101, 102])
    out = est.transform([1, 50])
    assert out.shape == (2, 2)
    assert out.tolist() == [[2, 1], [2, 0]]


def test_column_vector_and_integral_floats():
    est = CaseClusterer().fit(np.array([[3.0], [1.0], [2.0]]))
    assert est.cases_.tolist() == [1, 2, 3]


@pytest.mark.parametrize("bad", [[], [1.5], [np.nan], [[1, 2], [3, 4]], ["a"], [True]])
def test_rejects_bad_input(bad):
    with pytest.raises(PreconditionError):
        CaseClusterer().fit(bad)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        CaseClusterer().predict([1])


def test_bad_hyperparameters_raise_at_fit():
    with pytest.raises(PreconditionError):
        CaseClusterer(density="3/2").fit([1, 2])
    with pytest.raises(PreconditionError):
        CaseClusterer(algorithm="greedy").fit([1, 2])


def test_quadratic_algorithm_agrees():
    rng = np.random.default_rng(11)
    x = rng.integers(0, 2000, size=400)
    a = CaseClusterer(algorithm="windowed").fit(x)
    b = CaseClusterer(algorithm="quadratic").fit(x)
    assert a.n_clusters_ == b.n_clusters_


def test_check_case_values_inverse():
    cases, inverse = check_case_values([5, 3, 5, 9])
    assert cases.tolist() == [3, 5, 9]
    assert inverse.tolist() == [1, 0, 1, 2]
