import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncmart.algebra import TracialAlgebra
from ncmart.rearrangement import StepFunction, integrate_power, mu, mu_positive, submajorizes
from strategies import step_functions


def test_mu_of_normal_operator():
    A = TracialAlgebra(((3, 1.0),))
    assert mu(np.diag([3.0, -1.0, 2.0]), A).steps == [(3.0, 1.0), (2.0, 1.0), (1.0, 1.0)]


def test_mu_of_projection_is_indicator():
    A = TracialAlgebra(((4, 1.5),))
    p = np.diag([1.0, 1.0, 0.0, 0.0])
    assert mu(p, A).steps == [(1.0, 3.0)]


def test_mu_of_nilpotent():
    A = TracialAlgebra(((2, 1.0),))
    assert mu(np.array([[0, 1], [0, 0]]), A).steps == [(1.0, 1.0)]


def test_integrate_power_examples():
    assert integrate_power(StepFunction([2.0], [1.0]), 2, 1) == 4
    assert integrate_power(StepFunction([3.0, 1.0], [1.0, 2.0]), 1, 2) == 4
    with pytest.raises(ValueError):
        integrate_power(StepFunction([1.0], [1.0]), 0)


def test_step_function_validation():
    with pytest.raises(ValueError):
        StepFunction([1.0, 2.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        StepFunction([1.0], [0.0])
    assert len(StepFunction.rearrange([0.0, 0.0], [1.0, 1.0])) == 0


def test_rearrange_merges_ties_preserving_integral():
    f = StepFunction.rearrange([1.0, 1.0 + 1e-15, 0.5], [1.0, 2.0, 1.0])
    assert len(f) == 2
    assert integrate_power(f, 1) == pytest.approx(3.5)


@settings(max_examples=50, deadline=None)
@given(step_functions())
def test_submajorization_is_reflexive_and_monotone(f):
    assert submajorizes(f, f)
    assert submajorizes(f * 2.0, f)
    assert not submajorizes(f * 0.5, f)


@settings(max_examples=50, deadline=None)
@given(step_functions(), st.floats(0.1, 5.0))
def test_partial_integral_is_concave_and_exact(f, t):
    total = integrate_power(f, 1.0)
    assert integrate_power(f, 1.0, t) <= total + 1e-12
    assert integrate_power(f, 1.0, t) >= min(t, f.domain_total) * f.value_at(t) - 1e-12
    mid = f.partial_integral(np.array([t / 2, t]))
    assert mid[0] >= mid[1] / 2 - 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_mu_positive_matches_mu(seed):
    rng = np.random.default_rng(seed)
    A = TracialAlgebra(((3, 0.5), (2, 2.0)))
    x = A.from_blocks([rng.standard_normal((3, 3)), rng.standard_normal((2, 2))])
    f, g = mu(x, A), mu_positive(x.conj().T @ x, A, power=0.5)
    assert integrate_power(f, 2) == pytest.approx(integrate_power(g, 2), rel=1e-10)
    assert integrate_power(f, 2) == pytest.approx(A.trace(x.conj().T @ x).real, rel=1e-10)
