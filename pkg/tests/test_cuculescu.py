import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncmart.algebra import AlgebraError
from ncmart.cuculescu import cuculescu
from ncmart.martingale import partial_squares, square_mu
from oracles import stopping_projections
from strategies import instances


def test_threshold_above_spectrum_keeps_everything():
    from conftest import dyadic_instance
    inst = dyadic_instance(np.ones(8), np.arange(8.0), 3)
    w = partial_squares(inst.martingale, "s_c")
    run = cuculescu(w, 1.01 * max(np.abs(x).max() for x in w), inst.filtration)
    assert all(np.allclose(q, np.eye(8)) for q in run.projections)


def test_zero_threshold_on_definite_weights():
    from conftest import pinching_instance
    inst = pinching_instance(np.eye(4, dtype=complex), [[[0, 1], [2, 3]], [[0, 1, 2, 3]]])
    w = [np.eye(4) * 2.0, np.eye(4) * 3.0]
    run = cuculescu(w, 0.0, inst.filtration)
    assert np.allclose(run.projections[1], 0) and np.allclose(run.projections[2], 0)


def test_negative_weights_and_threshold_rejected():
    from conftest import pinching_instance
    inst = pinching_instance(np.eye(2, dtype=complex), [[[0], [1]], [[0, 1]]])
    with pytest.raises(AlgebraError):
        cuculescu([-np.eye(2), np.eye(2)], 1.0, inst.filtration)
    with pytest.raises(ValueError):
        cuculescu([np.eye(2), np.eye(2)], -1.0, inst.filtration)


@settings(max_examples=30, deadline=None)
@given(instances(dims=(4, 8, 16), levels=(2, 3, 4, 5)), st.floats(0.05, 1.5),
       st.sampled_from(["s_c", "S_c"]))
def test_certified_properties(inst, frac, kind):
    m = inst.martingale
    w = partial_squares(m, kind)
    lam2 = (frac * square_mu(m, kind).sup) ** 2
    run = cuculescu(w, lam2, inst.filtration, offset=-1 if kind == "s_c" else 0)
    assert all(run.certify().values()), run.violations()


@settings(max_examples=30, deadline=None)
@given(instances(dims=(4, 8, 16), modes=("dyadic",)), st.floats(0.05, 1.5))
def test_commutative_stopping_time(inst, frac):
    m = inst.martingale
    w = partial_squares(m, "s_c")
    lam2 = (frac * square_mu(m, "s_c").sup) ** 2
    run = cuculescu(w, lam2, inst.filtration)
    want = stopping_projections([np.diagonal(a).real for a in w], lam2)
    got = [np.diagonal(q).real for q in run.projections]
    assert np.abs(np.array(got) - np.array(want)).max() <= 1e-12
