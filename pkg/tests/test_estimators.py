import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from combdiv.comb import validate_comb
from combdiv.counterexamples import example1_m, example1_n, example2_comb, example2_marginal
from combdiv.divergence import Tester as CombTester
from combdiv.estimators import ClassicalCombDivergence, GeneralizedChannelDivergence, GeneralizedCombDivergence
from combdiv.exceptions import NotACombChoi
from combdiv.operators import maximally_mixed


def test_params_round_trip():
    est = GeneralizedCombDivergence(measure="td", restarts=3, seed=5)
    params = est.get_params()
    assert params["measure"] == "td" and params["restarts"] == 3 and params["seed"] == 5
    other = clone(est).set_params(restarts=4)
    assert other.restarts == 4 and est.restarts == 3
    assert "outcomes" in ClassicalCombDivergence().get_params()


def test_not_fitted():
    with pytest.raises(NotFittedError):
        GeneralizedCombDivergence().score()


def test_fit_comb():
    est = GeneralizedCombDivergence(restarts=2, max_iters=5).fit(example2_comb(), example2_marginal())
    assert est.value_ >= 1.0 - 1e-9
    assert est.score() == est.value_
    assert est.choi_value_ == pytest.approx(1.0, abs=1e-9)
    assert validate_comb(est.argmax_).passed
    assert len(est.trace_) == 2


def test_fit_channel():
    est = GeneralizedChannelDivergence(restarts=2, max_iters=5).fit(example1_m(), example1_n())
    assert est.value_ >= 0.5 - 1e-9


def test_fit_classical():
    est = ClassicalCombDivergence(restarts=2, max_iters=5, outcomes=2).fit(example2_comb(), example2_marginal())
    assert isinstance(est.argmax_, CombTester)
    assert len(est.argmax_.povm) == 2


def test_bad_inputs():
    with pytest.raises(ValueError):
        GeneralizedCombDivergence(measure="kl").fit(example2_comb(), example2_marginal())
    with pytest.raises(TypeError):
        GeneralizedCombDivergence().fit(maximally_mixed(("A", 2)), example2_comb())
    with pytest.raises(NotACombChoi):
        GeneralizedCombDivergence().fit(example2_comb(), example2_marginal().__class__(
            example2_comb().choi, example2_comb().teeth, "control", ()))
