import math

import numpy as np
import pytest

from combdiv.channel import replacement_channel
from combdiv.comb import (
    channel_as_comb,
    choi_control_comb,
    contract,
    validate_comb,
)
from combdiv.counterexamples import (
    coarse_graining,
    example1_m,
    example1_n,
    example2_comb,
    example2_marginal,
    example3_superprocess,
)
from combdiv.divergence import choi_divergence, relative_entropy, trace_distance
from combdiv.exceptions import NotACombChoi, ShapeMismatch
from combdiv.operators import basis_projector, is_density_operator, link, permute
from combdiv.optimizer import (
    OptimizerConfig,
    check_monotonicity,
    classical_comb_divergence,
    generalized_channel_divergence,
    generalized_comb_divergence,
    literal_steering_complement,
    sandwich_factor,
    steering_channel,
)
from combdiv.sampling import random_control_comb, random_process_comb, random_state
from combdiv.superprocess import identity_superprocess

QUICK = OptimizerConfig(restarts=2, max_iters=8)


def _x0_block(x):
    """<0|_X x |0>_X of an operator whose labels include X."""
    rest = [l for l in x.labels if l != "X"]
    m = permute(x, ["X"] + rest).matrix
    half = m.shape[0] // 2
    return m[:half, :half], rest


def test_self_divergence_is_zero(rng):
    t = random_process_comb(rng, 2)
    for measure in ("re", "td"):
        assert generalized_comb_divergence(measure, t, t, QUICK).value == pytest.approx(0.0, abs=1e-9)
    m = example1_m()
    assert generalized_channel_divergence("re", m, m, QUICK).value == pytest.approx(0.0, abs=1e-9)


def test_channel_divergence_choi_floor():
    res = generalized_channel_divergence("re", example1_m(), example1_n(), QUICK)
    assert res.choi_value == pytest.approx(0.5, abs=1e-9)
    assert res.value >= 0.5 - 1e-9
    assert "A" in res.argmax.labels
    assert is_density_operator(res.argmax)
    assert np.linalg.matrix_rank(res.argmax.matrix, tol=1e-8) == 1


def test_comb_divergence_choi_floor(rng):
    t, v = example2_comb(), example2_marginal()
    res = generalized_comb_divergence("re", t, v, QUICK)
    assert res.value >= 1.0 - 1e-9
    for _ in range(3):
        t, v = random_process_comb(rng, 2), random_process_comb(rng, 2)
        for measure in ("re", "td"):
            res = generalized_comb_divergence(measure, t, v, QUICK)
            assert res.value >= choi_divergence(measure, t, v) - 1e-9


def test_trace_is_non_decreasing(rng):
    t, v = random_process_comb(rng, 2), random_process_comb(rng, 2)
    res = generalized_comb_divergence("re", t, v, OptimizerConfig(restarts=3, max_iters=10))
    for tr in res.trace:
        assert all(b >= a for a, b in zip(tr, tr[1:]))
    assert res.value == max(res.restart_values)


def test_argmax_is_a_valid_control_comb(rng):
    t, v = random_process_comb(rng, 2), random_process_comb(rng, 2)
    res = generalized_comb_divergence("td", t, v, QUICK)
    assert validate_comb(res.argmax).passed
    reached = trace_distance(contract(t, res.argmax), contract(v, res.argmax))
    assert reached == pytest.approx(res.value, abs=1e-9)


def test_determinism(rng):
    t, v = random_process_comb(rng, 2), random_process_comb(rng, 2)
    cfg = OptimizerConfig(restarts=3, max_iters=6, seed=11)
    a = generalized_comb_divergence("re", t, v, cfg)
    b = generalized_comb_divergence("re", t, v, cfg)
    c = generalized_comb_divergence("re", t, v, OptimizerConfig(restarts=3, max_iters=6, seed=11, n_jobs=2))
    assert a.value == b.value == c.value
    assert a.trace == b.trace == c.trace


def test_choi_seed_embedding_with_large_ancilla(rng):
    t, v = random_process_comb(rng, 2), random_process_comb(rng, 2)
    res = generalized_comb_divergence("re", t, v, OptimizerConfig(restarts=1, max_iters=4, ancilla_dim=8))
    assert res.ancilla_dim == 8
    # restart 0 starts at the Choi comb itself, so its first trace entry is the Choi value
    assert res.trace[0][0] == pytest.approx(res.choi_value, abs=1e-9)
    assert validate_comb(res.argmax).passed


def test_config_validation(rng):
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(step_tolerance=0)
    t = random_process_comb(rng, 2)
    with pytest.raises(ValueError):
        generalized_comb_divergence("re", t, t, OptimizerConfig(restarts=1, ancilla_dim=1))


def test_mismatched_pair(rng):
    with pytest.raises(ShapeMismatch):
        generalized_comb_divergence("re", random_process_comb(rng, 1), random_process_comb(rng, 2), QUICK)


def test_infinite_divergence_reported():
    one = channel_as_comb(replacement_channel(("A", 2), basis_projector(("B", 2), 1)))
    zero = channel_as_comb(replacement_channel(("A", 2), basis_projector(("B", 2), 0)))
    res = generalized_comb_divergence("re", one, zero, QUICK)
    assert res.value == math.inf and not res.finite
    assert res.as_dict()["value"] == "inf"


def test_classical_orthogonal_outputs():
    one = channel_as_comb(replacement_channel(("A", 2), basis_projector(("B", 2), 1)))
    zero = channel_as_comb(replacement_channel(("A", 2), basis_projector(("B", 2), 0)))
    res = classical_comb_divergence("td", zero, one, QUICK)
    assert res.value == pytest.approx(2.0, abs=1e-9)
    assert classical_comb_divergence("td", one, one, QUICK).value == pytest.approx(0.0, abs=1e-12)


def test_classical_below_quantum_trace_distance():
    t, v = example2_comb(), example2_marginal()
    cfg = OptimizerConfig(restarts=3, max_iters=15)
    classical = classical_comb_divergence("td", t, v, cfg)
    quantum = generalized_comb_divergence("td", t, v, cfg)
    assert classical.value <= quantum.value + 1e-6
    # a measurement never separates better than the states it measures
    s = classical.argmax.control
    assert classical.value <= trace_distance(contract(t, s), contract(v, s)) + 1e-9


def test_classical_kl_runs(rng):
    t, v = random_process_comb(rng, 2), random_process_comb(rng, 2)
    res = classical_comb_divergence("kl", t, v, QUICK)
    assert res.value >= 0
    assert len(res.argmax.povm) == 4


def test_steering_recovers_choi_state(rng):
    t = random_process_comb(rng, 1)
    s = choi_control_comb([2])
    z = steering_channel(s)
    block, rest = _x0_block(link(t.choi, z.choi))
    expected = permute(contract(t, s), rest).matrix / 2
    assert np.allclose(block, expected, atol=1e-12)


def test_steering_channel_is_valid(rng):
    for n in (1, 2):
        s = random_control_comb(rng, n, ancilla_dim=2, discarded_dim=2)
        z = steering_channel(s)
        assert z.choi.dim_of("X") == 2
        assert is_density_operator(z.choi)


def test_literal_complement_is_not_positive():
    assert literal_steering_complement(choi_control_comb([2, 2])) < -1e-3


def test_steering_rejects_invalid_comb(rng):
    s = random_control_comb(rng, 2)
    # a generic state on the same labels signals backwards in time
    bad = type(s)(random_state(rng, s.choi.subsystems), s.teeth, s.kind, s.ancilla)
    with pytest.raises(NotACombChoi):
        steering_channel(bad)


def test_steering_chain(rng):
    for _ in range(20):
        t, v = random_process_comb(rng, 2), random_process_comb(rng, 2)
        s = random_control_comb(rng, 2, ancilla_dim=4)
        k = sandwich_factor(t)
        lhs = relative_entropy(contract(t, s), contract(v, s)) / k
        assert lhs <= choi_divergence("re", t, v) + 1e-9


def test_monotonicity_identity():
    t, v = example2_comb(), example2_marginal()
    rep = check_monotonicity(identity_superprocess(2), t, v, "re", QUICK)
    assert rep.lhs_bound == pytest.approx(rep.rhs_bound, abs=1e-6)
    assert rep.max_duality_residual <= 1e-8


def test_monotonicity_example3():
    t, v = example2_comb(), example2_marginal()
    rep = check_monotonicity(example3_superprocess(), t, v, "re", QUICK)
    assert rep.monotone
    assert rep.n_probes > 0


def test_monotonicity_coarse_graining_random_pairs(rng):
    for _ in range(20):
        t, v = random_process_comb(rng, 2), random_process_comb(rng, 2)
        rep = check_monotonicity(coarse_graining(), t, v, "td", OptimizerConfig(restarts=1, max_iters=4))
        assert rep.lhs_bound <= rep.rhs_bound + 1e-9
