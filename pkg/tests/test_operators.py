import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from combdiv.counterexamples import example1_m
from combdiv.exceptions import (
    BadPermutation,
    DimensionMismatch,
    DuplicateLabel,
    NotDensityOperator,
    NotHermitian,
    UnknownLabel,
)
from combdiv.operators import (
    basis_projector,
    eigh,
    identity,
    link,
    maximally_entangled,
    maximally_mixed,
    operator,
    partial_trace,
    partial_transpose,
    permute,
    pure_state,
    relabel,
    swap_operator,
    tensor,
    von_neumann_entropy,
)
from combdiv.sampling import random_density_matrix, random_state


def _random_operator(rng, subs):
    d = int(np.prod([s[1] for s in subs]))
    return operator(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)), subs)


def test_operator_rejects_bad_shapes():
    with pytest.raises(DimensionMismatch):
        operator(np.eye(3), [("A", 2)])
    with pytest.raises(DuplicateLabel):
        operator(np.eye(4), [("A", 2), ("A", 2)])


def test_tensor_of_mixed_states_is_mixed():
    a, b = maximally_mixed(("A", 2)), maximally_mixed(("B", 3))
    np.testing.assert_allclose(tensor(a, b).matrix, np.eye(6) / 6)


def test_tensor_rejects_shared_labels():
    with pytest.raises(DuplicateLabel):
        tensor(maximally_mixed(("A", 2)), maximally_mixed(("A", 2)))


def test_tensor_is_kron_in_label_order(rng):
    a, b = _random_operator(rng, [("A", 2)]), _random_operator(rng, [("B", 3)])
    x = tensor(a, b)
    assert x.labels == ("A", "B")
    np.testing.assert_allclose(x.matrix, np.kron(a.matrix, b.matrix))


def test_partial_trace_of_bell_state():
    phi = maximally_entangled(("A", 2), ("B", 2))
    np.testing.assert_allclose(partial_trace(phi, ["A"]).matrix, np.eye(2) / 2, atol=1e-12)


def test_partial_trace_of_product(rng):
    a, b = random_state(rng, [("A", 2)]), random_state(rng, [("B", 3)])
    np.testing.assert_allclose(partial_trace(tensor(a, b), ["A"]).matrix, a.matrix, atol=1e-12)
    np.testing.assert_allclose(partial_trace(tensor(a, b), ["B"]).matrix, b.matrix, atol=1e-12)


def test_partial_trace_unknown_label():
    with pytest.raises(UnknownLabel):
        partial_trace(maximally_mixed(("A", 2)), ["Z"])


def test_partial_transpose_involution(rng):
    x = _random_operator(rng, [("A", 2), ("B", 3)])
    y = partial_transpose(partial_transpose(x, ["B"]), ["B"])
    np.testing.assert_allclose(y.matrix, x.matrix)


def test_partial_transpose_of_phi_is_swap_over_d():
    phi = maximally_entangled(("A", 2), ("B", 2))
    swap = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            swap[2 * i + j, 2 * j + i] = 1
    np.testing.assert_allclose(partial_transpose(phi, ["B"]).matrix, swap / 2, atol=1e-12)
    np.testing.assert_allclose(swap_operator(("A", 2), ("B", 2)).matrix, swap)


def test_full_partial_transpose_is_transpose(rng):
    x = _random_operator(rng, [("A", 2), ("B", 2)])
    np.testing.assert_allclose(partial_transpose(x, ["A", "B"]).matrix, x.matrix.T)


def test_partial_transpose_commutes_with_disjoint_trace(rng):
    x = _random_operator(rng, [("A", 2), ("B", 2), ("C", 2)])
    lhs = partial_trace(partial_transpose(x, ["A"]), ["A", "B"])
    rhs = partial_transpose(partial_trace(x, ["A", "B"]), ["A"])
    np.testing.assert_allclose(lhs.matrix, rhs.matrix, atol=1e-12)


def test_permute_round_trip(rng):
    x = _random_operator(rng, [("A", 2), ("B", 3), ("C", 2)])
    y = permute(permute(x, ["C", "A", "B"]), ["A", "B", "C"])
    np.testing.assert_allclose(y.matrix, x.matrix)


def test_permute_keeps_spectrum(rng):
    x = random_state(rng, [("A", 2), ("B", 3)])
    y = permute(x, ["B", "A"])
    np.testing.assert_allclose(np.linalg.eigvalsh(x.matrix), np.linalg.eigvalsh(y.matrix), atol=1e-12)


def test_permute_product_state():
    x = tensor(maximally_mixed(("A", 2)), basis_projector(("B", 2), 0))
    y = permute(x, ["B", "A"])
    np.testing.assert_allclose(y.matrix, np.kron(np.diag([1, 0]), np.eye(2) / 2))


def test_permute_rejects_non_permutation():
    x = maximally_mixed(("A", 2), ("B", 2))
    with pytest.raises(BadPermutation):
        permute(x, ["A", "A"])


def test_relabel():
    x = relabel(maximally_mixed(("A", 2)), {"A": "B"})
    assert x.labels == ("B",)


def test_link_over_nothing_is_tensor(rng):
    a, b = random_state(rng, [("A", 2)]), random_state(rng, [("B", 2)])
    np.testing.assert_allclose(link(a, b).matrix, tensor(a, b).matrix, atol=1e-12)


def test_eigh_example1_spectrum():
    lam, _ = eigh(example1_m().choi)
    np.testing.assert_allclose(np.sort(lam), [0, 0.25, 0.25, 0.5], atol=1e-9)


def test_eigh_identity():
    lam, _ = eigh(identity(("A", 3)))
    np.testing.assert_allclose(lam, np.ones(3))


def test_eigh_reconstruction(rng):
    for side in (2, 8, 64):
        m = rng.normal(size=(side, side)) + 1j * rng.normal(size=(side, side))
        x = operator(m + m.conj().T, [("A", side)])
        lam, v = eigh(x)
        assert np.max(np.abs(v @ np.diag(lam) @ v.conj().T - x.matrix)) <= 1e-8


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        eigh(operator(np.array([[0, 1], [0, 0]]), [("A", 2)]))


def test_entropies():
    assert von_neumann_entropy(example1_m().choi) == pytest.approx(1.5, abs=1e-9)
    assert von_neumann_entropy(pure_state(np.array([1, 1j]) / np.sqrt(2), [("A", 2)])) == pytest.approx(0, abs=1e-12)
    assert von_neumann_entropy(maximally_mixed(("A", 2), ("D", 2))) == pytest.approx(2.0, abs=1e-12)


def test_entropy_rejects_non_state():
    with pytest.raises(NotDensityOperator):
        von_neumann_entropy(identity(("A", 2)))


@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_cq_state_entropy(seed, k):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(k))
    rhos = [random_density_matrix(rng, 2) for _ in range(k)]
    m = sum(np.kron(np.diag(np.eye(k)[i]) * p[i], rhos[i]) for i in range(k))
    h = von_neumann_entropy(operator(m, [("X", k), ("A", 2)]))
    h_rho = [von_neumann_entropy(operator(r, [("A", 2)])) for r in rhos]
    expected = -np.sum(p[p > 0] * np.log2(p[p > 0])) + float(np.dot(p, h_rho))
    assert h == pytest.approx(expected, abs=1e-8)
