"""State, Choi and classical divergences plus the correlation quantifiers built on them.

All logarithms are base 2.  Relative entropies that are infinite because of a
support violation come back as ``math.inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .channel import ChoiChannel, apply_choi
from .comb import ProcessComb, contract, marginal_comb, step_marginals
from .exceptions import DimensionMismatch, NotADistribution, NotDensityOperator, ShapeMismatch
from .operators import (
    TOL_PSD,
    TOL_SUPPORT,
    TOL_TRACE,
    LabeledOperator,
    _entropy_from_eigenvalues,
    _hermitize,
    is_density_operator,
    is_hermitian,
    maximally_mixed,
    partial_trace,
    permute,
    tensor,
    von_neumann_entropy,
)


class Measure(str, Enum):
    RELATIVE_ENTROPY = "re"
    TRACE_DISTANCE = "td"


class ClassicalMeasure(str, Enum):
    KULLBACK_LEIBLER = "kl"
    TRACE_DISTANCE = "td"


def _relative_entropy_matrix(r: np.ndarray, s: np.ndarray) -> float:
    lr, vr = np.linalg.eigh(_hermitize(r))
    ls, vs = np.linalg.eigh(_hermitize(s))
    pos = lr > TOL_SUPPORT
    lr, vr = lr[pos], vr[:, pos]
    overlap = np.abs(vr.conj().T @ vs) ** 2
    in_supp = ls > TOL_SUPPORT
    leak = float(lr @ overlap[:, ~in_supp].sum(axis=1)) if (~in_supp).any() else 0.0
    if leak > TOL_TRACE:
        return math.inf
    cross = lr @ overlap[:, in_supp] @ np.log2(ls[in_supp])
    return float(lr @ np.log2(lr) - cross)


def _trace_distance_matrix(r: np.ndarray, s: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(_hermitize(r - s)))))


def divergence_matrix(measure, r: np.ndarray, s: np.ndarray) -> float:
    """Divergence of two density matrices in the same basis; no validation."""
    if Measure(measure) is Measure.RELATIVE_ENTROPY:
        return _relative_entropy_matrix(r, s)
    return _trace_distance_matrix(r, s)


def _aligned(rho: LabeledOperator, sigma: LabeledOperator) -> tuple[np.ndarray, np.ndarray]:
    if sorted(rho.labels) != sorted(sigma.labels):
        raise ShapeMismatch(f"{rho.labels} vs {sigma.labels}")
    sigma = permute(sigma, rho.labels)
    if rho.dims != sigma.dims:
        raise ShapeMismatch(f"dims {rho.dims} vs {sigma.dims}")
    for x in (rho, sigma):
        if not is_density_operator(x):
            raise NotDensityOperator(f"{x!r} is not a density operator")
    return rho.matrix, sigma.matrix


def relative_entropy(rho: LabeledOperator, sigma: LabeledOperator) -> float:
    """S(rho||sigma) in bits, ``inf`` when rho is not supported inside sigma."""
    return _relative_entropy_matrix(*_aligned(rho, sigma))


def trace_distance(rho: LabeledOperator, sigma: LabeledOperator) -> float:
    """``||rho - sigma||_1`` (no factor 1/2)."""
    return _trace_distance_matrix(*_aligned(rho, sigma))


def state_divergence(measure, rho: LabeledOperator, sigma: LabeledOperator) -> float:
    return divergence_matrix(measure, *_aligned(rho, sigma))


def choi_divergence(measure, x, y) -> float:
    """The chosen state divergence applied to two Choi states."""
    if type(x) is not type(y):
        raise ShapeMismatch("compare channels with channels and combs with combs")
    if isinstance(x, ProcessComb) and [t for t in x.teeth] != [t for t in y.teeth]:
        raise ShapeMismatch(f"teeth {x.teeth} vs {y.teeth}")
    return state_divergence(measure, x.choi, y.choi)


def mutual_information(rho: LabeledOperator, part_a: Sequence[str], part_b: Sequence[str] | None = None) -> float:
    part_b = [l for l in rho.labels if l not in part_a] if part_b is None else list(part_b)
    joint = partial_trace(rho, list(part_a) + part_b)
    return (von_neumann_entropy(partial_trace(rho, part_a)) + von_neumann_entropy(partial_trace(rho, part_b))
            - von_neumann_entropy(joint))


def input_output_correlation(ch: ChoiChannel, method: str = "mutual_information") -> float:
    """M(ch): the mutual information between the Choi input and output.

    ``method="choi_divergence"`` computes the same number as the relative
    entropy against the fixed-output channel emitting ch(I/d).
    """
    if method == "mutual_information":
        return mutual_information(ch.choi, ch.inputs, ch.outputs)
    if method != "choi_divergence":
        raise ValueError(f"unknown method {method!r}")
    ins = [s for s in ch.choi.subsystems if s.name in ch.inputs]
    avg_out = apply_choi(ch, maximally_mixed(*ins))
    reference = tensor(maximally_mixed(*ins), avg_out)
    return relative_entropy(ch.choi, reference)


def total_correlations(t: ProcessComb) -> float:
    """Relative entropy between the comb and the product of its single-label marginals."""
    return relative_entropy(t.choi, marginal_comb(t).choi)


def non_markovianity(t: ProcessComb) -> float:
    """Relative entropy to the closest product-across-steps Choi state.

    The minimizer over product states is the product of the step marginals,
    so the value is sum_k H(step k) - H(whole).
    """
    whole = von_neumann_entropy(t.choi)
    return sum(von_neumann_entropy(m) for m in step_marginals(t)) - whole


# -- classical --------------------------------------------------------------


def check_distribution(p, tol: float = TOL_TRACE) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise NotADistribution(f"expected a flat probability vector, got shape {p.shape}")
    if np.any(p < -tol) or abs(p.sum() - 1) > tol:
        raise NotADistribution(f"{p} is not a probability distribution")
    return np.clip(p, 0, None)


def _kl(p: np.ndarray, q: np.ndarray) -> float:
    on = p > TOL_SUPPORT
    if np.any(q[on] <= TOL_SUPPORT):
        return math.inf
    return float(np.sum(p[on] * np.log2(p[on] / q[on])))


def classical_divergence_unchecked(measure_c, p: np.ndarray, q: np.ndarray) -> float:
    if ClassicalMeasure(measure_c) is ClassicalMeasure.KULLBACK_LEIBLER:
        return _kl(p, q)
    return float(np.sum(np.abs(p - q)))


def classical_divergence(measure_c, p, q) -> float:
    """KL divergence in bits or ``sum |p_i - q_i|``."""
    p, q = check_distribution(p), check_distribution(q)
    if p.shape != q.shape:
        raise ShapeMismatch(f"{p.shape} vs {q.shape}")
    return classical_divergence_unchecked(measure_c, p, q)


def matching_classical(measure) -> ClassicalMeasure:
    """The classical counterpart of a quantum measure."""
    return {Measure.RELATIVE_ENTROPY: ClassicalMeasure.KULLBACK_LEIBLER,
            Measure.TRACE_DISTANCE: ClassicalMeasure.TRACE_DISTANCE}[Measure(measure)]


# -- testers ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Tester:
    """A control comb followed by a POVM on the final (output x ancilla) state."""

    control: ProcessComb
    povm: tuple[LabeledOperator, ...]

    def __post_init__(self):
        effects = tuple(self.povm)
        if not effects:
            raise NotADistribution("a POVM needs at least one effect")
        labels = effects[0].labels
        total = np.zeros_like(effects[0].matrix)
        for e in effects:
            if not is_hermitian(e):
                raise NotADistribution("POVM effects must be Hermitian")
            if np.linalg.eigvalsh(_hermitize(e.matrix))[0] < -TOL_PSD:
                raise NotADistribution("POVM effects must be positive")
            total = total + permute(e, labels).matrix
        if np.max(np.abs(total - np.eye(total.shape[0]))) > TOL_TRACE:
            raise NotADistribution("POVM effects do not sum to the identity")
        object.__setattr__(self, "povm", effects)


def apply_tester(p: Tester, t: ProcessComb) -> np.ndarray:
    """Outcome distribution ``tr[P_x T(S)]``."""
    final = contract(t, p.control)
    labels = p.povm[0].labels
    if sorted(labels) != sorted(final.labels):
        raise DimensionMismatch(f"POVM on {labels}, final state on {final.labels}")
    rho = permute(final, labels).matrix
    probs = np.array([np.real(np.trace(e.matrix @ rho)) for e in p.povm])
    return check_distribution(probs, tol=1e-8)


def entropy_of(x: LabeledOperator) -> float:
    return _entropy_from_eigenvalues(np.linalg.eigvalsh(_hermitize(x.matrix)))
