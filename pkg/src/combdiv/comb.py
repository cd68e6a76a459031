"""Quantum combs: process tensors, control sequences and their contraction.

Step ``k`` of an n-step process comb has input label ``I{k}`` and output
label ``O{k}``; its Choi state is ordered ``I1, O1, I2, O2, ...``.  A control
comb supplies every ``I{k}``, receives every ``O{k}`` except the last, and
keeps whatever it stores in its ancilla labels.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from .channel import ChoiChannel
from .exceptions import BadStepIndex, DimensionMismatch, UnknownLabel
from .operators import (
    TOL_PSD,
    TOL_TRACE,
    LabeledOperator,
    Subsystem,
    _from_tensor,
    _hermitize,
    link,
    maximally_entangled,
    maximally_mixed,
    partial_trace,
    permute,
    pure_state,
    relabel,
    tensor,
    trace_norm,
    trace_out,
)

Tooth = tuple[tuple[str, ...], tuple[str, ...]]

PROCESS = "process"
CONTROL = "control"


def step_labels(k: int) -> tuple[str, str]:
    return f"I{k}", f"O{k}"


def process_teeth(n: int) -> tuple[Tooth, ...]:
    return tuple(((f"I{k}",), (f"O{k}",)) for k in range(1, n + 1))


def _as_labels(x) -> tuple[str, ...]:
    if x is None:
        return ()
    if isinstance(x, str):
        return (x,)
    return tuple(x)


def normalize_teeth(teeth) -> tuple[Tooth, ...]:
    return tuple((_as_labels(i), _as_labels(o)) for i, o in teeth)


@dataclass(frozen=True, eq=False)
class ProcessComb:
    """A comb Choi state with its causal ordering of teeth.

    ``kind`` is ``"process"`` for elements of P_n and ``"control"`` for the
    control sequences that a process maps to a final state.  ``ancilla`` lists
    the labels a control comb keeps after contraction.
    """

    choi: LabeledOperator
    teeth: tuple[Tooth, ...]
    kind: str = PROCESS
    ancilla: tuple[str, ...] = ()

    def __post_init__(self):
        teeth = normalize_teeth(self.teeth)
        covered = [l for i, o in teeth for l in i + o]
        if sorted(covered) != sorted(self.choi.labels):
            raise UnknownLabel(f"teeth {teeth} do not cover {self.choi.labels} exactly once")
        if self.kind not in (PROCESS, CONTROL):
            raise ValueError(f"unknown comb kind {self.kind!r}")
        anc = _as_labels(self.ancilla)
        if any(a not in self.choi.labels for a in anc):
            raise UnknownLabel(f"ancilla {anc} not among {self.choi.labels}")
        object.__setattr__(self, "teeth", teeth)
        object.__setattr__(self, "ancilla", anc)

    @property
    def n_steps(self) -> int:
        return len(self.teeth)

    @property
    def inputs(self) -> tuple[str, ...]:
        return tuple(l for i, _ in self.teeth for l in i)

    @property
    def outputs(self) -> tuple[str, ...]:
        return tuple(l for _, o in self.teeth for l in o)

    def step_dims(self) -> list[tuple[int, int]]:
        c = self.choi
        return [(prod(c.dim_of(l) for l in i), prod(c.dim_of(l) for l in o)) for i, o in self.teeth]


def process_comb(choi: LabeledOperator, n: int | None = None) -> ProcessComb:
    """Wrap a Choi state on canonical labels, reordering factors to I1, O1, ..."""
    n = len(choi.labels) // 2 if n is None else n
    teeth = process_teeth(n)
    order = [l for i, o in teeth for l in i + o]
    return ProcessComb(permute(choi, order), teeth)


def channel_as_comb(ch: ChoiChannel) -> ProcessComb:
    """A channel is a one-step comb; relabel it onto I1 -> O1."""
    if len(ch.inputs) != 1 or len(ch.outputs) != 1:
        raise DimensionMismatch("only single-input, single-output channels map onto one tooth")
    c = relabel(ch.choi, {ch.inputs[0]: "I1", ch.outputs[0]: "O1"})
    return process_comb(c, 1)


def comb_as_channel(t: ProcessComb) -> ChoiChannel:
    if t.n_steps != 1:
        raise BadStepIndex("only one-step combs are channels")
    (i, o), = t.teeth
    return ChoiChannel(t.choi, i, o)


def markov_comb(channels: Sequence[ChoiChannel]) -> ProcessComb:
    """Product comb whose k-th tooth is the k-th channel."""
    parts = []
    for k, ch in enumerate(channels, start=1):
        if len(ch.inputs) != 1 or len(ch.outputs) != 1:
            raise DimensionMismatch("Markov teeth must be single-input, single-output channels")
        a, b = step_labels(k)
        c = relabel(ch.choi, {ch.inputs[0]: a, ch.outputs[0]: b})
        parts.append(permute(c, [a, b]))
    out = parts[0]
    for p in parts[1:]:
        out = tensor(out, p)
    return ProcessComb(out, process_teeth(len(parts)))


# -- contraction ------------------------------------------------------------


def _choi(x) -> LabeledOperator:
    return x.choi if hasattr(x, "choi") else x


def link_product(a, b) -> LabeledOperator:
    """``d_cap tr_cap[a b^{T_cap}]`` over the labels a and b share."""
    return link(_choi(a), _choi(b))


def contract(t: ProcessComb, s: ProcessComb) -> LabeledOperator:
    """The final state T(S) on t's last output and s's ancilla."""
    needed = list(t.inputs) + [l for _, o in t.teeth[:-1] for l in o]
    missing = [l for l in needed if l not in s.choi.labels]
    if missing:
        raise DimensionMismatch(f"control comb does not provide {missing}")
    return link(t.choi, s.choi)


def control_teeth(n: int, ancilla: Sequence[str], consumes_last: bool = False) -> tuple[Tooth, ...]:
    """Tooth ordering of a control comb for an n-step process.

    With ``consumes_last`` the comb also swallows ``O{n}`` in a final tooth,
    which is how a post-processed dual control comb looks.
    """
    teeth: list[Tooth] = [((), ("I1",))]
    for k in range(1, n):
        teeth.append(((f"O{k}",), (f"I{k + 1}",)))
    if consumes_last:
        teeth.append(((f"O{n}",), tuple(ancilla)))
    else:
        i, o = teeth[-1]
        teeth[-1] = (i, o + tuple(ancilla))
    return tuple(teeth)


def _uniform_dims(dims) -> list[tuple[int, int]]:
    return [(d, d) if isinstance(d, (int, np.integer)) else (int(d[0]), int(d[1])) for d in dims]


def contracted_labels(n: int) -> list[str]:
    """Labels of an n-step process that a control comb contracts: I1, O1, ..., In."""
    out = []
    for k in range(1, n + 1):
        out.append(f"I{k}")
        if k < n:
            out.append(f"O{k}")
    return out


def choi_ancilla_label(label: str) -> str:
    return f"R:{label}"


def choi_control_comb(dims) -> ProcessComb:
    """The control comb feeding half of a maximally entangled pair into every
    input and storing every intermediate output, so that T(S) is T's Choi state."""
    if len(dims) == 0:
        raise ValueError("need at least one tooth")
    dims = _uniform_dims(dims)
    n = len(dims)
    cap = contracted_labels(n)
    dim_of = {}
    for k, (di, do) in enumerate(dims, start=1):
        dim_of[f"I{k}"], dim_of[f"O{k}"] = di, do
    pairs = [maximally_entangled(Subsystem(l, dim_of[l]), Subsystem(choi_ancilla_label(l), dim_of[l])) for l in cap]
    out = pairs[0]
    for p in pairs[1:]:
        out = tensor(out, p)
    anc = [choi_ancilla_label(l) for l in cap]
    out = permute(out, cap + anc)
    return ProcessComb(out, control_teeth(n, anc), CONTROL, tuple(anc))


def choi_from_contraction(state: LabeledOperator, n: int) -> LabeledOperator:
    """Undo the ancilla naming of ``contract(t, choi_control_comb(...))``."""
    mapping = {choi_ancilla_label(l): l for l in contracted_labels(n)}
    out = relabel(state, mapping)
    return permute(out, [l for k in range(1, n + 1) for l in step_labels(k)])


def control_comb_vector(state_unitary: np.ndarray, junctions: Sequence[np.ndarray],
                        dims, ancilla_dim: int) -> np.ndarray:
    """Choi vector of a pure Stinespring control comb.

    The comb prepares ``U_0|0>`` on ``I1 x R`` (or takes the state vector
    directly) and at junction k applies the unitary ``V_k: O_k x R -> I_{k+1} x R``.
    Returns an array indexed by ``(I1, O1, ..., In)`` flattened, then ``R``.
    """
    dims = _uniform_dims(dims)
    d_r = ancilla_dim
    s = np.asarray(state_unitary)
    s = (s[:, 0] if s.ndim == 2 else s).reshape(dims[0][0], d_r)
    for k, v in enumerate(junctions):
        d_o, d_next = dims[k][1], dims[k + 1][0]
        if d_o != d_next:
            raise DimensionMismatch(f"junction {k + 1} maps a {d_o}-dim output onto a {d_next}-dim input")
        vt = v.reshape(d_next, d_r, d_o, d_r)  # (i', r'), (o, r)
        s = np.einsum("xr,jsor->xojs", s, vt).reshape(-1, d_r) / np.sqrt(d_o)
    return s


def control_comb_from_vector(s: np.ndarray, dims, ancilla: str = "R") -> ProcessComb:
    dims = _uniform_dims(dims)
    n = len(dims)
    cap = contracted_labels(n)
    dim_of = {}
    for k, (di, do) in enumerate(dims, start=1):
        dim_of[f"I{k}"], dim_of[f"O{k}"] = di, do
    d_r = s.shape[1]
    subs = [Subsystem(l, dim_of[l]) for l in cap] + [Subsystem(ancilla, d_r)]
    return ProcessComb(pure_state(s.reshape(-1), subs), control_teeth(n, [ancilla]), CONTROL, (ancilla,))


def contract_vector(t_choi: np.ndarray, s: np.ndarray, d_last: int) -> np.ndarray:
    """Fast ``contract`` for a pure control comb: state on (O_n, R) from vectors."""
    return _contract_blocks(choi_blocks(t_choi, s.shape[0], d_last), s)


def choi_blocks(t_choi: np.ndarray, big: int, d_last: int) -> np.ndarray:
    """Reorder a process Choi matrix into blocks indexed (o, p, x, y) for :func:`contract_vector`."""
    return np.ascontiguousarray(t_choi.reshape(big, d_last, big, d_last).transpose(1, 3, 0, 2))


def _contract_blocks(blocks: np.ndarray, s: np.ndarray) -> np.ndarray:
    big, d_r = s.shape
    d_last = blocks.shape[-3]
    m = s.T @ blocks @ s.conj()  # (..., o, p, r, r')
    m = np.swapaxes(m, -3, -2)
    return big * m.reshape(m.shape[:-4] + (d_last * d_r, d_last * d_r))


# -- validation -------------------------------------------------------------


@dataclass
class CombReport:
    min_eigenvalue: float
    trace: float
    residuals: list[float]
    psd_ok: bool = field(init=False)
    trace_ok: bool = field(init=False)

    def __post_init__(self):
        self.psd_ok = self.min_eigenvalue >= -TOL_PSD
        self.trace_ok = abs(self.trace - 1) <= TOL_TRACE

    @property
    def causal_ok(self) -> bool:
        return all(r <= TOL_TRACE for r in self.residuals)

    @property
    def passed(self) -> bool:
        return self.psd_ok and self.trace_ok and self.causal_ok

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "psd": self.psd_ok,
            "min_eigenvalue": self.min_eigenvalue,
            "trace": self.trace,
            "causality_residuals": self.residuals,
        }


def validate_comb(x, teeth=None) -> CombReport:
    """Positivity, unit trace and the causality chain.

    Working from the last tooth down: tracing a tooth's outputs must leave the
    earlier marginal times the maximally mixed state on that tooth's inputs.
    ``residuals[k]`` is the trace-norm violation of the condition for tooth k+1.
    """
    if teeth is None:
        x, teeth = x.choi, x.teeth
    teeth = normalize_teeth(teeth)
    lam_min = float(np.linalg.eigvalsh(_hermitize(x.matrix))[0])
    residuals = [0.0] * len(teeth)
    current = x
    for k in range(len(teeth) - 1, -1, -1):
        ins, outs = teeth[k]
        reduced = trace_out(current, outs)
        earlier = trace_out(reduced, ins)
        if ins:
            expected = tensor(earlier, maximally_mixed(*[s for s in reduced.subsystems if s.name in ins]))
            expected = permute(expected, reduced.labels)
            residuals[k] = trace_norm(reduced.matrix - expected.matrix)
        current = earlier
    return CombReport(lam_min, float(np.real(x.trace())), residuals)


# -- structure --------------------------------------------------------------


def marginal_comb(t: ProcessComb) -> ProcessComb:
    """Tensor product of the single-label marginals, same label order."""
    parts = [partial_trace(t.choi, [l]) for l in t.choi.labels]
    out = parts[0]
    for p in parts[1:]:
        out = tensor(out, p)
    return ProcessComb(out, t.teeth, t.kind, t.ancilla)


def step_marginals(t: ProcessComb) -> list[LabeledOperator]:
    return [partial_trace(t.choi, i + o) for i, o in t.teeth]


def coarse_grain(t: ProcessComb, at: int) -> ProcessComb:
    """Feed output ``O{at}`` straight into input ``I{at+1}``, merging the two steps.

    Computed by summing the Choi state over the identified index pair; the
    superprocess route in :mod:`combdiv.superprocess` must agree with this.
    """
    n = t.n_steps
    if not 1 <= at < n:
        raise BadStepIndex(f"junction {at} outside 1..{n - 1}")
    o_lab, i_lab = t.teeth[at - 1][1], t.teeth[at][0]
    if len(o_lab) != 1 or len(i_lab) != 1:
        raise DimensionMismatch("coarse graining needs single-label teeth")
    c = t.choi
    d = c.dim_of(o_lab[0])
    if c.dim_of(i_lab[0]) != d:
        raise DimensionMismatch(f"{o_lab[0]} and {i_lab[0]} differ in dimension")
    k = len(c.labels)
    io, ii = c.labels.index(o_lab[0]), c.labels.index(i_lab[0])
    rows = list(range(k))
    cols = list(range(k, 2 * k))
    rows[ii] = rows[io]
    cols[ii] = cols[io]
    keep = [j for j in range(k) if j not in (io, ii)]
    out = np.einsum(c.tensor(), rows + cols, [rows[j] for j in keep] + [cols[j] for j in keep])
    merged = _from_tensor(d * out, [c.subsystems[j] for j in keep])
    teeth = list(t.teeth[: at - 1]) + [(t.teeth[at - 1][0], t.teeth[at][1])] + list(t.teeth[at + 1:])
    return canonical_comb(merged, teeth)


def canonical_comb(choi: LabeledOperator, teeth) -> ProcessComb:
    """Rename single-label teeth to I1, O1, ... in order and sort the factors."""
    teeth = normalize_teeth(teeth)
    mapping = {}
    for k, (i, o) in enumerate(teeth, start=1):
        if len(i) != 1 or len(o) != 1:
            raise DimensionMismatch("canonical process combs have one label per side")
        mapping[i[0]], mapping[o[0]] = step_labels(k)
    return process_comb(relabel(choi, mapping), len(teeth))
