"""Superprocesses: maps from process tensors to process tensors.

A superprocess is stored as a network of ordinary channels (its pre/post
processing slots and any memory carried between them).  Applying it is a
chain of link products with the process Choi state; the dual action on
control combs is the same chain started from the control comb instead.
Both directions share one set of wiring labels, so the identity
``[Z(T)](S) = T(Z^dag(S))`` is associativity of the link product.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .channel import (
    ANCILLA,
    NEW_IN,
    NEW_OUT,
    SLOT_IN,
    SLOT_OUT,
    ChoiChannel,
    Superchannel,
    identity_channel,
    identity_superchannel,
    validate_choi_channel,
)
from .comb import (
    CONTROL,
    ProcessComb,
    Tooth,
    canonical_comb,
    contract,
    control_teeth,
    normalize_teeth,
    process_teeth,
    step_labels,
)
from .exceptions import BadStepIndex, DimensionMismatch, DuplicateLabel, NotTracePreserving
from .operators import LabeledOperator, Subsystem, link, relabel

MEM_IN, MEM_OUT = "~min", "~mout"
DUAL_OUTPUT = "O*"


@dataclass(frozen=True, eq=False)
class Superprocess:
    """Factored superprocess.

    ``channels`` are the slot channels in causal order.  ``in_teeth`` are the
    canonical teeth of the comb it consumes and ``out_teeth`` name, in network
    labels, the teeth of the comb it produces.
    """

    channels: tuple[ChoiChannel, ...]
    in_teeth: tuple[Tooth, ...]
    out_teeth: tuple[Tooth, ...]
    is_iqi: bool = False
    is_coarse_graining: bool = False

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "in_teeth", normalize_teeth(self.in_teeth))
        object.__setattr__(self, "out_teeth", normalize_teeth(self.out_teeth))
        for ch in self.channels:
            rep = validate_choi_channel(ch.choi, ch.inputs)
            if not rep.passed:
                raise NotTracePreserving(f"slot channel violates the trace condition: {rep.as_dict()}")
        if self.is_iqi and any(l.startswith("~m") for l in self.network_labels):
            raise DimensionMismatch("an IQI superprocess cannot thread memory between teeth")

    @property
    def arity(self) -> tuple[int, int]:
        return len(self.in_teeth), len(self.out_teeth)

    @property
    def network_labels(self) -> set[str]:
        labels = {l for ch in self.channels for l in ch.choi.labels}
        labels |= {l for i, o in self.in_teeth + self.out_teeth for l in i + o}
        return labels


def apply_superprocess(z: Superprocess, t: ProcessComb) -> ProcessComb:
    n_in, _ = z.arity
    if t.n_steps != n_in:
        raise DimensionMismatch(f"superprocess expects {n_in} steps, comb has {t.n_steps}")
    x = t.choi
    for ch in z.channels:
        x = link(x, ch.choi)
    return canonical_comb(x, z.out_teeth)


def _to_network(z: Superprocess) -> dict[str, str]:
    mapping = {}
    for k, (i, o) in enumerate(z.out_teeth, start=1):
        a, b = step_labels(k)
        mapping[a], mapping[b] = i[0], o[0]
    return mapping


def dual_superprocess(z: Superprocess, s: ProcessComb) -> ProcessComb:
    """Z^dag(S): a control comb for the n-step input side.

    When Z post-processes the last output, the dual swallows ``O{n}`` as well
    and emits the produced final output under :data:`DUAL_OUTPUT`.
    """
    n_in, n_out = z.arity
    mapping = {k: v for k, v in _to_network(z).items() if k in s.choi.labels}
    needed = [l for k in range(1, n_out + 1) for l in step_labels(k)][:-1]
    if any(l not in s.choi.labels for l in needed):
        raise DimensionMismatch(f"control comb does not fit a {n_out}-step process")
    clash = [a for a in s.ancilla if a in z.network_labels or a == DUAL_OUTPUT]
    if clash:
        raise DuplicateLabel(f"control ancilla {clash} collides with superprocess wiring")
    y = relabel(s.choi, mapping)
    for ch in reversed(z.channels):
        y = link(y, ch.choi)
    final_out = z.out_teeth[-1][1][0]
    in_labels = {l for i, o in z.in_teeth for l in i + o}
    if final_out in y.labels and final_out not in in_labels:
        y = relabel(y, {final_out: DUAL_OUTPUT})
    last_out = z.in_teeth[-1][1][0]
    ancilla = [l for l in y.labels if l not in in_labels]
    return ProcessComb(y, control_teeth(n_in, ancilla, consumes_last=last_out in y.labels), CONTROL, tuple(ancilla))


def dual_contract(z: Superprocess, t: ProcessComb, s: ProcessComb) -> LabeledOperator:
    """T(Z^dag(S)) with labels matching ``contract(Z(T), S)``."""
    out = contract(t, dual_superprocess(z, s))
    n_out = z.arity[1]
    mapping = {}
    if DUAL_OUTPUT in out.labels:
        mapping[DUAL_OUTPUT] = f"O{n_out}"
    else:
        mapping[z.out_teeth[-1][1][0]] = f"O{n_out}"
    mapping = {k: v for k, v in mapping.items() if k != v}
    return relabel(out, mapping) if mapping else out


# -- builders ---------------------------------------------------------------


def _new_labels(k: int) -> tuple[str, str]:
    return f"I{k}'", f"O{k}'"


def iqi_superprocess(superchannels: Sequence[Superchannel]) -> Superprocess:
    """Independent superchannels on each tooth; no memory between teeth."""
    channels, out_teeth = [], []
    for k, sc in enumerate(superchannels, start=1):
        a, b = step_labels(k)
        x, y = _new_labels(k)
        e = f"~e{k}"
        channels.append(sc.pre.relabel({NEW_IN: x, SLOT_IN: a, ANCILLA: e}))
        channels.append(sc.post.relabel({SLOT_OUT: b, ANCILLA: e, NEW_OUT: y}))
        out_teeth.append(((x,), (y,)))
    n = len(superchannels)
    return Superprocess(tuple(channels), process_teeth(n), tuple(out_teeth), is_iqi=True)


def identity_superprocess(dims) -> Superprocess:
    if isinstance(dims, int):
        dims = [2] * dims
    return iqi_superprocess([identity_superchannel(d, d) for d in dims])


def threaded_superprocess(pres: Sequence[ChoiChannel], posts: Sequence[ChoiChannel]) -> Superprocess:
    """Per-tooth slots with a memory passed from each post-processing to the next pre-processing.

    ``pres[k]`` maps ``~x (x ~min) -> ~a (x ~e)``; ``posts[k]`` maps
    ``~b (x ~e) -> ~y (x ~mout)``.  The first pre has no memory input and the
    last post no memory output.
    """
    if len(pres) != len(posts):
        raise DimensionMismatch("one pre and one post channel per tooth")
    n = len(pres)
    channels, out_teeth = [], []
    threaded = False
    for k, (pre, post) in enumerate(zip(pres, posts), start=1):
        a, b = step_labels(k)
        x, y = _new_labels(k)
        e = f"~e{k}"
        if (MEM_IN in pre.choi.labels) != (k > 1) or (MEM_OUT in post.choi.labels) != (k < n):
            raise DimensionMismatch(f"memory wiring at tooth {k} is inconsistent")
        threaded |= MEM_OUT in post.choi.labels
        channels.append(pre.relabel({NEW_IN: x, SLOT_IN: a, ANCILLA: e, MEM_IN: f"~m{k - 1}"}))
        channels.append(post.relabel({SLOT_OUT: b, ANCILLA: e, NEW_OUT: y, MEM_OUT: f"~m{k}"}))
        out_teeth.append(((x,), (y,)))
    return Superprocess(tuple(channels), process_teeth(n), tuple(out_teeth), is_iqi=not threaded)


def coarse_graining_superprocess(n: int, at: int, d: int = 2) -> Superprocess:
    """Insert an identity channel between ``O{at}`` and ``I{at+1}``."""
    if not 1 <= at < n:
        raise BadStepIndex(f"junction {at} outside 1..{n - 1}")
    o, i = f"O{at}", f"I{at + 1}"
    wire = identity_channel(Subsystem(o, d), Subsystem(i, d))
    teeth = process_teeth(n)
    out = list(teeth[: at - 1]) + [(teeth[at - 1][0], teeth[at][1])] + list(teeth[at + 1:])
    return Superprocess((wire,), teeth, tuple(out), is_coarse_graining=True)
