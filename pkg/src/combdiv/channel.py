"""Quantum channels as Kraus sets or normalized Choi states, and superchannels.

The Choi state of ``M: A -> B`` is ``(I_A x M)(Phi_AA)`` with trace one; the
input copy carries the input label.  The channel acts through
``M(rho) = d tr_A[rho Upsilon^{T_A}]``, which is exactly the link product of the
Choi state with ``rho``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from .exceptions import DimensionMismatch, DuplicateLabel, NotTracePreserving, UnknownLabel
from .operators import (
    TOL_PSD,
    TOL_TRACE,
    LabeledOperator,
    Subsystem,
    _hermitize,
    _sub,
    link,
    maximally_entangled,
    maximally_mixed,
    partial_trace,
    permute,
    relabel,
    tensor,
    trace_norm,
)


def _subs(x) -> tuple[Subsystem, ...]:
    if isinstance(x, Subsystem):
        return (x,)
    if isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], str):
        return (Subsystem(*x),)
    return tuple(_sub(s) for s in x)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    inputs: tuple[Subsystem, ...]
    outputs: tuple[Subsystem, ...]
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ins, outs = _subs(self.inputs), _subs(self.outputs)
        d_in, d_out = prod(s.dim for s in ins), prod(s.dim for s in outs)
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        for k in ks:
            if k.shape != (d_out, d_in):
                raise DimensionMismatch(f"Kraus operator shape {k.shape}, expected {(d_out, d_in)}")
        completeness = sum(k.conj().T @ k for k in ks)
        if np.max(np.abs(completeness - np.eye(d_in))) > TOL_TRACE:
            raise NotTracePreserving("sum_k K^dag K differs from the identity")
        object.__setattr__(self, "inputs", ins)
        object.__setattr__(self, "outputs", outs)
        object.__setattr__(self, "kraus", ks)

    @property
    def d_in(self) -> int:
        return prod(s.dim for s in self.inputs)

    @property
    def d_out(self) -> int:
        return prod(s.dim for s in self.outputs)


@dataclass(frozen=True, eq=False)
class ChoiChannel:
    """A normalized Choi state together with which labels are inputs and outputs."""

    choi: LabeledOperator
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    def __post_init__(self):
        ins, outs = tuple(self.inputs), tuple(self.outputs)
        if sorted(ins + outs) != sorted(self.choi.labels):
            raise UnknownLabel(f"inputs {ins} and outputs {outs} must partition {self.choi.labels}")
        object.__setattr__(self, "inputs", ins)
        object.__setattr__(self, "outputs", outs)

    @property
    def d_in(self) -> int:
        return prod(self.choi.dim_of(l) for l in self.inputs)

    @property
    def d_out(self) -> int:
        return prod(self.choi.dim_of(l) for l in self.outputs)

    def relabel(self, mapping) -> "ChoiChannel":
        mapping = {k: v for k, v in mapping.items() if k in self.choi.labels}
        return ChoiChannel(
            relabel(self.choi, mapping),
            tuple(mapping.get(l, l) for l in self.inputs),
            tuple(mapping.get(l, l) for l in self.outputs),
        )


def kraus_channel(kraus, input, output) -> KrausChannel:
    return KrausChannel(_subs(input), _subs(output), tuple(kraus))


def choi_from_kraus(ch: KrausChannel) -> ChoiChannel:
    """(1/d) sum_ij |i><j| x sum_k K|i><j|K^dag, inputs first."""
    d = ch.d_in
    mat = np.zeros((d * ch.d_out, d * ch.d_out), dtype=complex)
    for k in ch.kraus:
        v = k.T.reshape(-1)  # sum_i |i> x K|i>, input index most significant
        mat += np.outer(v, v.conj())
    choi = LabeledOperator(ch.inputs + ch.outputs, mat / d)
    return ChoiChannel(choi, tuple(s.name for s in ch.inputs), tuple(s.name for s in ch.outputs))


def apply_kraus(ch: KrausChannel, rho: LabeledOperator) -> LabeledOperator:
    names = [s.name for s in ch.inputs]
    if sorted(rho.labels) != sorted(names):
        raise DimensionMismatch(f"state on {rho.labels}, channel input {names}")
    m = permute(rho, names).matrix
    return LabeledOperator(ch.outputs, sum(k @ m @ k.conj().T for k in ch.kraus))


def apply_choi(ch: ChoiChannel, rho: LabeledOperator) -> LabeledOperator:
    """Action of the channel on a state of its input labels (plus optional spectators)."""
    missing = [l for l in ch.inputs if l not in rho.labels]
    if missing:
        raise DimensionMismatch(f"state lacks channel inputs {missing}")
    clash = [l for l in ch.outputs if l in rho.labels]
    if clash:
        raise DuplicateLabel(f"output labels {clash} already carried by the state")
    for l in ch.inputs:
        if rho.dim_of(l) != ch.choi.dim_of(l):
            raise DimensionMismatch(f"label {l!r}: state dim {rho.dim_of(l)} vs channel {ch.choi.dim_of(l)}")
    out = link(rho, ch.choi)
    spectators = [l for l in rho.labels if l not in ch.inputs]
    return permute(out, spectators + list(ch.outputs))


def compose(first: ChoiChannel, second: ChoiChannel) -> ChoiChannel:
    """Choi state of ``second o first``; first's outputs must be second's inputs."""
    if sorted(first.outputs) != sorted(second.inputs):
        raise DimensionMismatch(f"{first.outputs} do not feed {second.inputs}")
    out = link(first.choi, second.choi)
    return ChoiChannel(permute(out, first.inputs + second.outputs), first.inputs, second.outputs)


def identity_channel(input, output) -> ChoiChannel:
    a, b = _sub(input), _sub(output)
    return ChoiChannel(maximally_entangled(a, b), (a.name,), (b.name,))


def replacement_channel(input, state: LabeledOperator) -> ChoiChannel:
    """The channel discarding its input and preparing ``state``."""
    a = _subs(input)
    return ChoiChannel(tensor(maximally_mixed(*a), state), tuple(s.name for s in a), state.labels)


def depolarizing_channel(input, output) -> ChoiChannel:
    return replacement_channel(input, maximally_mixed(_sub(output)))


# -- validation -------------------------------------------------------------


@dataclass
class ChannelReport:
    min_eigenvalue: float
    trace: float
    marginal_residual: float
    psd_ok: bool = field(init=False)
    trace_ok: bool = field(init=False)
    marginal_ok: bool = field(init=False)

    def __post_init__(self):
        self.psd_ok = self.min_eigenvalue >= -TOL_PSD
        self.trace_ok = abs(self.trace - 1) <= TOL_TRACE
        self.marginal_ok = self.marginal_residual <= TOL_TRACE

    @property
    def passed(self) -> bool:
        return self.psd_ok and self.trace_ok and self.marginal_ok

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "psd": self.psd_ok,
            "min_eigenvalue": self.min_eigenvalue,
            "trace": self.trace,
            "marginal_residual": self.marginal_residual,
        }


def validate_choi_channel(x: LabeledOperator, inputs: Sequence[str] | None = None) -> ChannelReport:
    """Check positivity, unit trace and ``tr_out x = I/d_in``.

    Defaults to the first label being the input.  Never raises on a bad
    operator; the report carries the failures.
    """
    inputs = list(x.labels[:1] if inputs is None else inputs)
    herm = _hermitize(x.matrix)
    lam_min = float(np.linalg.eigvalsh(herm)[0])
    marg = partial_trace(x, inputs)
    resid = trace_norm(marg.matrix - maximally_mixed(*marg.subsystems).matrix)
    return ChannelReport(lam_min, float(np.real(x.trace())), resid)


def as_choi_channel(x: LabeledOperator, inputs: Sequence[str] | None = None) -> ChoiChannel:
    """Wrap an operator as a channel, raising if it is not a valid Choi state."""
    inputs = tuple(x.labels[:1] if inputs is None else inputs)
    report = validate_choi_channel(x, inputs)
    if not report.passed:
        raise NotTracePreserving(f"not a valid Choi state: {report.as_dict()}")
    return ChoiChannel(x, inputs, tuple(l for l in x.labels if l not in inputs))


# -- superchannels ----------------------------------------------------------

# wiring labels private to a superchannel
SLOT_IN, SLOT_OUT = "~a", "~b"
NEW_IN, NEW_OUT = "~x", "~y"
ANCILLA = "~e"


@dataclass(frozen=True, eq=False)
class Superchannel:
    """Pre- and post-processing joined by an ancilla.

    ``pre`` maps ``~x -> ~a (x ~e)`` and ``post`` maps ``~b (x ~e) -> ~y``; the
    channel being transformed is plugged in between ``~a`` and ``~b``.
    """

    pre: ChoiChannel
    post: ChoiChannel

    def __post_init__(self):
        if self.pre.inputs != (NEW_IN,) or self.post.outputs != (NEW_OUT,):
            raise UnknownLabel("superchannel pre/post must use the private wiring labels")
        if SLOT_IN not in self.pre.outputs or SLOT_OUT not in self.post.inputs:
            raise UnknownLabel("superchannel is missing its slot labels")
        anc_pre = [l for l in self.pre.outputs if l != SLOT_IN]
        anc_post = [l for l in self.post.inputs if l != SLOT_OUT]
        if anc_pre != anc_post or anc_pre not in ([], [ANCILLA]):
            raise UnknownLabel("pre and post must share exactly the ancilla label")
        if anc_pre and self.pre.choi.dim_of(ANCILLA) != self.post.choi.dim_of(ANCILLA):
            raise DimensionMismatch("ancilla dimension differs between pre and post")
        for ch in (self.pre, self.post):
            rep = validate_choi_channel(ch.choi, ch.inputs)
            if not rep.passed:
                raise NotTracePreserving(f"superchannel component invalid: {rep.as_dict()}")

    @property
    def has_ancilla(self) -> bool:
        return ANCILLA in self.pre.outputs

    @property
    def ancilla_dim(self) -> int:
        return self.pre.choi.dim_of(ANCILLA) if self.has_ancilla else 1

    @property
    def slot_dims(self) -> tuple[int, int]:
        return self.pre.choi.dim_of(SLOT_IN), self.post.choi.dim_of(SLOT_OUT)

    @classmethod
    def from_kraus(cls, pre_kraus, post_kraus, d_in: int, d_out: int, ancilla_dim: int = 1,
                   new_in: int | None = None, new_out: int | None = None) -> "Superchannel":
        """Kraus operators act on (slot x ancilla) with the slot as the leading factor."""
        new_in = d_in if new_in is None else new_in
        new_out = d_out if new_out is None else new_out
        anc = [Subsystem(ANCILLA, ancilla_dim)] if ancilla_dim > 1 else []
        pre = choi_from_kraus(kraus_channel(pre_kraus, [Subsystem(NEW_IN, new_in)],
                                            [Subsystem(SLOT_IN, d_in)] + anc))
        post = choi_from_kraus(kraus_channel(post_kraus, [Subsystem(SLOT_OUT, d_out)] + anc,
                                             [Subsystem(NEW_OUT, new_out)]))
        return cls(pre, post)

    @classmethod
    def pre_post(cls, pre: ChoiChannel, post: ChoiChannel) -> "Superchannel":
        """Build from ancilla-free channels, renaming them onto the wiring labels."""
        pre = pre.relabel({pre.inputs[0]: NEW_IN, pre.outputs[0]: SLOT_IN})
        post = post.relabel({post.inputs[0]: SLOT_OUT, post.outputs[0]: NEW_OUT})
        return cls(pre, post)


def identity_superchannel(d_in: int, d_out: int) -> Superchannel:
    return Superchannel.pre_post(identity_channel(("x", d_in), ("a", d_in)),
                                 identity_channel(("b", d_out), ("y", d_out)))


def apply_superchannel(xi: Superchannel, ch: ChoiChannel) -> ChoiChannel:
    """Choi state of ``post o (ch x id_E) o pre``, returned on ch's own labels."""
    if len(ch.inputs) != 1 or len(ch.outputs) != 1:
        raise DimensionMismatch("superchannels act on single-input, single-output channels")
    (a,), (b,) = ch.inputs, ch.outputs
    if (ch.choi.dim_of(a), ch.choi.dim_of(b)) != xi.slot_dims:
        raise DimensionMismatch(f"channel dims {(ch.choi.dim_of(a), ch.choi.dim_of(b))} vs slot {xi.slot_dims}")
    plugged = relabel(ch.choi, {a: SLOT_IN, b: SLOT_OUT})
    out = link(link(xi.pre.choi, plugged), xi.post.choi)
    out = relabel(permute(out, [NEW_IN, NEW_OUT]), {NEW_IN: a, NEW_OUT: b})
    return ChoiChannel(out, (a,), (b,))
