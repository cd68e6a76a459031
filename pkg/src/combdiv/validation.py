"""Input checks in the style of ``sklearn.utils.validation``.

Each ``check_*`` returns the validated (and possibly converted) object or
raises the matching :mod:`combdiv.exceptions` error.
"""
from __future__ import annotations

import numbers

import numpy as np

from .channel import ChoiChannel, KrausChannel, as_choi_channel, choi_from_kraus
from .comb import CONTROL, PROCESS, ProcessComb, channel_as_comb, validate_comb
from .divergence import ClassicalMeasure, Measure
from .exceptions import NotACombChoi, NotDensityOperator, ShapeMismatch
from .operators import LabeledOperator, is_density_operator


def check_operator(x) -> LabeledOperator:
    if not isinstance(x, LabeledOperator):
        raise TypeError(f"expected a LabeledOperator, got {type(x).__name__}")
    return x


def check_density_operator(x) -> LabeledOperator:
    x = check_operator(x)
    if not is_density_operator(x):
        raise NotDensityOperator(f"{x!r} is not a density operator")
    return x


def check_channel(x) -> ChoiChannel:
    """Accept a Kraus or Choi channel and return a validated Choi channel."""
    if isinstance(x, KrausChannel):
        return choi_from_kraus(x)
    if isinstance(x, ChoiChannel):
        return as_choi_channel(x.choi, x.inputs)
    raise TypeError(f"expected a channel, got {type(x).__name__}")


def check_comb(x, kind: str = PROCESS) -> ProcessComb:
    """Accept a comb (or a channel, as a one-step comb) and validate causality."""
    if isinstance(x, (ChoiChannel, KrausChannel)):
        x = channel_as_comb(check_channel(x))
    if not isinstance(x, ProcessComb):
        raise TypeError(f"expected a ProcessComb, got {type(x).__name__}")
    if x.kind != kind:
        raise NotACombChoi(f"expected a {kind} comb, got a {x.kind} comb")
    rep = validate_comb(x)
    if not rep.passed:
        raise NotACombChoi(f"comb fails validation: {rep.as_dict()}")
    return x


def check_control_comb(x) -> ProcessComb:
    return check_comb(x, CONTROL)


def check_comb_pair(t, v) -> tuple[ProcessComb, ProcessComb]:
    t, v = check_comb(t), check_comb(v)
    if t.teeth != v.teeth:
        raise ShapeMismatch(f"teeth {t.teeth} vs {v.teeth}")
    return t, v


def check_channel_pair(m, n) -> tuple[ChoiChannel, ChoiChannel]:
    m, n = check_channel(m), check_channel(n)
    if sorted(m.choi.labels) != sorted(n.choi.labels) or set(m.inputs) != set(n.inputs):
        raise ShapeMismatch(f"{m.inputs}->{m.outputs} vs {n.inputs}->{n.outputs}")
    return m, n


def check_measure(measure) -> Measure:
    try:
        return Measure(measure)
    except ValueError:
        raise ValueError(f"measure must be one of {[m.value for m in Measure]}, got {measure!r}") from None


def check_classical_measure(measure) -> ClassicalMeasure:
    try:
        return ClassicalMeasure(measure)
    except ValueError:
        raise ValueError(f"measure must be one of {[m.value for m in ClassicalMeasure]}, got {measure!r}") from None


def check_random_state(seed) -> np.random.Generator:
    """Turn None, an int or a Generator into a Generator."""
    if seed is None or isinstance(seed, (numbers.Integral, np.integer)):
        return np.random.default_rng(seed)
    if isinstance(seed, np.random.Generator):
        return seed
    raise ValueError(f"{seed!r} cannot seed a numpy Generator")
