"""Seeded random states, channels, combs and superprocesses.

Everything takes an explicit ``numpy.random.Generator`` so property tests and
restarts stay reproducible when run in parallel.
"""
from __future__ import annotations

from math import prod

import numpy as np

from .channel import (
    ANCILLA,
    NEW_IN,
    NEW_OUT,
    SLOT_IN,
    SLOT_OUT,
    ChoiChannel,
    KrausChannel,
    Superchannel,
    choi_from_kraus,
    kraus_channel,
)
from .comb import (
    CONTROL,
    ProcessComb,
    contracted_labels,
    control_comb_from_vector,
    control_comb_vector,
    control_teeth,
    markov_comb,
    process_comb,
)
from .operators import LabeledOperator, Subsystem, link, operator, trace_out
from .superprocess import MEM_IN, MEM_OUT, Superprocess, iqi_superprocess, threaded_superprocess


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_isometry(rng, d_in: int, d_out: int) -> np.ndarray:
    return haar_unitary(rng, d_out)[:, :d_in]


def random_pure_vector(rng, d: int) -> np.ndarray:
    return haar_unitary(rng, d)[:, 0]


def random_density_matrix(rng, d: int, rank: int | None = None) -> np.ndarray:
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_state(rng, subsystems, rank: int | None = None) -> LabeledOperator:
    subs = [s if isinstance(s, Subsystem) else Subsystem(*s) for s in subsystems]
    return operator(random_density_matrix(rng, prod(s.dim for s in subs), rank), subs)


def random_kraus_channel(rng, inputs, outputs, env_dim: int | None = None) -> KrausChannel:
    """Stinespring sampling: a Haar isometry into output x environment, environment discarded."""
    ins = [s if isinstance(s, Subsystem) else Subsystem(*s) for s in inputs]
    outs = [s if isinstance(s, Subsystem) else Subsystem(*s) for s in outputs]
    d_in, d_out = prod(s.dim for s in ins), prod(s.dim for s in outs)
    env_dim = d_in * d_out if env_dim is None else env_dim
    v = random_isometry(rng, d_in, d_out * env_dim).reshape(d_out, env_dim, d_in)
    return kraus_channel([v[:, e, :] for e in range(env_dim)], ins, outs)


def random_channel(rng, inputs, outputs, env_dim: int | None = None) -> ChoiChannel:
    return choi_from_kraus(random_kraus_channel(rng, inputs, outputs, env_dim))


def unitary_channel(u: np.ndarray, inputs, outputs) -> ChoiChannel:
    return choi_from_kraus(kraus_channel([u], inputs, outputs))


def random_process_comb(rng, n: int, d: int = 2, env_dim: int = 4, mixed_env: bool = True) -> ProcessComb:
    """Sequential Stinespring comb: environment state, one system-environment
    unitary per step, environment discarded at the end."""
    env = random_state(rng, [("~E0", env_dim)], rank=None if mixed_env else 1)
    x = env
    for k in range(1, n + 1):
        u = haar_unitary(rng, d * env_dim)
        step = unitary_channel(u, [(f"I{k}", d), (f"~E{k - 1}", env_dim)], [(f"O{k}", d), (f"~E{k}", env_dim)])
        x = link(x, step.choi)
    return process_comb(trace_out(x, [f"~E{n}"]), n)


def random_markov_comb(rng, n: int, d: int = 2) -> ProcessComb:
    return markov_comb([random_channel(rng, [("a", d)], [("b", d)]) for _ in range(n)])


def random_control_unitaries(rng, n: int, d: int, ancilla_dim: int) -> tuple[np.ndarray, list[np.ndarray]]:
    return haar_unitary(rng, d * ancilla_dim), [haar_unitary(rng, d * ancilla_dim) for _ in range(n - 1)]


def random_control_comb(rng, n: int, d: int = 2, ancilla_dim: int = 2, discarded_dim: int = 1,
                        ancilla: str = "R") -> ProcessComb:
    """Pure Stinespring control comb, optionally with part of its memory discarded."""
    u0, vs = random_control_unitaries(rng, n, d, ancilla_dim * discarded_dim)
    s = control_comb_vector(u0, vs, [d] * n, ancilla_dim * discarded_dim)
    if discarded_dim == 1:
        return control_comb_from_vector(s, [d] * n, ancilla)
    s = s.reshape(s.shape[0], ancilla_dim, discarded_dim)
    rows = s.reshape(-1, discarded_dim)
    mat = rows @ rows.conj().T
    subs = [Subsystem(l, d) for l in contracted_labels(n)] + [Subsystem(ancilla, ancilla_dim)]
    return ProcessComb(LabeledOperator(tuple(subs), mat), control_teeth(n, [ancilla]), CONTROL, (ancilla,))


def random_superchannel(rng, d: int = 2, ancilla_dim: int = 2) -> Superchannel:
    anc = [(ANCILLA, ancilla_dim)] if ancilla_dim > 1 else []
    pre = random_channel(rng, [(NEW_IN, d)], [(SLOT_IN, d)] + anc)
    post = random_channel(rng, [(SLOT_OUT, d)] + anc, [(NEW_OUT, d)])
    return Superchannel(pre, post)


def random_iqi_superprocess(rng, n: int, d: int = 2, ancilla_dim: int = 2) -> Superprocess:
    return iqi_superprocess([random_superchannel(rng, d, ancilla_dim) for _ in range(n)])


def random_threaded_superprocess(rng, n: int, d: int = 2, ancilla_dim: int = 2, memory_dim: int = 2) -> Superprocess:
    pres, posts = [], []
    for k in range(1, n + 1):
        mem_in = [(MEM_IN, memory_dim)] if k > 1 else []
        mem_out = [(MEM_OUT, memory_dim)] if k < n else []
        pres.append(random_channel(rng, [(NEW_IN, d)] + mem_in, [(SLOT_IN, d), (ANCILLA, ancilla_dim)]))
        posts.append(random_channel(rng, [(SLOT_OUT, d), (ANCILLA, ancilla_dim)], [(NEW_OUT, d)] + mem_out))
    return threaded_superprocess(pres, posts)
