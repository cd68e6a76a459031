"""Labeled multipartite operators and the tensor primitives built on them.

Every matrix is factorized row-major over its subsystems: the leftmost
subsystem is the most significant index digit.  All other modules rely on
this convention, so nothing here reorders factors implicitly.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import (
    BadPermutation,
    DimensionMismatch,
    DuplicateLabel,
    NotDensityOperator,
    NotHermitian,
    UnknownLabel,
)

TOL_HERM = 1e-9
TOL_PSD = 1e-9
TOL_TRACE = 1e-9
TOL_EIG = 1e-8
TOL_SUPPORT = 1e-10

MAX_SIDE = 4096


@dataclass(frozen=True)
class Subsystem:
    name: str
    dim: int

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise ValueError(f"subsystem {self.name!r} needs a positive integer dimension, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))


def _as_subsystems(subsystems) -> tuple[Subsystem, ...]:
    out = []
    for s in subsystems:
        if isinstance(s, Subsystem):
            out.append(s)
        elif isinstance(s, Mapping):
            out.append(Subsystem(str(s["name"]), int(s["dim"])))
        else:
            name, dim = s
            out.append(Subsystem(str(name), int(dim)))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class LabeledOperator:
    """A complex square matrix acting on an ordered list of named subsystems."""

    subsystems: tuple[Subsystem, ...]
    matrix: np.ndarray

    def __post_init__(self):
        subs = _as_subsystems(self.subsystems)
        names = [s.name for s in subs]
        if len(set(names)) != len(names):
            raise DuplicateLabel(f"repeated subsystem label in {names}")
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim == 0 and not subs:
            mat = mat.reshape(1, 1)
        side = prod(s.dim for s in subs)
        if side > MAX_SIDE:
            raise DimensionMismatch(f"operator side {side} exceeds the dense limit {MAX_SIDE}")
        if mat.shape != (side, side):
            raise DimensionMismatch(f"matrix shape {mat.shape} does not match subsystem dims {[s.dim for s in subs]}")
        mat.setflags(write=False)
        object.__setattr__(self, "subsystems", subs)
        object.__setattr__(self, "matrix", mat)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.subsystems)

    @property
    def side(self) -> int:
        return self.matrix.shape[0]

    def dim_of(self, label: str) -> int:
        for s in self.subsystems:
            if s.name == label:
                return s.dim
        raise UnknownLabel(f"{label!r} not in {self.labels}")

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def tensor(self) -> np.ndarray:
        """The matrix as a 2k-index array (rows first, then columns)."""
        return self.matrix.reshape(self.dims * 2)

    def __repr__(self):
        subs = ", ".join(f"{s.name}({s.dim})" for s in self.subsystems)
        return f"LabeledOperator([{subs}])"


def operator(matrix, subsystems) -> LabeledOperator:
    return LabeledOperator(_as_subsystems(subsystems), np.asarray(matrix))


def _from_tensor(t: np.ndarray, subsystems: Sequence[Subsystem]) -> LabeledOperator:
    side = prod(s.dim for s in subsystems)
    return LabeledOperator(tuple(subsystems), t.reshape(side, side))


def _check_known(x: LabeledOperator, labels: Iterable[str]) -> list[str]:
    labels = list(labels)
    missing = [l for l in labels if l not in x.labels]
    if missing:
        raise UnknownLabel(f"{missing} not among {x.labels}")
    return labels


def is_hermitian(x: LabeledOperator, tol: float = TOL_HERM) -> bool:
    m = x.matrix
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def is_density_operator(x: LabeledOperator, tol: float = TOL_PSD) -> bool:
    if not is_hermitian(x) or abs(x.trace() - 1) > TOL_TRACE:
        return False
    return bool(np.linalg.eigvalsh(_hermitize(x.matrix))[0] >= -tol)


def _hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


# -- tensor-network primitives ---------------------------------------------


def tensor(a: LabeledOperator, b: LabeledOperator, *more: LabeledOperator) -> LabeledOperator:
    """Kronecker product with concatenated subsystem lists."""
    clash = set(a.labels) & set(b.labels)
    if clash:
        raise DuplicateLabel(f"labels {sorted(clash)} appear in both factors")
    out = LabeledOperator(a.subsystems + b.subsystems, np.kron(a.matrix, b.matrix))
    for c in more:
        out = tensor(out, c)
    return out


def partial_trace(x: LabeledOperator, kept: Iterable[str]) -> LabeledOperator:
    """Trace out everything except ``kept``; the survivors keep their original order."""
    kept = set(_check_known(x, kept))
    k = len(x.subsystems)
    rows = list(range(k))
    cols = [i + k if x.subsystems[i].name in kept else i for i in range(k)]
    keep_idx = [i for i in range(k) if x.subsystems[i].name in kept]
    out = [i for i in keep_idx] + [i + k for i in keep_idx]
    t = np.einsum(x.tensor(), rows + cols, out)
    return _from_tensor(t, [x.subsystems[i] for i in keep_idx])


def trace_out(x: LabeledOperator, removed: Iterable[str]) -> LabeledOperator:
    removed = set(_check_known(x, removed))
    return partial_trace(x, [l for l in x.labels if l not in removed])


def partial_transpose(x: LabeledOperator, on: Iterable[str]) -> LabeledOperator:
    on = set(_check_known(x, on))
    k = len(x.subsystems)
    axes = list(range(2 * k))
    for i, s in enumerate(x.subsystems):
        if s.name in on:
            axes[i], axes[i + k] = i + k, i
    return _from_tensor(x.tensor().transpose(axes), x.subsystems)


def permute(x: LabeledOperator, new_order: Sequence[str]) -> LabeledOperator:
    new_order = list(new_order)
    if sorted(new_order) != sorted(x.labels) or len(new_order) != len(x.labels):
        raise BadPermutation(f"{new_order} is not a permutation of {list(x.labels)}")
    idx = [x.labels.index(l) for l in new_order]
    k = len(idx)
    t = x.tensor().transpose(idx + [i + k for i in idx])
    return _from_tensor(t, [x.subsystems[i] for i in idx])


def relabel(x: LabeledOperator, mapping: Mapping[str, str]) -> LabeledOperator:
    """Rename subsystems simultaneously; labels absent from ``mapping`` are kept."""
    _check_known(x, mapping)
    subs = tuple(Subsystem(mapping.get(s.name, s.name), s.dim) for s in x.subsystems)
    return LabeledOperator(subs, x.matrix)


def link(a: LabeledOperator, b: LabeledOperator) -> LabeledOperator:
    """Link product ``d_shared * tr_shared[a b^{T_shared}]``.

    The result lives on a's unshared labels followed by b's unshared labels.
    With normalized Choi states on both sides the result is again a
    normalized Choi state, so no extra bookkeeping is needed downstream.
    """
    shared = [l for l in a.labels if l in b.labels]
    for l in shared:
        if a.dim_of(l) != b.dim_of(l):
            raise DimensionMismatch(f"label {l!r} has dim {a.dim_of(l)} vs {b.dim_of(l)}")
    ka = len(a.subsystems)
    # integer index names: a rows 0..ka-1, a cols ka..2ka-1, b uses fresh ids except shared
    a_rows = list(range(ka))
    a_cols = list(range(ka, 2 * ka))
    nxt = 2 * ka
    b_rows, b_cols = [], []
    for l in b.labels:
        if l in shared:
            i = a.labels.index(l)
            b_rows.append(a_rows[i])
            b_cols.append(a_cols[i])
        else:
            b_rows.append(nxt)
            b_cols.append(nxt + 1)
            nxt += 2
    a_keep = [i for i, l in enumerate(a.labels) if l not in shared]
    b_keep = [j for j, l in enumerate(b.labels) if l not in shared]
    out_idx = [a_rows[i] for i in a_keep] + [b_rows[j] for j in b_keep]
    out_idx += [a_cols[i] for i in a_keep] + [b_cols[j] for j in b_keep]
    d_shared = prod(a.dim_of(l) for l in shared)
    t = np.einsum(a.tensor(), a_rows + a_cols, b.tensor(), b_rows + b_cols, out_idx, optimize=True)
    subs = [a.subsystems[i] for i in a_keep] + [b.subsystems[j] for j in b_keep]
    return _from_tensor(d_shared * t, subs)


# -- spectral functions -----------------------------------------------------


def eigh(x: LabeledOperator) -> tuple[np.ndarray, np.ndarray]:
    if not is_hermitian(x):
        raise NotHermitian(f"{x!r} is not Hermitian within {TOL_HERM}")
    return np.linalg.eigh(_hermitize(x.matrix))


def _entropy_from_eigenvalues(lam: np.ndarray) -> float:
    lam = lam[lam > TOL_SUPPORT]
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(rho: LabeledOperator) -> float:
    """Entropy in bits; eigenvalues below the support cutoff count as zero."""
    if not is_density_operator(rho):
        raise NotDensityOperator(f"{rho!r} is not a density operator")
    return _entropy_from_eigenvalues(np.linalg.eigvalsh(_hermitize(rho.matrix)))


# -- common states ----------------------------------------------------------


def _sub(s) -> Subsystem:
    return s if isinstance(s, Subsystem) else Subsystem(*s)


def identity(*subsystems) -> LabeledOperator:
    subs = [_sub(s) for s in subsystems]
    return LabeledOperator(tuple(subs), np.eye(prod(s.dim for s in subs)))


def maximally_mixed(*subsystems) -> LabeledOperator:
    subs = [_sub(s) for s in subsystems]
    d = prod(s.dim for s in subs)
    return LabeledOperator(tuple(subs), np.eye(d) / d)


def basis_projector(subsystem, index: int) -> LabeledOperator:
    s = _sub(subsystem)
    m = np.zeros((s.dim, s.dim))
    m[index, index] = 1
    return LabeledOperator((s,), m)


def pure_state(vector, subsystems) -> LabeledOperator:
    v = np.asarray(vector, dtype=complex).ravel()
    return operator(np.outer(v, v.conj()), subsystems)


def maximally_entangled(a, b) -> LabeledOperator:
    """The state |Phi><Phi| with |Phi> = sum_i |ii> / sqrt(d)."""
    a, b = _sub(a), _sub(b)
    if a.dim != b.dim:
        raise DimensionMismatch(f"{a.name} and {b.name} differ in dimension")
    v = np.eye(a.dim).ravel() / np.sqrt(a.dim)
    return pure_state(v, (a, b))


def swap_operator(a, b) -> LabeledOperator:
    a, b = _sub(a), _sub(b)
    d = a.dim
    m = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            m[i * d + j, j * d + i] = 1
    return LabeledOperator((a, b), m)


def allclose(x: LabeledOperator, y: LabeledOperator, atol: float = TOL_EIG) -> bool:
    """Entrywise comparison after aligning y's factor order with x's."""
    if sorted(x.labels) != sorted(y.labels):
        return False
    y = permute(y, x.labels)
    if x.dims != y.dims:
        return False
    return bool(np.max(np.abs(x.matrix - y.matrix), initial=0.0) <= atol)


def max_abs_diff(x: LabeledOperator, y: LabeledOperator) -> float:
    y = permute(y, x.labels)
    return float(np.max(np.abs(x.matrix - y.matrix), initial=0.0))


def trace_norm(m: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))
