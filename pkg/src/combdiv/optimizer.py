"""Lower bounds on generalized channel and comb divergences.

The supremum over control combs is searched with a derivative-free compass
search over pure Stinespring control combs: a state vector on ``I1 x R``
followed by one unitary ``O_k x R -> I_{k+1} x R`` per junction.  Every point
of that family is a valid control comb, so every value found is a certified
lower bound.  Restart 0 always evaluates the Choi control comb first, which
makes the result at least the Choi divergence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from math import prod

import numpy as np
from joblib import Parallel, delayed
from scipy.linalg import null_space

from .channel import ChoiChannel, as_choi_channel
from .comb import (
    ProcessComb,
    _contract_blocks,
    choi_blocks,
    choi_control_comb,
    contract,
    contracted_labels,
    control_comb_from_vector,
    control_comb_vector,
    validate_comb,
)
from .divergence import (
    ClassicalMeasure,
    Measure,
    Tester,
    _relative_entropy_matrix,
    _trace_distance_matrix,
    classical_divergence_unchecked,
    state_divergence,
)
from .exceptions import DimensionMismatch, DualityViolation, NotACombChoi, ShapeMismatch
from .operators import (
    TOL_EIG,
    TOL_PSD,
    LabeledOperator,
    Subsystem,
    _hermitize,
    max_abs_diff,
    operator,
    partial_trace,
    permute,
    relabel,
)
from .sampling import haar_unitary, random_pure_vector
from .superprocess import Superprocess, apply_superprocess, dual_contract

CEILING = 1e6


@dataclass(frozen=True)
class OptimizerConfig:
    """Search settings.

    ``ancilla_dim=None`` means d_in for channels and d^n for n-step combs.
    ``outcomes=None`` gives testers d^2 outcomes.  ``n_jobs=None`` runs the
    restarts in-process.
    """

    restarts: int = 8
    max_iters: int = 30
    step_tolerance: float = 1e-3
    value_tolerance: float = 1e-10
    ancilla_dim: int | None = None
    seed: int = 0
    initial_step: float = 0.5
    outcomes: int | None = None
    n_jobs: int | None = None
    record_probes: bool = False

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if self.step_tolerance <= 0 or self.initial_step <= 0:
            raise ValueError("step sizes must be positive")
        if self.ancilla_dim is not None and self.ancilla_dim < 1:
            raise ValueError("ancilla_dim must be positive")
        if self.outcomes is not None and self.outcomes < 1:
            raise ValueError("outcomes must be positive")


@dataclass
class OptimizationResult:
    """Outcome of one maximization; ``value`` is a lower bound on the supremum."""

    value: float
    argmax: object
    trace: list[list[float]]
    restart_values: list[float]
    converged: bool
    choi_value: float
    best_restart: int
    ancilla_dim: int
    probes: list = field(default_factory=list, repr=False)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)

    def as_dict(self) -> dict:
        return {
            "value": _json_float(self.value),
            "finite": self.finite,
            "certified": "lower bound",
            "choi_value": _json_float(self.choi_value),
            "restart_values": [_json_float(v) for v in self.restart_values],
            "trace": [[_json_float(v) for v in t] for t in self.trace],
            "converged": self.converged,
            "best_restart": self.best_restart,
            "ancilla_dim": self.ancilla_dim,
        }


def _json_float(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _rank(v: float) -> float:
    return min(v, CEILING)


# -- parameter moves --------------------------------------------------------


def _n_moves(m: np.ndarray) -> int:
    return m.shape[0] ** 2


def _move(m: np.ndarray, g: int, theta: float) -> np.ndarray:
    """Left-multiply by ``exp(i theta G_g)`` for one of the N^2 Hermitian generators."""
    n = m.shape[0]
    out = m.copy()
    if g < n:
        out[g] *= np.exp(1j * theta)
        return out
    pair, kind = divmod(g - n, 2)
    a, b = _pairs(n)[pair]
    c, s = math.cos(theta), math.sin(theta)
    if kind == 0:
        out[a], out[b] = c * m[a] + 1j * s * m[b], 1j * s * m[a] + c * m[b]
    else:
        out[a], out[b] = c * m[a] + s * m[b], -s * m[a] + c * m[b]
    return out


_PAIRS: dict[int, list[tuple[int, int]]] = {}


def _pairs(n: int) -> list[tuple[int, int]]:
    if n not in _PAIRS:
        _PAIRS[n] = [(a, b) for a in range(n) for b in range(a + 1, n)]
    return _PAIRS[n]


# -- objective --------------------------------------------------------------


class _Objective:
    """Divergence between T(S) and V(S) as a function of Stinespring parameters.

    Parameters are ``[psi, V_1, ..., V_{n-1}]`` plus ``Q`` for testers, where
    psi is the initial state vector on ``I1 x R`` and Q rotates the final
    projective measurement.
    """

    def __init__(self, t: ProcessComb, v: ProcessComb, measure, ancilla_dim: int,
                 classical: bool = False, outcomes: int | None = None):
        self.dims = t.step_dims()
        self.n = t.n_steps
        self.d_r = ancilla_dim
        self.d_last = self.dims[-1][1]
        self.t = t.choi.matrix
        self.v = permute(v.choi, t.choi.labels).matrix
        big = self.t.shape[0] // self.d_last
        self.blocks = np.stack([choi_blocks(self.t, big, self.d_last), choi_blocks(self.v, big, self.d_last)])
        self.classical = classical
        self.measure = ClassicalMeasure(measure) if classical else Measure(measure)
        self._divergence = _relative_entropy_matrix if self.measure is Measure.RELATIVE_ENTROPY else _trace_distance_matrix
        self.outcomes = outcomes if outcomes is not None else self.dims[0][0] ** 2

    def states(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        both = _contract_blocks(self.blocks, s)
        return both[0], both[1]

    def vector(self, params) -> np.ndarray:
        junctions = params[1:self.n]
        return control_comb_vector(params[0], junctions, self.dims, self.d_r)

    def distributions(self, rho: np.ndarray, sigma: np.ndarray, q: np.ndarray | None):
        if q is None:
            dp, dq = np.real(np.diag(rho)), np.real(np.diag(sigma))
        else:
            dp = np.real(np.einsum("ib,ij,jb->b", q.conj(), rho, q))
            dq = np.real(np.einsum("ib,ij,jb->b", q.conj(), sigma, q))
        groups = np.arange(dp.size) % self.outcomes
        p = np.bincount(groups, weights=dp, minlength=self.outcomes)
        r = np.bincount(groups, weights=dq, minlength=self.outcomes)
        return np.clip(p, 0, None), np.clip(r, 0, None)

    def value_of_states(self, rho, sigma, q=None) -> float:
        if self.classical:
            return classical_divergence_unchecked(self.measure, *self.distributions(rho, sigma, q))
        return self._divergence(rho, sigma)

    def __call__(self, params) -> float:
        s = self.vector(params)
        q = params[self.n] if self.classical else None
        return self.value_of_states(*self.states(s), q)

    def choi_probe(self) -> float:
        big = self.t.shape[0] // self.d_last
        s = np.eye(big) / math.sqrt(big)
        return self.value_of_states(*self.states(s))

    def shapes(self) -> list[int]:
        di = [d for d, _ in self.dims]
        out = [di[0] * self.d_r] + [di[k] * self.d_r for k in range(1, self.n)]
        if self.classical:
            out.append(self.d_last * self.d_r)
        return out

    def random_params(self, rng: np.random.Generator) -> list[np.ndarray]:
        sizes = self.shapes()
        params = [random_pure_vector(rng, sizes[0])]
        params += [haar_unitary(rng, k) for k in sizes[1:]]
        return params

    def choi_params(self) -> list[np.ndarray] | None:
        """Stinespring parameters reproducing the Choi control comb, if R is big enough."""
        cap_dims = []
        for k, (di, do) in enumerate(self.dims):
            cap_dims.append(di)
            if k < self.n - 1:
                cap_dims.append(do)
        big = prod(cap_dims)
        if self.d_r < big:
            return None
        weight = [prod(cap_dims[j + 1:]) for j in range(len(cap_dims))]
        d_r = self.d_r
        di0 = self.dims[0][0]
        psi = np.zeros(di0 * d_r, dtype=complex)
        for i in range(di0):
            psi[i * d_r + i * weight[0]] = 1 / math.sqrt(di0)
        params = [psi]
        for k in range(1, self.n):
            d_o, d_next = self.dims[k - 1][1], self.dims[k][0]
            slot_o, slot_i = 2 * k - 1, 2 * k
            filled = cap_dims[:slot_o]
            w = np.zeros((d_next * d_r, d_o * d_r), dtype=complex)
            for idx in np.ndindex(*filled):
                r = sum(c * weight[j] for j, c in enumerate(idx))
                for o in range(d_o):
                    for i in range(d_next):
                        w[i * d_r + r + o * weight[slot_o] + i * weight[slot_i], o * d_r + r] = 1 / math.sqrt(d_next)
            params.append(_complete_unitary(w))
        if self.classical:
            params.append(np.eye(self.d_last * d_r, dtype=complex))
        return params


def _complete_unitary(w: np.ndarray) -> np.ndarray:
    """Fill the zero columns of a partial isometry so the result is unitary."""
    used = np.linalg.norm(w, axis=0) > 0.5
    free = null_space(w[:, used].conj().T)
    out = w.copy()
    out[:, ~used] = free[:, : int((~used).sum())]
    return out


# -- search -----------------------------------------------------------------


@dataclass
class _RestartOutcome:
    value: float
    params: list
    trace: list[float]
    converged: bool
    probes: list
    choi_value: float | None = None
    choi_won: bool = False


def _compass_search(f: _Objective, params: list, rng, cfg: OptimizerConfig, record: bool):
    best = f(params)
    trace, probes = [best], ([[p.copy() for p in params]] if record else [])
    step = cfg.initial_step
    coords = [(u, g) for u, m in enumerate(params) for g in range(_n_moves(m))]
    converged = False
    for _ in range(cfg.max_iters):
        improved = False
        for c in rng.permutation(len(coords)):
            u, g = coords[c]
            for sign in (1.0, -1.0):
                cand = list(params)
                cand[u] = _move(params[u], g, sign * step)
                val = f(cand)
                if _rank(val) > _rank(best) + cfg.value_tolerance:
                    params, best, improved = cand, val, True
                    break
        trace.append(best)
        if record:
            probes.append([p.copy() for p in params])
        if not improved:
            step /= 2
            if step < cfg.step_tolerance:
                converged = True
                break
    return best, params, trace, converged, probes


def _run_restart(f: _Objective, r: int, cfg: OptimizerConfig) -> _RestartOutcome:
    rng = np.random.default_rng([cfg.seed, r])
    choi_value = None
    start = None
    if r == 0:
        choi_value = f.choi_probe()
        start = f.choi_params()
    if start is None:
        start = f.random_params(rng)
    best, params, trace, converged, probes = _compass_search(f, start, rng, cfg, cfg.record_probes)
    if choi_value is not None:
        trace = [choi_value if _rank(choi_value) > _rank(v) else v for v in trace]
        if _rank(choi_value) > _rank(best):
            return _RestartOutcome(choi_value, params, trace, converged, probes, choi_value, choi_won=True)
    return _RestartOutcome(best, params, trace, converged, probes, choi_value)


def _optimize(f: _Objective, cfg: OptimizerConfig) -> list[_RestartOutcome]:
    if cfg.n_jobs in (None, 1) or cfg.restarts == 1:
        return [_run_restart(f, r, cfg) for r in range(cfg.restarts)]
    return Parallel(n_jobs=cfg.n_jobs)(delayed(_run_restart)(f, r, cfg) for r in range(cfg.restarts))


def _pick(outcomes: list[_RestartOutcome]) -> int:
    best = 0
    for r, o in enumerate(outcomes):
        if _rank(o.value) > _rank(outcomes[best].value):
            best = r
    return best


def _default_ancilla(t: ProcessComb, cfg: OptimizerConfig) -> int:
    d_in = max(di for di, _ in t.step_dims())
    if cfg.ancilla_dim is None:
        return d_in ** t.n_steps
    if cfg.ancilla_dim < d_in:
        raise ValueError(f"ancilla_dim {cfg.ancilla_dim} is smaller than the input dimension {d_in}")
    return cfg.ancilla_dim


def _check_pair(t: ProcessComb, v: ProcessComb) -> None:
    if t.teeth != v.teeth:
        raise ShapeMismatch(f"teeth {t.teeth} vs {v.teeth}")
    if [t.choi.dim_of(l) for l in t.choi.labels] != [v.choi.dim_of(l) for l in t.choi.labels]:
        raise ShapeMismatch("matching labels carry different dimensions")
    if t.teeth != tuple(((f"I{k}",), (f"O{k}",)) for k in range(1, t.n_steps + 1)):
        raise ShapeMismatch("optimizers expect canonical process combs (see process_comb)")
    if list(t.choi.labels) != [l for i, o in t.teeth for l in i + o]:
        raise ShapeMismatch("comb factors are not in canonical order")


def _probe_combs(f: _Objective, outcomes, cfg) -> list[ProcessComb]:
    if not cfg.record_probes:
        return []
    combs = [choi_control_comb(f.dims)]
    for o in outcomes:
        for params in o.probes:
            combs.append(control_comb_from_vector(f.vector(params), f.dims))
    return combs


def _search(t: ProcessComb, v: ProcessComb, measure, cfg: OptimizerConfig, classical: bool):
    _check_pair(t, v)
    d_r = _default_ancilla(t, cfg)
    f = _Objective(t, v, measure, d_r, classical, cfg.outcomes)
    outcomes = _optimize(f, cfg)
    best = _pick(outcomes)
    converged = all(o.converged for o in outcomes)
    return f, outcomes, best, converged, d_r


def generalized_comb_divergence(measure, t: ProcessComb, v: ProcessComb,
                                cfg: OptimizerConfig | None = None) -> OptimizationResult:
    """Lower bound on sup_S D(T(S) || V(S)) over n-step control combs."""
    cfg = cfg or OptimizerConfig()
    f, outcomes, best, converged, d_r = _search(t, v, measure, cfg, classical=False)
    win = outcomes[best]
    if win.choi_won:
        argmax = choi_control_comb(f.dims)
    else:
        argmax = control_comb_from_vector(f.vector(win.params), f.dims)
    return OptimizationResult(
        value=win.value,
        argmax=argmax,
        trace=[o.trace for o in outcomes],
        restart_values=[o.value for o in outcomes],
        converged=converged,
        choi_value=outcomes[0].choi_value,
        best_restart=best,
        ancilla_dim=d_r,
        probes=_probe_combs(f, outcomes, cfg),
    )


def _tester(f: _Objective, control: ProcessComb, q: np.ndarray | None) -> Tester:
    anc = control.ancilla
    subs = [Subsystem(f"O{f.n}", f.d_last)] + [Subsystem(a, control.choi.dim_of(a)) for a in anc]
    size = prod(s.dim for s in subs)
    q = np.eye(size) if q is None else q
    effects = []
    for x in range(f.outcomes):
        cols = q[:, x::f.outcomes]
        effects.append(operator(cols @ cols.conj().T, subs))
    return Tester(control, tuple(effects))


def classical_comb_divergence(measure_c, t: ProcessComb, v: ProcessComb,
                              cfg: OptimizerConfig | None = None) -> OptimizationResult:
    """Lower bound on the sup over testers of a classical divergence of the outcome distributions.

    Testers are Stinespring control combs followed by a projective measurement
    in a rotated basis, basis vectors grouped round-robin into ``outcomes``.
    """
    cfg = cfg or OptimizerConfig()
    f, outcomes, best, converged, d_r = _search(t, v, measure_c, cfg, classical=True)
    win = outcomes[best]
    if win.choi_won:
        argmax = _tester(f, choi_control_comb(f.dims), None)
    else:
        argmax = _tester(f, control_comb_from_vector(f.vector(win.params), f.dims), win.params[f.n])
    return OptimizationResult(
        value=win.value,
        argmax=argmax,
        trace=[o.trace for o in outcomes],
        restart_values=[o.value for o in outcomes],
        converged=converged,
        choi_value=outcomes[0].choi_value,
        best_restart=best,
        ancilla_dim=d_r,
    )


def _channel_comb(ch: ChoiChannel, like: ChoiChannel | None = None) -> ProcessComb:
    ref = like or ch
    if sorted(ch.choi.labels) != sorted(ref.choi.labels) or set(ch.inputs) != set(ref.inputs):
        raise ShapeMismatch(f"channel on {ch.inputs}->{ch.outputs} vs {ref.inputs}->{ref.outputs}")
    x = permute(ch.choi, list(ref.inputs) + list(ref.outputs))
    subs = (Subsystem("I1", ref.d_in), Subsystem("O1", ref.d_out))
    if ch.d_in != ref.d_in or ch.d_out != ref.d_out:
        raise ShapeMismatch("channel dimensions differ")
    return ProcessComb(LabeledOperator(subs, x.matrix), ((("I1",), ("O1",)),))


def generalized_channel_divergence(measure, m: ChoiChannel, n: ChoiChannel,
                                   cfg: OptimizerConfig | None = None) -> OptimizationResult:
    """Lower bound on sup over pure rho_RA of D((id x M)(rho) || (id x N)(rho)).

    ``argmax`` is the optimizing pure input state on the channel input and R.
    """
    cfg = cfg or OptimizerConfig()
    if cfg.ancilla_dim is None:
        cfg = replace(cfg, ancilla_dim=m.d_in)
    res = generalized_comb_divergence(measure, _channel_comb(m), _channel_comb(n, m), cfg)
    anc = res.argmax.ancilla
    in_label = m.inputs[0] if len(m.inputs) == 1 else "A"
    state = partial_trace(res.argmax.choi, ["I1"] + list(anc))
    res.argmax = relabel(state, {"I1": in_label})
    return res


# -- Choi sandwich ----------------------------------------------------------


STEER_FLAG = "X"


def steering_channel(s: ProcessComb, flag: str = STEER_FLAG) -> ChoiChannel:
    """Channel from the contracted labels of s to ``flag x ancilla`` that steers a
    process Choi state into ``T(S)`` with probability ``1/D``.

    Its Choi state is ``|0><0|_X x Y_S / D + |1><1|_X x (I~ - Y_cap / D) x I~_R``,
    where D is the dimension of the contracted labels and ``Y_cap`` the
    marginal of the control comb on them.  Applied to a process Choi state the
    X = 0 block is ``T(S) / D``.
    """
    rep = validate_comb(s)
    if not rep.passed:
        raise NotACombChoi(f"steering needs a valid control comb: {rep.as_dict()}")
    anc = [l for l in s.ancilla]
    cap = [l for l in s.choi.labels if l not in anc]
    if flag in s.choi.labels:
        raise DimensionMismatch(f"flag label {flag!r} already in use")
    x = permute(s.choi, cap + anc)
    cap_subs = x.subsystems[: len(cap)]
    anc_subs = x.subsystems[len(cap):]
    big = prod(c.dim for c in cap_subs)
    y_cap = partial_trace(x, cap).matrix
    complement = np.eye(big) / big - y_cap / big
    if np.linalg.eigvalsh(_hermitize(complement))[0] < -TOL_PSD:
        raise NotACombChoi("complement of the control comb marginal is not positive")
    d_anc = prod(c.dim for c in anc_subs) if anc_subs else 1
    f = Subsystem(flag, 2)
    e_block = x.matrix / big
    f_block = np.kron(complement, np.eye(d_anc) / d_anc)
    z = np.zeros((2 * big * d_anc, 2 * big * d_anc), dtype=complex)
    # build on (X, cap, anc) then move X after cap
    z[: big * d_anc, : big * d_anc] = e_block
    z[big * d_anc:, big * d_anc:] = f_block
    choi = permute(operator(z, (f,) + tuple(cap_subs) + tuple(anc_subs)), cap + [flag] + anc)
    return as_choi_channel(choi, cap)


def literal_steering_complement(s: ProcessComb) -> float:
    """Smallest eigenvalue of ``I~_{cap,R} - Y_S / D``, the complement as often written."""
    anc = list(s.ancilla)
    cap = [l for l in s.choi.labels if l not in anc]
    big = prod(s.choi.dim_of(l) for l in cap)
    side = s.choi.side
    return float(np.linalg.eigvalsh(np.eye(side) / side - s.choi.matrix / big)[0])


def sandwich_factor(t: ProcessComb) -> int:
    """d^{2n-1}: the dimension of the labels a control comb contracts."""
    return prod(t.choi.dim_of(l) for l in contracted_labels(t.n_steps))


# -- monotonicity -----------------------------------------------------------


@dataclass
class MonotonicityReport:
    lhs_bound: float
    rhs_bound: float
    rhs_search: float
    rhs_replay: float
    max_duality_residual: float
    n_probes: int

    @property
    def monotone(self) -> bool:
        return _rank(self.lhs_bound) <= _rank(self.rhs_bound) + TOL_EIG

    def as_dict(self) -> dict:
        return {
            "lhs_bound": _json_float(self.lhs_bound),
            "rhs_bound": _json_float(self.rhs_bound),
            "rhs_search": _json_float(self.rhs_search),
            "rhs_replay": _json_float(self.rhs_replay),
            "max_duality_residual": self.max_duality_residual,
            "n_probes": self.n_probes,
            "monotone": self.monotone,
        }


def check_monotonicity(z: Superprocess, t: ProcessComb, v: ProcessComb, measure,
                       cfg: OptimizerConfig | None = None) -> MonotonicityReport:
    """Compare lower bounds on D(Z(T)||Z(V)) and D(T||V).

    Every control comb probed on the left is pushed through the dual of Z and
    replayed on the right, after checking ``[Z(T)](S) = T(Z^dag(S))``.
    """
    cfg = replace(cfg or OptimizerConfig(), record_probes=True)
    zt, zv = apply_superprocess(z, t), apply_superprocess(z, v)
    lhs = generalized_comb_divergence(measure, zt, zv, cfg)
    worst, replay = 0.0, -math.inf
    for s in lhs.probes:
        left = contract(zt, s)
        right_t = dual_contract(z, t, s)
        res = max_abs_diff(left, right_t)
        if res > TOL_EIG:
            raise DualityViolation(f"[Z(T)](S) and T(Z^dag(S)) differ by {res:.3e}")
        worst = max(worst, res)
        right_v = dual_contract(z, v, s)
        val = state_divergence(measure, right_t, right_v)
        replay = val if _rank(val) > _rank(replay) else replay
    rhs = generalized_comb_divergence(measure, t, v, replace(cfg, record_probes=False))
    bound = rhs.value if _rank(rhs.value) >= _rank(replay) else replay
    return MonotonicityReport(lhs.value, bound, rhs.value, replay, worst, len(lhs.probes))
