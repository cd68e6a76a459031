"""Acceptance criteria, one test and one PASS/FAIL line each.

Tolerances: 1e-9 for closed forms, 1e-8 for the DPI, duality, associativity
and Markov checks, 1e-6 (ceiling) and 1e-4 (grid oracle) for optimizer output.
The optimizer values are lower bounds; the sandwich and the Choi-seed floor
are what is asserted about them, not the suprema themselves.
"""
import time

import numpy as np
import pytest
from scipy.optimize import minimize

from combdiv.channel import apply_superchannel
from combdiv.comb import validate_comb
from combdiv.counterexamples import (
    coarse_graining,
    example1_m,
    example1_n,
    example1_superchannel,
    example2_comb,
    example2_marginal,
    example2_perturbed,
    example3_image,
    example3_superprocess,
    identity_choi,
)
from combdiv.divergence import (
    choi_divergence,
    mutual_information,
    non_markovianity,
    relative_entropy,
    total_correlations,
)
from combdiv.operators import link, max_abs_diff, von_neumann_entropy
from combdiv.optimizer import OptimizerConfig, generalized_channel_divergence, generalized_comb_divergence
from combdiv.sampling import random_iqi_superprocess, random_markov_comb, random_process_comb, random_state
from combdiv.scenarios import DUALITY_KINDS, dpi_suite, duality_suite, sandwich_suite
from combdiv.superprocess import apply_superprocess

CLOSED = 1e-9
SEED = 2024


@pytest.fixture(scope="module")
def sandwich():
    start = time.perf_counter()
    report = sandwich_suite(samples=20, seed=SEED, cfg=OptimizerConfig(restarts=8))
    return report, time.perf_counter() - start


@pytest.fixture(scope="module")
def channel_result():
    return generalized_channel_divergence("re", example1_m(), example1_n(), OptimizerConfig(seed=SEED))


@pytest.fixture(scope="module")
def example2_result():
    return generalized_comb_divergence("re", example2_comb(), example2_marginal(), OptimizerConfig(seed=SEED))


def test_criterion_01_example1(criterion):
    start = time.perf_counter()
    m, n = example1_m(), example1_n()
    xi = example1_superchannel()
    before = relative_entropy(m.choi, n.choi)
    after = relative_entropy(apply_superchannel(xi, m).choi, apply_superchannel(xi, n).choi)
    elapsed = time.perf_counter() - start
    ok = abs(before - 0.5) <= CLOSED and abs(after - 1.0) <= CLOSED and elapsed < 1.0
    criterion(1, f"S before = {before:.12f}, S after = {after:.12f}, {elapsed:.3f} s", ok)


def test_criterion_02_example1_spectrum(criterion):
    choi = example1_m().choi
    lam = np.sort(np.linalg.eigvalsh(choi.matrix))
    h = von_neumann_entropy(choi)
    resid = float(np.max(np.abs(lam - [0.0, 0.25, 0.25, 0.5])))
    ok = resid <= CLOSED and abs(h - 1.5) <= CLOSED
    criterion(2, f"eigenvalues {np.round(lam, 12).tolist()}, H = {h:.12f}", ok)


def test_criterion_03_example2(criterion):
    t = example2_comb()
    gt = apply_superprocess(coarse_graining(), t)
    i_t, i_gt = total_correlations(t), total_correlations(gt)
    resid = max_abs_diff(gt.choi, identity_choi())
    ok = abs(i_t - 1.0) <= CLOSED and abs(i_gt - 2.0) <= CLOSED and resid <= CLOSED
    criterion(3, f"I(T) = {i_t:.12f}, I(G(T)) = {i_gt:.12f}, |G(T) - Phi| = {resid:.1e}", ok)


def test_criterion_04_example3(criterion):
    t = example2_comb()
    zt = apply_superprocess(example3_superprocess(), t)
    n_t, n_zt = non_markovianity(t), non_markovianity(zt)
    resid = max_abs_diff(zt.choi, example3_image())
    ok = abs(n_t - 1.0) <= CLOSED and abs(n_zt - 2.0) <= CLOSED and resid <= CLOSED
    criterion(4, f"N(T) = {n_t:.12f}, N(Z(T)) = {n_zt:.12f}, |Z(T) - Phi x I| = {resid:.1e}", ok)


def test_criterion_05_causality(criterion):
    t = example2_comb()
    good = validate_comb(t)
    bad = validate_comb(example2_perturbed(), t.teeth)
    worst_good = max(good.residuals)
    ok = good.passed and worst_good <= CLOSED and bad.residuals[1] >= 0.1
    criterion(5, f"T residuals {worst_good:.1e}, perturbed residual {bad.residuals[1]:.3f}", ok)


def test_criterion_06_dpi(criterion):
    start = time.perf_counter()
    report = dpi_suite(samples=100, seed=SEED)
    elapsed = time.perf_counter() - start
    ok = report["pass"] and report["samples"] == 100 and elapsed < 30
    criterion(6, f"{report['violations']} violations in 100 triples, worst {report['max_violation']:.2e}, "
                 f"{elapsed:.2f} s", ok)


def test_criterion_07_duality(criterion):
    start = time.perf_counter()
    report = duality_suite(samples=50, seed=SEED)
    elapsed = time.perf_counter() - start
    kinds = {r["kind"] for r in report["results"]}
    ok = report["pass"] and kinds == set(DUALITY_KINDS) and elapsed < 60
    criterion(7, f"max residual {report['max_violation']:.1e} over 50 triples ({', '.join(sorted(kinds))}), "
                 f"{elapsed:.2f} s", ok)


def test_criterion_08_choi_floor(criterion, sandwich, channel_result, example2_result):
    report, _ = sandwich
    gaps = [r["floor_gap"] for r in report["results"]]
    gaps.append(channel_divergence_gap(channel_result))
    gaps.append(choi_divergence("re", example2_comb(), example2_marginal()) - example2_result.value)
    worst = max(gaps)
    criterion(8, f"largest C - D over {len(gaps)} instances = {worst:.1e}", worst <= CLOSED)


def channel_divergence_gap(res) -> float:
    return choi_divergence("re", example1_m(), example1_n()) - res.value


def test_criterion_09_sandwich(criterion, sandwich):
    report, elapsed = sandwich
    rows = report["results"]
    floor = max(r["floor_gap"] for r in rows)
    ceiling = max(r["ceiling_gap"] for r in rows)
    ok = report["pass"] and len(rows) == 20 and floor <= CLOSED and ceiling <= 1e-6 and elapsed < 600
    criterion(9, f"20 pairs, max(C - D) = {floor:.1e}, max(D - 8C) = {ceiling:.3f}, {elapsed:.1f} s "
                 "at 8 restarts", ok)


# -- grid oracle for the Example 1 channel pair -------------------------------
# Written against the Kraus operators directly so it shares no code with the
# optimizer: pure inputs on R x A in Schmidt form, parameters scaled to [0, 1].

M_KRAUS = [np.sqrt(0.5) * np.array([[1, 0], [0, 0]]), np.sqrt(0.5) * np.array([[0, 0], [1, 0]]),
           np.array([[0, 0], [0, 1]])]
N_KRAUS = [np.outer(np.eye(2)[i], np.eye(2)[j]) / np.sqrt(2) for i in range(2) for j in range(2)]


def _schmidt_inputs(u: np.ndarray) -> np.ndarray:
    u = np.atleast_2d(u)
    p, theta, phi, chi = u[:, 0], np.pi * u[:, 1], 2 * np.pi * u[:, 2], 2 * np.pi * u[:, 3]
    a0 = np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], -1)
    a1 = np.stack([-np.exp(-1j * phi) * np.sin(theta / 2), np.cos(theta / 2)], -1)
    psi = np.zeros((len(u), 2, 2), complex)
    psi[:, 0, :] = np.sqrt(np.clip(p, 0, 1))[:, None] * a0
    psi[:, 1, :] = (np.exp(1j * chi) * np.sqrt(np.clip(1 - p, 0, 1)))[:, None] * a1
    return psi


def _outputs(psi: np.ndarray, kraus) -> np.ndarray:
    out = 0
    for k in kraus:
        v = np.einsum("ba,nra->nrb", k, psi).reshape(len(psi), 4)
        out = out + np.einsum("ni,nj->nij", v, v.conj())
    return out


def _batched_relative_entropy(rho: np.ndarray, sigma: np.ndarray, cut: float = 1e-10) -> np.ndarray:
    lr = np.clip(np.linalg.eigvalsh(rho), 0, None)
    ls, vs = np.linalg.eigh(sigma)
    h = np.sum(np.where(lr > cut, lr * np.log2(np.where(lr > cut, lr, 1)), 0), -1)
    w = np.real(np.einsum("nik,nij,njk->nk", vs.conj(), rho, vs))
    cross = np.sum(np.where(ls > cut, w * np.log2(np.where(ls > cut, ls, 1)), 0), -1)
    leak = np.sum(np.where(ls <= cut, w, 0), -1)
    return np.where(leak > 1e-9, np.inf, h - cross)


def _oracle_values(u: np.ndarray) -> np.ndarray:
    psi = _schmidt_inputs(u)
    return _batched_relative_entropy(_outputs(psi, M_KRAUS), _outputs(psi, N_KRAUS))


def grid_oracle(resolution: float = 0.05, refine: int = 5) -> float:
    g = np.arange(0, 1 + resolution / 2, resolution)
    mesh = np.stack(np.meshgrid(g, g, g, g, indexing="ij"), -1).reshape(-1, 4)
    vals = np.concatenate([_oracle_values(chunk) for chunk in np.array_split(mesh, 20)])
    ranked = np.where(np.isfinite(vals), vals, -np.inf)
    best = float(np.max(ranked))
    for x0 in mesh[np.argsort(ranked)[-refine:]]:
        r = minimize(lambda u: -_oracle_values(np.clip(u, 0, 1))[0], x0, method="Nelder-Mead",
                     options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 4000})
        best = max(best, float(-r.fun))
    return best


def test_criterion_10_grid_oracle(criterion, channel_result):
    oracle = grid_oracle()
    gap = oracle - channel_result.value
    criterion(10, f"optimizer {channel_result.value:.8f} vs grid oracle {oracle:.8f} (gap {gap:.1e})",
              gap <= 1e-4)


def test_criterion_11_associativity(criterion):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(50):
        a = random_process_comb(rng, 2).choi
        b = random_state(rng, [("O1", 2), ("I2", 2), ("R", 2)])
        c = random_state(rng, [("I1", 2), ("R", 2), ("F", 2)])
        worst = max(worst, max_abs_diff(link(link(a, b), c), link(a, link(b, c))))
    criterion(11, f"max associativity residual over 50 triples = {worst:.1e}", worst <= 1e-8)


def test_criterion_12_markov_under_iqi(criterion):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(20):
        zt = apply_superprocess(random_iqi_superprocess(rng, 2), random_markov_comb(rng, 2))
        worst = max(worst, mutual_information(zt.choi, ["I1", "O1"], ["I2", "O2"]))
    criterion(12, f"max cross-step mutual information over 20 Markov combs = {worst:.1e}", worst <= 1e-8)
