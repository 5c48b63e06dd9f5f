"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line that pytest prints in the
"acceptance criteria" summary section.  The desk ensemble (criteria 4, 5,
9, 10, 12) is run through the command line exactly as a user would.
"""

import functools
import json
import math
import time

import numpy as np
import pytest

from qwmix import cli, experiment, gaps, graphs, quadrature, spectral, walk
from qwmix.config import RunConfig
from qwmix.errors import DegenerateSpectrum
from qwmix.experiment import EnsembleReport

from conftest import ACCEPTANCE, decompose

EPS = np.finfo(float).eps


def criterion(num, title):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except pytest.skip.Exception:
                raise
            except BaseException as exc:
                msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
                ACCEPTANCE[num] = (title, False, msg[:200])
                raise
            ACCEPTANCE[num] = (title, True, detail or "")
        return wrapper
    return deco


def check(results):
    """Assert every named sub-check; the message lists the failing ones."""
    failed = [name for name, ok in results.items() if not ok]
    assert not failed, "failed: " + ", ".join(failed)


# ---------------------------------------------------------------- small exact cases

@criterion(1, "K2 exactness")
def test_c01_k2_exactness():
    t0 = time.perf_counter()
    d = decompose(2, 1.0)
    spec = walk.WalkSpec.from_node(d, 0)
    lim = walk.limiting_distribution(spec)
    p_pi = walk.time_averaged_distribution(spec, math.pi)
    t_bound = walk.mixing_time_bound(spec, 0.1)
    d20 = walk.tv_distance(spec, 20.0)
    elapsed = time.perf_counter() - t0
    check({
        "eigenvalues": np.max(np.abs(d.eigenvalues - [-0.5, 0.5])) <= 1e-12,
        "limiting": np.max(np.abs(lim - 0.5)) <= 1e-12,
        "P1(pi)": abs(p_pi[0] - 0.5) <= 1e-12,
        "T_bound": abs(t_bound - 20) <= 1e-12,
        "D(20) value": abs(d20 - abs(math.sin(20)) / 20) <= 1e-9,
        "D(20)<=0.1": d20 <= 0.1,
        "runtime": elapsed < 1.0,
    })
    return f"T_bound={t_bound:.15g} D(20)={d20:.6f} ({elapsed:.3f}s)"


@criterion(2, "degenerate limiting distribution vs quadrature at T=1e5")
def test_c02_degenerate_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    k3 = None
    for n in (3, 5, 10):
        d = decompose(n, 1.0)
        spec = walk.WalkSpec.from_node(d, 0)
        lim = walk.limiting_distribution(spec)
        psi0 = np.zeros(n)
        psi0[0] = 1.0
        avg = quadrature.time_average_panels(graphs.normalize(graphs.sample_gnp(n, 1.0, 0)).matrix,
                                             psi0, 1e5)
        worst = max(worst, float(np.max(np.abs(lim - avg))))
        if n == 3:
            k3 = lim
    elapsed = time.perf_counter() - t0
    check({
        "agreement": worst <= 1e-4,
        "K3 values": np.max(np.abs(k3 - [5 / 9, 2 / 9, 2 / 9])) <= 1e-12,
        "runtime": elapsed < 10,
    })
    return f"max |P(inf) - avg| = {worst:.2e} ({elapsed:.1f}s)"


@criterion(3, "closed form vs adaptive quadrature, n=64")
def test_c03_closed_form_vs_quadrature():
    t0 = time.perf_counter()
    gen = np.random.default_rng(2024)
    worst = 0.0
    for k in range(10):
        seed = int(gen.integers(0, 2**63))
        norm = graphs.normalize(graphs.sample_gnp(64, 0.5, seed))
        d = spectral.eigendecompose(norm.matrix)
        if k % 2 == 0:
            psi = np.zeros(64)
            psi[int(gen.integers(0, 64))] = 1.0
        else:
            psi = gen.normal(size=64) + 1j * gen.normal(size=64)
            psi /= np.linalg.norm(psi)
        spec = walk.WalkSpec.from_state(d, psi)
        for T in (1.0, 10.0, 100.0):
            ref, _ = quadrature.time_average_adaptive(norm.matrix, psi, T)
            worst = max(worst, float(np.max(np.abs(walk.time_averaged_distribution(spec, T) - ref))))
    elapsed = time.perf_counter() - t0
    check({"agreement": worst <= 1e-8, "runtime": elapsed < 60})
    return f"max per-entry error {worst:.2e} ({elapsed:.1f}s)"


# ---------------------------------------------------------------- desk ensemble

@pytest.fixture(scope="module")
def desk(tmp_path_factory):
    out = tmp_path_factory.mktemp("desk_a")
    t0 = time.perf_counter()
    code = cli.main(["ensemble", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    assert code == 0
    report = EnsembleReport.from_dict(json.loads((out / "report.json").read_text()))
    return out, report, elapsed


@pytest.mark.slow
@criterion(4, "bound dominance on every grid point of the desk ensemble")
def test_c04_bound_dominance(desk):
    _, report, _ = desk
    trials = report.trials
    violations = sum(t.tv_dominance_violations for t in trials)
    points = sum(t.tv_checked for t in trials)
    check({
        "no failed trials": all(t.error is None for t in trials),
        "every trial checked": all(t.tv_checked > 0 for t in trials),
        "zero violations": violations == 0,
    })
    evals = sum(t.tv_evaluations for t in trials)
    return f"{points} grid points over {len(trials)} trials, {violations} violations ({evals} evaluations)"


@pytest.mark.slow
@criterion(5, "spectral certificates in the desk ensemble")
def test_c05_certificates(desk):
    _, report, _ = desk
    worst_res = worst_orth = 0.0
    ok = True
    for t in report.trials:
        norm = abs(t.lambda_top)  # Perron eigenvalue is the spectral norm here
        res_lim = 64 * t.n * EPS * norm
        orth_lim = 64 * t.n * EPS
        ok &= t.residual_max <= res_lim and t.ortho_defect <= orth_lim and t.certified
        worst_res = max(worst_res, t.residual_max / res_lim)
        worst_orth = max(worst_orth, t.ortho_defect / orth_lim)
    check({"all certified": ok})
    return f"worst residual/limit {worst_res:.3f}, worst ortho/limit {worst_orth:.3f}"


# ---------------------------------------------------------------- concentration

@pytest.mark.slow
@criterion(6, "concentration checks at n=2000, p=0.5")
def test_c06_concentration():
    t0 = time.perf_counter()
    n, p = 2000, 0.5
    cfg = RunConfig(mixing=False)
    trials = [experiment.run_trial(n, p, s, 0.1, cfg) for s in range(20)]
    lo, hi = spectral.top_eigenvalue_window(n, p)
    counts = {
        "lambda_n window": sum(lo <= t.lambda_top <= hi for t in trials),
        "lambda_n-1": sum(t.lambda_second <= spectral.second_eigenvalue_limit(n, p) for t in trials),
        "overlap": sum(t.overlap_top_uniform >= 1 - 2 / math.sqrt(n * p) for t in trials),
        "sup-norm": sum(t.max_sup_norm <= math.log(n) ** 2 / math.sqrt(n) for t in trials),
        "limiting max": sum(t.max_limiting_prob <= math.log(n) ** 2 / n for t in trials),
    }
    elapsed = time.perf_counter() - t0
    results = {k: v >= 19 for k, v in counts.items()}
    results["runtime"] = elapsed < 600
    check(results)
    return " ".join(f"{k}={v}/20" for k, v in counts.items()) + f" ({elapsed:.0f}s)"


@pytest.mark.slow
@criterion(7, "simple spectrum and minimum gap at n=1024")
def test_c07_simple_spectrum_min_gap():
    n = 1024
    simple = total = gap_ok = 0
    for p in (0.3, 0.5, 0.7):
        for s in range(20):
            d = decompose(n, p, s)
            total += 1
            try:
                prof = gaps.gap_profile(d)
            except DegenerateSpectrum:
                continue
            simple += 1
            gap_ok += prof.delta_min * n ** 2.5 * math.sqrt(p) >= 1 / math.log(n) ** 2
    check({"all simple": simple == total, "min gap >= 90%": gap_ok >= 0.9 * total})
    return f"simple {simple}/{total}, min-gap bound {gap_ok}/{total}"


@pytest.mark.slow
@criterion(8, "rigidity at n=2048, p=0.5 and classical locations")
def test_c08_rigidity():
    n, p = 2048, 0.5
    locs = gaps.classical_locations(n, p)
    gh = locs.gamma_hat
    i = np.arange(1, n + 1)
    cdf_err = float(np.max(np.abs(gaps.semicircle_cdf(gh) - i / n)))
    sym_err = float(np.max(np.abs(gh[: n - 1] + gh[n - 2 :: -1])))
    fractions = []
    for s in range(10):
        rep = gaps.rigidity_report(decompose(n, p, s), locs, epsilon=0.1)
        fractions.append(rep.bulk_pass_fraction)
    check({
        "bulk pass >= 0.99 every trial": min(fractions) >= 0.99,
        "cdf round trip": cdf_err <= 1e-12,
        "symmetry": sym_err <= 1e-10,
    })
    return f"bulk pass min {min(fractions):.3f}, cdf err {cdf_err:.1e}, symmetry {sym_err:.1e}"


# ---------------------------------------------------------------- scaling

@pytest.mark.slow
@criterion(9, "scaling slopes at p=0.5")
def test_c09_scaling_slopes(desk):
    _, report, elapsed = desk
    expected = {"sigma1": (2.5, 0.3), "sigma_total": (2.5, 0.4),
                "t_mix_empirical": (1.5, 0.3), "inv_delta_min": (2.5, 0.4)}
    fits = {q: experiment.fit_scaling(report, q, s, tol, p=0.5) for q, (s, tol) in expected.items()}
    results = {q: f.passed for q, f in fits.items()}
    results["runtime < 30 min"] = elapsed < 1800
    detail = " ".join(f"{q}={f.slope:.3f}" for q, f in fits.items()) + f" ({elapsed / 60:.1f} min)"
    check(results)
    return detail


@pytest.mark.slow
@criterion(10, "gap-sum consistency in the desk ensemble")
def test_c10_gap_sum_consistency(desk):
    _, report, _ = desk
    trials = report.trials
    worst = max(t.sigma_rel_error for t in trials)
    check({
        "all profiles present": all(t.sigma_total is not None for t in trials),
        "two paths agree": worst <= 1e-9,
        "sigma_r non-increasing": all(t.sigma_r_monotone for t in trials),
        "1/dmin <= sigma <= n^2/dmin": all(t.sigma_bounds_ok for t in trials),
    })
    return f"{len(trials)} trials, worst relative difference {worst:.1e}"


@pytest.mark.slow
@criterion(11, "gap tail histogram at n=1024, p=0.5")
def test_c11_tail_histogram():
    n, p = 1024, 0.5
    profiles = [gaps.gap_profile(decompose(n, p, s)) for s in range(50)]
    hist = gaps.gap_tail_histogram(profiles, n, p)
    parts = {}
    for delta in (0.003, 0.01, 0.03):
        parts[delta] = (hist.fraction_below(delta), hist.tail_limit(delta, C=10))
    check({f"delta={d}": f <= lim for d, (f, lim) in parts.items()})
    return " ".join(f"P(<{d})={f:.4f}<={lim:.3f}" for d, (f, lim) in parts.items())


# ---------------------------------------------------------------- reproducibility

@pytest.mark.slow
@criterion(12, "desk ensemble reproduces byte-identical reports")
def test_c12_reproducibility(desk, tmp_path):
    out_a, _, _ = desk
    out_b = tmp_path / "desk_b"
    assert cli.main(["ensemble", "--out", str(out_b)]) == 0
    same = {name: (out_a / name).read_bytes() == (out_b / name).read_bytes()
            for name in ("report.json", "trials.csv", "fits.csv")}
    check(same)
    return f"{len((out_a / 'report.json').read_bytes())} bytes identical"
