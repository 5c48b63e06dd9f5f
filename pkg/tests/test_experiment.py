import json
import random

import numpy as np
import pytest

from qwmix import experiment
from qwmix.config import RunConfig
from qwmix.errors import InsufficientData
from qwmix.experiment import TrialResult

SMALL = RunConfig(per_decade=64)


def test_k2_trial():
    r = experiment.run_trial(2, 1.0, 0, 0.1)
    assert r.sigma1 == 1.0
    assert r.t_bound == pytest.approx(20, abs=1e-12)
    assert r.t_mix_empirical == pytest.approx(8.4, abs=0.1)
    assert r.tv_dominance_violations == 0 and r.tv_checked > 0
    assert not r.degenerate and r.error is None


def test_k3_trial_records_degeneracy():
    r = experiment.run_trial(3, 1.0, 0, 0.1)
    assert r.degenerate and r.sigma_total is None
    assert r.max_limiting_prob == pytest.approx(5 / 9, abs=1e-14)


def test_trial_is_deterministic():
    a = experiment.run_trial(256, 0.5, 1, 0.1)
    b = experiment.run_trial(256, 0.5, 1, 0.1)
    assert a == b
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())


def test_trial_fields_finite():
    r = experiment.run_trial(64, 0.5, 2, 0.1, SMALL)
    for name in ("sigma1", "sigma_total", "delta_min", "spectral_gap", "lambda_top",
                 "lambda_second", "overlap_top_uniform", "max_sup_norm",
                 "rigidity_pass_fraction", "t_bound", "t_mix_empirical", "max_limiting_prob"):
        assert np.isfinite(getattr(r, name)), name
    assert TrialResult.from_dict(r.to_dict()) == r


def test_failed_trial_is_recorded():
    rep = experiment.run_ensemble([4, 8], 0.0, 2, 0.1, SMALL)
    assert len(rep.trials) == 4
    assert all(t.error and "p > 0" in t.error for t in rep.trials)


def test_rigidity_n1024_seed3():
    r = experiment.run_trial(1024, 0.5, 3, 0.1, RunConfig(mixing=False))
    assert r.rigidity_pass_fraction >= 0.99


def test_single_k2_ensemble():
    rep = experiment.run_ensemble([2], 1.0, 1, 0.1)
    assert len(rep.trials) == 1 and rep.trials[0].n == 2
    assert rep.fits == []


def test_ensemble_order_and_reconstruction():
    rep = experiment.run_ensemble([16, 32], 0.5, 3, 0.1, SMALL)
    keys = [(t.n, t.seed) for t in rep.trials]
    assert keys == [(16, 0), (16, 1), (16, 2), (32, 0), (32, 1), (32, 2)]
    t = rep.trials[4]
    assert experiment.run_trial(t.n, t.p, t.seed, 0.1, SMALL) == t


def test_execution_order_does_not_matter():
    tasks = [(n, 0.5, s, 0.1, SMALL) for n in (12, 20) for s in range(3)]
    shuffled = tasks[:]
    random.Random(4).shuffle(shuffled)
    assert experiment._run_many(1, tasks) == experiment._run_many(1, shuffled)


def test_parallel_matches_serial():
    a = experiment.run_ensemble([16, 24], 0.5, 2, 0.1, SMALL, jobs=1)
    b = experiment.run_ensemble([16, 24], 0.5, 2, 0.1, SMALL, jobs=2)
    assert a.dumps() == b.dumps()


def test_ensemble_preconditions():
    with pytest.raises(ValueError):
        experiment.run_ensemble([32, 16], 0.5, 1)
    with pytest.raises(ValueError):
        experiment.run_ensemble([16], 0.5, 0)


def _synthetic(values):
    return [TrialResult(n=n, p=0.5, seed=s, sigma1=values(n, s))
            for n in (64, 128, 256, 512) for s in range(10)]


def test_fit_exact_power_law():
    trials = _synthetic(lambda n, s: float(n) ** 2)
    fit = experiment.fit_scaling(trials, "sigma1", 2.0, 0.1)
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.passed
    assert [pt[0] for pt in fit.points] == [64, 128, 256, 512]


def test_fit_uses_median():
    # one wild seed per size must not move the fit
    trials = _synthetic(lambda n, s: float(n) ** 1.5 * (1e6 if s == 0 else 1.0))
    fit = experiment.fit_scaling(trials, "sigma1", 1.5, 0.1)
    assert fit.slope == pytest.approx(1.5, abs=1e-12)


def test_fit_insufficient():
    trials = _synthetic(lambda n, s: float(n))
    with pytest.raises(InsufficientData):
        experiment.fit_scaling([t for t in trials if t.n != 64], "sigma1", 1.0)
    with pytest.raises(InsufficientData):
        experiment.fit_scaling([t for t in trials if t.seed < 9], "sigma1", 1.0)


def test_fractions_monotone_in_constant():
    rep = experiment.run_ensemble([32, 64], 0.5, 4, 0.1, RunConfig(mixing=False))
    fr = {C: experiment.bound_fractions(rep.trials, C) for C in (5, 10, 20)}
    for name in fr[10]:
        assert fr[5][name] <= fr[10][name] <= fr[20][name], name


def test_report_round_trip(tmp_path):
    rep = experiment.run_ensemble([16, 24, 32, 40], 0.5, 10, 0.1, RunConfig(mixing=False))
    assert {f.quantity for f in rep.fits} == {"sigma1", "sigma_total", "inv_delta_min"}
    rep.write(tmp_path / "r.json")
    data = json.loads((tmp_path / "r.json").read_text())
    assert set(data) == {"config", "trials", "fits", "fractions"}
    back = experiment.EnsembleReport.from_dict(data)
    assert back.dumps() == rep.dumps()
    assert experiment.refresh(back).dumps() == rep.dumps()
    rep.write_trials_csv(tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert len(lines) == 41 and lines[0].startswith("n,p,seed,")


def test_zscores():
    rep = experiment.run_ensemble([128], 0.5, 5, 0.1, RunConfig(mixing=False))
    z = experiment.top_eigenvalue_zscores(rep.trials)
    assert z.shape == (5,) and np.all(np.abs(z) < 6)
