"""Seeded Monte-Carlo ensembles, bound-satisfaction fractions and scaling fits."""

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np
import scipy.sparse.linalg
import scipy.stats

from . import gaps, graphs, spectral, walk
from ._io import dumps_json, write_csv
from .config import RunConfig
from .errors import DegenerateSpectrum, InsufficientData, QwmixError

SIGMA_RTOL = 1e-9
RIGIDITY_PASS = 0.99
GRID_STEP_MAX = 10 ** (1 / walk.MIN_PER_DECADE)

# quantity -> (predicted slope, tolerance)
DEFAULT_FITS = {
    "sigma1": (2.5, 0.3),
    "sigma_total": (2.5, 0.4),
    "t_mix_empirical": (1.5, 0.3),
    "inv_delta_min": (2.5, 0.4),
}


@dataclass(frozen=True)
class TrialResult:
    n: int
    p: float
    seed: int
    edge_count: int = 0
    sigma1: float | None = None
    sigma_total: float | None = None
    sigma_pairwise: float | None = None
    delta_min: float | None = None
    spectral_gap: float | None = None
    lambda_top: float | None = None
    lambda_second: float | None = None
    overlap_top_uniform: float | None = None
    max_sup_norm: float | None = None
    centered_norm: float | None = None
    rigidity_pass_fraction: float | None = None
    rigidity_bulk_pass_fraction: float | None = None
    rigidity_in_window: bool | None = None
    t_bound: float | None = None
    t_mix_empirical: float | None = None
    max_limiting_prob: float | None = None
    residual_max: float | None = None
    ortho_defect: float | None = None
    certified: bool | None = None
    degenerate: bool = False
    sigma_r_monotone: bool | None = None
    sigma_bounds_ok: bool | None = None
    tv_checked: int = 0
    tv_evaluations: int = 0
    tv_dominance_violations: int = 0
    error: str | None = None

    @property
    def inv_delta_min(self):
        return None if self.delta_min is None else 1.0 / self.delta_min

    @property
    def sigma_rel_error(self):
        if self.sigma_total is None or self.sigma_pairwise is None:
            return None
        return abs(self.sigma_total - self.sigma_pairwise) / self.sigma_pairwise

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**{f.name: data[f.name] for f in fields(cls) if f.name in data})


def _centered_norm(norm):
    x = graphs.centered_matrix(norm)
    if norm.n <= 64 or not np.any(x):
        return float(np.max(np.abs(np.linalg.eigvalsh(x))))
    v0 = np.cos(np.arange(norm.n) + 0.5)  # fixed start keeps ARPACK deterministic
    vals = scipy.sparse.linalg.eigsh(x, k=1, which="LM", v0=v0,
                                     return_eigenvectors=False, tol=1e-10)
    return float(abs(vals[0]))


def _initial_spec(decomp, start):
    if start == "uniform":
        return walk.WalkSpec.uniform(decomp)
    node = int(start)
    if node >= decomp.n:
        raise ValueError(f"start node {node} out of range for n={decomp.n}")
    return walk.WalkSpec.from_node(decomp, node)


def run_trial(n, p, seed, epsilon=walk.DEFAULT_EPSILON, config=None):
    """Sample → normalize → diagonalise → gap profile → rigidity → mixing."""
    config = config or RunConfig()
    out = {"n": int(n), "p": float(p), "seed": int(seed)}
    sample = graphs.sample_gnp(n, p, seed)
    out["edge_count"] = sample.edge_count
    norm = graphs.normalize(sample, rate=config.rate)
    decomp = spectral.eigendecompose(norm.matrix, check=False)
    out.update(residual_max=decomp.residual_max, ortho_defect=decomp.ortho_defect,
               certified=bool(decomp.certified()))
    stats = spectral.eigenvector_stats(decomp)
    lam = decomp.eigenvalues
    out.update(lambda_top=float(lam[-1]), overlap_top_uniform=stats.overlap_top_uniform,
               max_sup_norm=float(stats.sup_norms.max()))
    if n > 1:
        out.update(lambda_second=float(lam[-2]), spectral_gap=stats.spectral_gap)
        out["centered_norm"] = _centered_norm(norm)

        try:
            prof = gaps.gap_profile(decomp)
        except DegenerateSpectrum:
            out["degenerate"] = True
        else:
            pairwise = gaps.sigma_pairwise(decomp)
            sr = prof.sigma_r
            out.update(sigma1=prof.sigma1, sigma_total=prof.sigma_total,
                       sigma_pairwise=pairwise, delta_min=prof.delta_min,
                       sigma_r_monotone=bool(np.all(sr[1:] <= sr[:-1] * (1 + 1e-12))),
                       sigma_bounds_ok=bool(1.0 / prof.delta_min <= prof.sigma_total
                                            <= n * n / prof.delta_min))

        if 0.0 < p < 1.0:
            locs = gaps.classical_locations(n, p)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                rig = gaps.rigidity_report(decomp, locs, config.rigidity_epsilon)
            edge = n ** (-1 / 3)
            out.update(rigidity_pass_fraction=rig.pass_fraction,
                       rigidity_bulk_pass_fraction=rig.bulk_pass_fraction,
                       rigidity_in_window=bool(edge <= p <= 1 - edge))

    spec = _initial_spec(decomp, config.start)
    t_bound = walk.mixing_time_bound(spec, epsilon)
    out.update(t_bound=t_bound,
               max_limiting_prob=float(walk.limiting_distribution(spec).max()))
    if config.mixing:
        grid = walk.default_grid(t_bound, config.t_min, config.per_decade)
        scan = walk.scan_mixing_time(spec, epsilon, grid)
        dom = walk.dominance_check(spec, grid, scan.evaluated)
        out.update(t_mix_empirical=scan.t_mix, tv_checked=dom.points,
                   tv_evaluations=scan.evaluations + dom.evaluations,
                   tv_dominance_violations=dom.violations)
    return TrialResult(**out)


def _safe_trial(args):
    n, p, seed, epsilon, config = args
    try:
        return run_trial(n, p, seed, epsilon, config)
    except (QwmixError, ValueError, np.linalg.LinAlgError) as exc:
        return TrialResult(n=int(n), p=float(p), seed=int(seed),
                           error=f"{type(exc).__name__}: {exc}")


def _run_many(jobs, tasks):
    if jobs <= 1 or len(tasks) <= 1:
        results = [_safe_trial(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_safe_trial, tasks))
    return sorted(results, key=lambda r: (r.p, r.n, r.seed))


@dataclass
class ScalingFit:
    quantity: str
    points: list
    slope: float
    intercept: float
    r_squared: float
    predicted_slope: float
    tolerance: float

    @property
    def passed(self):
        return abs(self.slope - self.predicted_slope) <= self.tolerance

    def to_dict(self):
        d = asdict(self)
        d["points"] = [list(pt) for pt in self.points]
        d["passed"] = self.passed
        return d


@dataclass
class EnsembleReport:
    config: dict
    trials: list
    fits: list
    fractions: dict

    def to_dict(self):
        return {"config": self.config,
                "trials": [t.to_dict() for t in self.trials],
                "fits": [f.to_dict() for f in self.fits],
                "fractions": self.fractions}

    def dumps(self):
        return dumps_json(self.to_dict()) + "\n"

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    def write_trials_csv(self, path):
        names = [f.name for f in fields(TrialResult)]
        write_csv(path, names, [[getattr(t, k) for k in names] for t in self.trials])

    @classmethod
    def from_dict(cls, data):
        trials = [TrialResult.from_dict(t) for t in data["trials"]]
        fits = [ScalingFit(**{k: v for k, v in f.items() if k != "passed"})
                for f in data.get("fits", [])]
        return cls(config=data.get("config", {}), trials=trials, fits=fits,
                   fractions=data.get("fractions", {}))

    def select(self, p=None, n=None):
        return [t for t in self.trials
                if (p is None or t.p == p) and (n is None or t.n == n)]


def _value(trial, quantity):
    v = getattr(trial, quantity)
    return None if v is None else float(v)


def fit_scaling(report, quantity, predicted_slope, tolerance=0.3, p=None,
                min_sizes=4, min_seeds=10):
    """Least-squares slope of log(median quantity) against log n."""
    trials = report.trials if hasattr(report, "trials") else list(report)
    by_n = {}
    for t in trials:
        if p is not None and t.p != p:
            continue
        v = _value(t, quantity)
        if v is None or not math.isfinite(v) or v <= 0:
            continue
        by_n.setdefault(t.n, []).append(v)
    sizes = sorted(k for k, vals in by_n.items() if len(vals) >= min_seeds)
    if len(sizes) < min_sizes:
        raise InsufficientData(
            f"{quantity}: need >= {min_sizes} sizes with >= {min_seeds} seeds each, "
            f"got {[(k, len(by_n[k])) for k in sorted(by_n)]}")
    points = [(k, float(np.median(by_n[k]))) for k in sizes]
    x = np.log([k for k, _ in points])
    y = np.log([v for _, v in points])
    res = scipy.stats.linregress(x, y)
    return ScalingFit(quantity=quantity, points=points, slope=float(res.slope),
                      intercept=float(res.intercept), r_squared=float(res.rvalue ** 2),
                      predicted_slope=float(predicted_slope), tolerance=float(tolerance))


def _checks(trial, C):
    """Per-trial pass/fail for every bound; None where not applicable."""
    n, p = trial.n, trial.p
    ok = {}
    ok["simple_spectrum"] = None if trial.lambda_second is None else not trial.degenerate
    ok["certificates"] = trial.certified
    if trial.lambda_top is not None and 0 < p and n > 1:
        lo, hi = spectral.top_eigenvalue_window(n, p)
        ok["top_eigenvalue_window"] = lo <= trial.lambda_top <= hi
        ok["second_eigenvalue"] = trial.lambda_second <= spectral.second_eigenvalue_limit(n, p, C)
        ok["centered_norm"] = (None if trial.centered_norm is None else
                               trial.centered_norm <= spectral.centered_norm_limit(n, p, C))
        ok["overlap_top_uniform"] = trial.overlap_top_uniform >= 1 - 2 / math.sqrt(n * p)
        ok["delocalization"] = trial.max_sup_norm <= spectral.delocalization_limit(n)
    if trial.max_limiting_prob is not None and n > 1:
        ok["limiting_near_uniform"] = trial.max_limiting_prob <= math.log(n) ** 2 / n
    if trial.delta_min is not None and p > 0:
        ok["min_gap"] = trial.delta_min * n ** 2.5 * math.sqrt(p) >= 1 / math.log(n) ** 2
        ok["sigma_consistency"] = trial.sigma_rel_error <= SIGMA_RTOL
        ok["sigma_r_monotone"] = trial.sigma_r_monotone
        ok["sigma_bounds"] = trial.sigma_bounds_ok
    if trial.rigidity_bulk_pass_fraction is not None:
        ok["rigidity"] = trial.rigidity_bulk_pass_fraction >= RIGIDITY_PASS
    if trial.tv_checked:
        ok["tv_dominance"] = trial.tv_dominance_violations == 0
        ok["mixed_within_grid"] = trial.t_mix_empirical is not None
        # on the grid T_mix can sit at most one step above T_bound
        ok["t_mix_within_bound"] = (trial.t_mix_empirical is not None and
                                    trial.t_mix_empirical <= trial.t_bound * GRID_STEP_MAX)
    return ok


def bound_fractions(trials, C=spectral.DEFAULT_C):
    """Fraction of applicable trials passing each check, keyed by check name."""
    tallies = {}
    for t in trials:
        if t.error:
            continue
        for name, passed in _checks(t, C).items():
            if passed is None:
                continue
            hit, total = tallies.get(name, (0, 0))
            tallies[name] = (hit + bool(passed), total + 1)
    return {k: hit / total for k, (hit, total) in sorted(tallies.items())}


def default_fits(trials, p):
    out = []
    for quantity, (slope, tol) in DEFAULT_FITS.items():
        try:
            out.append(fit_scaling(trials, quantity, slope, tol, p=p))
        except InsufficientData:
            pass
    return out


def _report_config(config):
    """Config as embedded in reports: execution-only settings are dropped so
    the report depends on nothing but the experiment itself."""
    d = config.to_dict()
    d.pop("output", None)
    d["ensemble"].pop("jobs", None)
    return d


def run_ensemble(n_list, p, seed_count, epsilon=walk.DEFAULT_EPSILON, config=None,
                 jobs=None):
    """Seeds 0..seed_count-1 at every n, merged in (n, seed) order."""
    config = config or RunConfig()
    n_list = list(n_list)
    if n_list != sorted(n_list):
        raise ValueError(f"n_list must be ascending, got {n_list}")
    if seed_count < 1:
        raise ValueError(f"seed_count must be >= 1, got {seed_count}")
    jobs = config.jobs if jobs is None else jobs
    tasks = [(n, p, s, epsilon, config) for n in n_list for s in range(seed_count)]
    trials = _run_many(jobs, tasks)
    return EnsembleReport(config=_report_config(config), trials=trials,
                          fits=default_fits(trials, p),
                          fractions=bound_fractions(trials, config.C))


def run_desk(config):
    """Scaling ensemble at ``config.p`` plus the spot-check densities."""
    tasks = [(n, config.p, s, config.epsilon, config)
             for n in config.n_list for s in range(config.seed_count)]
    tasks += [(config.spot_n, q, s, config.epsilon, config)
              for q in config.spot_p if q != config.p
              for s in range(config.spot_seed_count)]
    trials = _run_many(config.jobs, tasks)
    return EnsembleReport(config=_report_config(config), trials=trials,
                          fits=default_fits(trials, config.p),
                          fractions=bound_fractions(trials, config.C))


def refresh(report, C=None):
    """Recompute fits and fractions from the stored trials."""
    cfg = RunConfig.from_dict(report.config) if report.config else RunConfig()
    C = cfg.C if C is None else C
    return EnsembleReport(config=report.config, trials=report.trials,
                          fits=default_fits(report.trials, cfg.p),
                          fractions=bound_fractions(report.trials, C))


def top_eigenvalue_zscores(trials):
    """Standardised λ_n using mean 1 + (1-p)/(np) and sd sqrt(2(1-p)/p)/n."""
    z = []
    for t in trials:
        if t.lambda_top is None or not 0 < t.p < 1:
            continue
        n, p = t.n, t.p
        mean = 1 + (1 - p) / (n * p)
        sd = math.sqrt(2 * (1 - p) / p) / n
        z.append((t.lambda_top - mean) / sd)
    return np.array(z)
