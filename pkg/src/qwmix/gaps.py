"""Eigenvalue-gap functionals, semicircle classical locations and rigidity."""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._io import write_csv, write_json
from .errors import DegenerateSpectrum, InsufficientTrials
from .spectral import DEFAULT_C, degeneracy_tolerance

SEPARATION_FLOOR = 0.1


@dataclass(frozen=True, eq=False)
class GapProfile:
    deltas: np.ndarray = field(repr=False)
    delta_min: float
    sigma1: float
    sigma_r: np.ndarray = field(repr=False)
    sigma_total: float
    spectral_gap: float

    @property
    def n(self):
        return self.deltas.shape[0] + 1


@dataclass(frozen=True, eq=False)
class ClassicalLocations:
    gamma_hat: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    n: int
    p: float


@dataclass(frozen=True, eq=False)
class RigidityReport:
    deviations: np.ndarray = field(repr=False)
    bound: np.ndarray = field(repr=False)
    phi: float
    alphas: np.ndarray = field(repr=False)
    pass_fraction: float
    bulk_pass_fraction: float
    epsilon: float
    offset: float = 0.0


def _eigenvalues(spectrum):
    lam = getattr(spectrum, "eigenvalues", spectrum)
    return np.asarray(lam, dtype=np.float64)


def gap_profile(spectrum, tol=None):
    """All inverse-gap sums of a sorted spectrum.

    ``spectrum`` is a :class:`SpectralDecomposition` or an ascending array.
    Raises :class:`DegenerateSpectrum` if any consecutive gap is at or
    below the degeneracy tolerance.
    """
    lam = _eigenvalues(spectrum)
    n = lam.shape[0]
    if n < 2:
        raise ValueError("gap profile needs at least two eigenvalues")
    deltas = np.diff(lam)
    if np.any(deltas < 0):
        raise ValueError("eigenvalues must be sorted ascending")
    if tol is None:
        tol = degeneracy_tolerance(np.max(np.abs(lam)))
    k = int(np.argmin(deltas))
    if deltas[k] <= tol:
        raise DegenerateSpectrum(
            f"eigenvalues {k} and {k + 1} coincide within {tol:.1e} "
            f"(gap {deltas[k]:.3e}); inverse-gap sums are undefined",
            index=k, gap=float(deltas[k]))
    sigma_r = np.empty(n - 1)
    for r in range(1, n):
        sigma_r[r - 1] = np.sum(1.0 / (lam[r:] - lam[:-r]))
    return GapProfile(deltas=deltas, delta_min=float(deltas[k]),
                      sigma1=float(sigma_r[0]), sigma_r=sigma_r,
                      sigma_total=float(np.sum(sigma_r)),
                      spectral_gap=float(lam[-1] - lam[-2]))


def sigma_pairwise(spectrum):
    """Σ as a plain sum over all pairs i < l, independent of :func:`gap_profile`."""
    lam = _eigenvalues(spectrum)
    d = lam[None, :] - lam[:, None]
    iu = np.triu_indices(lam.shape[0], 1)
    return math.fsum((1.0 / np.abs(d[iu])).tolist())


def semicircle_cdf(x):
    """CDF of the standard semicircle law on [-2, 2]."""
    x = np.clip(np.asarray(x, dtype=np.float64), -2.0, 2.0)
    return (x * np.sqrt(4.0 - x * x) / 2.0 + 2.0 * np.arcsin(x / 2.0) + np.pi) / (2.0 * np.pi)


def semicircle_density(lam, n, p):
    """Bulk density of A(G(n, p)) on the unnormalized scale."""
    lam = np.asarray(lam, dtype=np.float64)
    s2 = n * p * (1.0 - p)
    return np.sqrt(np.clip(4.0 * s2 - lam * lam, 0.0, None)) / (2.0 * np.pi * s2)


def semicircle_quantiles(q, iterations=64):
    """Vectorised bisection of ``semicircle_cdf(x) = q`` on [-2, 2].

    64 halvings of the width-4 bracket reach 2e-19, below one ulp of any
    x in the support.
    """
    q = np.asarray(q, dtype=np.float64)
    lo = np.full(q.shape, -2.0)
    hi = np.full(q.shape, 2.0)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = semicircle_cdf(mid) < q
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def classical_locations(n, p):
    """Semicircle quantiles γ̂_i (i = 1..n) and their Ā-scale images γ_i."""
    if n < 2:
        raise ValueError(f"classical locations need n >= 2, got {n}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"classical locations need 0 < p < 1, got {p}")
    i = np.arange(1, n + 1)
    gh = semicircle_quantiles(i / n)
    gh[-1] = 2.0
    return ClassicalLocations(gamma_hat=gh, gamma=gh * math.sqrt((1.0 - p) / (n * p)),
                              n=int(n), p=float(p))


def classical_separation_floor(n, stride=None):
    """min over i <= n/2, r <= n - 2i of (γ̂_{i+r} − γ̂_i) n^{2/3} i^{1/3} / r.

    Full (i, r) grid up to n = 256, every 8th ``i`` and ``r`` beyond.
    """
    if stride is None:
        stride = 1 if n <= 256 else 8
    gh = semicircle_quantiles(np.arange(0, n + 1) / n)  # index = i
    best = math.inf
    for i in range(1, n // 2 + 1, stride):
        r = np.arange(1, n - 2 * i + 1, stride)
        if r.size == 0:
            continue
        vals = (gh[i + r] - gh[i]) * n ** (2 / 3) * i ** (1 / 3) / r
        best = min(best, float(vals.min()))
    return best


def sparsity_exponent(n, p):
    """φ = log(pn) / (2 log n)."""
    return math.log(p * n) / (2.0 * math.log(n))


def rigidity_alphas(n):
    i = np.arange(1, n)
    return np.maximum(i, n - i)


def rigidity_bound(n, p, epsilon):
    """Per-index allowed |λ_i − γ_i| for i = 1..n-1."""
    phi = sparsity_exponent(n, p)
    alphas = rigidity_alphas(n).astype(np.float64)
    return (n ** epsilon * (n ** (-2 / 3) * alphas ** (-1 / 3) + n ** (-2 * phi))
            / math.sqrt(p * n))


def bulk_indices(n):
    """Zero-based positions of eigenvalues i in [n/4, 3n/4] (1-based i)."""
    i = np.arange(1, n)
    return np.nonzero((i >= n / 4) & (i <= 3 * n / 4))[0]


def rigidity_report(spectrum, locs, epsilon=0.1, offset=0.0):
    """Compare λ_1..λ_{n-1} with γ_1..γ_{n-1}.

    ``offset`` shifts the classical locations (0 reproduces the plain
    semicircle quantiles).  A warning is issued outside
    n^{-1/3} <= p <= 1 - n^{-1/3}.
    """
    lam = _eigenvalues(spectrum)
    n, p = locs.n, locs.p
    if lam.shape[0] != n:
        raise ValueError(f"spectrum has {lam.shape[0]} eigenvalues, locations are for n={n}")
    edge = n ** (-1 / 3)
    if not edge <= p <= 1 - edge:
        warnings.warn(f"p={p} is outside the rigidity window [{edge:.3g}, {1 - edge:.3g}] "
                      f"for n={n}", RuntimeWarning, stacklevel=2)
    dev = np.abs(lam[:-1] - (locs.gamma[:-1] + offset))
    bound = rigidity_bound(n, p, epsilon)
    ok = dev <= bound
    bulk = bulk_indices(n)
    return RigidityReport(deviations=dev, bound=bound, phi=sparsity_exponent(n, p),
                          alphas=rigidity_alphas(n), pass_fraction=float(ok.mean()),
                          bulk_pass_fraction=float(ok[bulk].mean()),
                          epsilon=float(epsilon), offset=float(offset))


def c_star(i, n, p, epsilon):
    """Split point n^ε max{1, n^{2/3} α_i^{1/3} n^{−2φ}} between the two Σ regimes."""
    if not 1 <= i <= n - 1:
        raise ValueError(f"need 1 <= i <= n-1, got i={i}, n={n}")
    phi = sparsity_exponent(n, p)
    alpha = max(i, n - i)
    return n ** epsilon * max(1.0, n ** (2 / 3) * alpha ** (1 / 3) * n ** (-2 * phi))


@dataclass(frozen=True, eq=False)
class GapTailHistogram:
    """Pooled bulk gaps scaled by n^{3/2} sqrt(p), sorted ascending."""

    normalized: np.ndarray = field(repr=False)
    n: int
    p: float
    trials: int

    @property
    def deciles(self):
        return np.quantile(self.normalized, np.linspace(0.1, 0.9, 9))

    @property
    def median(self):
        return float(np.median(self.normalized))

    def fraction_below(self, delta):
        return float(np.searchsorted(self.normalized, delta, side="right") / self.normalized.size)

    def decile_fractions(self):
        """Fraction of pooled gaps at or below each decile threshold."""
        return [self.fraction_below(d) for d in self.deciles]

    def tail_limit(self, delta, C=DEFAULT_C):
        """C δ log n."""
        return C * delta * math.log(self.n)


def gap_tail_histogram(profiles, n, p, min_trials=20):
    profiles = list(profiles)
    if len(profiles) < min_trials:
        raise InsufficientTrials(f"need at least {min_trials} trials, got {len(profiles)}")
    bulk = bulk_indices(n)
    bulk = bulk[bulk < n - 1]
    scale = n ** 1.5 * math.sqrt(p)
    pooled = []
    for prof in profiles:
        if prof.n != n:
            raise ValueError(f"profile has n={prof.n}, expected {n}")
        pooled.append(prof.deltas[bulk] * scale)
    values = np.sort(np.concatenate(pooled))
    return GapTailHistogram(normalized=values, n=int(n), p=float(p), trials=len(profiles))


def write_gap_csv(profile, path, locs=None, rigidity=None):
    n = profile.n
    rows = []
    for k in range(n - 1):
        gamma = locs.gamma[k] if locs is not None else None
        dev = rigidity.deviations[k] if rigidity is not None else None
        bd = rigidity.bound[k] if rigidity is not None else None
        rows.append((k + 1, profile.deltas[k], gamma, dev, bd))
    write_csv(path, ["i", "delta_i", "gamma_i", "deviation", "bound_eq8"], rows)


def sigma_summary(profile, n, p, seed):
    phi = sparsity_exponent(n, p) if 0 < p and n > 1 else None
    return {"n": n, "p": p, "seed": seed, "sigma1": profile.sigma1,
            "sigma_total": profile.sigma_total, "delta_min": profile.delta_min,
            "spectral_gap": profile.spectral_gap, "phi": phi}


def write_sigma_json(profile, path, n, p, seed):
    write_json(path, sigma_summary(profile, n, p, seed))
