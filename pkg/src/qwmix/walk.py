"""Closed-form continuous-time quantum-walk mixing on a diagonalised graph.

With Ā = Σ λ_i |v_i⟩⟨v_i| and |ψ₀⟩ = Σ c_i |v_i⟩, the time-averaged
probability at node f is

    P_f(T) = Σ_{i,l} V_fi c_i conj(c_l) V_fl K(λ_i − λ_l, T),
    K(x, T) = (1 − exp(−i x T)) / (i x T),   K(0, T) = 1.

Pairs inside one degeneracy class give the limiting distribution; the
remaining pairs give the transient correction, evaluated through its real
form sin(xT)/(xT) and 2 sin²(xT/2)/(xT) to avoid cancellation.
"""

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg.blas

from ._io import write_csv, write_json
from .errors import GridTooCoarse

DEFAULT_EPSILON = 0.1
DEFAULT_PER_DECADE = 256
MIN_PER_DECADE = 64
DEFAULT_T_MIN = 0.1
NORM_TOL = 1e-12
DOMINANCE_ATOL = 1e-12
NEGATIVE_TOL = 1e-12


def degenerate_classes(eigenvalues, tol):
    """Label ascending eigenvalues so that chains with gaps <= tol share a label."""
    lam = np.asarray(eigenvalues)
    if lam.size == 0:
        return np.zeros(0, dtype=int)
    breaks = np.diff(lam) > tol
    return np.concatenate([[0], np.cumsum(breaks)])


@dataclass(frozen=True, eq=False)
class WalkSpec:
    decomp: object
    initial_amplitudes: np.ndarray = field(repr=False)
    initial_label: str = ""

    def __post_init__(self):
        c = np.asarray(self.initial_amplitudes)
        if c.shape != (self.decomp.n,):
            raise ValueError(f"need {self.decomp.n} amplitudes, got shape {c.shape}")
        norm = float(np.linalg.norm(c))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"initial state must have unit norm, got {norm!r}")

    @classmethod
    def from_state(cls, decomp, psi0, label="state"):
        psi0 = np.asarray(psi0)
        c = decomp.eigenvectors.T @ psi0
        return cls(decomp, c, label)

    @classmethod
    def from_node(cls, decomp, node=0):
        n = decomp.n
        if not 0 <= node < n:
            raise ValueError(f"node {node} out of range for n={n}")
        return cls(decomp, decomp.eigenvectors[node, :].copy(), f"node {node}")

    @classmethod
    def uniform(cls, decomp):
        n = decomp.n
        return cls.from_state(decomp, np.full(n, 1.0 / math.sqrt(n)), "uniform")

    @property
    def n(self):
        return self.decomp.n

    @property
    def is_real(self):
        return not np.iscomplexobj(self.initial_amplitudes) or \
            not np.any(np.imag(self.initial_amplitudes))

    @cached_property
    def classes(self):
        return degenerate_classes(self.decomp.eigenvalues, self.decomp.degeneracy_tol)

    @cached_property
    def _pair_data(self):
        lam = self.decomp.eigenvalues
        x = lam[:, None] - lam[None, :]
        same = self.classes[:, None] == self.classes[None, :]
        with np.errstate(divide="ignore"):
            inv = np.where(same, 0.0, 1.0 / np.where(same, 1.0, x))
        return x, inv

    @cached_property
    def _lower_pairs(self):
        """Strictly lower pairs (i > l) in distinct classes, packed.

        Returns ``(flat, x, inv)`` where ``flat`` indexes a column-major n×n
        array.
        """
        lam = self.decomp.eigenvalues
        n = lam.shape[0]
        i, l = np.tril_indices(n, -1)
        keep = self.classes[i] != self.classes[l]
        i, l = i[keep], l[keep]
        x = lam[i] - lam[l]
        return l * n + i, x, 1.0 / x

    @cached_property
    def _real_rows(self):
        return np.asfortranarray(self.decomp.eigenvectors * np.real(self.initial_amplitudes))

    @cached_property
    def pair_weight(self):
        """Σ over ordered pairs in distinct classes of |c_i||c_l| / |λ_i − λ_l|."""
        a = np.abs(self.initial_amplitudes)
        n = a.shape[0]
        flat, _, inv = self._lower_pairs
        return 2.0 * float(np.sum(a[flat % n] * a[flat // n] * np.abs(inv)))


def limiting_distribution(spec):
    """P_f(∞): squared norm of the projection onto each degeneracy class."""
    w = spec.decomp.eigenvectors * spec.initial_amplitudes
    starts = np.flatnonzero(np.concatenate([[True], np.diff(spec.classes) != 0]))
    blocks = np.add.reduceat(w, starts, axis=1)
    return np.sum(np.abs(blocks) ** 2, axis=1)


def transient_correction(spec, T):
    """P_f(T) − P_f(∞) for every node f."""
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    if spec.is_real:
        return _real_correction(spec, T)
    x, inv = spec._pair_data
    v = spec.decomp.eigenvectors
    c = spec.initial_amplitudes
    xt = x * T
    k_re = np.sin(xt) * inv
    u = v * np.real(c)
    w = v * np.imag(c)
    corr = np.einsum("fi,fi->f", u @ k_re, u)
    corr += np.einsum("fi,fi->f", w @ k_re, w)
    s = np.sin(0.5 * xt)
    k_im = -2.0 * s * s * inv
    corr -= 2.0 * np.einsum("fi,fi->f", w @ k_im, u)
    return corr / T


def _real_correction(spec, T):
    # K = sin(xT)/x is symmetric with zero diagonal, so diag(u K uᵀ) equals
    # 2 diag(u L uᵀ) for its strict lower triangle L: a triangular product
    # at half the cost of a full one.
    flat, x, inv = spec._lower_pairs
    u = spec._real_rows
    n = u.shape[0]
    low = np.zeros((n, n), order="F")
    low.ravel(order="F")[flat] = np.sin(x * T) * inv
    m = scipy.linalg.blas.dtrmm(1.0, low, u, side=1, lower=1)
    return 2.0 * np.einsum("fi,fi->f", m, u) / T


def time_averaged_distribution(spec, T):
    """P_f(T); entries below −1e−12 are rounding debris, clamped with a warning."""
    probs = limiting_distribution(spec) + transient_correction(spec, T)
    low = probs < -NEGATIVE_TOL
    if low.any():
        warnings.warn(f"clamped {int(low.sum())} probabilities below -{NEGATIVE_TOL:g} "
                      f"(min {probs.min():.3e}) at T={T!r}", RuntimeWarning, stacklevel=2)
        probs[low] = 0.0
    return probs


def tv_distance(spec, T):
    """D(P_T) = Σ_f |P_f(T) − P_f(∞)|."""
    return float(np.sum(np.abs(transient_correction(spec, T))))


def tv_upper_bound(spec, T):
    """(2/T) Σ over ordered distinct-eigenvalue pairs of |c_i||c_l| / |λ_i − λ_l|."""
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    return 2.0 * spec.pair_weight / T


def mixing_time_bound(spec, epsilon=DEFAULT_EPSILON):
    """The T at which the TV upper bound equals ε."""
    if not 0 < epsilon < 2:
        raise ValueError(f"epsilon must lie in (0, 2), got {epsilon}")
    return _bound_crossing(spec, epsilon)


def _bound_crossing(spec, epsilon):
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return 2.0 * spec.pair_weight / epsilon


def log_grid(t_min, t_max, per_decade=DEFAULT_PER_DECADE):
    if not 0 < t_min < t_max:
        raise ValueError(f"need 0 < t_min < t_max, got {t_min}, {t_max}")
    decades = math.log10(t_max / t_min)
    count = max(2, int(math.ceil(decades * per_decade)) + 1)
    return np.logspace(math.log10(t_min), math.log10(t_max), count)


def default_grid(t_bound, t_min=DEFAULT_T_MIN, per_decade=DEFAULT_PER_DECADE):
    return log_grid(t_min, max(10.0 * t_bound, 10.0 * t_min), per_decade)


def points_per_decade(grid):
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 2 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be a strictly increasing array of positive times")
    ratios = np.diff(np.log10(grid))
    if np.ptp(ratios) > 1e-6 * ratios.mean():
        raise ValueError("grid is not log-spaced")
    return 1.0 / ratios.mean()


def _check_grid(grid):
    ppd = points_per_decade(grid)
    if ppd < MIN_PER_DECADE - 1e-6:
        raise GridTooCoarse(f"grid has {ppd:.1f} points per decade; at least "
                            f"{MIN_PER_DECADE} are required")
    return np.asarray(grid, dtype=np.float64)


@dataclass(frozen=True)
class MixingScan:
    """Outcome of a tail scan over a time grid.

    ``evaluated`` holds the ``(T, D)`` pairs actually computed; every other
    grid point is covered by a certificate.
    """

    t_mix: float | None
    epsilon: float
    t_bound: float
    evaluated: tuple
    grid_size: int

    @property
    def evaluations(self):
        return len(self.evaluated)


def scan_mixing_time(spec, epsilon, grid, exhaustive=False):
    """Smallest grid T with D(T') <= ε at every grid point T' >= T.

    Grid points at or above T_bound need no evaluation: there the TV upper
    bound is already <= ε.  Below it the scan walks downward.  T·D(T) is
    Lipschitz in T with constant 2 (its derivative is bounded by the sum of
    two probability vectors), so an evaluation with D(T) <= ε certifies
    every T' in [T (2 + D) / (2 + ε), T].  The result equals the one from
    evaluating every grid point; ``exhaustive=True`` does exactly that.
    """
    grid = _check_grid(grid)
    t_bound = _bound_crossing(spec, epsilon)
    m = grid.size
    evaluated = []

    def done(t_mix):
        return MixingScan(t_mix, float(epsilon), t_bound, tuple(evaluated), m)

    if exhaustive:
        ds = [tv_distance(spec, t) for t in grid]
        evaluated = list(zip(grid.tolist(), ds))
        above = np.flatnonzero(np.asarray(ds) > epsilon)
        if above.size == 0:
            return done(float(grid[0]))
        k = int(above[-1])
        return done(float(grid[k + 1]) if k + 1 < m else None)

    k = int(np.searchsorted(grid, t_bound, side="left")) - 1
    while k >= 0:
        t = float(grid[k])
        d = tv_distance(spec, t)
        evaluated.append((t, d))
        if d > epsilon:
            return done(float(grid[k + 1]) if k + 1 < m else None)
        lower = t * (2.0 + d) / (2.0 + epsilon)
        k = min(k - 1, int(np.searchsorted(grid, lower, side="left")) - 1)
    return done(float(grid[0]))


@dataclass(frozen=True)
class DominanceCheck:
    points: int
    violations: int
    evaluated: tuple

    @property
    def evaluations(self):
        return len(self.evaluated)


def dominance_check(spec, grid, known=(), atol=DOMINANCE_ATOL):
    """Certify D(T) <= tv_upper_bound(T) at every grid point.

    With W the pair weight the claim reads h(T) = T·D(T) <= 2W.  Points with
    T <= W hold trivially (D <= 2).  Elsewhere one evaluation with h < 2W
    covers |T' − T| <= (2W − h)/2 because h is 2-Lipschitz.  ``known``
    holds ``(T, D)`` pairs already computed, e.g. by the mixing scan.
    """
    grid = np.asarray(grid, dtype=np.float64)
    w = spec.pair_weight
    cap = 2.0 * w
    covered = grid <= w
    evaluated = []
    violations = 0

    def apply(t, d, k=None):
        nonlocal violations
        if d > cap / t + atol:
            if k is not None:
                violations += 1
                covered[k] = True
            return
        r = 0.5 * max(cap - t * d, 0.0)
        covered[np.abs(grid - t) <= r] = True
        if k is not None:
            covered[k] = True

    for t, d in known:
        k = int(np.searchsorted(grid, t))
        apply(t, d, k if k < grid.size and grid[k] == t else None)
    while not covered.all():
        k = int(np.argmin(covered))
        # evaluations typically cover a radius close to W; aim one radius ahead
        j = max(k, int(np.searchsorted(grid, grid[k] + 0.9 * w, side="right")) - 1)
        for idx in (j, k) if j != k else (k,):
            if covered[idx] and idx != k:
                continue
            t = float(grid[idx])
            d = tv_distance(spec, t)
            evaluated.append((t, d))
            apply(t, d, idx)
            if covered[k]:
                break
    return DominanceCheck(points=int(grid.size), violations=violations,
                          evaluated=tuple(evaluated))


def empirical_mixing_time(spec, epsilon, grid):
    return scan_mixing_time(spec, epsilon, grid).t_mix


@dataclass(frozen=True, eq=False)
class MixingResult:
    limiting: np.ndarray = field(repr=False)
    tv_curve: list = field(repr=False)
    tv_bound_curve: list = field(repr=False)
    t_bound: float
    t_mix_empirical: float | None
    epsilon: float

    @property
    def max_limiting_prob(self):
        return float(np.max(self.limiting))


def mixing_result(spec, epsilon=DEFAULT_EPSILON, grid=None):
    """Full mixing curve, bound curve and both mixing times on one grid."""
    t_bound = mixing_time_bound(spec, epsilon)
    if grid is None:
        grid = default_grid(t_bound)
    scan = scan_mixing_time(spec, epsilon, grid, exhaustive=True)
    curve = list(scan.evaluated)
    bound = [(t, tv_upper_bound(spec, t)) for t, _ in curve]
    return MixingResult(limiting=limiting_distribution(spec), tv_curve=curve,
                        tv_bound_curve=bound, t_bound=t_bound,
                        t_mix_empirical=scan.t_mix, epsilon=float(epsilon))


def write_mixing_csv(result, path):
    rows = [(t, d, b) for (t, d), (_, b) in zip(result.tv_curve, result.tv_bound_curve)]
    write_csv(path, ["T", "tv_distance", "tv_upper_bound"], rows)


def mixing_summary(result, n, p, seed):
    return {"n": n, "p": p, "seed": seed, "epsilon": result.epsilon,
            "t_bound": result.t_bound, "t_mix_empirical": result.t_mix_empirical,
            "max_limiting_prob": result.max_limiting_prob}


def write_mixing_json(result, path, n, p, seed):
    write_json(path, mixing_summary(result, n, p, seed))
