"""Seeded G(n, p) sampling and the derived normalized / centered matrices."""

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from . import rng

DEFAULT_MAX_N = 4096


def max_n():
    """Node-count cap; ``QWALK_MAX_N`` overrides the default of 4096."""
    raw = os.environ.get("QWALK_MAX_N")
    if raw is None:
        return DEFAULT_MAX_N
    value = int(raw)
    if value < 1:
        raise ValueError(f"QWALK_MAX_N must be positive, got {raw!r}")
    return value


@dataclass(frozen=True, eq=False)
class GraphSample:
    n: int
    p: float
    seed: int
    adjacency: np.ndarray = field(repr=False)
    edge_count: int
    stream: int = 0

    def edges(self):
        """Sorted ``(i, j)`` pairs with ``i < j``."""
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return np.column_stack([i, j])


@dataclass(frozen=True, eq=False)
class NormalizedAdjacency:
    matrix: np.ndarray = field(repr=False)
    scale: float
    source: GraphSample

    @property
    def n(self):
        return self.source.n

    @property
    def p(self):
        return self.source.p


def _validate(n, p):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    cap = max_n()
    if n > cap:
        raise ValueError(f"n={n} exceeds the configured maximum {cap} (set QWALK_MAX_N)")
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    return n, p


def sample_gnp(n, p, seed, stream=0):
    """Draw the adjacency matrix of G(n, p).

    Entry ``(i, j)``, ``i < j``, is present iff ``u(seed, stream, i, j) < p``
    where ``u`` is the counter-based uniform of :mod:`qwmix.rng`.  The result
    is therefore bit-identical for a given ``(n, p, seed, stream)`` and the
    graph on the first ``m`` nodes is the induced subgraph of any larger
    sample with the same key.
    """
    n, p = _validate(n, p)
    iu, ju = np.triu_indices(n, 1)
    u = rng.uniform(seed, stream, iu, ju)
    present = u < p
    adj = np.zeros((n, n), dtype=np.int8)
    adj[iu[present], ju[present]] = 1
    adj = adj | adj.T
    return GraphSample(n=n, p=p, seed=int(seed), adjacency=adj,
                       edge_count=int(present.sum()), stream=int(stream))


def normalize(sample, rate="np"):
    """Return A / (n p).

    ``rate="norm"`` divides by the spectral norm of A instead, for
    comparison runs; the default is ``n p``.
    """
    if rate == "np":
        if sample.p <= 0.0:
            raise ValueError("normalize requires p > 0 (the scale n*p is zero)")
        scale = sample.n * sample.p
    elif rate == "norm":
        a = sample.adjacency.astype(np.float64)
        if sample.edge_count == 0:
            raise ValueError("normalize(rate='norm') requires at least one edge")
        top = scipy.linalg.eigh(a, eigvals_only=True,
                                subset_by_index=[sample.n - 1, sample.n - 1])
        scale = float(top[0])
    else:
        raise ValueError(f"unknown rate {rate!r}; expected 'np' or 'norm'")
    matrix = sample.adjacency.astype(np.float64) / scale
    return NormalizedAdjacency(matrix=matrix, scale=float(scale), source=sample)


def centered_matrix(norm):
    """Ā − E[Ā], i.e. Ā − p (J − I) / scale.  Zero diagonal."""
    n = norm.n
    off = norm.p / norm.scale
    x = norm.matrix - off
    x[np.diag_indices(n)] = 0.0
    return x


def expected_matrix(n, p, scale=None):
    scale = n * p if scale is None else scale
    e = np.full((n, n), p / scale)
    e[np.diag_indices(n)] = 0.0
    return e


def format_edge_list(sample):
    lines = [f"# gnp n={sample.n} p={sample.p!r} seed={sample.seed}"]
    lines += [f"{i} {j}" for i, j in sample.edges()]
    return "\n".join(lines) + "\n"


def write_edge_list(sample, path):
    Path(path).write_text(format_edge_list(sample))


def read_edge_list(path):
    """Parse an edge-list file back into a :class:`GraphSample`."""
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("# gnp "):
        raise ValueError(f"{path}: missing '# gnp' header line")
    meta = dict(tok.split("=", 1) for tok in text[0][len("# gnp "):].split())
    n, p, seed = int(meta["n"]), float(meta["p"]), int(meta["seed"])
    adj = np.zeros((n, n), dtype=np.int8)
    count = 0
    for line in text[1:]:
        if not line.strip():
            continue
        i, j = (int(t) for t in line.split())
        if not (0 <= i < j < n):
            raise ValueError(f"{path}: bad edge {line!r}")
        adj[i, j] = adj[j, i] = 1
        count += 1
    return GraphSample(n=n, p=p, seed=seed, adjacency=adj, edge_count=count)
