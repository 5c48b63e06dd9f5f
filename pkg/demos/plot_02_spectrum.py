"""
Spectrum of a normalized G(n, p)
================================

Ā = A/(np) has one Perron eigenvalue near 1.  The rest form a semicircle
of radius 2√((1−p)/(np)).  Eigenvectors are delocalized, and the top one is
almost the uniform superposition.
"""

import math

import numpy as np

from qwmix import graphs, spectral

n, p = 1000, 0.5
sample = graphs.sample_gnp(n, p, seed=3)
norm = graphs.normalize(sample)
decomp = spectral.eigendecompose(norm.matrix)

print(f"edges: {sample.edge_count} (expected {n * (n - 1) / 2 * p:.0f})")
print(f"residual {decomp.residual_max:.2e} <= {decomp.residual_bound():.2e}")
print(f"orthogonality {decomp.ortho_defect:.2e} <= {decomp.ortho_bound():.2e}")

###############################################################################
# Top of the spectrum
# -------------------

lam = decomp.eigenvalues
lo, hi = spectral.top_eigenvalue_window(n, p)
print(f"lambda_n = {lam[-1]:.5f} in [{lo:.3f}, {hi:.3f}]")
chk = spectral.second_eigenvalue_check(decomp, n, p)
print(f"lambda_(n-1) = {lam[-2]:.5f}, slack to the limit {chk.margin:.3f}")
print(f"semicircle edge 2*sqrt((1-p)/(np)) = {2 * math.sqrt((1 - p) / (n * p)):.5f}")

###############################################################################
# Eigenvector structure
# ---------------------

stats = spectral.eigenvector_stats(decomp)
print(f"|<v_n|s>| = {stats.overlap_top_uniform:.5f} >= {1 - 2 / math.sqrt(n * p):.5f}")
print(f"max sup-norm = {stats.sup_norms.max():.4f}, log^2 n / sqrt n = "
      f"{spectral.delocalization_limit(n):.4f}, 1/sqrt n = {1 / math.sqrt(n):.4f}")

# a crude text histogram of the bulk
counts, edges = np.histogram(lam[:-1], bins=12)
for c, e in zip(counts, edges):
    print(f"{e:+.4f} {'#' * (c // 4)}")
