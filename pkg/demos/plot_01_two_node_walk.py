"""
Quantum walk on a single edge
=============================

On K₂ everything has a closed form, which makes it the natural first check.
Ā = A/(np) = [[0, 1/2], [1/2, 0]] has eigenvalues ±1/2.  A walker started at
node 0 has a time-averaged probability P₀(T) = 1/2 + sin(T)/(2T) and a TV
distance |sin T|/T from the limit.
"""

import math

import numpy as np

from qwmix import graphs, spectral, walk

sample = graphs.sample_gnp(2, 1.0, seed=0)
decomp = spectral.eigendecompose(graphs.normalize(sample).matrix)
print("eigenvalues:", decomp.eigenvalues)

spec = walk.WalkSpec.from_node(decomp, 0)
print("limiting distribution:", walk.limiting_distribution(spec))
print("P(T=pi):", walk.time_averaged_distribution(spec, math.pi))

###############################################################################
# The bound and the empirical mixing time
# ---------------------------------------
# The TV upper bound on K₂ is 2/T, so it crosses ε = 0.1 at T = 20.  The
# actual distance has its last excursion above 0.1 just after the local
# maximum at 5π/2, so the walk really mixes at about T = 8.4.

t_bound = walk.mixing_time_bound(spec, 0.1)
grid = walk.default_grid(t_bound)
t_mix = walk.empirical_mixing_time(spec, 0.1, grid)
print(f"T_bound = {t_bound:.12g}, D(T_bound) = {walk.tv_distance(spec, t_bound):.4f}")
print(f"T_mix   = {t_mix:.4f}")

for T in (1.0, 5 * math.pi / 2, t_mix, 20.0):
    d = walk.tv_distance(spec, T)
    print(f"  T={T:8.4f}  D={d:.6f}  |sin T|/T={abs(math.sin(T)) / T:.6f}  bound={2 / T:.4f}")

###############################################################################
# Degenerate spectra
# ------------------
# On K₃ the eigenvalue −1/3 is doubled.  Pairs inside a degenerate class do
# not oscillate, so they stay in the limit: node 0 keeps 5/9 of the weight.

k3 = spectral.eigendecompose(graphs.normalize(graphs.sample_gnp(3, 1.0, 0)).matrix)
print("K3 limit:", walk.limiting_distribution(walk.WalkSpec.from_node(k3, 0)))
print("K3 expected:", np.array([5, 2, 2]) / 9)
