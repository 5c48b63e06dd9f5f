"""Reference time averages computed directly from the propagator exp(−iĀt).

These never touch the eigendecomposition used by :mod:`qwmix.walk`; they
exist to cross-check the closed forms.
"""

import numpy as np
import scipy.integrate
import scipy.linalg


def _probabilities(psi):
    return psi.real ** 2 + psi.imag ** 2


def time_average_adaptive(matrix, psi0, T, epsabs=1e-12, epsrel=1e-12):
    """(1/T) ∫_0^T |exp(−iĀt) ψ₀|² dt by adaptive Gauss–Kronrod.

    Returns ``(probabilities, error_estimate)``.
    """
    a = np.asarray(matrix, dtype=np.float64)
    psi0 = np.asarray(psi0, dtype=np.complex128)

    def integrand(t):
        return _probabilities(scipy.linalg.expm(-1j * t * a) @ psi0)

    # oscillations have period ~2π/‖Ā‖; seed the subdivision accordingly
    pieces = max(1, int(np.ceil(T / 4.0)))
    points = np.linspace(0.0, T, pieces + 1)[1:-1] if pieces > 1 else None
    val, err = scipy.integrate.quad_vec(integrand, 0.0, T, epsabs=epsabs * T,
                                        epsrel=epsrel, norm="max", points=points,
                                        limit=20000)
    return val / T, err / T


def time_average_panels(matrix, psi0, T, panel=1.0, nodes=16):
    """Composite Gauss–Legendre time average with exact panel propagators.

    ψ is carried across panels by exp(−iĀh) and sampled inside each panel
    with precomputed exp(−iĀτ_m), so the cost is a few small matrix-vector
    products per panel.  Suited to long horizons on small graphs.
    """
    a = np.asarray(matrix, dtype=np.float64)
    n = a.shape[0]
    psi = np.asarray(psi0, dtype=np.complex128).copy()
    steps = int(np.ceil(T / panel))
    h = T / steps
    x, w = np.polynomial.legendre.leggauss(nodes)
    tau = 0.5 * h * (x + 1.0)
    stacked = np.concatenate([scipy.linalg.expm(-1j * t * a) for t in tau], axis=0)
    step = scipy.linalg.expm(-1j * h * a)
    weights = (0.5 * h * w)[:, None]
    acc = np.zeros(n)
    for _ in range(steps):
        samples = (stacked @ psi).reshape(nodes, n)
        acc += np.sum(weights * _probabilities(samples), axis=0)
        psi = step @ psi
    return acc / T
