"""Pure-NumPy backend for the hot special-function kernels.

Mirrors the API of the compiled extension ``triboson._fastkern``; the
package selects whichever is importable (see ``triboson._backend``).
"""

import numpy as np

__all__ = ["k2_array", "kiv1", "kiv1_array"]

_EULER_GAMMA = 0.5772156649015329

# Crossover between the ascending series and the scaled integral
# representation.  Below 2 the series cancellation costs < 2 digits;
# above 2 the Gaussian-transformed integral has an analyticity strip
# of half-width >= 2, so a step-0.25 trapezoid is converged.
K2_SERIES_CUTOFF = 2.0

_DBL_MIN = np.finfo(np.float64).tiny

# --- ascending-series coefficients for K2 -------------------------------
# K2(z) = 2/z^2 - 1/2 - ln(z/2) I2(z) + (w/2) sum c2[k] w^k,  w = z^2/4,
# I2(z) = w * sum c1[k] w^k,  c1[k] = 1/(k!(k+2)!),
# c2[k] = (psi(k+1)+psi(k+3)) c1[k].
_K2_NTERMS = 24


def _k2_series_tables():
    c1 = np.empty(_K2_NTERMS)
    c2 = np.empty(_K2_NTERMS)
    psi1 = -_EULER_GAMMA          # psi(1)
    psi3 = -_EULER_GAMMA + 1.5    # psi(3)
    kfact = 1.0
    k2fact = 2.0                  # (k+2)! at k=0
    for k in range(_K2_NTERMS):
        c1[k] = 1.0 / (kfact * k2fact)
        c2[k] = (psi1 + psi3) * c1[k]
        psi1 += 1.0 / (k + 1)
        psi3 += 1.0 / (k + 3)
        kfact *= k + 1
        k2fact *= k + 3
    return c1, c2


_K2_C1, _K2_C2 = _k2_series_tables()

# --- nodes for the scaled integral representation ------------------------
# e^x K2(x) = 2/sqrt(2x) * int_0^inf e^{-v^2} g(v/sqrt(2x)) dv with
# g(u) = (1 + 8u^2(1+u^2)) / sqrt(1+u^2); trapezoid step 0.25, half
# weight at v=0 (even integrand extended to the full line).
_K2_H = 0.25
_K2_V = np.arange(0, 27) * _K2_H
_K2_EXPV2 = np.exp(-_K2_V * _K2_V)
_K2_EXPV2[0] *= 0.5


def _k2_series(z):
    w = 0.25 * z * z
    s1 = np.polynomial.polynomial.polyval(w, _K2_C1)
    s2 = np.polynomial.polynomial.polyval(w, _K2_C2)
    i2 = w * s1
    return 2.0 / (z * z) - 0.5 - np.log(0.5 * z) * i2 + 0.5 * w * s2


def _k2_integral(z):
    # returns K2 unscaled; z is a 1-D array with z > cutoff
    u = _K2_V[np.newaxis, :] / np.sqrt(2.0 * z)[:, np.newaxis]
    u2 = u * u
    g = (1.0 + 8.0 * u2 * (1.0 + u2)) / np.sqrt(1.0 + u2)
    scaled = (2.0 * _K2_H / np.sqrt(2.0 * z)) * (g * _K2_EXPV2).sum(axis=1)
    with np.errstate(under="ignore"):
        out = scaled * np.exp(-z)
    out[out < _DBL_MIN] = 0.0
    return out


def k2_array(x):
    """Macdonald function K2 on a float64 array with x > 0 elementwise."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    shape = x.shape
    flat = x.ravel()
    out = np.empty_like(flat)
    small = flat <= K2_SERIES_CUTOFF
    if small.any():
        out[small] = _k2_series(flat[small])
    large = ~small
    if large.any():
        out[large] = _k2_integral(flat[large])
    return out.reshape(shape)


# --- K_{i nu}(1) ----------------------------------------------------------
# int_0^inf e^{-cosh t} cos(nu t) dt, trapezoid with half weight at t=0;
# step shrinks with |nu| to keep the quadrature error below 1e-14.
_KIV_TMAX = 6.5


def kiv1(nu):
    nu = abs(float(nu))
    h = min(0.05, 6.283185307179586 / (nu + 80.0))
    n = int(_KIV_TMAX / h) + 1
    t = np.arange(n) * h
    f = np.exp(-np.cosh(t)) * np.cos(nu * t)
    f[0] *= 0.5
    return h * f.sum()


def kiv1_array(nus):
    nus = np.ascontiguousarray(nus, dtype=np.float64)
    out = np.empty_like(nus)
    flat = nus.ravel()
    oflat = out.ravel()
    for i in range(flat.size):
        oflat[i] = kiv1(flat[i])
    return out
