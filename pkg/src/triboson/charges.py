"""Radial charge families, transforms and Sobolev functionals.

A charge is the radial boundary-trace function the quadratic form acts
on; it is specified by its s-wave momentum profile ``fhat(p)`` and,
when available in closed form, its position profile ``xi(y)``.  The
Fourier convention is unitary with symmetric (2 pi)^{-3/2}
normalization, so the unit Gaussian is self-dual:

    xi(y)   = sqrt(2/pi) (1/y) int_0^inf p sin(p y) fhat(p) dp,
    fhat(p) = sqrt(2/pi) (1/p) int_0^inf y sin(p y) xi(y)  dy.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from ._backend import kiv1_array
from .quadrature import QuadratureSpec, integrate_semiaxis

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

__all__ = [
    "RadialCharge",
    "MellinProfile",
    "ThetaProfile",
    "gaussian_charge",
    "trial_fbeta",
    "gaussian_mixture",
    "scale_charge",
    "mellin_transform",
    "radial_fourier_to_position",
    "gagliardo_seminorm_sq",
    "momentum_moment",
    "position_eval",
]


@dataclass(frozen=True, eq=False)
class RadialCharge:
    """Immutable radial charge.

    ``momentum_cut`` / ``position_cut`` bound the support for quadrature
    truncation (profile squared times cubic weight below ~1e-36 outside).
    ``mellin_extent`` is the |x| beyond which the diagonalized profile is
    negligible.
    """

    label: str
    momentum_profile: Callable
    position_profile: Optional[Callable]
    momentum_cut: float
    position_cut: float
    mellin_extent: float = 100.0
    _cache: dict = field(default_factory=dict, repr=False)

    def fhat(self, p):
        return self.momentum_profile(p)


@dataclass(frozen=True)
class MellinProfile:
    """Sampled diagonalized profile on a uniform symmetric grid."""

    x: np.ndarray
    values: np.ndarray
    grid_step: float
    extent: float

    def norm_sq(self):
        """Trapezoidal int |f_sharp|^2 dx."""
        sq = np.abs(self.values) ** 2
        return float(_trapezoid(sq, dx=self.grid_step))


@dataclass(frozen=True)
class ThetaProfile:
    """Cutoff profile shaping the three-body repulsion gamma theta(y)/y.

    ``indicator`` is the characteristic function of [0, b).  Custom
    sampled profiles are validated at construction against the sandwich
    1 - y/b <= theta(y) <= 1 + y/b and must be compactly supported.
    """

    kind: str = "indicator"
    b: float = 1.0
    samples: Optional[tuple] = None  # (y_grid, theta_values)

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError("cutoff length b must be positive")
        if self.kind == "indicator":
            return
        if self.kind != "custom_sampled":
            raise ValueError(f"unknown theta kind {self.kind!r}")
        if self.samples is None:
            raise ValueError("custom_sampled theta requires samples")
        y, th = (np.asarray(a, dtype=float) for a in self.samples)
        if y[0] != 0.0 or th[0] != 1.0:
            raise ValueError("theta must satisfy theta(0) = 1")
        lo = 1.0 - y / self.b
        hi = 1.0 + y / self.b
        if np.any(th < lo - 1e-12) or np.any(th > hi + 1e-12):
            raise ValueError("theta violates the sandwich bounds 1 -+ y/b")
        if th[-1] != 0.0:
            raise ValueError("sampled theta must end at 0 (compact support)")
        object.__setattr__(self, "samples", (y, th))

    @property
    def support_end(self):
        if self.kind == "indicator":
            return self.b
        return float(self.samples[0][-1])

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "indicator":
            return np.where(y < self.b, 1.0, 0.0)
        return np.interp(y, self.samples[0], self.samples[1], right=0.0)


# --- built-in families ------------------------------------------------------

def gaussian_charge(scale):
    """Gaussian charge fhat(p) = exp(-(scale p)^2 / 2); self-dual family."""
    s = float(scale)
    if not s > 0:
        raise ValueError("scale must be positive")
    s3 = s ** -3

    def fhat(p):
        return np.exp(-0.5 * (s * p) ** 2)

    def xi(y):
        return s3 * np.exp(-0.5 * (y / s) ** 2)

    return RadialCharge(
        label=f"gaussian:{s!r}",
        momentum_profile=fhat,
        position_profile=xi,
        momentum_cut=14.0 / s,
        position_cut=14.0 * s,
        mellin_extent=100.0,
    )


def gaussian_mixture(scales, weights):
    """Positive combination of Gaussian charges (closed-form both sides)."""
    scales = np.asarray(scales, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if scales.ndim != 1 or scales.shape != weights.shape or scales.size == 0:
        raise ValueError("scales and weights must be equal-length 1-D")
    if np.any(scales <= 0) or np.any(weights <= 0):
        raise ValueError("scales and weights must be positive")
    s3 = scales ** -3

    def fhat(p):
        p = np.asarray(p, dtype=float)
        return np.exp(-0.5 * (p[..., None] * scales) ** 2) @ weights

    def xi(y):
        y = np.asarray(y, dtype=float)
        return np.exp(-0.5 * (y[..., None] / scales) ** 2) @ (weights * s3)

    tag = ",".join(f"{s:.6g}x{w:.6g}" for s, w in zip(scales, weights))
    return RadialCharge(
        label=f"mix:{tag}",
        momentum_profile=fhat,
        position_profile=xi,
        momentum_cut=14.0 / scales.min(),
        position_cut=14.0 * scales.max(),
        mellin_extent=100.0,
    )


def trial_fbeta(beta):
    """Trial charge fhat(p) = p^-2 exp(-(p^beta + p^-beta)/2).

    Its diagonalized profile is (1/beta) hhat(x/beta) with
    h(t) = exp(-cosh t), i.e. sqrt(2/pi)(1/beta) K_{i x/beta}(1).
    """
    b = float(beta)
    if not b > 0:
        raise ValueError("beta must be positive")

    def fhat(p):
        p = np.asarray(p, dtype=float)
        with np.errstate(under="ignore"):
            return np.exp(-0.5 * (p ** b + p ** -b)) / (p * p)

    # |fhat|^2 p^3-weighted mass dies once p^beta > ~85; position decay
    # mirrors it as exp(-y^beta / 2) with polynomial prefactors.
    momentum_cut = 90.0 ** (1.0 / b)
    u = 1.0
    while 2.0 * math.cosh(b * u) - 5.0 * u < 90.0:
        u += 0.5
    position_cut = math.exp(u)
    return RadialCharge(
        label=f"fbeta:{b!r}",
        momentum_profile=fhat,
        position_profile=None,
        momentum_cut=momentum_cut,
        position_cut=position_cut,
        mellin_extent=40.0 / b,
    )


def scale_charge(f, n):
    """Collapse-sequence scaling: momentum (1/n) fhat(p/n), position n^2 xi(n y)."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    if n == 1:
        return f
    base_fhat = f.momentum_profile
    base_xi = f.position_profile
    inv = 1.0 / n

    def fhat(p):
        return inv * base_fhat(p * inv)

    xi = None
    if base_xi is not None:
        def xi(y):
            return n * n * base_xi(y * n)

    return RadialCharge(
        label=f"{f.label}|n={n}",
        momentum_profile=fhat,
        position_profile=xi,
        momentum_cut=f.momentum_cut * n,
        position_cut=f.position_cut * inv,
        mellin_extent=f.mellin_extent,
    )


# --- transforms -------------------------------------------------------------

def mellin_transform(f, extent=None, grid_step=0.05, spec=None):
    """Sample the diagonalized profile f_sharp on [-extent, extent].

    f_sharp(x) = (2 pi)^{-1/2} int_R e^{-i t x} e^{2t} fhat(e^t) dt.
    The t-integrand decays super-exponentially for the built-in
    families; a uniform trapezoid with oscillation-resolving step is
    spectrally accurate.
    """
    if extent is None:
        extent = f.mellin_extent
    key = ("mellin", float(extent), float(grid_step))
    if key in f._cache:
        return f._cache[key]

    # t-support: where e^{2t} |fhat(e^t)| is above ~1e-20
    t_lo, t_hi = _mellin_t_support(f)
    h = min(0.01, np.pi / (8.0 * extent))
    t = np.arange(t_lo, t_hi + h, h)
    g = np.exp(2.0 * t) * f.momentum_profile(np.exp(t))
    x = np.arange(0.0, extent + grid_step, grid_step)
    # half-line x >= 0; mirror by conjugation (g is real)
    vals_pos = np.empty(x.size, dtype=complex)
    chunk = max(1, int(4e6 // t.size))
    for i in range(0, x.size, chunk):
        xs = x[i:i + chunk]
        phase = np.exp(-1j * np.outer(xs, t))
        vals_pos[i:i + chunk] = phase @ g
    vals_pos *= h / np.sqrt(2.0 * np.pi)
    x_full = np.concatenate([-x[:0:-1], x])
    vals = np.concatenate([np.conj(vals_pos[:0:-1]), vals_pos])
    prof = MellinProfile(x=x_full, values=vals, grid_step=float(grid_step),
                         extent=float(extent))
    f._cache[key] = prof
    return prof


def _mellin_t_support(f):
    t = np.linspace(-80.0, 40.0, 2401)
    with np.errstate(under="ignore"):
        g = np.abs(np.exp(2.0 * t) * f.momentum_profile(np.exp(t)))
    live = np.nonzero(g > g.max() * 1e-22)[0]
    return t[live[0]] - 1.0, t[live[-1]] + 1.0


def trial_mellin_closed_form(beta, x):
    """sqrt(2/pi) (1/beta) K_{i x/beta}(1); oracle twin of mellin_transform."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(2.0 / np.pi) / beta * kiv1_array(x / beta)


def radial_fourier_to_position(f, y, spec=None):
    """Position profile xi(y) = sqrt(2/pi) (1/y) int_0^inf p sin(p y) fhat(p) dp."""
    if not y > 0:
        raise ValueError("y must be positive")
    spec = spec or QuadratureSpec()
    spec = spec.with_truncation(f.momentum_cut)

    def integrand(p):
        return p * np.sin(p * y) * f.momentum_profile(p)

    res = integrate_semiaxis(integrand, spec)
    return np.sqrt(2.0 / np.pi) / y * res.value


def position_eval(f, y_max=None):
    """Vectorized position profile on [0, y_max].

    Returns the closed form when the charge carries one, otherwise a
    cached sine-transform spline on an asinh-graded grid.  The mesh cost
    grows like y_max times the momentum support, so callers should pass
    the smallest range they actually need.
    """
    if f.position_profile is not None:
        return f.position_profile
    if y_max is None:
        y_max = f.position_cut
    y_max = float(min(y_max, f.position_cut))
    key = ("position_spline", round(np.log1p(y_max), 3))
    if key in f._cache:
        return f._cache[key]

    u_max = np.arcsinh(y_max)
    n_grid = int(min(12000, max(2000, 50 * y_max)))
    u = np.linspace(0.0, u_max, n_grid)
    y = np.sinh(u)
    y[0] = 1e-9
    xi = _sine_transform_batch(f, y)
    spline = CubicSpline(u, xi, extrapolate=False)

    def xi_eval(yq):
        yq = np.asarray(yq, dtype=float)
        out = spline(np.arcsinh(yq))
        return np.nan_to_num(out, nan=0.0)

    f._cache[key] = xi_eval
    return xi_eval


def _sine_transform_batch(f, y):
    """sqrt(2/pi)/y int p sin(py) fhat dp for an array of y > 0."""
    y_max = float(y.max())
    p_lo, p_hi = _momentum_support(f)
    nodes, weights = _oscillation_mesh(p_lo, p_hi, y_max)
    fp = weights * nodes * f.momentum_profile(nodes)
    acc = np.zeros_like(y)
    chunk = max(1, int(5e6 // nodes.size))
    for i in range(0, y.size, chunk):
        acc[i:i + chunk] = np.sin(np.outer(y[i:i + chunk], nodes)) @ fp
    return np.sqrt(2.0 / np.pi) * acc / y


def _momentum_support(f):
    p = np.geomspace(1e-9, f.momentum_cut, 3000)
    with np.errstate(under="ignore"):
        g = np.abs(f.momentum_profile(p)) * p * p
    live = np.nonzero(g > g.max() * 1e-20)[0]
    return p[live[0]], min(p[live[-1]] * 1.5, f.momentum_cut)


_GL24_X, _GL24_W = np.polynomial.legendre.leggauss(24)

_MAX_OSC_PANELS = 200_000


def _oscillation_mesh(p_lo, p_hi, y_max):
    """Composite GL-24 mesh on [p_lo, p_hi]: geometric growth near the
    lower end, capped so each panel sees <= ~12 radians of sin(p y_max)."""
    cap = 12.0 / max(y_max, 1e-12)
    if (p_hi - p_lo) / cap > _MAX_OSC_PANELS:
        raise ValueError(
            "position-profile mesh too large for this charge/range "
            f"(needs ~{(p_hi - p_lo) / cap:.2e} panels); "
            "evaluate this charge in the momentum representation instead")
    edges = [p_lo]
    while edges[-1] < p_hi:
        step = min(cap, max(0.25 * edges[-1], 1e-3 * cap))
        edges.append(min(edges[-1] + step, p_hi))
    edges = np.asarray(edges)
    a = edges[:-1]
    half = 0.5 * (edges[1:] - a)
    nodes = (a + half)[:, None] + half[:, None] * _GL24_X
    weights = half[:, None] * np.broadcast_to(_GL24_W, nodes.shape)
    return nodes.ravel(), weights.ravel()


# --- functionals ------------------------------------------------------------

def momentum_moment(f, power, spec=None):
    """int_0^inf p^power |fhat(p)|^2 dp (cached per charge and power)."""
    key = ("moment", power)
    if key in f._cache:
        return f._cache[key]
    spec = spec or QuadratureSpec()
    spec = spec.with_truncation(f.momentum_cut)

    def integrand(p):
        v = f.momentum_profile(p)
        return p ** power * (v * v)

    val = integrate_semiaxis(integrand, spec).value
    f._cache[key] = val
    return val


def gagliardo_seminorm_sq(f, spec=None):
    """H^{1/2} Gagliardo seminorm squared: 8 pi^3 int p^3 |fhat|^2 dp."""
    return 8.0 * np.pi ** 3 * momentum_moment(f, 3, spec)
