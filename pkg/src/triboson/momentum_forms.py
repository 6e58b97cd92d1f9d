"""Momentum-space and Mellin-diagonalized evaluation of the form components.

The quadratic form splits into four pieces,

    total = diag + off + reg + zero,

evaluated for radial (s-wave) charges.  After the angular reduction the
momentum-side components read

    diag(lam) = 48 pi^2 int dp p^2 sqrt(3 p^2/4 + lam) |fhat|^2
    off(lam)  = -96 pi int int dp dq p q fhat(p) fhat(q)
                    ln((p^2+q^2+pq+lam)/(p^2+q^2-pq+lam))
    reg       = 24 pi gamma int int dp dq p q fhat(p) fhat(q)
                    ln((p+q)^2/(p-q)^2)
    zero      = 48 pi^2 int dy y^2 beta(y) |xi(y)|^2,
                beta(y) = -1/a + gamma (theta(y) - 1)/y.

The general-lam off-diagonal kernel is the angular integral of the 3-D
kernel 1/(p^2+q^2+p.q+lam) performed in closed form; at lam = 0 it
reduces to the standard s-wave expression.  At lam = 0 all three
momentum pieces are diagonal in the Mellin variable with multipliers
sqrt(3)/2, -4 sinh(pi x/6)/(x cosh(pi x/2)) and gamma tanh(pi x/2)/x,
whose sum is the stability symbol S(x).
"""

from dataclasses import dataclass

import numpy as np

from .charges import (ThetaProfile, mellin_transform, momentum_moment,
                      position_eval, _trapezoid)
from .quadrature import (QuadratureSpec, integrate_semiaxis,
                         integrate_square_logdiag)

__all__ = [
    "FormParams",
    "FormBreakdown",
    "phi_diag",
    "phi_off",
    "phi_reg",
    "phi_zero",
    "phi_total",
    "phi_diagonalized",
    "off_weight",
    "reg_weight",
]

_PI = np.pi


@dataclass(frozen=True)
class FormParams:
    """Physical and regularization parameters.

    ``inv_scattering_length`` is 1/a; 0 encodes |a| = infinity.
    """

    gamma: float = 1.0
    lam: float = 0.0
    inv_scattering_length: float = 0.0
    theta: ThetaProfile = ThetaProfile()

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError("gamma must be finite and >= 0")
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise ValueError("lambda must be finite and >= 0")
        if not np.isfinite(self.inv_scattering_length):
            raise ValueError("1/a must be finite")


@dataclass(frozen=True)
class FormBreakdown:
    diag: float
    off: float
    reg: float
    zero: float
    total: float
    err_estimate: float

    @classmethod
    def build(cls, diag, off, reg, zero, err_estimate):
        return cls(diag=diag, off=off, reg=reg, zero=zero,
                   total=diag + off + reg + zero, err_estimate=err_estimate)


def _spec_for(f, spec):
    spec = spec or QuadratureSpec()
    return spec.with_truncation(f.momentum_cut)


def phi_diag(f, lam, spec=None):
    """Kinetic (diagonal) component at spectral shift lam >= 0."""
    return _phi_diag_q(f, lam, spec).value


def _phi_diag_q(f, lam, spec=None):
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    spec = _spec_for(f, spec)

    def integrand(p):
        v = f.momentum_profile(p)
        return p * p * np.sqrt(0.75 * p * p + lam) * (v * v)

    res = integrate_semiaxis(integrand, spec)
    return _scaled(res, 48.0 * _PI ** 2)


def phi_off(f, lam, spec=None):
    """Off-diagonal component; strictly negative for nonzero charges."""
    return _phi_off_q(f, lam, spec).value


def _phi_off_q(f, lam, spec=None):
    spec = _spec_for(f, spec)
    fhat = f.momentum_profile

    def kernel(p, q):
        a = p * p + q * q + lam
        pq = p * q
        return pq * fhat(p) * fhat(q) * np.log((a + pq) / (a - pq))

    res = integrate_square_logdiag(kernel, spec)
    return _scaled(res, -96.0 * _PI)


def phi_reg(f, gamma, spec=None):
    """Three-body repulsion component, 24 pi gamma times the log-kernel
    double integral."""
    return _phi_reg_q(f, gamma, spec).value


def _phi_reg_q(f, gamma, spec=None):
    res = log_coulomb_integral(f, spec)
    return _scaled(res, 24.0 * _PI * gamma)


def log_coulomb_integral(f, spec=None):
    """L = int int dp dq p q fhat(p) fhat(q) ln((p+q)^2/(p-q)^2).

    Shared by the repulsion component and the momentum-side Coulomb
    integral int |xi|^2/|x| d^3x = 2 L (cached per charge).
    """
    spec = _spec_for(f, spec)
    key = ("log_coulomb", spec.abs_tol, spec.rel_tol, spec.truncation_radius)
    if key in f._cache:
        return f._cache[key]
    fhat = f.momentum_profile

    def kernel(p, q):
        return (p * q * fhat(p) * fhat(q)
                * 2.0 * (np.log(p + q) - np.log(np.abs(p - q))))

    res = integrate_square_logdiag(kernel, spec)
    f._cache[key] = res
    return res


def phi_zero(f, params, spec=None):
    """Bounded component from the multiplier beta(y).

    Splits beta into the compactly supported piece gamma theta(y)/y
    (evaluated in position space on the support of theta) and the
    Coulomb-type tail -gamma/y plus the constant -1/a, both evaluated
    via momentum-side identities:

        zero = -(1/a) 48 pi^2 int y^2 xi^2 dy
               + 48 pi^2 gamma [ int_0^{s_max} y theta(y) xi^2 dy - L/(2 pi) ].
    """
    return _phi_zero_q(f, params, spec).value


def _phi_zero_q(f, params, spec=None):
    spec_m = _spec_for(f, spec)
    inv_a = params.inv_scattering_length
    gamma = params.gamma

    val = 0.0
    err = 0.0
    evals = 0
    if inv_a != 0.0:
        l2 = integrate_semiaxis(
            lambda p: p * p * f.momentum_profile(p) ** 2, spec_m)
        val -= inv_a * 48.0 * _PI ** 2 * l2.value
        err += abs(inv_a) * 48.0 * _PI ** 2 * l2.err_estimate
        evals += l2.evaluations
    if gamma != 0.0:
        s_max = params.theta.support_end
        theta = params.theta
        xi = position_eval(f, y_max=s_max)
        spec_p = (spec or QuadratureSpec()).with_truncation(
            min(s_max, f.position_cut))

        def integrand(y):
            x = xi(y)
            return y * theta(y) * x * x

        near = integrate_semiaxis(integrand, spec_p)
        tail = log_coulomb_integral(f, spec)
        piece = near.value - tail.value / (2.0 * _PI)
        val += 48.0 * _PI ** 2 * gamma * piece
        err += 48.0 * _PI ** 2 * gamma * (
            near.err_estimate + tail.err_estimate / (2.0 * _PI))
        evals += near.evaluations + tail.evaluations
    from .quadrature import QuadResult
    return QuadResult(val, err, evals)


def phi_total(f, params, spec=None):
    """All four components plus their exact sum."""
    d = _phi_diag_q(f, params.lam, spec)
    o = _phi_off_q(f, params.lam, spec)
    r = _phi_reg_q(f, params.gamma, spec)
    z = _phi_zero_q(f, params, spec)
    return FormBreakdown.build(
        d.value, o.value, r.value, z.value,
        d.err_estimate + o.err_estimate + r.err_estimate + z.err_estimate)


# --- Mellin-diagonalized route (lam = 0) -----------------------------------

def off_weight(x):
    """Multiplier of the off-diagonal piece: -4 sinh(pi x/6)/(x cosh(pi x/2));
    equals -2 pi/3 at x = 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-3
    xs = x[small]
    a = _PI / 6.0
    b = _PI / 2.0
    # sinh(ax)/x = a (1 + (ax)^2/6), cosh(bx) = 1 + (bx)^2/2
    out[small] = -4.0 * a * (1.0 + (a * xs) ** 2 / 6.0) / (1.0 + (b * xs) ** 2 / 2.0)
    xl = x[~small]
    with np.errstate(over="ignore"):
        out[~small] = -4.0 * np.sinh(a * xl) / (xl * np.cosh(b * xl))
    # for |x| beyond overflow of cosh, the weight underflows to 0
    big = np.abs(x) > 400.0
    if big.any():
        xb = np.abs(x[big])
        out[big] = -4.0 * np.exp(-_PI * xb / 3.0) / xb
    return out


def reg_weight(x):
    """Multiplier of the repulsion piece divided by gamma: tanh(pi x/2)/x;
    equals pi/2 at x = 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-3
    xs = x[small]
    b = _PI / 2.0
    out[small] = b * (1.0 - (b * xs) ** 2 / 3.0)
    xl = x[~small]
    out[~small] = np.tanh(b * xl) / xl
    return out


def phi_diagonalized(f, gamma, extent=None, grid_step=0.05):
    """The three lam = 0 components as 1-D integrals over the Mellin
    variable: 48 pi^2 int |f_sharp(x)|^2 w(x) dx."""
    prof = mellin_transform(f, extent=extent, grid_step=grid_step)
    density = np.abs(prof.values) ** 2
    pref = 48.0 * _PI ** 2
    diag = pref * (np.sqrt(3.0) / 2.0) * _trapezoid(density, dx=prof.grid_step)
    off = pref * _trapezoid(density * off_weight(prof.x), dx=prof.grid_step)
    reg = pref * gamma * _trapezoid(density * reg_weight(prof.x), dx=prof.grid_step)
    return diag, off, reg


def _scaled(res, factor):
    from .quadrature import QuadResult
    return QuadResult(res.value * factor, res.err_estimate * abs(factor),
                      res.evaluations)
