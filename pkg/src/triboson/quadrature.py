"""Deterministic adaptive quadrature for the radial integrals of the package.

Three operators are provided:

``integrate_semiaxis``
    1-D integrals over (0, T] with T = ``truncation_radius``; global
    adaptive Gauss-Kronrod 7/15 with a geometric initial mesh, or a
    tanh-sinh rule when ``scheme`` is ``double_exponential``.

``integrate_square_logdiag``
    2-D integrals over (0, T)^2 of kernels with at worst a logarithmic
    singularity on the diagonal p = q.  The square is rotated to
    (s, d) = (p + q, p - q) and split at d = 0; the inner d-integral
    uses a fixed tanh-sinh rule (which absorbs the log endpoint), the
    outer s-integral is adaptive.

``integrate_radial_pair``
    The 6-D integral of a bi-radial function F(x, y, u), u being the
    cosine between the two vectors, via the s-wave reduction
    8 pi^2 int x^2 dx int y^2 dy int_{-1}^{1} du F.  The innermost
    u-integral is transformed to an integral over z = |x - y| vector
    distance on a log-graded mesh, so integrable |x-y| -> 0 kernel
    singularities are handled by the same diagonal-splitting transform
    as the 2-D operator.

Integrands must accept NumPy arrays (they are evaluated on batches of
nodes).  All rules use fixed node tables and fixed summation order, so
identical inputs give bit-identical results.
"""

import heapq
import inspect
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "QuadratureConvergenceError",
    "integrate_semiaxis",
    "integrate_square_logdiag",
    "integrate_radial_pair",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and mesh controls shared by all integration operators."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000
    truncation_radius: float = 50.0
    scheme: str = "gauss_legendre_adaptive"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not self.truncation_radius > 0:
            raise ValueError("truncation_radius must be positive")
        if self.scheme not in ("gauss_legendre_adaptive", "double_exponential"):
            raise ValueError(f"unknown scheme {self.scheme!r}")

    def with_truncation(self, radius):
        return replace(self, truncation_radius=float(radius))


@dataclass(frozen=True)
class QuadResult:
    value: float
    err_estimate: float
    evaluations: int


class QuadratureConvergenceError(RuntimeError):
    """Subdivision budget exhausted; carries the best available estimate."""

    def __init__(self, message, value, err_estimate, evaluations):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate
        self.evaluations = evaluations


# --- Gauss-Kronrod 7/15 pair (QUADPACK abscissae on [-1, 1]) -------------

_XGK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
# Gauss-7 weights sit on the odd Kronrod abscissae
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])
_GAUSS_IDX = np.arange(1, 15, 2)


def _geometric_breakpoints(t, ratio=8.0, floor_frac=1e-12):
    """Panel edges 0 < ... < t/r^2 < t/r < t, graded toward the origin."""
    edges = [t]
    while edges[-1] > t * floor_frac:
        edges.append(edges[-1] / ratio)
    edges.append(0.0)
    return np.array(edges[::-1])


def _adaptive_gk(g_batch, breakpoints, spec, evals_per_node=1):
    """Globally adaptive GK15 over the panels defined by ``breakpoints``.

    ``g_batch(nodes)`` returns (values, inner_err) where ``inner_err`` is
    a per-node error bound of the integrand evaluation itself (zero for
    exact integrands).  Returns a QuadResult.
    """
    panels = []  # entries: (-err, a, b, value, err)
    n_evals = 0

    def eval_panel(a, b):
        nonlocal n_evals
        half = 0.5 * (b - a)
        nodes = 0.5 * (a + b) + half * _XGK
        vals, inner = g_batch(nodes)
        n_evals += nodes.size * evals_per_node
        vk = half * float(np.dot(_WGK, vals))
        vg = half * float(np.dot(_WG, vals[_GAUSS_IDX]))
        err = abs(vk - vg) + half * float(np.dot(_WGK, inner))
        return vk, err

    for a, b in zip(breakpoints[:-1], breakpoints[1:]):
        if b > a:
            v, e = eval_panel(a, b)
            heapq.heappush(panels, (-e, a, b, v, e))

    n_splits = 0
    while True:
        total_v = sum(p[3] for p in sorted(panels, key=lambda p: p[1]))
        total_e = sum(p[4] for p in panels)
        tol = max(spec.abs_tol, spec.rel_tol * abs(total_v))
        if total_e <= tol:
            return QuadResult(total_v, total_e, n_evals)
        if n_splits >= spec.max_subdivisions:
            raise QuadratureConvergenceError(
                f"subdivision budget {spec.max_subdivisions} exhausted "
                f"(err {total_e:.3e} > tol {tol:.3e})",
                total_v, total_e, n_evals)
        _, a, b, _, _ = heapq.heappop(panels)
        m = 0.5 * (a + b)
        for lo, hi in ((a, m), (m, b)):
            v, e = eval_panel(lo, hi)
            heapq.heappush(panels, (-e, lo, hi, v, e))
        n_splits += 1


# --- tanh-sinh tables -----------------------------------------------------

def _tanh_sinh_table(level, t_max=3.4375):
    """Nodes/weights for int_0^1 f(w) dw, w = (1 + tanh(pi/2 sinh t))/2.

    Level ``m`` uses step 2^-m; the nodes of level m-1 are the even-index
    subset, which provides the embedded error estimate.
    """
    h = 2.0 ** (-level)
    t = np.arange(-t_max / h, t_max / h + 0.5).astype(float) * h
    s = 0.5 * np.pi * np.sinh(t)
    w = 0.5 * (1.0 + np.tanh(s))
    dw = 0.25 * np.pi * h * np.cosh(t) / np.cosh(s) ** 2
    keep = (w > 0.0) & (w < 1.0) & (dw > 1e-300)
    return w[keep], dw[keep]


_TS_W5, _TS_DW5 = _tanh_sinh_table(5)
_TS_W4, _TS_DW4 = _tanh_sinh_table(4)
_TS_W3, _TS_DW3 = _tanh_sinh_table(3)


def _tanh_sinh_halved(w, dw):
    # even-index subset of a level-m table == level-(m-1) table
    # (tables are symmetric with the t=0 node at the center index)
    c = np.argmin(np.abs(w - 0.5))
    idx = np.arange(w.size)
    keep = (idx - c) % 2 == 0
    return keep


_TS5_HALF = _tanh_sinh_halved(_TS_W5, _TS_DW5)
_TS4_HALF = _tanh_sinh_halved(_TS_W4, _TS_DW4)


def integrate_semiaxis(f, spec):
    """Integrate ``f`` over (0, truncation_radius].

    ``f`` must accept a 1-D NumPy array of nodes.  Raises
    QuadratureConvergenceError when the subdivision budget is exhausted.
    """
    t = spec.truncation_radius
    if spec.scheme == "double_exponential":
        return _semiaxis_tanh_sinh(f, spec)

    def g(nodes):
        vals = np.asarray(f(nodes), dtype=np.float64)
        return vals, np.zeros_like(vals)

    return _adaptive_gk(g, _geometric_breakpoints(t), spec)


def _semiaxis_tanh_sinh(f, spec):
    t = spec.truncation_radius
    n_evals = 0
    prev = None
    for level in (3, 4, 5, 6, 7, 8, 9, 10):
        w, dw = _tanh_sinh_table(level)
        vals = np.asarray(f(w * t), dtype=np.float64)
        n_evals += w.size
        cur = t * float(np.dot(dw, vals))
        if prev is not None:
            err = abs(cur - prev)
            if err <= max(spec.abs_tol, spec.rel_tol * abs(cur)):
                return QuadResult(cur, err, n_evals)
        prev = cur
    raise QuadratureConvergenceError(
        "tanh-sinh refinement did not converge", prev, abs(cur - prev), n_evals)


# --- 2-D log-diagonal operator -------------------------------------------

def _logdiag_half(K, spec, swap):
    """One half (d > 0) of the rotated square; ``swap`` exchanges p and q."""
    t = spec.truncation_radius
    w5 = _TS_W5[np.newaxis, :]

    def g(s_nodes):
        s = s_nodes[:, np.newaxis]
        m = np.minimum(s, 2.0 * t - s)
        d = m * w5
        # keep p - q representable: nodes this deep carry ~1e-15 of the
        # weight, so the clamp does not affect the estimate
        np.maximum(d, 2e-15 * s, out=d)
        p = 0.5 * (s + d)
        q = 0.5 * (s - d)
        vals = np.asarray(K(q, p) if swap else K(p, q), dtype=np.float64)
        inner5 = vals @ _TS_DW5
        inner4 = vals[:, _TS5_HALF] @ _TS_DW5[_TS5_HALF] * 2.0
        scale = 0.5 * m[:, 0]
        return scale * inner5, scale * np.abs(inner5 - inner4)

    # force a breakpoint at s = t where min(s, 2t - s) kinks
    bp = _geometric_breakpoints(t)
    bp = np.concatenate([bp, 2.0 * t - bp[::-1][1:]])
    return _adaptive_gk(g, bp, spec, evals_per_node=_TS_W5.size)


def integrate_square_logdiag(K, spec):
    """Integrate ``K(p, q)`` over (0, T)^2, T = truncation_radius.

    ``K`` may have a logarithmic singularity on p = q; it must accept
    broadcast NumPy arrays.
    """
    lower = _logdiag_half(K, spec, swap=False)
    upper = _logdiag_half(K, spec, swap=True)
    return QuadResult(lower.value + upper.value,
                      lower.err_estimate + upper.err_estimate,
                      lower.evaluations + upper.evaluations)


# --- 3-D radial-pair operator ---------------------------------------------

_RP_NPANEL = 40
_RP_GL_X, _RP_GL_W = np.polynomial.legendre.leggauss(6)
_RP_GL_X = 0.5 * (_RP_GL_X + 1.0)   # on (0, 1)
_RP_GL_W = 0.5 * _RP_GL_W


def _z_mesh(z0, z1):
    """Log-graded composite GL mesh on [z0, z1]; z0, z1 are (n,1) arrays.

    Returns nodes and weights of shape (n, NPANEL * 6).
    """
    ratio = (z1 / z0) ** (1.0 / _RP_NPANEL)
    k = np.arange(_RP_NPANEL)
    lo = z0 * ratio ** k[np.newaxis, :]        # (n, NPANEL)
    width = lo * (ratio - 1.0)
    z = lo[:, :, np.newaxis] + width[:, :, np.newaxis] * _RP_GL_X
    wt = width[:, :, np.newaxis] * _RP_GL_W
    n = z0.shape[0]
    return z.reshape(n, -1), wt.reshape(n, -1)


def _radial_pair_half(F_call, spec, swap, ts_w, ts_dw, ts_half):
    t = spec.truncation_radius
    wgrid = ts_w[np.newaxis, :]

    def g(s_nodes):
        s = s_nodes[:, np.newaxis]
        m = np.minimum(s, 2.0 * t - s)
        d = m * wgrid
        np.maximum(d, 2e-15 * s, out=d)
        x = 0.5 * (s + d)
        y = 0.5 * (s - d)
        if swap:
            x, y = y, x
        ns, nw = x.shape
        xf = x.reshape(-1, 1)
        yf = y.reshape(-1, 1)
        z0 = np.abs(xf - yf)
        z1 = xf + yf
        np.maximum(z0, z1 * 1e-17, out=z0)
        z, zw = _z_mesh(z0, z1)
        u = (xf * xf + yf * yf - z * z) / (2.0 * xf * yf)
        np.clip(u, -1.0, 1.0, out=u)
        vals = np.asarray(
            F_call(np.broadcast_to(xf, z.shape), np.broadcast_to(yf, z.shape), u, z),
            dtype=np.float64)
        # int_{-1}^{1} F du = (1/xy) int_{|x-y|}^{x+y} z F dz; the x^2 y^2
        # measure leaves a factor x y
        inner_u = (vals * z * zw).sum(axis=1).reshape(ns, nw) * (x * y)
        inner5 = inner_u @ ts_dw
        inner4 = inner_u[:, ts_half] @ ts_dw[ts_half] * 2.0
        scale = 0.5 * m[:, 0]
        return scale * inner5, scale * np.abs(inner5 - inner4)

    bp = _geometric_breakpoints(t, ratio=8.0, floor_frac=1e-10)
    bp = np.concatenate([bp, 2.0 * t - bp[::-1][1:]])
    res = _adaptive_gk(g, bp, spec, evals_per_node=ts_w.size * _RP_NPANEL * 6)
    return res


def integrate_radial_pair(F, spec):
    """6-D integral of a bi-radial integrand via the s-wave reduction.

    Computes 8 pi^2 int_0^T x^2 dx int_0^T y^2 dy int_{-1}^{1} du F(x,y,u)
    with T = truncation_radius.  ``F`` must accept broadcast NumPy arrays;
    integrable singularities as |x - y|_vec -> 0 are supported.  An
    integrand that declares a ``z`` keyword receives the vector distance
    |x - y|_vec directly, which is exact where recomputing it from u would
    cancel catastrophically.
    """
    try:
        takes_z = "z" in inspect.signature(F).parameters
    except (TypeError, ValueError):
        takes_z = False
    if takes_z:
        F_call = lambda x, y, u, z: F(x, y, u, z=z)
    else:
        F_call = lambda x, y, u, z: F(x, y, u)
    lower = _radial_pair_half(F_call, spec, False, _TS_W4, _TS_DW4, _TS4_HALF)
    upper = _radial_pair_half(F_call, spec, True, _TS_W4, _TS_DW4, _TS4_HALF)
    value = 8.0 * np.pi ** 2 * (lower.value + upper.value)
    err = 8.0 * np.pi ** 2 * (lower.err_estimate + upper.err_estimate)
    return QuadResult(value, err, lower.evaluations + upper.evaluations)
