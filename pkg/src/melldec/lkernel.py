"""Observation-side kernels for multiplicative deconvolution.

The estimators average a kernel L over the observed sample.  For beta-type
errors and matching kernel families L has closed forms; for every other
catalog model it is tabulated once by inverting the transform-domain ratio
along a vertical line, after which evaluation is a cubic-spline lookup.
"""

import dataclasses
import math

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    DivergentIntegrand,
    DomainError,
    NonConvergence,
    NotIdentifiable,
    StripViolation,
)
from .kernels import _jackknife_coeffs

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_DECAY_TOL = 1e-10   # required |rho(+-T)| relative to max |rho|
_TAIL_TOL = 1e-12    # frequency-envelope floor for the line integrand
_T_LO = -18.0        # left edge of the zero-case log grid


@dataclasses.dataclass(frozen=True)
class LKernel:
    """A ready-to-evaluate observation kernel.

    kind is one of "closed_beta", "closed_beta_zero", "numeric",
    "numeric_zero", "two_sided".  Point-target kernels implement
    evaluate(x, y); zero-target kernels implement evaluate0(y).  Instances
    are immutable; evaluation is pure and safe to share across threads.
    """

    kind: str
    s: float
    h: float
    params: dict
    point_fn: object = None
    zero_fn: object = None
    rho_fn: object = None
    t_grid: object = None
    rho_grid: object = None
    kernel: object = None

    def evaluate(self, x, y):
        """Kernel value L(x, y) for a point target x > 0."""
        if self.point_fn is None:
            raise DomainError("this kernel targets the origin; use evaluate0")
        x = float(x)
        if not x > 0.0:
            raise DomainError("evaluation point x must be positive")
        yy = np.atleast_1d(np.asarray(y, dtype=float))
        out = self.point_fn(x, yy)
        return float(out[0]) if np.ndim(y) == 0 else out

    def evaluate0(self, y):
        """Kernel value L(y) for the zero-point target; y = 0 is allowed."""
        if self.zero_fn is None:
            raise DomainError("this kernel targets a positive point; use evaluate")
        yy = np.atleast_1d(np.asarray(y, dtype=float))
        out = self.zero_fn(yy)
        return float(out[0]) if np.ndim(y) == 0 else out

    def rho(self, t):
        """Profile rho(t) so that L factorises through t = ln(y/x) or ln(y/h)."""
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        out = self.rho_fn(tt)
        return float(out[0]) if np.ndim(t) == 0 else out


def _check_h(h):
    h = float(h)
    if not h > 0.0:
        raise ValueError("bandwidth h must be positive")
    return h


# ---------------------------------------------------------------------------
# closed forms for beta-type errors g(x) = nu x^(nu-1) on (0, 1]


def lkernel_closed_beta(nu, m, h):
    """Exact point-target kernel for beta-type errors and the Gaussian
    jackknife kernel of order m.

    L(x, y) = (1/(nu sqrt(2 pi))) sum_j c_j exp(-v^2/(2 j^2 h^2))
              (1/(x j h)) (nu + v / (j^2 h^2)),   v = ln(x/y),
    and 0 for y <= 0.  The form does not depend on s.
    """
    nu = float(nu)
    if nu <= 0.0:
        raise ValueError("nu must be positive")
    h = _check_h(h)
    c = _jackknife_coeffs(m)
    js = np.arange(1, m + 2, dtype=float)

    def profile(v):
        acc = np.zeros_like(v)
        for j, cj in zip(js, c):
            b2 = (j * h) ** 2
            acc += cj * np.exp(-v * v / (2.0 * b2)) / (j * h) * (nu + v / b2)
        return acc / (nu * _SQRT_2PI)

    def point_fn(x, y):
        out = np.zeros_like(y)
        pos = y > 0.0
        out[pos] = profile(np.log(x / y[pos])) / x
        return out

    def rho_fn(t):
        return profile(-t)

    return LKernel("closed_beta", 0.0, h,
                   {"nu": nu, "m": int(m), "s_free": True},
                   point_fn=point_fn, rho_fn=rho_fn)


def lkernel_closed_beta_zero(nu, m, s, h):
    """Exact zero-target kernel for beta-type errors and the exponential-base
    kernel: L(y) = sum_j c_j (1/(jh)) e^{-y/(jh)} (1 - y/(jh nu)), y >= 0.

    s only labels the inversion line the form was derived on; the result is
    independent of it.
    """
    nu = float(nu)
    if nu <= 0.0:
        raise ValueError("nu must be positive")
    s = float(s)
    if s <= 0.0:
        raise ValueError("s must be positive for the zero-point kernel")
    h = _check_h(h)
    c = _jackknife_coeffs(m)
    js = np.arange(1, m + 2, dtype=float)

    def zero_fn(y):
        out = np.zeros_like(y)
        ok = y >= 0.0
        yv = y[ok]
        acc = np.zeros_like(yv)
        for j, cj in zip(js, c):
            jh = j * h
            acc += cj / jh * np.exp(-yv / jh) * (1.0 - yv / (jh * nu))
        out[ok] = acc
        return out

    def rho_fn(t):
        return h * np.exp(s * t) * zero_fn(h * np.exp(t))

    return LKernel("closed_beta_zero", s, h,
                   {"nu": nu, "m": int(m), "s_free": True},
                   zero_fn=zero_fn, rho_fn=rho_fn)


# ---------------------------------------------------------------------------
# numerical line inversion


def _freq_budget(integrand, start):
    """Smallest frequency beyond which |integrand| stays below the envelope
    floor, found by doubling; raises DivergentIntegrand if no such point
    exists within the budget."""
    limit = start * 2.0 ** 12
    W = start
    while W <= limit:
        om = np.linspace(0.0, W, 4097)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            vals = np.abs(integrand(om))
        peak = vals.max()
        if not np.isfinite(peak) or peak == 0.0:
            raise DivergentIntegrand("line integrand is not finite")
        floor = _TAIL_TOL * peak
        if vals[-205:].max() < floor:
            below = vals < floor
            # last index where the envelope still pokes above the floor
            idx = np.nonzero(~below)[0].max()
            return om[min(idx + 1, 4096)] * 1.05 + 1.0
        W *= 2.0
    raise DivergentIntegrand(
        "line integrand does not decay below the envelope floor; "
        "the kernel/error pairing is too rough for this inversion")


def _fourier_rows(t, om, Fv):
    # phase matrix in row blocks to keep memory flat for fine tables
    out = np.empty(t.size)
    for lo in range(0, t.size, 4096):
        hi = min(lo + 4096, t.size)
        out[lo:hi] = (np.exp(-1j * np.multiply.outer(t[lo:hi], om)) @ Fv).real
    return out


def _rho_table(integrand, T0, om_end, h):
    """Tabulate rho(t) = (1/2 pi) int e^{-i om t} F(om) d om on [-T, T].

    Uniform trapezoid in frequency with step pi/T: its error is the
    periodisation of rho with period 2T, which the decay requirement at the
    edges makes negligible.  T doubles until the edges decay.
    """
    T = T0
    dt = min(1.0 / 256.0, h / 32.0)
    for _ in range(5):
        dom = math.pi / T
        om = np.arange(0.0, om_end + dom, dom)
        Fv = np.asarray(integrand(om), dtype=complex)
        Fv[0] *= 0.5
        nt = 2 * int(T / dt) + 1
        t = np.linspace(-T, T, nt)
        rho = (dom / math.pi) * _fourier_rows(t, om, Fv)
        peak = np.abs(rho).max()
        if max(abs(rho[0]), abs(rho[-1])) < _DECAY_TOL * peak:
            return t, rho, T
        T *= 2.0
    raise NonConvergence("rho table does not decay on [-T, T] even after "
                         "enlarging the range; integrand too slowly mixing")


def _spline_or_zero(t, rho):
    sp = CubicSpline(t, rho, extrapolate=False)

    def f(tt):
        vals = sp(tt)
        return np.where(np.isnan(vals), 0.0, vals)

    return f


def _closed_beta_applies(model, K):
    return (model.kind in ("uniform", "beta", "power")
            and abs(model.params.get("theta", 1.0) - 1.0) < 1e-15
            and K.family == "GaussianJackknife")


def lkernel_numeric(model, K, s, h, prefer_closed=True):
    """Point-target kernel for an arbitrary catalog error model.

    Tabulates rho(t) = (1/2 pi) int e^{-i om t} Kv((s+i om) h) /
    gt(1 - s - i om) d om, then L(x, y) = x^(s-1) y^(-s) rho(ln(y/x)) for
    y/x > 0 and 0 otherwise.  When the model is beta-type with unit scale and
    K is the Gaussian jackknife family, the closed form is returned instead.
    """
    s = float(s)
    h = _check_h(h)
    if prefer_closed and _closed_beta_applies(model, K):
        ck = lkernel_closed_beta(model.params["shape"], K.m, h)
        return dataclasses.replace(ck, s=s)
    sigma = 1.0 - s
    if not model.strip.contains(sigma):
        raise StripViolation(sigma, model.strip)

    def integrand(om):
        z = s + 1j * om
        return K.transform(z * h) / model.mellin(1.0 - z)

    om_end = _freq_budget(integrand, 8.0 / h)
    T0 = max(4.0, 12.0 * (K.m + 1) * h)
    t, rho, T = _rho_table(integrand, T0, om_end, h)
    rho_at = _spline_or_zero(t, rho)

    def point_fn(x, y):
        out = np.zeros_like(y)
        idx = np.flatnonzero(y > 0.0)
        tt = np.log(y[idx] / x)
        ok = np.abs(tt) <= T
        sel = idx[ok]
        out[sel] = x ** (s - 1.0) * y[sel] ** (-s) * rho_at(tt[ok])
        return out

    return LKernel("numeric", s, h,
                   {"model": model.label, "kernel": K.family, "m": K.m,
                    "T": T, "omega_max": om_end},
                   point_fn=point_fn, rho_fn=rho_at, t_grid=t, rho_grid=rho,
                   kernel=K)


def lkernel_zero_numeric(model, K, s, h, prefer_closed=True):
    """Zero-target kernel: L(y) = h^(s-1) y^(-s) rho_s(ln(y/h)) with rho_s
    tabulated from the Mellin transform of the origin kernel K.

    Internally the table stores sigma(t) = e^{-s t} rho_s(t) = h L(h e^t),
    which tends to a finite plateau as t -> -inf; evaluation at y = 0 (and
    below the table) returns the plateau value.
    """
    s = float(s)
    if s <= 0.0:
        raise ValueError("s must be positive for the zero-point kernel")
    h = _check_h(h)
    if K.family != "ZeroPoint":
        raise ValueError("zero-target inversion needs a ZeroPoint kernel")
    ks = K.params.get("s")
    if ks is not None and abs(float(ks) - s) > 1e-12:
        raise ValueError("kernel was built for a different s")
    if prefer_closed and (model.kind in ("uniform", "beta", "power")
                          and abs(model.params.get("theta", 1.0) - 1.0) < 1e-15
                          and K.params.get("base") == "exp"):
        ck = lkernel_closed_beta_zero(model.params["shape"], K.m, s, h)
        return dataclasses.replace(ck, s=s)
    sigma_line = 1.0 - s
    if not model.strip.contains(sigma_line):
        raise StripViolation(sigma_line, model.strip)

    def integrand(om):
        z = s + 1j * om
        return K.transform(z) / model.mellin(1.0 - z)

    om_end = _freq_budget(integrand, 16.0)
    t_hi = 4.0 + math.log(K.m + 1.0)
    for _ in range(5):
        span = t_hi - _T_LO
        # alias period: the left tail of rho_s decays like e^{s t}, so push
        # the periodisation far enough that it cannot leak back into range
        P = span + 26.0 / s + 4.0
        dom = 2.0 * math.pi / P
        om = np.arange(0.0, om_end + dom, dom)
        Fv = np.asarray(integrand(om), dtype=complex)
        Fv[0] *= 0.5
        nt = int(256 * span) + 1
        t = np.linspace(_T_LO, t_hi, nt)
        rho = (dom / math.pi) * _fourier_rows(t, om, Fv)
        sig = np.exp(-s * t) * rho
        peak = np.abs(sig).max()
        if abs(sig[-1]) < _DECAY_TOL * peak:
            break
        t_hi *= 1.6
    else:
        raise NonConvergence("zero-target table does not decay at large y")
    sig_at = CubicSpline(t, sig, extrapolate=False)
    plateau = float(sig[0])

    def zero_fn(y):
        out = np.zeros_like(y)
        neg = y < 0.0
        small = (~neg) & (y <= h * math.exp(_T_LO))
        out[small] = plateau / h
        mid = (~neg) & (~small)
        tt = np.log(y[mid] / h)
        vals = sig_at(tt)
        out[mid] = np.where(np.isnan(vals), 0.0, vals) / h
        return out

    def rho_fn(tt):
        vals = sig_at(tt)
        vals = np.where(np.isnan(vals) & (tt < 0.0), plateau, vals)
        vals = np.where(np.isnan(vals), 0.0, vals)
        return np.exp(s * tt) * vals

    return LKernel("numeric_zero", s, h,
                   {"model": model.label, "kernel": K.family, "m": K.m,
                    "base": K.params.get("base"), "t_hi": t_hi,
                    "omega_max": om_end},
                   zero_fn=zero_fn, rho_fn=rho_fn, t_grid=t,
                   rho_grid=np.exp(s * t) * sig, kernel=K)


def lkernel_two_sided(gplus, gminus, K, s, h, floor=1e-8):
    """Point-target kernel when the error density lives on the whole line.

    gplus and gminus evaluate the transforms of the positive and negative
    parts; the shared denominator is gplus^2 - gminus^2 on the line
    Re(z) = 1 - s, and each sign of y/x gets its own profile table.
    """
    s = float(s)
    h = _check_h(h)

    def denom(om):
        z = 1.0 - s - 1j * om
        return gplus(z) ** 2 - gminus(z) ** 2

    # identifiability margin over the band where the kernel transform matters
    probe = np.linspace(0.0, 64.0 / h, 1025)
    kv = np.abs(K.transform((s + 1j * probe) * h))
    live = probe[kv > 1e-13 * kv.max()]
    z = 1.0 - s - 1j * live
    gp, gm = gplus(z), gminus(z)
    dvals = np.abs(gp ** 2 - gm ** 2)
    scale = max(np.abs(gp).max(), np.abs(gm).max(), 1e-300) ** 2
    if dvals.min() < floor * scale:
        raise NotIdentifiable(
            "transform margin below floor on the inversion line; the error "
            "density is not identifiable from products")

    def integrand_plus(om):
        z = 1.0 - s - 1j * om
        return K.transform((s + 1j * om) * h) * gplus(z) / denom(om)

    def integrand_minus(om):
        z = 1.0 - s - 1j * om
        return K.transform((s + 1j * om) * h) * gminus(z) / denom(om)

    om_end = _freq_budget(integrand_plus, 8.0 / h)
    T0 = max(4.0, 12.0 * (K.m + 1) * h)
    tp, rp, Tp = _rho_table(integrand_plus, T0, om_end, h)
    rho_p = _spline_or_zero(tp, rp)
    if np.abs(integrand_minus(np.linspace(0.0, om_end, 513))).max() == 0.0:
        rho_m, Tm, tm, rm = (lambda tt: np.zeros_like(tt)), Tp, tp, np.zeros_like(rp)
    else:
        tm, rm, Tm = _rho_table(integrand_minus, T0, om_end, h)
        rho_m = _spline_or_zero(tm, rm)

    def point_fn(x, y):
        out = np.zeros_like(y)
        idx = np.flatnonzero(y != 0.0)
        tt = np.log(np.abs(y[idx]) / x)
        pos = y[idx] > 0.0
        ok_p = pos & (np.abs(tt) <= Tp)
        ok_m = (~pos) & (np.abs(tt) <= Tm)
        for ok, rho_at, sign in ((ok_p, rho_p, 1.0), (ok_m, rho_m, -1.0)):
            sel = idx[ok]
            out[sel] = sign * x ** (s - 1.0) * np.abs(y[sel]) ** (-s) \
                * rho_at(tt[ok])
        return out

    return LKernel("two_sided", s, h,
                   {"kernel": K.family, "m": K.m, "T": Tp,
                    "omega_max": om_end},
                   point_fn=point_fn, rho_fn=rho_p, t_grid=tp,
                   rho_grid=np.stack([rp, rm]), kernel=K)
