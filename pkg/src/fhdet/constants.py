"""Limit constants of the strong Szego theorems and their matrix analogue.

For a circle symbol phi:   G = exp((log phi)_0),
                           E = exp( sum_{k>=1} k (log phi)_k (log phi)_{-k} ),
                           G2 = exp((log phi)_0 - phi_0 + 1).
For a line symbol sigma:   G = exp(tau(0)),
                           E = exp( int_0^inf x tau(x) tau(-x) dx ),
                           G2 = exp((1/2pi) int (log sigma - sigma + 1)),
with tau the Fourier transform of log sigma.  For the 2x2 matrix symbol the
E factor becomes det W(tau) W(tau^{-1}) = det(I - H1 H2) with Hankel kernels
built from the transforms of tau - I and tau^{-1} - I.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from .foundation import (
    DivergentConstantError,
    NumericsError,
    TruncationBudgetError,
    gauss_legendre,
    geometric_halfline_rule,
    lu_logdet,
)
from .symbols import (
    FHParams,
    SechScalar,
    ToeplitzPure,
    ToeplitzReg,
    WHPure,
    WHReg,
    circle_fourier_coeffs,
    eval_circle,
    eval_line,
    line_log_fourier,
    line_log_symbol,
    matrix_tau_eval,
    transform_interpolator,
)


class ZeroDeterminantSymbolError(NumericsError):
    """The 2x2 symbol determinant vanishes on the real line."""


@dataclass(frozen=True)
class LimitConstants:
    """G, E, G2 for one symbol.  E is None when its defining sum/integral
    diverges (pure symbols); provenance notes say how each field was made."""

    G: complex
    E: complex | None
    G2: complex
    notes: dict = field(default_factory=dict, compare=False)

    def require_E(self) -> complex:
        if self.E is None:
            raise DivergentConstantError(
                f"E diverges for this symbol: {self.notes.get('E', '')}")
        return self.E


# ---------------------------------------------------------------------------
# circle symbols
# ---------------------------------------------------------------------------

_CIRCLE_FFT_SIZE = 1 << 12


def _log_symbol_circle_coeffs(spec: ToeplitzReg):
    n = _CIRCLE_FFT_SIZE
    th = 2.0 * np.pi * np.arange(n) / n
    z = np.exp(1j * th)
    a, b = spec.params.alpha, spec.params.beta
    logs = a * np.log(1.0 - spec.r * z) + b * np.log(1.0 - spec.r / z)
    return np.fft.fft(logs) / n          # index k (mod n) -> (log phi)_k


@functools.lru_cache(maxsize=None)
def circle_constants(spec) -> LimitConstants:
    """G, E, G2 of a circle symbol.

    Regular symbols get all three (E summed with a certified geometric
    tail); the pure symbol only G and G2, since its E sum diverges.
    """
    if isinstance(spec, ToeplitzReg):
        c = _log_symbol_circle_coeffs(spec)
        kmax = _CIRCLE_FFT_SIZE // 2 - 1
        k = np.arange(1, kmax + 1)
        terms = k * c[k] * c[-k]
        tail = np.max(np.abs(terms[-8:]))
        if tail > 1e-15 * max(1.0, np.abs(terms).max()):
            raise TruncationBudgetError(
                f"E tail not certified: last terms ~ {tail:.2e}")
        phi0 = circle_fourier_coeffs(spec, 0, 0).coeff(0)
        g = np.exp(c[0])
        e = np.exp(np.sum(terms))
        g2 = np.exp(c[0] - phi0 + 1.0)
        return LimitConstants(g, e, g2, {"E": "fft log-coefficient sum"})
    if isinstance(spec, ToeplitzPure):
        log0 = _pure_log_mean(spec.params)
        phi0 = circle_fourier_coeffs(spec, 0, 0).coeff(0)
        return LimitConstants(np.exp(log0), None,
                              np.exp(log0 - phi0 + 1.0),
                              {"E": "divergent for the pure symbol"})
    raise TypeError(f"not a circle symbol: {spec!r}")


def _pure_log_mean(params: FHParams) -> complex:
    # (log phi)_0 = (1/2pi) int_0^2pi [(a+b) log(2 sin(t/2)) + i(t-pi)(a-b)/2]
    # the second part integrates to zero exactly; the first is an integrable
    # log singularity handled by folding onto (0, pi) with geometric panels
    a, b = params.alpha, params.beta
    edges = np.pi * 0.5 ** np.arange(60, -1, -1)
    total = 0.0
    gx, gw = np.polynomial.legendre.leggauss(16)
    prev = 0.0
    for e in edges:
        half = 0.5 * (e - prev)
        x = prev + half * (gx + 1.0)
        total += np.sum(half * gw * np.log(2.0 * np.sin(0.5 * x)))
        prev = e
    return (a + b) * (2.0 * total) / (2.0 * np.pi)


# ---------------------------------------------------------------------------
# line symbols
# ---------------------------------------------------------------------------

def _is_even_log_symbol(spec) -> bool:
    if isinstance(spec, SechScalar):
        return True
    if isinstance(spec, (WHReg, WHPure)):
        return spec.params.alpha == spec.params.beta
    return False


def _tau_decay_scale(spec) -> float:
    """Inverse decay rate of tau; sets the E-integral truncation point."""
    if isinstance(spec, WHReg):
        return 1.0 / spec.eps
    if isinstance(spec, SechScalar):
        s = np.sin(np.pi * spec.a)
        # nearest singularity of log(1 + sign*s*sech(pi xi)) above the axis:
        # either the sech pole at i/2 or the zero cosh(pi xi) = -+ s
        w = -spec.sign * s
        acos = np.arccos(complex(w))
        cands = [0.5]
        if abs(acos.imag) < 1e-12 and 0.0 < acos.real < np.pi:
            cands.append(acos.real / np.pi)
        return 1.0 / min(cands)
    raise TypeError(spec)


def _e_integral_line(spec, rtol: float = 5e-12) -> complex:
    scale = _tau_decay_scale(spec)
    s_max = 32.0 * scale
    rule = geometric_halfline_rule(s_max, 16, first_panel=min(1.0, scale))
    even = _is_even_log_symbol(spec)
    tp = np.array([line_log_fourier(spec, x) for x in rule.nodes])
    tm = tp if even else np.array([line_log_fourier(spec, -x)
                                   for x in rule.nodes])
    integrand = rule.nodes * tp * tm
    if np.abs(integrand[-1]) > 1e-13 * max(1.0, np.abs(integrand).max()):
        raise TruncationBudgetError("E integrand tail not certified")
    return np.sum(rule.weights * integrand)


def _g2_exponent_line(spec) -> complex:
    """(1/2pi) int (log sigma(x) - sigma(x) + 1) dx, folded onto (0, inf)."""
    def f(t):
        val = (line_log_symbol(spec, t) - eval_line(spec, t) + 1.0
               + line_log_symbol(spec, -t) - eval_line(spec, -t) + 1.0)
        return val

    def part(which):
        v1, _ = scipy.integrate.quad(lambda t: getattr(f(t), which), 0.0, 1.0,
                                     limit=400, epsabs=1e-13, epsrel=1e-12,
                                     points=[0.0])
        v2, _ = scipy.integrate.quad(lambda u: getattr(f(1.0 / u) / u ** 2, which),
                                     0.0, 1.0, limit=400, epsabs=1e-13,
                                     epsrel=1e-12)
        return v1 + v2

    return (part("real") + 1j * part("imag")) / (2.0 * np.pi)


@functools.lru_cache(maxsize=None)
def line_constants(spec) -> LimitConstants:
    """G, E, G2 of a line symbol; E is omitted for the pure symbol."""
    if isinstance(spec, (WHReg, SechScalar)):
        tau0 = line_log_fourier(spec, 0.0)
        g2 = np.exp(_g2_exponent_line(spec))
        e = np.exp(_e_integral_line(spec))
        return LimitConstants(np.exp(tau0), e, g2,
                              {"E": "quadrature of x tau(x) tau(-x)"})
    if isinstance(spec, WHPure):
        g = np.exp(_pure_line_log_mean(spec))
        g2 = np.exp(_g2_exponent_line(spec))
        return LimitConstants(g, None, g2,
                              {"E": "divergent for the pure symbol"})
    raise TypeError(f"not a line symbol: {spec!r}")


def _pure_line_log_mean(spec: WHPure) -> complex:
    # tau(0) = (1/2pi) int log sigma; fold so the 1/xi tails cancel
    def f(t):
        return line_log_symbol(spec, t) + line_log_symbol(spec, -t)

    def part(which):
        v1, _ = scipy.integrate.quad(lambda t: getattr(f(t), which), 0.0, 1.0,
                                     limit=400, epsabs=1e-13, epsrel=1e-12,
                                     points=[0.0])
        v2, _ = scipy.integrate.quad(lambda u: getattr(f(1.0 / u) / u ** 2, which),
                                     0.0, 1.0, limit=400, epsabs=1e-13,
                                     epsrel=1e-12)
        return v1 + v2

    return (part("real") + 1j * part("imag")) / (2.0 * np.pi)


def line_mean_deviation(spec) -> complex:
    """(1/2pi) int (sigma(x) - 1) dx; the trace density of W_R - I.

    Defined for symbols with sigma - 1 absolutely integrable (alpha = beta
    for the singular families).
    """
    if isinstance(spec, (WHPure, WHReg)) and \
            spec.params.alpha != spec.params.beta:
        raise DivergentConstantError(
            "sigma - 1 is not absolutely integrable when alpha != beta")

    def f(t):
        return eval_line(spec, t) + eval_line(spec, -t) - 2.0

    def part(which):
        v1, _ = scipy.integrate.quad(lambda t: getattr(f(t), which), 0.0, 1.0,
                                     limit=400, epsabs=1e-13, epsrel=1e-12,
                                     points=[0.0])
        v2, _ = scipy.integrate.quad(lambda u: getattr(f(1.0 / u) / u ** 2, which),
                                     0.0, 1.0, limit=400, epsabs=1e-13,
                                     epsrel=1e-12)
        return v1 + v2

    return (part("real") + 1j * part("imag")) / (2.0 * np.pi)


# ---------------------------------------------------------------------------
# sech pair and the matrix E factor
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def sech_E_pair(alpha: complex) -> complex:
    """E(1 - s sech pi xi) E(1 + s sech pi xi) with s = sin(pi alpha)."""
    alpha = complex(alpha)
    if abs(alpha.real) >= 0.5:
        raise ValueError("need |Re alpha| < 1/2")
    minus = line_constants(SechScalar(-1, alpha)).require_E()
    plus = line_constants(SechScalar(+1, alpha)).require_E()
    return minus * plus


_MATRIX_FFT_HALF_WIDTH = 18.0
_MATRIX_FFT_SIZE = 1 << 14


def _matrix_transforms(params: FHParams):
    """FFT interpolators for the entries of tau - I and tau^{-1} - I."""
    def sample(xi):
        t = matrix_tau_eval(params, xi)
        d = np.linalg.det(t)
        if np.min(np.abs(d)) < 1e-12:
            raise ZeroDeterminantSymbolError(
                "det tau vanishes on the sampled line")
        tinv = np.linalg.inv(t)
        eye = np.eye(2)
        return t - eye, tinv - eye

    L, n = _MATRIX_FFT_HALF_WIDTH, _MATRIX_FFT_SIZE
    xi = -L + (2.0 * L / n) * np.arange(n)
    t_m_i, tinv_m_i = sample(xi)
    interps = {}
    for (name, block) in (("tau", t_m_i), ("tauinv", tinv_m_i)):
        for a in range(2):
            for b in range(2):
                entry = np.ascontiguousarray(block[:, a, b])
                interps[(name, a, b)] = transform_interpolator(
                    lambda _, e=entry: e, L, n)
    return interps


def _hankel_truncation(interps) -> float:
    """Smallest S with all transform entries below 1e-13 beyond S."""
    probe = np.linspace(5.0, 720.0, 144)
    s_needed = 5.0
    for key, it in interps.items():
        mags = np.abs(it(probe)) + np.abs(it(-probe))
        above = probe[mags > 1e-13]
        if len(above):
            s_needed = max(s_needed, float(above[-1]) + 10.0)
    return s_needed


@functools.lru_cache(maxsize=None)
def matrix_E_factor(params: FHParams, order: int = 16) -> complex:
    """det W(tau) W(tau^{-1}) as the block Fredholm determinant
    det(I - H1 H2), H1 from tau - I at x+y and H2 from tau^{-1} - I at
    -(x+y), discretized on a geometric half-line rule."""
    interps = _matrix_transforms(params)
    s_max = _hankel_truncation(interps)
    rule = geometric_halfline_rule(s_max, order, first_panel=0.5)
    x = rule.nodes
    sq = np.sqrt(rule.weights)
    ssum = x[:, None] + x[None, :]
    m = len(x)
    h1 = np.zeros((m, 2, m, 2), dtype=complex)
    h2 = np.zeros((m, 2, m, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            h1[:, a, :, b] = interps[("tau", a, b)](ssum)
            h2[:, a, :, b] = interps[("tauinv", a, b)](-ssum)
    scale = sq[:, None, None, None] * sq[None, None, :, None]
    h1 = (h1 * scale).reshape(2 * m, 2 * m)
    h2 = (h2 * scale).reshape(2 * m, 2 * m)
    logdet = lu_logdet(np.eye(2 * m) - h1 @ h2)
    return np.exp(logdet)


def C_constant(params: FHParams) -> complex:
    """4^(-alpha beta) det W(tau) W(tau^{-1})."""
    a, b = params.alpha, params.beta
    return np.exp(-a * b * math.log(4.0)) * matrix_E_factor(params)
