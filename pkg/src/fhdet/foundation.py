"""Special functions, quadrature rules and dense complex linear algebra.

Everything downstream (symbol evaluation, Fredholm determinants, the
Toeplitz / Wiener-Hopf pipelines) consumes the primitives in this module.
All functions are pure; rules and matrices are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


class NumericsError(Exception):
    """Base class for numerical failures in this package."""


class PoleError(NumericsError):
    """Gamma evaluated at a non-positive integer."""


class SingularMatrixError(NumericsError):
    """Exactly singular matrix (zero pivot) in an LU factorization."""


class SingularPointError(NumericsError):
    """Symbol evaluated at its singular point."""


class TruncationBudgetError(NumericsError):
    """A requested coefficient tail bound cannot be met within budget."""


class DivergentConstantError(NumericsError):
    """A limit constant whose defining sum/integral does not converge."""


class ParameterStripError(ValueError):
    """Parameters outside the admissible strip |Re(alpha+-beta)| < 1."""


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

# Lanczos coefficients, g = 7, n = 9.  Gives ~13 significant digits on the
# right half-plane; the reflection formula covers Re z < 1/2.
_LANCZOS_G = 7.0
_LANCZOS_C = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])

_SQRT_TWO_PI = 2.5066282746310002
_LOG_TWO_PI = 1.8378770664093453


def _is_nonpositive_integer(z: complex) -> bool:
    if z.imag != 0.0:
        return False
    r = z.real
    return r <= 0.0 and r == round(r)


def _lanczos_sum(z: complex) -> complex:
    # z is shifted so the series is evaluated at z-1
    zz = z - 1.0
    x = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        x += _LANCZOS_C[i] / (zz + i)
    return x


def complex_gamma(z: complex) -> complex:
    """Gamma function for complex argument.

    Accurate to at least 12 significant digits for |z| <= 50 away from the
    poles.  Raises PoleError at non-positive integers.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"gamma pole at z = {z}")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return np.pi / (np.sin(np.pi * z) * complex_gamma(1.0 - z))
    x = _lanczos_sum(z)
    t = z - 1.0 + _LANCZOS_G + 0.5
    return _SQRT_TWO_PI * t ** (z - 0.5) * np.exp(-t) * x


def complex_log_gamma(z: complex) -> complex:
    """log Gamma(z) without overflow for large |z|.

    The imaginary part is the phase produced by the Lanczos formula (or its
    reflection), not a continuously unwound branch; sums of these values are
    meant to be exponentiated.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"log-gamma pole at z = {z}")
    if z.real < 0.5:
        return (np.log(np.pi) - np.log(np.sin(np.pi * z))
                - complex_log_gamma(1.0 - z))
    x = _lanczos_sum(z)
    t = z - 1.0 + _LANCZOS_G + 0.5
    return 0.5 * _LOG_TWO_PI + (z - 0.5) * np.log(t) - t + np.log(x)


def gen_binomial(a: complex, k: int) -> complex:
    """Generalized binomial coefficient C(a, k) = a(a-1)...(a-k+1)/k!.

    Computed by the stable product recurrence; k must be a non-negative
    integer.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    out = complex(1.0)
    for j in range(k):
        out *= (a - j) / (j + 1)
    return out


def gen_binomial_row(a: complex, kmax: int) -> np.ndarray:
    """C(a, k) for k = 0..kmax as a complex array (same recurrence)."""
    out = np.empty(kmax + 1, dtype=complex)
    out[0] = 1.0
    for k in range(1, kmax + 1):
        out[k] = out[k - 1] * (a - k + 1) / k
    return out


# ---------------------------------------------------------------------------
# quadrature rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Nodes, positive weights and the interval they discretize."""

    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d and equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        a, b = self.domain
        if nodes[0] < a or nodes[-1] > b:
            raise ValueError("nodes outside domain")

    def __len__(self):
        return len(self.nodes)

    def integrate(self, f) -> complex:
        return np.sum(self.weights * f(self.nodes))


def gauss_legendre(m: int, interval: tuple[float, float] = (0.0, 1.0)) -> QuadratureRule:
    """Gauss-Legendre rule with m points, exact through degree 2m-1."""
    if m < 1:
        raise ValueError("m must be >= 1")
    x, w = np.polynomial.legendre.leggauss(m)
    a, b = interval
    half = 0.5 * (b - a)
    return QuadratureRule(a + half * (x + 1.0), half * w, (a, b))


def trapezoid_rule(m: int, interval: tuple[float, float]) -> QuadratureRule:
    """Composite trapezoid rule with m panels (m+1 equispaced nodes).

    Used for the finite-section convolution operators, whose kernels have a
    corner on the diagonal: with equispaced nodes the corner sits on grid
    points and the error has a clean h^2 expansion suitable for Richardson
    extrapolation.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    a, b = interval
    h = (b - a) / m
    nodes = a + h * np.arange(m + 1)
    weights = np.full(m + 1, h)
    weights[0] = weights[-1] = 0.5 * h
    return QuadratureRule(nodes, weights, (a, b))


def _panel_rules(panels, order):
    xs, ws = [], []
    gx, gw = np.polynomial.legendre.leggauss(order)
    for a, b in panels:
        half = 0.5 * (b - a)
        xs.append(a + half * (gx + 1.0))
        ws.append(half * gw)
    return np.concatenate(xs), np.concatenate(ws)


def graded_mesh(levels: int, base_rule_order: int, grading_ratio: float,
                interval: tuple[float, float] = (0.0, 1.0),
                singular_end: str = "left") -> QuadratureRule:
    """Composite Gauss rule on [0,1] graded geometrically toward an endpoint.

    Panels are [r^(k+1), r^k] for k = 0..levels-1 plus a closing panel
    [0, r^levels] that is mapped by x = u^2 so that inverse-square-root
    singularities at the graded endpoint are integrated exactly.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    r = grading_ratio
    if not 0.0 < r < 1.0:
        raise ValueError("grading ratio must lie in (0,1)")
    panels = [(r ** (k + 1), r ** k) for k in range(levels)]
    x, w = _panel_rules(panels, base_rule_order)
    # closing panel [0, r^levels] under x = delta * u^2
    delta = r ** levels
    gx, gw = np.polynomial.legendre.leggauss(base_rule_order)
    u = 0.5 * (gx + 1.0)
    xc = delta * u * u
    wc = 0.5 * gw * delta * 2.0 * u
    x = np.concatenate([xc, x])
    w = np.concatenate([wc, w])
    order = np.argsort(x)
    x, w = x[order], w[order]
    a, b = interval
    endpoint = a if singular_end == "left" else b
    if endpoint != 0.0:
        # distances below machine resolution of the endpoint would collapse
        # onto it; their mass is negligible for integrable singularities
        keep = (b - a) * x > 32.0 * np.finfo(float).eps * abs(endpoint)
        x, w = x[keep], w[keep]
    if singular_end == "left":
        nodes, weights = a + (b - a) * x, (b - a) * w
    elif singular_end == "right":
        nodes, weights = b - (b - a) * x[::-1], (b - a) * w[::-1]
    else:
        raise ValueError("singular_end must be 'left' or 'right'")
    return QuadratureRule(nodes, weights, (a, b))


def double_graded_mesh(levels: int, base_rule_order: int, grading_ratio: float,
                       interval: tuple[float, float] = (0.0, 1.0)) -> QuadratureRule:
    """Composite Gauss rule graded toward both endpoints of the interval."""
    a, b = interval
    mid = 0.5 * (a + b)
    left = graded_mesh(levels, base_rule_order, grading_ratio, (a, mid), "left")
    right = graded_mesh(levels, base_rule_order, grading_ratio, (mid, b), "right")
    return QuadratureRule(np.concatenate([left.nodes, right.nodes]),
                          np.concatenate([left.weights, right.weights]),
                          (a, b))


def geometric_halfline_rule(s_max: float, base_rule_order: int = 16,
                            first_panel: float = 1.0) -> QuadratureRule:
    """Composite Gauss rule on (0, s_max) with geometrically growing panels.

    Suited to smooth integrands with exponential decay on the half-line
    (half-line Hankel kernels and the like).
    """
    edges = [0.0, min(first_panel, s_max)]
    while edges[-1] < s_max:
        edges.append(min(2.0 * edges[-1], s_max))
    panels = list(zip(edges[:-1], edges[1:]))
    x, w = _panel_rules(panels, base_rule_order)
    return QuadratureRule(x, w, (0.0, s_max))


# ---------------------------------------------------------------------------
# dense complex linear algebra
# ---------------------------------------------------------------------------

def _lu_diag_and_sign(m: np.ndarray):
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    d = np.diag(lu)
    if np.any(d == 0):
        raise SingularMatrixError("zero pivot in LU factorization")
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    return d, (-1.0) ** swaps


def lu_logdet(m: np.ndarray) -> complex:
    """Principal log-determinant with the phase accumulated pivot by pivot.

    Returns log|det| + i arg where arg is the sum of the principal arguments
    of the U-diagonal (plus pi per row swap), so exp of the result equals the
    determinant while log|det| never overflows.
    """
    d, sign = _lu_diag_and_sign(m)
    re = float(np.sum(np.log(np.abs(d))))
    im = float(np.sum(np.angle(d)))
    if sign < 0:
        im += np.pi
    return complex(re, im)


def lu_solve(m: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve m x = rhs by partially pivoted LU."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    if np.any(np.diag(lu) == 0):
        raise SingularMatrixError("singular system")
    return scipy.linalg.lu_solve((lu, piv), np.asarray(rhs, dtype=complex),
                                 check_finite=False)
