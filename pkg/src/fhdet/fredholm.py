"""Nystrom engine for Fredholm determinants det(I-K) and det2(I-K).

Kernels are scalar or 2x2-block, on a finite interval or a truncated
half-line.  Discretization is symmetric, A = I - W^(1/2) K W^(1/2) with
W = diag(weights), which keeps symmetrizable kernels numerically normal.
Ratio determinants det(I -+ (I -+ A0)^(-1) A1) are formed as differences of
two plain log-determinants, which is an identity in finite dimensions and
stays meaningful when A0 alone is not trace class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .foundation import QuadratureRule, SingularMatrixError, lu_logdet


class NearSingularError(SingularMatrixError):
    """Pivot ratio collapsed; carries the offending ratio as .pivot_ratio."""

    def __init__(self, msg, pivot_ratio):
        super().__init__(msg)
        self.pivot_ratio = pivot_ratio


@dataclass(frozen=True)
class KernelSpec:
    """Quadrature-ready integral kernel.

    evaluator(x, y) must accept broadcast arrays and return values of shape
    x.shape (scalar kernel) or x.shape + (2, 2) (block kernel).  diagonal,
    when given, resolves k(x, x) for kernels with a jump across x = y.
    singularity is advisory metadata: 'smooth', 'corner-origin' or
    'diagonal-jump'.
    """

    evaluator: Callable
    block_shape: int = 1
    domain: tuple[float, float] = (0.0, 1.0)
    singularity: str = "smooth"
    diagonal: Optional[Callable] = None

    def __post_init__(self):
        if self.block_shape not in (1, 2):
            raise ValueError("block_shape must be 1 or 2")
        if self.singularity not in ("smooth", "corner-origin", "diagonal-jump"):
            raise ValueError(f"unknown singularity tag {self.singularity!r}")


@dataclass
class FredholmResult:
    """Log-determinant values plus the refinement history that produced them.

    refinement_history holds (points, log_det) pairs; err_est is the change
    of exp(log_det) across the last refinement (0 for a single rule).
    """

    log_det: complex
    log_det2: Optional[complex] = None
    quadrature_order: int = 0
    refinement_history: list = field(default_factory=list)
    converged: bool = True
    err_est: float = 0.0


def weighted_matrix(kernel: KernelSpec, rule: QuadratureRule) -> np.ndarray:
    """W^(1/2) K W^(1/2) on the rule's nodes (block kernels interleaved)."""
    x = rule.nodes
    sq = np.sqrt(rule.weights)
    xx = x[:, None]
    yy = x[None, :]
    vals = np.asarray(kernel.evaluator(xx, yy), dtype=complex)
    m = len(x)
    if kernel.block_shape == 1:
        if vals.shape != (m, m):
            raise ValueError(f"scalar evaluator returned shape {vals.shape}")
        if kernel.diagonal is not None:
            vals[np.arange(m), np.arange(m)] = kernel.diagonal(x)
        return sq[:, None] * vals * sq[None, :]
    if vals.shape != (m, m, 2, 2):
        raise ValueError(f"block evaluator returned shape {vals.shape}")
    if kernel.diagonal is not None:
        vals[np.arange(m), np.arange(m)] = kernel.diagonal(x)
    vals = vals * (sq[:, None, None, None] * sq[None, :, None, None])
    return vals.transpose(0, 2, 1, 3).reshape(2 * m, 2 * m)


def _logdet_checked(a: np.ndarray) -> complex:
    import scipy.linalg
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    d = np.abs(np.diag(lu))
    if d.min() == 0.0:
        raise SingularMatrixError("zero pivot")
    ratio = d.min() / d.max()
    if ratio < 1e-13:
        raise NearSingularError(f"pivot ratio {ratio:.2e}", ratio)
    dd = np.diag(lu)
    re = float(np.sum(np.log(np.abs(dd))))
    im = float(np.sum(np.angle(dd)))
    if (-1.0) ** np.count_nonzero(piv != np.arange(len(piv))) < 0:
        im += np.pi
    return complex(re, im)


def nystrom_det(kernel: KernelSpec, rule: QuadratureRule) -> FredholmResult:
    """det(I - K) on the rule (log scale)."""
    kw = weighted_matrix(kernel, rule)
    ld = _logdet_checked(np.eye(len(kw)) - kw)
    return FredholmResult(ld, None, len(rule), [(len(rule), ld)])


def nystrom_det2(kernel: KernelSpec, rule: QuadratureRule) -> FredholmResult:
    """det(I - K) and det2(I - K) = det(I - K) e^{tr K} on the rule.

    Diagonal entries under a jump come from the kernel's diagonal policy
    (symmetric average of the one-sided limits, by convention of the
    kernel builders).
    """
    kw = weighted_matrix(kernel, rule)
    ld = _logdet_checked(np.eye(len(kw)) - kw)
    ld2 = ld + np.trace(kw)
    return FredholmResult(ld, ld2, len(rule), [(len(rule), ld)])


def ratio_det(a0: KernelSpec, a1: KernelSpec, rule: QuadratureRule,
              sign: int = 1) -> FredholmResult:
    """det(I - s (I - s A0)^(-1) A1) with s = sign, both kernels on one rule.

    Computed as exp(logdet(I - s A0 - s A1) - logdet(I - s A0)); the two
    formulations agree identically in finite dimensions.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +-1")
    m0 = weighted_matrix(a0, rule)
    m1 = weighted_matrix(a1, rule)
    eye = np.eye(len(m0))
    ld = (_logdet_checked(eye - sign * (m0 + m1))
          - _logdet_checked(eye - sign * m0))
    return FredholmResult(ld, None, len(rule), [(len(rule), ld)])


def refine_until(kernel: KernelSpec, rule_family: Callable[[int], QuadratureRule],
                 tol: float, det2: bool = False,
                 max_refinements: int = 5) -> FredholmResult:
    """Refine rule_family(0), rule_family(1), ... until the determinant
    moves by less than tol, recording the history.

    On budget exhaustion the best value is returned with converged=False
    and the last observed change as err_est.
    """
    history = []
    prev = None
    result = None
    for level in range(max_refinements + 1):
        rule = rule_family(level)
        result = nystrom_det2(kernel, rule) if det2 else nystrom_det(kernel, rule)
        val = result.log_det2 if det2 else result.log_det
        history.append((len(rule), val))
        if prev is not None:
            change = abs(np.exp(val) - np.exp(prev))
            if change < tol:
                result.refinement_history = history
                result.err_est = change
                return result
        prev = val
    result.refinement_history = history
    result.converged = False
    result.err_est = abs(np.exp(history[-1][1]) - np.exp(history[-2][1])) \
        if len(history) > 1 else float("inf")
    return result


def richardson_h2(values) -> complex:
    """Extrapolate a sequence computed at h, h/2, h/4, ... assuming an
    error expansion in even powers of h (trapezoid discretizations)."""
    v = [complex(x) for x in values]
    k = 1
    while len(v) > 1:
        factor = 4.0 ** k
        v = [(factor * b - a) / (factor - 1.0) for a, b in zip(v[:-1], v[1:])]
        k += 1
    return v[0]
