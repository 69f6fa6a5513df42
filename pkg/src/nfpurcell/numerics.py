"""Shared numerical kernels: Bessel evaluations, bracketed root finding,
adaptive quadrature, and the exponential-plus-offset decay fit.

Everything here is a pure function of its arguments and deterministic, so
callers may use these from concurrent tasks freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _sciint
from scipy import special as _sp

from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    FitDegenerateError,
)

__all__ = [
    "BesselEval",
    "RootBracket",
    "FitProblem",
    "FitResult",
    "bessel_j",
    "bessel_k",
    "find_root",
    "integrate",
    "estimate_offset",
    "fit_exp_offset",
]


@dataclass(frozen=True)
class BesselEval:
    order: int
    argument: float
    value: float
    derivative: float


@dataclass(frozen=True)
class RootBracket:
    lower: float
    upper: float
    tolerance: float = 1e-13

    def __post_init__(self):
        if not (self.lower < self.upper):
            raise DomainError(f"bracket [{self.lower}, {self.upper}] is empty")
        if self.tolerance <= 0:
            raise DomainError("tolerance must be positive")


def _check_order_arg(order: int, x: float, positive: bool) -> None:
    if order not in (0, 1, 2):
        raise DomainError(f"Bessel order {order} unsupported (need 0, 1 or 2)")
    if not math.isfinite(x):
        raise DomainError(f"non-finite Bessel argument {x!r}")
    if positive and x <= 0:
        raise DomainError(f"argument must be > 0, got {x}")
    if not positive and x < 0:
        raise DomainError(f"argument must be >= 0, got {x}")


def bessel_j(order: int, x: float) -> BesselEval:
    """J_n(x) with first derivative, n in {0, 1, 2}."""
    _check_order_arg(order, x, positive=False)
    return BesselEval(order, x, float(_sp.jv(order, x)), float(_sp.jvp(order, x)))


def bessel_k(order: int, x: float) -> BesselEval:
    """Modified Bessel function of the second kind K_n(x), n in {0, 1, 2}.

    K_n and its derivative drive the evanescent-field profiles; the argument
    must be strictly positive (K diverges at 0).
    """
    _check_order_arg(order, x, positive=True)
    return BesselEval(order, x, float(_sp.kv(order, x)), float(_sp.kvp(order, x)))


def find_root(f: Callable[[float], float], bracket: RootBracket,
              max_iter: int = 200) -> float:
    """Bisection-safeguarded secant root of f inside the bracket.

    The iterate never leaves [lower, upper], which matters for dispersion
    residuals that have poles between roots.  Deterministic: identical
    inputs give bit-identical results.
    """
    a, b = float(bracket.lower), float(bracket.upper)
    fa, fb = f(a), f(b)
    if not (math.isfinite(fa) and math.isfinite(fb)):
        raise DomainError("non-finite function value at bracket endpoint")
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise BracketError(f"no sign change on [{a}, {b}]: f={fa:.3g},{fb:.3g}")

    xtol = bracket.tolerance
    width_prev = b - a
    for it in range(max_iter):
        # secant proposal, demoted to bisection when unstable, out of range,
        # or when the bracket stopped contracting (one-sided stall)
        denom = fb - fa
        if denom != 0.0:
            x = b - fb * (b - a) / denom
        else:
            x = 0.5 * (a + b)
        if not (a < x < b):
            x = 0.5 * (a + b)
        if it % 2 == 1 and (b - a) > 0.5 * width_prev:
            x = 0.5 * (a + b)
        if it % 2 == 1:
            width_prev = b - a
        fx = f(x)
        if not math.isfinite(fx):
            raise DomainError(f"non-finite function value at x={x}")
        if fx == 0.0:
            return x
        if fa * fx < 0:
            b, fb = x, fx
        else:
            a, fa = x, fx
        if (b - a) <= xtol + 4.0 * np.finfo(float).eps * max(abs(a), abs(b)):
            return a if abs(fa) <= abs(fb) else b
    raise ConvergenceError(f"root not bracketed to {xtol} in {max_iter} iterations")


def integrate(f: Callable[[float], float], a: float, b: float,
              tol: float = 1e-10) -> float:
    """Adaptive quadrature of f on [a, b] with estimated error below tol
    (absolute, relative for large results)."""
    if not (a < b):
        raise DomainError(f"empty interval [{a}, {b}]")

    def guarded(x: float) -> float:
        try:
            v = f(x)
        except (ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"integrand not evaluable at x={x}: {exc}") from exc
        if not math.isfinite(v):
            raise DomainError(f"integrand non-finite at x={x}")
        return v

    value, err = _sciint.quad(guarded, a, b, epsabs=tol, epsrel=tol, limit=400)
    if err > tol * max(1.0, abs(value)) * 10.0:
        raise ConvergenceError(
            f"quadrature error estimate {err:.3g} above tolerance {tol:.3g}")
    return value


@dataclass(frozen=True)
class FitProblem:
    """Binned decay data for the A*exp(-rate*t) + offset model."""
    abscissae: np.ndarray
    ordinates: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.abscissae, dtype=float)
        y = np.asarray(self.ordinates, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if not (t.shape == y.shape == w.shape):
            raise DomainError("abscissae/ordinates/weights must share a shape")
        if np.any(w < 0):
            raise DomainError("weights must be non-negative")
        object.__setattr__(self, "abscissae", t)
        object.__setattr__(self, "ordinates", y)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class FitResult:
    amplitude: float
    rate: float
    offset: float
    chi2_reduced: float
    window: tuple[float, float]
    n_points: int


def estimate_offset(t: Sequence[float], y: Sequence[float],
                    tail_fraction: float = 0.15) -> float:
    """Background level from the mean of the late-time tail of the data."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    t_start = t.max() - tail_fraction * (t.max() - t.min())
    tail = y[t >= t_start]
    if tail.size == 0:
        raise DomainError("empty late-time tail for offset estimation")
    return float(tail.mean())


def fit_exp_offset(problem: FitProblem, window: tuple[float, float],
                   offset: float | None = None) -> FitResult:
    """Weighted least-squares fit of A*exp(-rate*t) + offset on a window.

    The offset is held fixed during the fit (estimated from the late-time
    mean when not supplied); amplitude and rate are the only free
    parameters.  Gauss-Newton with step halving; deterministic.
    """
    t_all, y_all, w_all = problem.abscissae, problem.ordinates, problem.weights
    lo, hi = float(window[0]), float(window[1])
    if lo >= hi or lo < t_all.min() - 1e-12 or hi > t_all.max() + 1e-12:
        raise DomainError(f"window [{lo}, {hi}] outside data range")
    sel = (t_all >= lo) & (t_all <= hi)
    t, y, w = t_all[sel], y_all[sel], w_all[sel]
    if t.size < 10:
        raise DomainError(f"only {t.size} bins in window, need >= 10")
    if offset is None:
        offset = estimate_offset(t_all, y_all)

    z = y - offset
    pos = z > 0
    if pos.sum() < 3:
        raise FitDegenerateError("too few bins above offset for initialization")
    # log-linear seed on background-subtracted counts
    tw, lw = t[pos], np.log(z[pos])
    ww = w[pos] * z[pos] ** 2            # delta(log z) = delta(z)/z
    sw = ww.sum()
    tbar = (ww * tw).sum() / sw
    lbar = (ww * lw).sum() / sw
    var = (ww * (tw - tbar) ** 2).sum()
    if var <= 0:
        raise FitDegenerateError("degenerate abscissae in window")
    rate = -(ww * (tw - tbar) * (lw - lbar)).sum() / var
    amp = math.exp(lbar + rate * tbar)
    if rate <= 0 or not math.isfinite(amp):
        rate = max(rate, 1.0 / (t.max() - t.min()))
        amp = max(z.max(), 1e-30)

    def chi2(a: float, g: float) -> float:
        r = a * np.exp(-g * t) + offset - y
        return float((w * r * r).sum())

    c_prev = chi2(amp, rate)
    for _ in range(200):
        e = np.exp(-rate * t)
        r = amp * e + offset - y
        j_a = e
        j_g = -amp * t * e
        h11 = (w * j_a * j_a).sum()
        h12 = (w * j_a * j_g).sum()
        h22 = (w * j_g * j_g).sum()
        g1 = (w * j_a * r).sum()
        g2 = (w * j_g * r).sum()
        det = h11 * h22 - h12 * h12
        if not math.isfinite(det) or det <= 1e-300 * max(h11 * h22, 1.0):
            raise FitDegenerateError("singular normal equations")
        da = -(h22 * g1 - h12 * g2) / det
        dg = -(h11 * g2 - h12 * g1) / det
        step = 1.0
        for _ in range(60):
            a_new, g_new = amp + step * da, rate + step * dg
            if g_new > 0 and chi2(a_new, g_new) <= c_prev * (1 + 1e-15):
                break
            step *= 0.5
        else:
            break
        converged = (abs(step * dg) <= 1e-13 * abs(rate)
                     and abs(step * da) <= 1e-13 * abs(amp))
        amp, rate = a_new, g_new
        c_prev = chi2(amp, rate)
        if converged:
            break

    if rate <= 0 or not math.isfinite(rate):
        raise FitDegenerateError(f"fit collapsed to non-positive rate {rate}")
    dof = max(t.size - 2, 1)
    return FitResult(float(amp), float(rate), float(offset),
                     c_prev / dof, (lo, hi), int(t.size))
