"""
Adaptive Gauss-Legendre quadrature shared by the potential, flux, classical
and (1+1)D engines.

A panel is integrated with an order-n rule and an embedded order-n/2 rule;
their difference is the error estimate. Panels that miss the tolerance are
bisected up to a maximum depth.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable, Iterable, NamedTuple

import numpy as np
from scipy.optimize import brentq

from pathgauge.config import (
    BISECT_TOL,
    CROSSING_SAMPLES,
    QUAD_MAX_DEPTH,
    QUAD_ORDER,
    QUAD_ORDER_LOW,
    QUAD_TOL,
    ROUNDOFF_FACTOR,
    TOUCH_RTOL,
)
from pathgauge.errors import QuadratureError

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]


class QuadResult(NamedTuple):
    value: np.ndarray
    error: float
    panels: int


class GaussLegendre:
    """
    Gauss-Legendre rule with an embedded lower-order companion.

    Parameters
    ----------
    order : int
        Number of nodes of the main rule.
    low_order : int
        Number of nodes of the error-estimating rule.
    """

    def __init__(self, order: int = QUAD_ORDER, low_order: int = QUAD_ORDER_LOW):
        if order < 2 or not 1 <= low_order < order:
            raise ValueError(f"invalid rule orders ({order}, {low_order})")
        self.order = order
        self.low_order = low_order
        self.x_hi, self.w_hi = np.polynomial.legendre.leggauss(order)
        self.x_lo, self.w_lo = np.polynomial.legendre.leggauss(low_order)
        self._nodes = np.concatenate([self.x_hi, self.x_lo])

    def panel(self, fun: Integrand, lo: float, hi: float):
        """Integrate one panel; returns (value, error estimate, round-off floor)."""
        mid = 0.5 * (hi + lo)
        half = 0.5 * (hi - lo)
        vals = np.asarray(fun(mid + half * self._nodes), dtype=float)
        v_hi, v_lo = vals[: self.order], vals[self.order:]
        i_hi = half * np.tensordot(self.w_hi, v_hi, axes=1)
        i_lo = half * np.tensordot(self.w_lo, v_lo, axes=1)
        err = float(np.max(np.abs(i_hi - i_lo)))
        floor = ROUNDOFF_FACTOR * np.finfo(float).eps * abs(half) * float(
            np.max(np.tensordot(self.w_hi, np.abs(v_hi), axes=1))
        )
        return i_hi, err, floor

    def integrate(
        self,
        fun: Integrand,
        a: float,
        b: float,
        *,
        tol: float = QUAD_TOL,
        max_depth: int = QUAD_MAX_DEPTH,
        breakpoints: Iterable[float] = (),
        strict: bool = True,
    ) -> QuadResult:
        """
        Adaptively integrate a vectorised integrand over [a, b].

        Args:
            fun: maps an array of abscissae (M,) to values (M,) or (M, ...)
            a, b: integration limits
            tol: absolute tolerance for the whole interval (also used relatively)
            max_depth: maximum bisection depth per panel
            breakpoints: interior points where the integrand is not smooth
            strict: raise at max_depth; otherwise keep the panel and its error estimate

        Returns:
            QuadResult with the integral, the summed error estimate and the panel count.

        Raises:
            QuadratureError: a panel misses the tolerance at max_depth (strict only).
        """
        if b < a:
            res = self.integrate(fun, b, a, tol=tol, max_depth=max_depth, breakpoints=breakpoints, strict=strict)
            return QuadResult(-res.value, res.error, res.panels)
        if b == a:
            return QuadResult(np.float64(0.0), 0.0, 0)

        edges = [a] + sorted(p for p in set(breakpoints) if a < p < b) + [b]
        total = b - a
        value = None
        error = 0.0
        panels = 0
        deepest = 0
        unconverged = 0
        stack = [(lo, hi, 0) for lo, hi in reversed(list(zip(edges[:-1], edges[1:])))]
        while stack:
            lo, hi, depth = stack.pop()
            i_hi, err, floor = self.panel(fun, lo, hi)
            local_tol = tol * (hi - lo) / total
            scale = tol * float(np.max(np.abs(i_hi)))
            bound = max(local_tol, scale, floor)
            if err <= bound or (not strict and depth >= max_depth):
                unconverged += err > bound
                value = i_hi if value is None else value + i_hi
                error += err
                panels += 1
                deepest = max(deepest, depth)
                continue
            if depth >= max_depth:
                raise QuadratureError(
                    f"no convergence on [{lo:.6g}, {hi:.6g}] after {depth} bisections: "
                    f"error estimate {err:.3g} > {max(local_tol, scale):.3g}"
                )
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi, depth + 1))
            stack.append((lo, mid, depth + 1))
        if unconverged:
            logger.warning(
                "quadrature on [%g, %g]: %d panel(s) kept above tolerance at depth %d, error estimate %.3g",
                a, b, unconverged, max_depth, error,
            )
        if deepest > 8:
            logger.debug("quadrature on [%g, %g] refined to depth %d (%d panels)", a, b, deepest, panels)
        return QuadResult(value, error, panels)


@lru_cache(maxsize=8)
def get_rule(order: int = QUAD_ORDER) -> GaussLegendre:
    """Shared rule instance for an order; the embedded rule has half the nodes."""
    low = QUAD_ORDER_LOW if order == QUAD_ORDER else max(1, order // 2)
    return GaussLegendre(order, low)


def integrate(fun: Integrand, a: float, b: float, *, order: int = QUAD_ORDER, **kwargs) -> QuadResult:
    return get_rule(order).integrate(fun, a, b, **kwargs)


# =========================
# Discontinuity Crossings
# =========================
def crossings(
    g: Callable[[np.ndarray], np.ndarray],
    a: float = 0.0,
    b: float = 1.0,
    *,
    samples: int = CROSSING_SAMPLES,
    xtol: float = BISECT_TOL,
    report_touches: bool = True,
) -> list[float]:
    """
    Interior zeros of a vectorised scalar function on (a, b).

    Sign changes between equally spaced samples are refined with brentq.
    Samples that land exactly on zero are taken as roots too. A sampled
    minimum of |g| near zero without a sign change is a tangent touch; it is
    logged at WARNING unless report_touches is off.
    """
    s = np.linspace(a, b, samples)
    v = np.asarray(g(s), dtype=float)
    roots = []
    for i in range(samples - 1):
        if v[i] == 0.0:
            roots.append(s[i])
        elif v[i] * v[i + 1] < 0.0:
            root = brentq(lambda u: float(g(np.array([u]))[0]), s[i], s[i + 1], xtol=xtol)
            roots.append(root)
    if report_touches:
        _report_touches(s, v)
    margin = max(xtol, 1e-14 * (b - a))
    interior = sorted(r for r in roots if a + margin < r < b - margin)
    merged: list[float] = []
    for r in interior:
        if not merged or r - merged[-1] > margin:
            merged.append(r)
    return merged


def _report_touches(s: np.ndarray, v: np.ndarray) -> None:
    scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        return
    for i in range(1, len(v) - 1):
        if v[i - 1] * v[i + 1] <= 0.0 or v[i - 1] * v[i] < 0.0:
            continue
        if abs(v[i]) <= TOUCH_RTOL * scale and abs(v[i]) <= min(abs(v[i - 1]), abs(v[i + 1])):
            logger.warning("discontinuity surface touched without crossing near s = %.6g (|d| = %.3g)", s[i], abs(v[i]))
