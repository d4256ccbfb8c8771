"""Natural cubic interpolating spline with linear tails."""

from __future__ import annotations

import numpy as np

from .errors import DuplicateAnchorError, TooFewAnchorsError


class NaturalCubicSpline:
    """Piecewise cubic through sorted anchors, zero curvature at both ends.

    The interior second derivatives solve the standard tridiagonal system
    (Thomas algorithm). Outside the anchor range the curve continues along
    the boundary tangents, so baseline extrapolation stays linear instead
    of following the end cubics away.
    """

    def __init__(self, x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValueError("anchor arrays must be 1-d and the same length")
        if len(x) < 2:
            raise TooFewAnchorsError(f"need at least 2 anchors, got {len(x)}")
        h = np.diff(x)
        if np.any(h == 0):
            raise DuplicateAnchorError("anchor x positions must be distinct")
        if np.any(h < 0):
            raise ValueError("anchor x positions must be sorted ascending")

        n = len(x)
        m = np.zeros(n)
        if n > 2:
            # Tridiagonal system for the n-2 interior second derivatives.
            diag = 2.0 * (h[:-1] + h[1:])
            sub = h[:-1].copy()
            sup = h[1:].copy()
            rhs = 6.0 * (np.diff(y[1:]) / h[1:] - np.diff(y[:-1]) / h[:-1])
            for i in range(1, n - 2):
                factor = sub[i] / diag[i - 1]
                diag[i] -= factor * sup[i - 1]
                rhs[i] -= factor * rhs[i - 1]
            sol = np.zeros(n - 2)
            sol[-1] = rhs[-1] / diag[-1]
            for i in range(n - 4, -1, -1):
                sol[i] = (rhs[i] - sup[i] * sol[i + 1]) / diag[i]
            m[1:-1] = sol

        self._x = x.copy()
        self._y = y.copy()
        self._h = h
        self._m = m
        # Segment start slopes; also the tangent slopes used beyond the ends.
        self._b = np.diff(y) / h - h * (2.0 * m[:-1] + m[1:]) / 6.0
        self._slope_lo = self._b[0]
        self._slope_hi = self._b[-1] + h[-1] * (m[-2] + m[-1]) / 2.0

    @property
    def anchor_x(self) -> np.ndarray:
        return self._x

    @property
    def anchor_y(self) -> np.ndarray:
        return self._y

    def __call__(self, xq) -> np.ndarray:
        xq = np.asarray(xq, dtype=np.float64)
        scalar = xq.ndim == 0
        xq = np.atleast_1d(xq)
        x, y, h, m, b = self._x, self._y, self._h, self._m, self._b

        idx = np.clip(np.searchsorted(x, xq, side="right") - 1, 0, len(x) - 2)
        t = xq - x[idx]
        out = (
            y[idx]
            + b[idx] * t
            + (m[idx] / 2.0) * t**2
            + ((m[idx + 1] - m[idx]) / (6.0 * h[idx])) * t**3
        )

        below = xq < x[0]
        above = xq > x[-1]
        if np.any(below):
            out[below] = y[0] + self._slope_lo * (xq[below] - x[0])
        if np.any(above):
            out[above] = y[-1] + self._slope_hi * (xq[above] - x[-1])
        return out[0] if scalar else out
