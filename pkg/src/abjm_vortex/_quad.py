"""Cumulative integrals on logarithmic panels.

Radial integrands in this package are smooth in ``s = ln t`` with power-law
behaviour at both ends, so Gauss-Legendre panels of fixed width in ``s``
resolve them to round-off.  :class:`LogCumulative` tabulates
``int_0^r g(t) dt`` on panel boundaries once and evaluates arbitrary ``r``
by adding a partial panel.
"""

from __future__ import annotations

import numpy as np

__all__ = ["LogCumulative", "log_quad"]

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _panel_nodes(s_lo, s_hi, order):
    """Nodes and weights mapping [-1, 1] onto each ``[s_lo, s_hi]`` row."""
    x, w = _gauss_legendre(order)
    s_lo = np.asarray(s_lo, dtype=float)[..., None]
    s_hi = np.asarray(s_hi, dtype=float)[..., None]
    half = 0.5 * (s_hi - s_lo)
    nodes = s_lo + half * (x + 1.0)
    return nodes, half * w


class LogCumulative:
    """Tabulated ``int_0^r g(t) dt`` for one or several integrands.

    Parameters
    ----------
    func : callable
        ``func(t)`` for a 1-D array ``t > 0``; returns an array of shape
        ``(k, len(t))`` (``k`` integrands) or ``(len(t),)``.
    t_min, t_max : float
        Range covered by panels.  The contribution of ``(0, t_min)`` is
        dropped, so ``t_min`` must sit deep inside the power-law regime at
        the origin.  Evaluations above ``t_max`` raise.
    panels_per_decade : int
    order : int
        Gauss-Legendre points per panel.
    """

    def __init__(self, func, t_min=1e-12, t_max=1e12, panels_per_decade=8, order=16):
        if not 0 < t_min < t_max:
            raise ValueError("need 0 < t_min < t_max")
        self.func = func
        self.order = order
        n_panels = max(1, int(np.ceil(np.log10(t_max / t_min) * panels_per_decade)))
        self.s_edges = np.linspace(np.log(t_min), np.log(t_max), n_panels + 1)
        self.t_min = t_min
        self.t_max = t_max

        nodes, weights = _panel_nodes(self.s_edges[:-1], self.s_edges[1:], order)
        vals = self._eval(nodes.ravel()).reshape(-1, n_panels, order)
        panel = np.sum(vals * weights[None], axis=-1)
        self.scalar = panel.shape[0] == 1 and self._scalar_func
        self.cum = np.concatenate([np.zeros((panel.shape[0], 1)), np.cumsum(panel, axis=1)], axis=1)

    def _eval(self, s):
        t = np.exp(s)
        out = np.asarray(self.func(t), dtype=float)
        self._scalar_func = out.ndim == 1
        out = np.atleast_2d(out)
        return out * t[None, :]

    @property
    def total(self):
        """Integral over the whole tabulated range."""
        res = self.cum[:, -1]
        return float(res[0]) if self.scalar else res

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        flat = np.atleast_1d(r).ravel()
        if np.any(flat > self.t_max * (1 + 1e-12)):
            raise ValueError(f"radius beyond tabulated range t_max={self.t_max:g}")
        out = np.zeros((self.cum.shape[0], flat.size))
        inside = flat > self.t_min
        if np.any(inside):
            s = np.log(flat[inside])
            idx = np.clip(np.searchsorted(self.s_edges, s, side="right") - 1, 0, len(self.s_edges) - 2)
            nodes, weights = _panel_nodes(self.s_edges[idx], s, self.order)
            vals = self._eval(nodes.ravel()).reshape(-1, idx.size, self.order)
            partial = np.sum(vals * weights[None], axis=-1)
            out[:, inside] = self.cum[:, idx] + partial
        out = out.reshape((self.cum.shape[0],) + r.shape)
        return out[0] if self.scalar else out


def log_quad(func, a, b, panels_per_decade=8, order=16):
    """``int_a^b func(t) dt`` for ``0 < a < b`` using log-spaced panels."""
    if not 0 < a < b:
        raise ValueError("need 0 < a < b")
    n_panels = max(1, int(np.ceil(np.log10(b / a) * panels_per_decade)))
    edges = np.linspace(np.log(a), np.log(b), n_panels + 1)
    nodes, weights = _panel_nodes(edges[:-1], edges[1:], order)
    t = np.exp(nodes.ravel())
    vals = np.atleast_2d(np.asarray(func(t), dtype=float)) * t[None, :]
    vals = vals.reshape(-1, n_panels, order)
    res = np.sum(vals * weights[None], axis=(-2, -1))
    return float(res[0]) if res.size == 1 else res
