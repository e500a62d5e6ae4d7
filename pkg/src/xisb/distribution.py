"""The random variable X_k with density proportional to v_k(x) / x.

The normalising constant is measured, never assumed: ``build`` integrates
``v_k(x) / x`` over (0, inf) and stores both the raw mass and ``norm = 1/mass``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError
from .mellin import (
    DEFAULT_CONTOUR,
    DEFAULT_QUADRATURE,
    ContourSpec,
    QuadratureSpec,
    integrate_line,
    mellin_transform,
)
from .specfun import DEFAULT_PRECISION, SeriesPrecision
from .xi_core import VkEval

__all__ = [
    "SamplerState",
    "XiSizeBiased",
    "build",
    "pdf",
    "cdf",
    "moment",
    "mean_variance",
    "quantile",
    "sample",
    "size_bias_sides",
    "size_bias_gap",
    "ks_statistic",
]

GRID = (0.05, 20.0, 512)
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


@dataclass
class SamplerState:
    """Seed plus stream counter for a counter-based (Philox) generator.

    Each call to :func:`sample` consumes one stream and advances ``counter``.
    """

    seed: int
    counter: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.counter,))
        return np.random.Generator(np.random.Philox(ss))

    def spawn(self, n: int) -> list["SamplerState"]:
        """Independent child states, e.g. one per worker thread."""
        base = np.random.SeedSequence(self.seed, spawn_key=(self.counter,))
        return [SamplerState(int(c.generate_state(1, np.uint64)[0])) for c in base.spawn(n)]


@dataclass(frozen=True, eq=False)
class XiSizeBiased:
    k: int
    vk: VkEval
    raw_mass: float
    norm: float
    table_x: np.ndarray = field(repr=False)
    table_F: np.ndarray = field(repr=False)
    table_mass: float = field(repr=False, default=float("nan"))
    prec: SeriesPrecision = DEFAULT_PRECISION
    quad: QuadratureSpec = DEFAULT_QUADRATURE
    _inverse: PchipInterpolator | None = field(default=None, repr=False, compare=False)

    @property
    def raw_density(self) -> Callable[[np.ndarray], np.ndarray]:
        return lambda x: self.vk(x) / x


def _line_density(vk):
    # density of u = ln X before normalisation is v_k(e^u)
    return lambda u: vk(np.exp(u))


def _tail_integral(g, start, direction, quad):
    """int_start^{+-inf} g(u) du via u = start +- e^tau."""

    def h(tau):
        e = np.exp(tau)
        return g(start + direction * e) * e

    with np.errstate(over="ignore"):
        return float(integrate_line(_safe(h), quad).value)


def _safe(h):
    def wrapped(t):
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            out = np.zeros_like(t)
            ok = t < 4.0  # e^4 ~ 55 units of log x lies beyond every support
            out[ok] = h(t[ok])
        return out

    return wrapped


def _panel_integrals(g, u):
    a, b = u[:-1], u[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * _GL_X[None, :]
    vals = g(nodes.ravel()).reshape(nodes.shape)
    return (vals @ _GL_W) * half


def _trim(x, F):
    lo = int(np.searchsorted(F, F[0], side="right")) - 1
    hi = int(np.searchsorted(F, F[-1], side="left"))
    x, F = x[lo:hi + 1], F[lo:hi + 1]
    keep = np.concatenate(([True], np.diff(F) > 0))
    while not np.all(keep):
        x, F = x[keep], F[keep]
        keep = np.concatenate(([True], np.diff(F) > 0))
    return x, F


@lru_cache(maxsize=16)
def build(k: int, prec: SeriesPrecision = DEFAULT_PRECISION, contour: ContourSpec = DEFAULT_CONTOUR,
          quad: QuadratureSpec = DEFAULT_QUADRATURE, grid: tuple = GRID) -> XiSizeBiased:
    """Measure the normalisation of X_k and tabulate its distribution function."""
    if int(k) != k or k < 1:
        raise DomainError("k must be an integer >= 1")
    vk = VkEval(int(k), contour=contour, prec=prec)
    raw_mass = float(np.real(mellin_transform(vk, 0.0, quad)))
    norm = 1.0 / raw_mass
    g = _line_density(vk)
    lo, hi, npts = grid
    while True:
        u = np.linspace(math.log(lo), math.log(hi), int(npts))
        left = _tail_integral(g, u[0], -1.0, quad)
        cum = left + np.concatenate(([0.0], np.cumsum(_panel_integrals(g, u))))
        right = _tail_integral(g, u[-1], 1.0, quad)
        F = norm * cum
        if F[0] < 1e-6 and F[-1] > 1.0 - 1e-6:
            break
        lo, hi, npts = lo / 2.0, hi * 2.0, npts + 64
    table_mass = cum[-1] + right
    x, F = _trim(np.exp(u), np.minimum(F, 1.0))
    x.setflags(write=False)
    F.setflags(write=False)
    inner = (F > 0.0) & (F < 1.0)
    inverse = PchipInterpolator(_logit(F[inner]), np.log(x[inner]), extrapolate=False)
    return XiSizeBiased(int(k), vk, raw_mass, norm, x, F, float(table_mass), prec, quad, inverse)


def _logit(p):
    return np.log(p) - np.log1p(-p)


def pdf(d: XiSizeBiased, x):
    """norm * v_k(x) / x."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise DomainError("pdf is defined for x > 0")
    return d.norm * d.vk(xa) / xa


def cdf(d: XiSizeBiased, x):
    """P(X_k <= x): table value at the nearest grid point below plus a
    Gauss-Legendre panel up to x."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise DomainError("cdf is defined for x > 0")
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    out = np.empty_like(xa)
    below = xa < d.table_x[0]
    above = xa >= d.table_x[-1]
    mid = ~(below | above)
    g = _line_density(d.vk)
    if np.any(mid):
        xm = xa[mid]
        i = np.searchsorted(d.table_x, xm, side="right") - 1
        a, b = np.log(d.table_x[i]), np.log(xm)
        half = 0.5 * (b - a)
        nodes = (0.5 * (a + b))[:, None] + half[:, None] * _GL_X[None, :]
        vals = g(nodes.ravel()).reshape(nodes.shape)
        out[mid] = d.table_F[i] + d.norm * (vals @ _GL_W) * half
    for mask, direction in ((below, -1.0), (above, 1.0)):
        for j in np.flatnonzero(mask):
            tail = d.norm * _tail_integral(g, math.log(xa[j]), direction, d.quad)
            out[j] = tail if direction < 0 else 1.0 - tail
    out = np.clip(out, 0.0, 1.0)
    return out[0] if scalar else out


def moment(d: XiSizeBiased, s):
    """E(X_k^s) = norm * int_0^inf x^(s-1) v_k(x) dx (complex s allowed)."""
    return d.norm * mellin_transform(d.vk, s, d.quad)


def mean_variance(d: XiSizeBiased):
    """Mean and variance; the variance is integrated as E((X - mean)^2) directly."""
    mean = float(np.real(moment(d, 1.0)))
    g = _line_density(d.vk)

    def centred(u):
        return (np.exp(u) - mean) ** 2 * g(u)

    var = d.norm * float(integrate_line(_guard(centred), d.quad).value)
    return mean, var


def _guard(fn):
    def wrapped(u):
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.asarray(fn(u), dtype=float)
        out[~np.isfinite(out)] = 0.0
        return out

    return wrapped


def quantile(d: XiSizeBiased, p, tol: float = 1e-10):
    """Inverse CDF by bisection started from the table bracket."""
    pa = np.asarray(p, dtype=float)
    if np.any(~((pa > 0) & (pa < 1))):
        raise DomainError("quantile requires 0 < p < 1")
    scalar = pa.ndim == 0
    pa = np.atleast_1d(pa)
    F = d.table_F
    i = np.searchsorted(F, pa, side="right") - 1
    lo = np.where(i >= 0, d.table_x[np.clip(i, 0, len(F) - 1)], d.table_x[0] / 4.0)
    hi = np.where(i + 1 < len(F), d.table_x[np.clip(i + 1, 0, len(F) - 1)], d.table_x[-1] * 4.0)
    lo, hi = np.log(lo), np.log(hi)
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = cdf(d, np.exp(mid))
        err = fm - pa
        if np.all(np.abs(err) <= tol) or np.all(hi - lo < 1e-15):
            break
        up = err > 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    out = np.exp(mid)
    return out[0] if scalar else out


def sample(d: XiSizeBiased, n: int, state: SamplerState):
    """n draws by inverse-CDF (monotone cubic interpolation of the table)."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    u = state.generator().random(int(n))
    state.counter += 1
    with np.errstate(divide="ignore"):
        z = _logit(u)
    lo, hi = d._inverse.x[0], d._inverse.x[-1]
    return np.exp(d._inverse(np.clip(z, lo, hi)))


def size_bias_sides(d: XiSizeBiased, f: Callable[[np.ndarray], np.ndarray]):
    """(E[X f(X)], E[f(1/X)]), each by its own quadrature."""
    g = _line_density(d.vk)

    def lhs(u):
        x = np.exp(u)
        return x * f(x) * g(u)

    def rhs(u):
        return f(np.exp(-u)) * g(u)

    a = d.norm * float(integrate_line(_guard(lhs), d.quad).value)
    b = d.norm * float(integrate_line(_guard(rhs), d.quad).value)
    return a, b


def size_bias_gap(d: XiSizeBiased, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """|E[X f(X)] - E[f(1/X)]|; zero for a size-biased law equal to that of 1/X."""
    a, b = size_bias_sides(d, f)
    return abs(a - b)


def ks_statistic(d: XiSizeBiased, xs) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF of xs and X_k."""
    xs = np.sort(np.asarray(xs, dtype=float))
    n = xs.size
    F = cdf(d, xs)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))
