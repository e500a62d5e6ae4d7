"""Forward and inverse Mellin transforms.

The forward transform substitutes ``x = exp(u)`` and integrates over the
whole real line with a double-exponential rule (``u = sinh(t)``, trapezoid
in ``t``, halving the step until two levels agree).  The inverse transform
integrates along the vertical line ``Re s = c`` with the trapezoid rule; for
integrands analytic in a strip around the line this converges geometrically
in ``1/step``, and the truncation at ``|Im s| = half_height`` is checked
empirically by doubling the height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as _sci_integrate

from .errors import ConvergenceError, DomainError

__all__ = [
    "ContourSpec",
    "QuadratureSpec",
    "QuadResult",
    "DEFAULT_CONTOUR",
    "DEFAULT_QUADRATURE",
    "integrate_line",
    "tanh_sinh",
    "mellin_transform",
    "ContourInverter",
    "inverse_mellin",
]


@dataclass(frozen=True)
class ContourSpec:
    """Vertical line ``Re s = c`` truncated to ``|Im s| <= half_height``."""

    c: float = 2.0
    half_height: float = 60.0
    step: float = 0.1

    def __post_init__(self):
        if not self.c > 1.0:
            raise ValueError(f"contour abscissa must satisfy c > 1, got {self.c!r}")
        if not self.half_height > 0:
            raise ValueError("half_height must be positive")
        if not (0 < self.step <= self.half_height / 100.0):
            raise ValueError("step must be positive and at most half_height/100")

    def doubled(self) -> "ContourSpec":
        return ContourSpec(self.c, 2.0 * self.half_height, self.step)


@dataclass(frozen=True)
class QuadratureSpec:
    scheme: str = "tanh-sinh"
    abs_tol: float = 1e-13
    max_evals: int = 20000

    def __post_init__(self):
        if self.scheme not in ("tanh-sinh", "adaptive"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if not (0.0 < self.abs_tol < 1.0):
            raise ValueError("abs_tol must lie in (0, 1)")
        if self.max_evals < 1000:
            raise ValueError("max_evals must be >= 1000")


DEFAULT_CONTOUR = ContourSpec()
DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class QuadResult:
    value: complex | float | np.ndarray
    error: float
    evals: int


# ---------------------------------------------------------------------------
# Double-exponential quadrature
# ---------------------------------------------------------------------------

_MIN_LEVEL = 4  # h = 1/16 before convergence may be declared
_TMAX = math.asinh(80.0)


def _line_nodes(level):
    """Nodes t_j = j h (h = 2**-level) that are new at this level."""
    h = 0.5 ** (level + 1)
    if level == 0:
        t = np.arange(-math.floor(_TMAX / h), math.floor(_TMAX / h) + 1) * h
    else:
        m = math.floor(_TMAX / h)
        t = np.arange(-m, m + 1) * h
        t = t[np.arange(-m, m + 1) % 2 != 0]
    return t, h


def integrate_line(g: Callable[[np.ndarray], np.ndarray], quad: QuadratureSpec = DEFAULT_QUADRATURE,
                   center: float = 0.0) -> QuadResult:
    """Integrate ``g(u)`` over the real line.

    ``g`` is vectorised and may return an array of shape ``(len(u), ...)``
    (several integrals sharing the same evaluations).  Exponential decay in
    ``u`` becomes double-exponential under ``u = center + sinh(t)``.
    """
    if quad.scheme == "adaptive":
        return _adaptive_line(g, quad, center)
    total = None
    evals = 0
    prev = None
    level = 0
    while True:
        t, h = _line_nodes(level)
        u = center + np.sinh(t)
        w = np.cosh(t)
        vals = np.asarray(g(u))
        evals += len(t)
        contrib = np.tensordot(w, vals, axes=(0, 0))
        total = contrib if total is None else total + contrib
        estimate = total * h
        if prev is not None:
            err = float(np.max(np.abs(estimate - prev)))
            if not np.isfinite(err):
                raise ConvergenceError("non-finite integrand value")
            if level >= _MIN_LEVEL and err <= quad.abs_tol:
                return QuadResult(estimate, err, evals)
        if evals >= quad.max_evals:
            raise ConvergenceError(
                f"quadrature did not reach abs_tol={quad.abs_tol:g} within {quad.max_evals} evaluations"
            )
        prev = estimate
        level += 1


def _adaptive_line(g, quad, center):
    limit = max(50, quad.max_evals // 21)

    def part(fn):
        val, err = _sci_integrate.quad(fn, -np.inf, np.inf, epsabs=quad.abs_tol, epsrel=0.0, limit=limit)
        return val, err

    probe = np.asarray(g(np.array([center])))
    shape = probe.shape[1:]
    values = np.zeros(shape, dtype=complex)
    errs = 0.0
    for idx in np.ndindex(*shape) if shape else [()]:
        def re(u, idx=idx):
            return complex(np.asarray(g(np.array([u])))[(0,) + idx]).real

        def im(u, idx=idx):
            return complex(np.asarray(g(np.array([u])))[(0,) + idx]).imag

        vr, er = part(re)
        vi, ei = part(im) if np.iscomplexobj(probe) else (0.0, 0.0)
        values[idx] = vr + 1j * vi
        errs = max(errs, er + ei)
    if errs > quad.abs_tol * 10:
        raise ConvergenceError(f"adaptive quadrature error estimate {errs:g} exceeds tolerance")
    value = values if shape else values[()]
    if not np.iscomplexobj(probe):
        value = np.real(value)
    return QuadResult(value, errs, -1)


def tanh_sinh(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              quad: QuadratureSpec = DEFAULT_QUADRATURE) -> QuadResult:
    """Integrate ``f`` over the finite interval ``[a, b]`` (endpoint singularities allowed)."""
    if not (np.isfinite(a) and np.isfinite(b)):
        raise DomainError("tanh_sinh needs a finite interval; use integrate_line for infinite ranges")
    if quad.scheme == "adaptive":
        val, err = _sci_integrate.quad(f, a, b, epsabs=quad.abs_tol, epsrel=0.0,
                                       limit=max(50, quad.max_evals // 21))
        return QuadResult(val, err, -1)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    prev = None
    total = 0.0
    evals = 0
    level = 0
    tmax = 4.0
    while True:
        h = 0.5 ** (level + 1)
        m = math.floor(tmax / h)
        j = np.arange(-m, m + 1)
        if level:
            j = j[j % 2 != 0]
        t = j * h
        sh = 0.5 * math.pi * np.sinh(t)
        y = np.tanh(sh)
        # distance to the nearer endpoint without cancellation
        dist = half / (np.exp(np.abs(sh)) * np.cosh(sh))
        x = np.where(y >= 0, b - dist, a + dist)
        w = 0.5 * math.pi * np.cosh(t) / np.cosh(sh) ** 2
        keep = (x > a) & (x < b)
        vals = np.asarray(f(x[keep]))
        evals += int(keep.sum())
        total = total + np.tensordot(w[keep], vals, axes=(0, 0))
        est = total * h * half
        if prev is not None:
            err = float(np.max(np.abs(est - prev)))
            if level >= _MIN_LEVEL and err <= quad.abs_tol:
                return QuadResult(est, err, evals)
        if evals >= quad.max_evals:
            raise ConvergenceError("tanh-sinh quadrature did not converge")
        prev = est
        level += 1


def mellin_transform(f: Callable[[np.ndarray], np.ndarray], s, quad: QuadratureSpec = DEFAULT_QUADRATURE,
                     full_output: bool = False):
    """Numerical Mellin transform ``int_0^inf x^(s-1) f(x) dx``.

    ``s`` may be a scalar or an array; ``f`` is evaluated once per node and
    shared by all requested ``s``.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))

    def g(u):
        fx = np.asarray(f(np.exp(u)), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            out = fx[:, None] * np.exp(np.outer(u, s_arr))
        out[fx == 0.0, :] = 0.0
        if not np.all(np.isfinite(out)):
            raise ConvergenceError("Mellin integrand overflowed; f does not decay fast enough")
        return out

    res = integrate_line(g, quad)
    value = res.value if np.ndim(s) else res.value[0]
    if full_output:
        return QuadResult(value, res.error, res.evals)
    return value


# ---------------------------------------------------------------------------
# Inverse Mellin transform along a vertical line
# ---------------------------------------------------------------------------


class ContourInverter:
    """Tabulates ``F`` on the contour once and inverts at many ``x``.

    ``F`` must be vectorised over complex arrays.  If ``F(conj s) = conj F(s)``
    (``real_symmetric=True``) only the upper half line is evaluated.
    """

    def __init__(self, F: Callable[[np.ndarray], np.ndarray], contour: ContourSpec = DEFAULT_CONTOUR,
                 real_symmetric: bool = True, tol: float = 1e-12):
        self.F = F
        self.contour = contour
        self.real_symmetric = real_symmetric
        self.tol = tol
        big = contour.doubled()
        m = int(round(big.half_height / big.step))
        t = np.arange(-m, m + 1) * big.step
        if real_symmetric:
            t_half = t[t >= 0]
            f_half = np.asarray(F(contour.c + 1j * t_half), dtype=complex)
            vals = np.concatenate((np.conj(f_half[:0:-1]), f_half))
        else:
            vals = np.asarray(F(contour.c + 1j * t), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise ConvergenceError("transform is not finite on the contour")
        self._t = t
        self._vals = vals
        self._inner = np.abs(t) <= contour.half_height + 1e-9

    def _sums(self, x, chunk=256):
        lx = np.log(x)
        wv = self._vals * self.contour.step
        full = np.empty(x.shape, dtype=complex)
        inner = np.empty(x.shape, dtype=complex)
        for i in range(0, x.size, chunk):
            # phase x^(-i t) = exp(-i t ln x)
            ph = np.exp(-1j * np.outer(lx[i:i + chunk], self._t))
            inner[i:i + chunk] = ph[:, self._inner] @ wv[self._inner]
            full[i:i + chunk] = inner[i:i + chunk] + ph[:, ~self._inner] @ wv[~self._inner]
        scale = np.exp(-self.contour.c * lx) / (2.0 * math.pi)
        return inner * scale, full * scale

    def evaluate(self, x, full_output: bool = False):
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(~(x > 0)):
            raise DomainError("inverse Mellin transform needs x > 0")
        inner, full = self._sums(x)
        tail = np.abs(full - inner)
        if np.any(tail > 10.0 * self.tol * np.maximum(1.0, np.abs(full))):
            raise ConvergenceError(
                f"contour tail dominates: doubling half_height moved the result by {tail.max():.3g}"
            )
        resid = np.abs(full.imag)
        if np.any(resid > 1e-8 * np.maximum(1.0, np.abs(full.real))):
            raise ConvergenceError(f"imaginary residual {resid.max():.3g} exceeds 1e-8")
        value = full.real
        if full_output:
            out = QuadResult(value[0] if scalar else value, float(tail.max()), len(self._t))
            return out, (resid[0] if scalar else resid)
        return value[0] if scalar else value

    __call__ = evaluate


def inverse_mellin(F: Callable[[np.ndarray], np.ndarray], x, contour: ContourSpec = DEFAULT_CONTOUR,
                   real_symmetric: bool = True, tol: float = 1e-12):
    """``(1/2 pi i) int_(c) F(s) x^(-s) ds`` by the trapezoid rule on the line."""
    return ContourInverter(F, contour, real_symmetric, tol).evaluate(x)
