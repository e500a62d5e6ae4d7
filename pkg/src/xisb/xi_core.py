"""Theta, Ferrar's w_k, the operator D^k and the self-reciprocal functions v_k.

Scale-invariant operator calculus
---------------------------------
With ``theta = x d/dx`` the operator ``D^1 = d/dx x^2 d/dx`` equals
``theta (theta + 1)`` and ``D^k = (D^1)^k``.  Every series handled here is a
sum of scaled copies of one kernel,

* Gaussian terms ``P(y) exp(-y)`` with ``y = pi n^2 x^2``, where theta acts as
  ``2 y d/dy``;
* Bessel terms ``A(z) K0(z) + B(z) K1(z)`` with ``z = 2 pi n x``, where theta
  acts by ``K0' = -K1`` and ``K1' = -K0 - K1/z``.

Because theta commutes with the rescaling ``x -> n x``, applying D^1 to a
series is the same polynomial manipulation for every term.  This gives v_1,
v_2 and the closed-form survival functions for k = 1, 2 without numerical
differentiation.

Evaluation below x = 1 uses ``v_k(x) = v_k(1/x) / x`` (and Jacobi's identity
for w_1): the direct series cancel catastrophically there.  The ``*_direct``
variants skip the reflection and exist for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError, TruncationError
from .mellin import DEFAULT_CONTOUR, ContourInverter, ContourSpec
from .specfun import DEFAULT_PRECISION, DivisorTable, SeriesPrecision, bessel_k, divisor_table, xi

__all__ = [
    "GaussForm",
    "BesselForm",
    "theta",
    "theta_direct",
    "theta_prime",
    "w1",
    "w1_prime",
    "w2",
    "w_series",
    "v1",
    "v2",
    "v2_direct",
    "v2_printed",
    "v_general",
    "v_contour",
    "vk",
    "cdf_k1",
    "cdf_theta_prime",
    "cdf_w1_prime",
    "survival_series",
    "cdf_series",
    "survival_contour",
    "VkEval",
]

PI = math.pi
UNDERFLOW = 1e-320


def _check_positive(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)) or not np.all(np.isfinite(x)):
        raise DomainError("argument must be finite and > 0")
    return x


# ---------------------------------------------------------------------------
# Term forms
# ---------------------------------------------------------------------------


def _tau(n):
    count = 0
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            count += 1 if d * d == n else 2
    return count


def _majorant(p: Polynomial):
    return Polynomial(np.abs(p.coef))


@dataclass(frozen=True)
class GaussForm:
    """``scale * sum_n P(pi n^2 x^2) exp(-pi n^2 x^2)``."""

    poly: Polynomial
    scale: float = 1.0

    def theta(self) -> "GaussForm":
        y = Polynomial([0.0, 1.0])
        return GaussForm(2.0 * y * (self.poly.deriv() - self.poly), self.scale)

    def __add__(self, other: "GaussForm") -> "GaussForm":
        return GaussForm(self.poly + other.poly * (other.scale / self.scale), self.scale)

    def d1(self) -> "GaussForm":
        return (self.theta() + self).theta()

    def _terms(self, xmin, prec):
        deg = max(self.poly.degree(), 0)
        big = -math.log(prec.abs_tol) + 50.0
        n = int(math.ceil(math.sqrt((big + 2.0 * deg * math.log(big)) / PI) / xmin)) + 1
        maj = _majorant(self.poly)
        # tail <= M(y_{n+1}) e^{-y_{n+1}} / (1 - r), r bounds successive term ratios
        while True:
            y1 = PI * (n + 1) ** 2 * xmin**2
            r = ((n + 2) / (n + 1)) ** (2 * deg) * math.exp(-PI * xmin**2 * (2 * n + 3))
            tail = maj(y1) * math.exp(-y1) / (1.0 - r) if r < 1 else math.inf
            if tail <= prec.abs_tol:
                break
            n += 1
            if n > prec.max_terms:
                raise TruncationError("Gaussian series needs more than max_terms terms")
        if n > prec.max_terms:
            raise TruncationError("Gaussian series needs more than max_terms terms")
        return n

    def evaluate(self, x, prec: SeriesPrecision = DEFAULT_PRECISION):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.size == 0:
            return x.copy()
        n = self._terms(float(x.min()), prec)
        out = np.zeros_like(x)
        # chunk rows to bound memory for small x
        step = max(1, 200000 // n)
        ns = np.arange(1, n + 1, dtype=float) ** 2
        for i in range(0, x.size, step):
            xi_ = x[i:i + step]
            y = PI * np.outer(xi_ * xi_, ns)
            e = np.exp(-y)
            out[i:i + step] = (self.poly(y) * e).sum(axis=1)
        return self.scale * out

    def evaluate_mp(self, x, dps=50):
        """Same series in multiprecision arithmetic (verification only)."""
        import mpmath as mp

        with mp.workdps(dps):
            x = mp.mpf(x)
            coef = [mp.mpf(float(c)) for c in self.poly.coef]
            tot = mp.mpf(0)
            tol = mp.mpf(10) ** (-dps - 5)
            n = 1
            while True:
                y = mp.pi * n * n * x * x
                term = mp.polyval(coef[::-1], y) * mp.exp(-y)
                tot += term
                if y > 10 and abs(term) < tol * max(abs(tot), tol):
                    break
                n += 1
            return tot * self.scale


@dataclass(frozen=True)
class BesselForm:
    """``scale * sum_n c_n [A(z) K0(z) + B(z) K1(z)]`` with ``z = 2 pi n x``.

    ``c_n = d_2(n)`` when ``divisor_weighted`` else ``c_n = n**power``.
    """

    a: Polynomial
    b: Polynomial
    scale: float = 1.0
    divisor_weighted: bool = True
    power: int = 0
    freq: float = 2.0 * PI

    def theta(self) -> "BesselForm":
        z = Polynomial([0.0, 1.0])
        na = z * self.a.deriv() - z * self.b
        nb = -z * self.a + z * self.b.deriv() - self.b
        return self._with(na, nb)

    def _with(self, a, b):
        return BesselForm(a, b, self.scale, self.divisor_weighted, self.power, self.freq)

    def __add__(self, other: "BesselForm") -> "BesselForm":
        f = other.scale / self.scale
        return self._with(self.a + other.a * f, self.b + other.b * f)

    def d1(self) -> "BesselForm":
        return (self.theta() + self).theta()

    def _terms(self, xmin, prec):
        maj_a, maj_b = _majorant(self.a), _majorant(self.b)
        w = self.freq * xmin

        def bound(n):
            z = w * n
            weight = n if self.divisor_weighted else n ** self.power
            return weight * math.sqrt(PI / (2 * z)) * math.exp(-z) * (maj_a(z) + maj_b(z) * (1 + 3 / (8 * z)))

        big = -math.log(prec.abs_tol)
        n = max(1, int(big / w))
        while True:
            b1, b2 = bound(n + 1), bound(n + 2)
            r = b2 / b1 if b1 > 0 else 0.0
            if b1 == 0.0 or (r < 1 and b1 / (1 - r) <= prec.abs_tol):
                break
            n += max(1, n // 8)
            if n > prec.max_terms:
                raise TruncationError("Bessel series needs more than max_terms terms")
        return n

    def evaluate(self, x, prec: SeriesPrecision = DEFAULT_PRECISION, divisors: DivisorTable | None = None):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.size == 0:
            return x.copy()
        n = self._terms(float(x.min()), prec)
        if self.divisor_weighted:
            if divisors is None:
                divisors = divisor_table(2, max(n, 64))
            if divisors.k != 2:
                raise DomainError("Bessel series needs the d_2 table")
            if divisors.limit < n:
                raise TruncationError(f"d_2 table has {divisors.limit} entries; {n} needed at x={x.min():g}")
            c = divisors.values[:n].astype(float)
        else:
            c = np.arange(1, n + 1, dtype=float) ** self.power
        out = np.zeros_like(x)
        step = max(1, 100000 // n)
        ns = np.arange(1, n + 1, dtype=float)
        for i in range(0, x.size, step):
            z = self.freq * np.outer(x[i:i + step], ns)
            flat = z.ravel()
            # K * exp(z) times exp(z-scaled polynomial) keeps large z finite
            k0 = bessel_k(0, flat, scaled=True).reshape(z.shape)
            k1 = bessel_k(1, flat, scaled=True).reshape(z.shape)
            with np.errstate(under="ignore"):
                ez = np.exp(-z)
            terms = (self.a(z) * k0 + self.b(z) * k1) * ez
            out[i:i + step] = terms @ c
        return self.scale * out

    def evaluate_mp(self, x, dps=40):
        import mpmath as mp

        with mp.workdps(dps):
            x = mp.mpf(x)
            ca = [mp.mpf(float(v)) for v in self.a.coef][::-1]
            cb = [mp.mpf(float(v)) for v in self.b.coef][::-1]
            # convert once: rounding freq * n in floats would differ per term
            freq = 2 * mp.pi if self.freq == 2.0 * PI else mp.mpf(self.freq)
            tot = mp.mpf(0)
            tol = mp.mpf(10) ** (-dps - 5)
            n = 1
            while True:
                z = freq * n * x
                if self.divisor_weighted:
                    weight = _tau(n)
                else:
                    weight = mp.mpf(n) ** self.power
                term = weight * (mp.polyval(ca, z) * mp.besselk(0, z) + mp.polyval(cb, z) * mp.besselk(1, z))
                tot += term
                if z > 20 and abs(term) < tol * max(abs(tot), tol):
                    break
                n += 1
            return tot * self.scale


_ONE = Polynomial([1.0])
_ZERO = Polynomial([0.0])

W1_FORM = GaussForm(_ONE, 2.0)
THETA_FORM = GaussForm(Polynomial([0.0, -6.0, 4.0]), 1.0)  # 2x^2(2 pi^2 n^4 x^2 - 3 pi n^2) = 4y^2 - 6y
W2_FORM = BesselForm(_ONE, _ZERO, 4.0)


@lru_cache(maxsize=None)
def _dk_gauss(k):
    f = W1_FORM
    for _ in range(k):
        f = f.d1()
    return f


@lru_cache(maxsize=None)
def _dk_bessel(k):
    f = W2_FORM
    for _ in range(k):
        f = f.d1()
    return f


def _reflect(fn, x):
    """Evaluate a self-reciprocal function (x f(x) = f(1/x)) using arguments >= 1."""
    x = _check_positive(x)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    arg = np.where(x >= 1.0, x, 1.0 / x)
    val = fn(arg)
    out = np.where(x >= 1.0, val, val * arg)
    return out[0] if scalar else out


def _scalarize(x, fn):
    x = _check_positive(x)
    scalar = x.ndim == 0
    out = fn(np.atleast_1d(x))
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# Theta and w_1
# ---------------------------------------------------------------------------


def theta_direct(x, prec: SeriesPrecision = DEFAULT_PRECISION):
    """Theta(x) = 2x^2 sum (2 pi^2 n^4 x^2 - 3 pi n^2) exp(-pi n^2 x^2), summed as written."""
    return _scalarize(x, lambda a: THETA_FORM.evaluate(a, prec))


def theta(x, prec: SeriesPrecision = DEFAULT_PRECISION):
    """Theta(x), evaluated through x Theta(x) = Theta(1/x) below x = 1."""
    return _reflect(lambda a: THETA_FORM.evaluate(a, prec), x)


# d/dx of (4y^2 - 6y) e^{-y}, y = pi n^2 x^2, is x^{-1} theta(.)
_THETA_THETA = THETA_FORM.theta()


def _theta_prime_direct(a, prec):
    return _THETA_THETA.evaluate(a, prec) / a


def theta_prime(x, prec: SeriesPrecision = DEFAULT_PRECISION):
    """Derivative of Theta (term-by-term, reflected below x = 1)."""

    def fn(a):
        out = np.empty_like(a)
        hi = a >= 1.0
        out[hi] = _theta_prime_direct(a[hi], prec)
        lo = a[~hi]
        if lo.size:
            u = 1.0 / lo
            # Theta(x) = Theta(1/x)/x  =>  Theta'(x) = -u^2 Theta(u) - u^3 Theta'(u), u = 1/x
            out[~hi] = -(u**2) * THETA_FORM.evaluate(u, prec) - u**3 * _theta_prime_direct(u, prec)
        return out

    return _scalarize(x, fn)


_W1_THETA = W1_FORM.theta()


def w1(x, prec: SeriesPrecision = DEFAULT_PRECISION):
    """w_1(x) = 2 sum exp(-pi n^2 x^2); Jacobi's transformation below x = 1."""

    def fn(a):
        out = np.empty_like(a)
        hi = a >= 1.0
        out[hi] = W1_FORM.evaluate(a[hi], prec)
        lo = a[~hi]
        if lo.size:
            u = 1.0 / lo
            out[~hi] = (1.0 + W1_FORM.evaluate(u, prec)) * u - 1.0
        return out

    return _scalarize(x, fn)


def w1_prime(x, prec: SeriesPrecision = DEFAULT_PRECISION):
    def fn(a):
        out = np.empty_like(a)
        hi = a >= 1.0
        out[hi] = _W1_THETA.evaluate(a[hi], prec) / a[hi]
        lo = a[~hi]
        if lo.size:
            u = 1.0 / lo
            out[~hi] = -(1.0 + W1_FORM.evaluate(u, prec)) * u * u - u**3 * (_W1_THETA.evaluate(u, prec) / u)
        return out

    return _scalarize(x, fn)


def w2(x, prec: SeriesPrecision = DEFAULT_PRECISION, divisors: DivisorTable | None = None):
    """w_2(x) = 4 sum d_2(n) K0(2 pi n x) (all terms positive, summed directly)."""
    return _scalarize(x, lambda a: W2_FORM.evaluate(a, prec, divisors))


def w_series(k, x, prec: SeriesPrecision = DEFAULT_PRECISION, divisors: DivisorTable | None = None):
    """Term-by-term inverse Mellin transform of (Gamma(s/2) zeta(s) pi^(-s/2))^k for k = 1, 2."""
    if k == 1:
        return w1(x, prec)
    if k == 2:
        return w2(x, prec, divisors)
    raise DomainError("closed series exist for k = 1 and k = 2 only; use w_contour")


# ---------------------------------------------------------------------------
# v_1, v_2
# ---------------------------------------------------------------------------


def v1(x, prec: SeriesPrecision = DEFAULT_PRECISION):
    """v_1 = D^1 w_1, obtained by applying theta(theta + 1) to each Gaussian term."""
    form = _dk_gauss(1)
    return _reflect(lambda a: form.evaluate(a, prec), x)


def v2_direct(x, prec: SeriesPrecision = DEFAULT_PRECISION, divisors: DivisorTable | None = None):
    """D^2 w_2 summed as a series at x itself (cancels badly for x < 1)."""
    form = _dk_bessel(2)
    return _scalarize(x, lambda a: form.evaluate(a, prec, divisors))


def v2(x, prec: SeriesPrecision = DEFAULT_PRECISION, divisors: DivisorTable | None = None):
    """v_2 = D^2 w_2 = 4 sum d_2(n) [z^4 K0 + 9 z^2 K0 - 6 z^3 K1], z = 2 pi n x."""
    form = _dk_bessel(2)
    return _reflect(lambda a: form.evaluate(a, prec, divisors), x)


def v2_printed(x, prec: SeriesPrecision = DEFAULT_PRECISION, divisors: DivisorTable | None = None):
    """The v_2 series exactly as printed in the source (kept for comparison).

    -sum d_2(n) (4 pi n x K1(2 pi n x) - (2 pi n)^2 x K1(2 pi n x) - (2 pi n)^2 K0(2 pi n x))
    """

    def fn(a):
        out = np.empty_like(a)
        for i, xv in enumerate(a):
            # with z = 2 pi n x:  4 pi n x = 2 z,  (2 pi n)^2 x = z^2 / x,  (2 pi n)^2 = z^2 / x^2
            form = BesselForm(Polynomial([0.0, 0.0, 1.0 / xv**2]), Polynomial([0.0, -2.0, 1.0 / xv]), 1.0)
            out[i] = form.evaluate(np.array([xv]), prec, divisors)[0]
        return out

    return _scalarize(x, fn)


# ---------------------------------------------------------------------------
# general k through the contour
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _vk_inverter(k: int, contour: ContourSpec, survival: bool = False):
    if survival:
        return ContourInverter(lambda s: (2.0 * xi(s)) ** k / s, contour)
    return ContourInverter(lambda s: (2.0 * xi(s)) ** k, contour)


@lru_cache(maxsize=16)
def _wk_inverter(k: int, contour: ContourSpec):
    from .specfun import completed_zeta

    return ContourInverter(lambda s: completed_zeta(s) ** k, contour)


def _vk_cutoff(k):
    # v_k decays like exp(-k pi x^(2/k)); beyond this x the value is below 1e-320
    return (800.0 / (k * PI)) ** (k / 2.0)


def v_contour(k: int, x, contour: ContourSpec = DEFAULT_CONTOUR):
    """Inverse Mellin transform of (2 xi(s))^k at the given x, with no reflection."""
    inv = _vk_inverter(int(k), contour)

    def fn(a):
        out = np.zeros_like(a)
        live = a <= _vk_cutoff(k)
        if np.any(live):
            out[live] = inv(a[live])
        return out

    return _scalarize(x, fn)


def w_contour(k: int, x, contour: ContourSpec = DEFAULT_CONTOUR):
    """Inverse Mellin transform of (Gamma(s/2) zeta(s) pi^(-s/2))^k (c > 1)."""
    inv = _wk_inverter(int(k), contour)
    return _scalarize(x, inv)


def v_general(k: int, x, contour: ContourSpec = DEFAULT_CONTOUR, reflect: bool = True):
    """v_k(x) for any k >= 1 via the inverse Mellin transform of
    (s(s-1) Gamma(s/2) zeta(s) pi^(-s/2))^k = (2 xi(s))^k."""
    if int(k) != k or k < 1:
        raise DomainError("k must be an integer >= 1")
    if not reflect:
        return v_contour(k, x, contour)
    return _reflect(lambda a: v_contour(k, a, contour), x)


# ---------------------------------------------------------------------------
# distribution functions with closed forms
# ---------------------------------------------------------------------------

_GAUSS_N2 = GaussForm(Polynomial([1.0]), 1.0)


def cdf_k1(x, prec: SeriesPrecision = DEFAULT_PRECISION):
    """P(X_1 <= x) = 4 pi x^-3 sum n^2 exp(-pi n^2 / x^2), summed directly."""
    x = _check_positive(x)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    u = 1.0 / x
    # n^2 e^{-pi n^2 u^2} = y e^{-y} / (pi u^2)
    form = GaussForm(Polynomial([0.0, 1.0]), 1.0)
    out = 4.0 * PI * u**3 * form.evaluate(u, prec) / (PI * u * u)
    return out[0] if scalar else out


def cdf_theta_prime(x, prec: SeriesPrecision = DEFAULT_PRECISION):
    """-x^-2 Theta'(1/x), the relation as printed."""
    x = _check_positive(x)
    return -theta_prime(1.0 / x, prec) / x**2


def cdf_w1_prime(x, prec: SeriesPrecision = DEFAULT_PRECISION):
    """-x^-2 w_1'(1/x): the form of the derivative relation that holds exactly."""
    x = _check_positive(x)
    return -w1_prime(1.0 / x, prec) / x**2


def _g_form(k):
    """(D^1)^(k-1) w_k as a term form (k = 1, 2)."""
    return _dk_gauss(0) if k == 1 else _dk_bessel(1)


def _survival_raw(k, a, prec, divisors):
    g = _g_form(k)
    form = g.theta() + g  # S = -(theta + 1) g
    return -form.evaluate(a, prec, divisors) if k == 2 else -form.evaluate(a, prec)


def _cdf_raw(k, a, prec, divisors):
    # F(x) = -u (theta g)(u), u = 1/x
    u = 1.0 / a
    tg = _g_form(k).theta()
    val = tg.evaluate(u, prec, divisors) if k == 2 else tg.evaluate(u, prec)
    return -u * val


def survival_series(k, x, prec: SeriesPrecision = DEFAULT_PRECISION, divisors: DivisorTable | None = None):
    """P(X_k > x) for k = 1, 2 from the closed forms
    S(x) = -(theta + 1)(D^1)^(k-1) w_k (x >= 1) and 1 - F(x) below x = 1."""
    if k not in (1, 2):
        raise DomainError("closed-form survival functions exist for k = 1, 2")

    def fn(a):
        out = np.empty_like(a)
        hi = a >= 1.0
        if np.any(hi):
            out[hi] = _survival_raw(k, a[hi], prec, divisors)
        if np.any(~hi):
            out[~hi] = 1.0 - _cdf_raw(k, a[~hi], prec, divisors)
        return out

    return _scalarize(x, fn)


def cdf_series(k, x, prec: SeriesPrecision = DEFAULT_PRECISION, divisors: DivisorTable | None = None):
    """P(X_k <= x) for k = 1, 2; complementary to :func:`survival_series`."""
    if k not in (1, 2):
        raise DomainError("closed-form distribution functions exist for k = 1, 2")

    def fn(a):
        out = np.empty_like(a)
        lo = a < 1.0
        if np.any(lo):
            out[lo] = _cdf_raw(k, a[lo], prec, divisors)
        if np.any(~lo):
            out[~lo] = 1.0 - _survival_raw(k, a[~lo], prec, divisors)
        return out

    return _scalarize(x, fn)


def survival_contour(k: int, x, contour: ContourSpec = DEFAULT_CONTOUR):
    """P(X_k > x) as the inverse Mellin transform of (2 xi(s))^k / s."""
    inv = _vk_inverter(int(k), contour, survival=True)
    return _scalarize(x, inv)


# ---------------------------------------------------------------------------
# evaluator object
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VkEval:
    """Evaluator for v_k: closed series for k = 1, 2 or the contour for any k."""

    k: int
    mode: str = "auto"
    contour: ContourSpec = DEFAULT_CONTOUR
    prec: SeriesPrecision = DEFAULT_PRECISION
    divisors: DivisorTable | None = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("k must be an integer >= 1")
        mode = self.mode
        if mode == "auto":
            mode = "series" if self.k <= 2 else "contour"
            object.__setattr__(self, "mode", mode)
        if mode not in ("series", "contour"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if mode == "series" and self.k > 2:
            raise ValueError("closed-series mode is available for k = 1, 2 only")

    def __call__(self, x):
        if self.mode == "contour":
            return v_general(self.k, x, self.contour)
        if self.k == 1:
            return v1(x, self.prec)
        return v2(x, self.prec, self.divisors)


def vk(k, x, **kw):
    """Shorthand for ``VkEval(k, **kw)(x)``."""
    return VkEval(k, **kw)(x)
