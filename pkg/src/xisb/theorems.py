"""Claim-by-claim numerical verification.

Each check measures one published statement and returns a :class:`ClaimEntry`
holding the measured numbers, the claimed numbers and a verdict.  Claimed
constants are never corrected in place: when they disagree with measurement
the entry keeps both, plus the best-fitting constant.

Verdict rule: ``verified`` iff every key present in both ``measured`` and
``reference`` satisfies ``|m - r| <= tolerance * (1 + |r|)``; entries without
reference values are ``informational``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from . import distribution as dist
from .errors import DomainError
from .mellin import DEFAULT_QUADRATURE, integrate_line, mellin_transform
from .specfun import bessel_k, xi, zeta
from .xi_core import (
    THETA_FORM,
    BesselForm,
    GaussForm,
    _dk_bessel,
    _dk_gauss,
    cdf_k1,
    cdf_theta_prime,
    cdf_w1_prime,
    survival_contour,
    survival_series,
    theta,
    v1,
    v2,
    v2_printed,
    v_contour,
    v_general,
    w1,
    w2,
    w_contour,
)

__all__ = [
    "VERIFIED",
    "DISCREPANCY",
    "INFORMATIONAL",
    "ClaimEntry",
    "ClaimLedger",
    "judge",
    "check_functional_equations",
    "check_dominance",
    "check_bessel_integral",
    "check_eq23",
    "check_theorem13",
    "run_lln",
    "REGISTRY",
    "claim_ids",
    "build_ledger",
]

VERIFIED = "verified"
DISCREPANCY = "discrepancy"
INFORMATIONAL = "informational"
DEFAULT_SEED = 20240601

SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# ledger types
# ---------------------------------------------------------------------------


def judge(measured: dict, reference: dict, tolerance: float) -> str:
    common = [key for key in reference if key in measured]
    if not common:
        return INFORMATIONAL
    ok = all(abs(measured[key] - reference[key]) <= tolerance * (1.0 + abs(reference[key])) for key in common)
    return VERIFIED if ok else DISCREPANCY


@dataclass(frozen=True)
class ClaimEntry:
    claim_id: str
    location: str
    measured: dict
    reference: dict
    tolerance: float
    verdict: str
    note: str = ""

    @classmethod
    def make(cls, claim_id, location, measured, reference, tolerance, note=""):
        measured = {k: float(v) for k, v in measured.items()}
        reference = {k: float(v) for k, v in reference.items()}
        if not measured:
            raise ValueError("a claim entry needs at least one measured value")
        return cls(claim_id, location, measured, reference, float(tolerance),
                   judge(measured, reference, tolerance), note)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ClaimLedger:
    entries: tuple = field(default_factory=tuple)

    def __post_init__(self):
        ids = [e.claim_id for e in self.entries]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate claim ids in ledger")

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, claim_id: str) -> ClaimEntry:
        for e in self.entries:
            if e.claim_id == claim_id:
                return e
        raise KeyError(claim_id)

    def counts(self) -> dict:
        out = {VERIFIED: 0, DISCREPANCY: 0, INFORMATIONAL: 0}
        for e in self.entries:
            out[e.verdict] += 1
        return out

    def to_json(self) -> str:
        return json.dumps({"entries": [e.to_dict() for e in self.entries]}, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ClaimLedger":
        raw = json.loads(text)["entries"]
        return cls(tuple(ClaimEntry(**e) for e in raw))

    def to_text(self) -> str:
        lines = [f"{'claim':<26} {'verdict':<13} {'tol':>8}  details"]
        for e in self.entries:
            parts = []
            for key, m in e.measured.items():
                r = e.reference.get(key)
                parts.append(f"{key}={m:.10g}" + ("" if r is None else f" (ref {r:.10g})"))
            lines.append(f"{e.claim_id:<26} {e.verdict:<13} {e.tolerance:>8.1e}  {e.location}")
            for p in parts:
                lines.append(f"{'':<49}{p}")
            if e.note:
                lines.append(f"{'':<49}note: {e.note}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------


def check_xi_symmetry(n: int = 200, seed: int = DEFAULT_SEED) -> ClaimEntry:
    rng = np.random.Generator(np.random.Philox(seed))
    s = rng.uniform(-8.0, 9.0, n) + 1j * rng.uniform(-25.0, 25.0, n)
    a, b = xi(s), xi(1.0 - s)
    gap = float(np.max(np.abs(a - b) / (1.0 + np.abs(a))))
    return ClaimEntry.make("xi-symmetry", "xi(s) = xi(1 - s)", {"max_scaled_gap": gap},
                           {"max_scaled_gap": 0.0}, 1e-10, f"{n} random points in [-8,9] x [-25,25]i")


def check_xi_values() -> ClaimEntry:
    m = {"2xi(0)": 2.0 * xi(0.0).real, "2xi(1)": 2.0 * xi(1.0).real, "zeta(0)": zeta(0.0).real}
    return ClaimEntry.make("xi-at-zero", "2 xi(0) = 2 xi(1) = 1, zeta(0) = -1/2", m,
                           {"2xi(0)": 1.0, "2xi(1)": 1.0, "zeta(0)": -0.5}, 1e-12)


def check_theta_mellin(points: Sequence[float] = (0.0, 0.5, 2.0, 3.0, -1.0)) -> ClaimEntry:
    vals = mellin_transform(theta, np.asarray(points, dtype=float))
    m = {f"M[Theta]({p:g})": float(np.real(v)) for p, v in zip(points, vals)}
    r = {f"M[Theta]({p:g})": float(np.real(xi(p))) for p in points}
    return ClaimEntry.make("theta-mellin", "int_0^inf x^(s-1) Theta(x) dx = xi(s)", m, r, 1e-10)


def check_theta_density() -> ClaimEntry:
    mass = float(np.real(mellin_transform(theta, 0.0)))
    return ClaimEntry.make(
        "theta-density-mass", "x^-1 Theta(x) is a probability density", {"mass": mass}, {"mass": 1.0}, 1e-10,
        "mass equals xi(0) = 1/2; the density is 2 x^-1 Theta(x), which gives E(X^s) = 2 xi(s) as stated")


# ---------------------------------------------------------------------------
# k = 1 distribution function
# ---------------------------------------------------------------------------


def check_cdf_closed_form(points: Sequence[float] = tuple(np.geomspace(0.3, 4.0, 10))) -> ClaimEntry:
    d = dist.build(1)
    x = np.asarray(points, dtype=float)
    gap = float(np.max(np.abs(cdf_k1(x) - dist.cdf(d, x))))
    m = {"max_gap_vs_quadrature": gap, "F(100)": float(cdf_k1(100.0))}
    r = {"max_gap_vs_quadrature": 0.0, "F(100)": 1.0}
    return ClaimEntry.make("cdf-closed-form", "P(X <= x) = 4 pi x^-3 sum n^2 exp(-pi n^2 / x^2)", m, r, 1e-8,
                           "quadrature of the normalised density 2 Theta(x) / x on 10 log-spaced points")


def check_theta_prime(points: Sequence[float] = (0.7, 1.0, 1.5)) -> ClaimEntry:
    x = np.asarray(points, dtype=float)
    ref = cdf_k1(x)
    lit = cdf_theta_prime(x)
    alt = cdf_w1_prime(x)
    m = {f"-x^-2 Theta'(1/x) @ {p:g}": float(v) for p, v in zip(points, lit)}
    m.update({f"-x^-2 w1'(1/x) @ {p:g}": float(v) for p, v in zip(points, alt)})
    r = {f"-x^-2 Theta'(1/x) @ {p:g}": float(v) for p, v in zip(points, ref)}
    gap_alt = float(np.max(np.abs(alt - ref)))
    return ClaimEntry.make(
        "cdf-theta-prime", "P(X <= x) = -x^-2 Theta'(1/x)", m, r, 1e-8,
        f"fails as stated; with w1 = 2 sum exp(-pi n^2 x^2) in place of Theta it holds (gap {gap_alt:.2e})")


# ---------------------------------------------------------------------------
# w_k, v_k
# ---------------------------------------------------------------------------


def check_w_series(points: Sequence[float] = (0.5, 1.0, 1.3, 2.0)) -> ClaimEntry:
    x = np.asarray(points, dtype=float)
    m = {"w1_max_gap": float(np.max(np.abs(w1(x) - w_contour(1, x)))),
         "w2_max_gap": float(np.max(np.abs(w2(x) - w_contour(2, x))))}
    return ClaimEntry.make("w-series", "w_1, w_2 as theta and K0 divisor series", m,
                           {"w1_max_gap": 0.0, "w2_max_gap": 0.0}, 1e-8,
                           "series vs inverse Mellin transform of (Gamma(s/2) zeta(s) pi^(-s/2))^k")


def check_v1_theta(grid=tuple(np.geomspace(0.2, 5.0, 25))) -> ClaimEntry:
    x = np.asarray(grid, dtype=float)
    gap = float(np.max(np.abs(v1(x) - 2.0 * theta(x)) / (1.0 + np.abs(theta(x)))))
    return ClaimEntry.make("v1-theta", "v_1 = D^1 w_1 = 2 Theta", {"max_gap": gap}, {"max_gap": 0.0}, 1e-12)


def check_v2_operator(points: Sequence[float] = (0.5, 1.0, 2.0)) -> ClaimEntry:
    x = np.asarray(points, dtype=float)
    ser, con = v2(x), v_general(2, x)
    m = {f"v2 @ {p:g}": float(v) for p, v in zip(points, ser)}
    r = {f"v2 @ {p:g}": float(v) for p, v in zip(points, con)}
    return ClaimEntry.make("v2-operator-series", "v_2 = D^2 w_2 as a K0/K1 divisor series", m, r, 1e-6,
                           "series 4 sum d2(n)[z^4 K0 + 9 z^2 K0 - 6 z^3 K1], z = 2 pi n x, vs contour")


def check_v2_printed(points: Sequence[float] = (0.5, 1.0, 2.0)) -> ClaimEntry:
    x = np.asarray(points, dtype=float)
    pr, con = v2_printed(x), v_general(2, x)
    m = {f"v2 @ {p:g}": float(v) for p, v in zip(points, pr)}
    r = {f"v2 @ {p:g}": float(v) for p, v in zip(points, con)}
    return ClaimEntry.make(
        "v2-series-printed", "v_2 = -sum d2(n)(4 pi n x K1 - (2 pi n)^2 x K1 - (2 pi n)^2 K0)", m, r, 1e-6,
        "reference values from the contour inversion of (2 xi(s))^2")


def _reciprocity_gap(fn, grid):
    gaps = []
    for x in grid:
        a, b = x * fn(x), fn(1.0 / x)
        gaps.append(abs(a - b) / abs(b))
    return float(max(gaps))


def check_functional_equations(grid: Sequence[float] = tuple(np.geomspace(0.2, 5.0, 25))) -> list:
    """Reciprocity x f(x) = f(1/x) for Theta and v_1, v_2, v_3.

    k = 1, 2 use the direct series in multiprecision (no reflection involved);
    k = 3 uses the contour without reflection.
    """
    grid = [float(x) for x in grid]
    if any(not x > 0 for x in grid):
        raise DomainError("grid must lie in (0, inf)")
    g1, g2 = _dk_gauss(1), _dk_bessel(2)
    out = [
        ClaimEntry.make("theta-reciprocity", "x Theta(x) = Theta(1/x)",
                        {"max_rel_gap": _reciprocity_gap(lambda x: float(THETA_FORM.evaluate_mp(x, 60)), grid)},
                        {"max_rel_gap": 0.0}, 1e-10),
        ClaimEntry.make("vk-reciprocity-1", "v_1(x) = v_1(1/x) / x",
                        {"max_rel_gap": _reciprocity_gap(lambda x: float(g1.evaluate_mp(x, 60)), grid)},
                        {"max_rel_gap": 0.0}, 1e-10),
        ClaimEntry.make("vk-reciprocity-2", "v_2(x) = v_2(1/x) / x",
                        {"max_rel_gap": _reciprocity_gap(lambda x: float(g2.evaluate_mp(x, 28)), grid)},
                        {"max_rel_gap": 0.0}, 1e-8),
    ]
    xs = np.asarray(grid)
    v3 = v_contour(3, xs)
    v3r = v_contour(3, 1.0 / xs)
    gap3 = float(np.max(np.abs(xs * v3 - v3r) / np.abs(v3r)))
    out.append(ClaimEntry.make("vk-reciprocity-3", "v_3(x) = v_3(1/x) / x", {"max_rel_gap": gap3},
                               {"max_rel_gap": 0.0}, 1e-5, "contour inversion, no reflection"))
    return out


# ---------------------------------------------------------------------------
# X_k: normalisation, moments, variance, size bias
# ---------------------------------------------------------------------------


def check_normalization(ks: Sequence[int] = (1, 2, 3)) -> ClaimEntry:
    m, r = {}, {}
    for k in ks:
        d = dist.build(k)
        m[f"raw_mass_k{k}"] = d.raw_mass
        m[f"normalised_mass_k{k}"] = d.norm * d.table_mass
        r[f"raw_mass_k{k}"] = 2.0**k
    return ClaimEntry.make(
        "normalization", "density 2^-k v_k(x) / x integrates to 1", m, r, 1e-8,
        "raw mass of v_k(x)/x equals (2 xi(0))^k = 1, so the normalising factor is 1, not 2^-k")


def check_moments(ks: Sequence[int] = (1, 2), points: Sequence[float] = (2.0, 3.0)) -> ClaimEntry:
    m, r = {}, {}
    alt = 0.0
    for k in ks:
        d = dist.build(k)
        vals = np.real(dist.moment(d, np.asarray(points, dtype=float)))
        for s, v in zip(points, vals):
            key = f"E[X{k}^{s:g}]"
            m[key] = float(v)
            r[key] = float(np.real(xi(s))) ** k
            alt = max(alt, abs(v - (2.0 * float(np.real(xi(s)))) ** k))
        m[f"best_fit_factor_k{k}"] = float(vals[0] / float(np.real(xi(points[0]))) ** k)
    m["max_gap_vs_(2xi)^k"] = alt
    return ClaimEntry.make("moments", "E(X_k^s) = xi(s)^k", m, r, 1e-8,
                           "measured moments match (2 xi(s))^k; best-fit factor over xi^k is 2^k")


def check_moment_symmetry(ks: Sequence[int] = (1, 2), points=(2.0, 3.0, 0.5 + 2.0j)) -> ClaimEntry:
    m, r = {}, {}
    for k in ks:
        d = dist.build(k)
        s = np.asarray(points, dtype=complex)
        a, b = dist.moment(d, s), dist.moment(d, 1.0 - s)
        m[f"max_gap_k{k}"] = float(np.max(np.abs(a - b)))
        r[f"max_gap_k{k}"] = 0.0
    return ClaimEntry.make("moment-symmetry", "E(X_k^s) = E(X_k^(1-s))", m, r, 1e-7)


def check_mean(ks: Sequence[int] = (1, 2, 3)) -> ClaimEntry:
    m = {f"E[X{k}]": float(np.real(dist.moment(dist.build(k), 1.0))) for k in ks}
    return ClaimEntry.make("mean", "E(X_k) = 1", m, {key: 1.0 for key in m}, 1e-8)


def check_variance(ks: Sequence[int] = (1, 2)) -> ClaimEntry:
    m, r = {}, {}
    z3 = float(np.real(zeta(3.0)))
    for k in ks:
        d = dist.build(k)
        _, var = dist.mean_variance(d)
        m[f"Var[X{k}]"] = var
        m[f"E[X{k}^2]-1"] = float(np.real(dist.moment(d, 2.0))) - 1.0
        m[f"(pi/3)^{k}-1"] = (math.pi / 3.0) ** k - 1.0
        r[f"Var[X{k}]"] = 2.0 * z3**k - 1.0
    return ClaimEntry.make("variance", "Var(X_k) = 2 zeta(3)^k - 1", m, r, 1e-8,
                           "measured variance is (2 xi(2))^k - 1 = (pi/3)^k - 1")


SIZE_BIAS_FUNCTIONS: dict = {
    "1": lambda x: np.ones_like(x),
    "x": lambda x: x,
    "exp(-x)": lambda x: np.exp(-x),
}


def check_size_bias(ks: Sequence[int] = (1, 2)) -> ClaimEntry:
    m = {}
    for k in ks:
        d = dist.build(k)
        for name, f in SIZE_BIAS_FUNCTIONS.items():
            m[f"gap_k{k}_f={name}"] = dist.size_bias_gap(d, f)
    return ClaimEntry.make("size-bias", "E(X_k f(X_k)) = E(f(1/X_k))", m, {key: 0.0 for key in m}, 1e-7)


# ---------------------------------------------------------------------------
# stochastic ordering
# ---------------------------------------------------------------------------


def check_dominance(k: int, grid: Sequence[float] = tuple(np.geomspace(0.1, 10.0, 50)),
                    tol: float | None = None) -> ClaimEntry:
    """P(X_k >= x) <= P(X_(k-1) >= x) pointwise on the grid."""
    if int(k) != k or k < 2:
        raise DomainError("dominance compares k >= 2 with k - 1")
    x = np.asarray(grid, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("grid must lie in (0, inf)")
    if tol is None:
        tol = 1e-9 if k == 2 else 1e-5
    s_hi = 1.0 - dist.cdf(dist.build(k), x)
    s_lo = 1.0 - dist.cdf(dist.build(k - 1), x)
    excess = s_hi - s_lo
    worst = int(np.argmax(excess))
    # independent cross-check of the survival functions
    ref_hi = survival_series(k, x) if k <= 2 else survival_contour(k, x)
    cross = float(np.max(np.abs(ref_hi - s_hi)))
    bad = x[excess > tol]
    m = {"max_violation": max(float(excess[worst]), 0.0), "worst_x": float(x[worst]),
         "min_margin": float(np.min(-excess)), "violating_points": float(bad.size),
         "survival_crosscheck_gap": cross}
    note = (f"violated on x in [{bad.min():.4g}, {bad.max():.4g}]: both laws have mean 1 and "
            f"Var grows with k, so X_k has the heavier upper tail" if bad.size else "ordering holds on the grid")
    return ClaimEntry.make(f"dominance-{k}", f"P(X_{k} >= x) <= P(X_{k - 1} >= x)", m,
                           {"max_violation": 0.0}, tol, note)


# ---------------------------------------------------------------------------
# Bessel identities
# ---------------------------------------------------------------------------


def _bessel_quadrature(s, alpha, beta):
    # y = e^u:  integrand e^{-beta^2 y^2 - alpha^2/y^2} y^{-2s}
    def g(u):
        with np.errstate(over="ignore", under="ignore"):
            y2 = np.exp(2.0 * u)
            out = np.exp(-(beta**2) * y2 - alpha**2 / y2 - 2.0 * s * u)
        out[~np.isfinite(out)] = 0.0
        return out

    centre = 0.5 * math.log(alpha / beta)
    return (alpha / beta) ** s * float(integrate_line(g, DEFAULT_QUADRATURE, centre).value)


def check_bessel_integral(s: float, alpha: float, beta: float) -> dict:
    """Returns the quadrature side, the claimed side 2 K_s(2 alpha beta) and their ratio."""
    if not (alpha > 0 and beta > 0):
        raise DomainError("alpha and beta must be positive")
    q = _bessel_quadrature(s, alpha, beta)
    k = float(bessel_k(abs(s), 2.0 * alpha * beta)) if s in (0, 1, -1) else _k_generic(s, 2.0 * alpha * beta)
    return {"quadrature": q, "claimed": 2.0 * k, "K_s": k, "ratio": q / (2.0 * k)}


def _k_generic(nu, x):
    # K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt
    def g(t):
        with np.errstate(over="ignore", under="ignore"):
            out = np.exp(-x * np.cosh(t)) * np.cosh(nu * t)
        out[~np.isfinite(out)] = 0.0
        return out

    return 0.5 * float(integrate_line(g).value)


BESSEL_CASES = ((1.0, 1.0, 1.0), (0.0, 1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)),
                (1.0, 1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)), (1.0, SQRT_PI, 1.0))


def check_bessel_transform(cases=BESSEL_CASES) -> ClaimEntry:
    m, r = {}, {}
    ratios = []
    for s, a, b in cases:
        res = check_bessel_integral(s, a, b)
        key = f"s={s:g},a={a:.6g},b={b:.6g}"
        m[key] = res["quadrature"]
        r[key] = res["claimed"]
        ratios.append(res["ratio"])
    m["ratio_quadrature_to_claimed"] = float(np.mean(ratios))
    m["ratio_spread"] = float(np.ptp(ratios))
    return ClaimEntry.make(
        "bessel-transform", "2 K_s(2ab) = (a/b)^s int_0^inf exp(-b^2 y^2 - a^2/y^2) y^(-2s-1) dy", m, r, 1e-9,
        "the integral equals K_s(2ab): the constant on the left is 1, not 2")


_K1_SUM = BesselForm(Polynomial([0.0]), Polynomial([1.0]), 1.0, divisor_weighted=False, power=1,
                     freq=2.0 * SQRT_PI)  # sum n K1(2 sqrt(pi) n x)
_N2_GAUSS = GaussForm(Polynomial([0.0, 1.0]), 1.0 / math.pi)  # sum n^2 e^{-pi n^2 u^2} * (pi u^2)


def check_eq23(x: float) -> dict:
    """x sum n K1(2 x n sqrt(pi)) against sqrt(pi) int e^{-(xy)^2} y^-3 sum n^2 e^{-pi n^2/y^2} dy."""
    if not x > 0:
        raise DomainError("x must be positive")
    lhs = x * float(_K1_SUM.evaluate(np.array([x]))[0])

    def g(u):
        y = np.exp(u)
        out = np.zeros_like(y)
        live = (x * y < 40.0) & (y > 0.02)
        yl = y[live]
        # sum n^2 e^{-pi n^2 / y^2} = GaussForm(y e^-y) / (pi u^2) with u = 1/y
        inner = _N2_GAUSS.evaluate(1.0 / yl) * yl**2
        out[live] = np.exp(-(x * yl) ** 2) * inner / yl**3 * yl
        return out

    rhs = SQRT_PI * float(integrate_line(g, DEFAULT_QUADRATURE).value)
    return {"lhs": lhs, "rhs": rhs}


def check_bessel_theta_sum(points: Sequence[float] = (0.5, 1.0, 2.0)) -> ClaimEntry:
    m, r = {}, {}
    for x in points:
        res = check_eq23(x)
        m[f"rhs @ {x:g}"] = res["rhs"]
        r[f"rhs @ {x:g}"] = res["lhs"]
    return ClaimEntry.make("bessel-theta-sum",
                           "x sum n K1(2xn sqrt(pi)) = sqrt(pi) int e^{-(xy)^2} y^-3 sum n^2 e^{-pi n^2/y^2} dy",
                           m, r, 1e-8, "reference column holds the Bessel-sum side")


_GAUSS_ONE = GaussForm(Polynomial([1.0]), 1.0)


def check_theorem13(x: float) -> dict:
    """x sum d2(n) n K1(2xn sqrt(pi)) against (1/(4 sqrt(pi))) int P(X_1 <= y) sum e^{-(xny)^2} dy."""
    if not x > 0:
        raise DomainError("x must be positive")
    freq = 2.0 * SQRT_PI
    form = BesselForm(Polynomial([0.0]), Polynomial([0.0, 1.0 / (freq * x)]), 1.0, freq=freq)
    lhs = x * float(form.evaluate(np.array([x]))[0])

    def g(u):
        y = np.exp(u)
        out = np.zeros_like(y)
        live = (x * y < 40.0) & (y > 0.05)
        yl = y[live]
        out[live] = cdf_k1(yl) * _GAUSS_ONE.evaluate(x * yl / SQRT_PI) * yl
        return out

    rhs = float(integrate_line(g, DEFAULT_QUADRATURE).value) / (4.0 * SQRT_PI)
    return {"lhs": lhs, "rhs": rhs, "ratio": rhs / lhs}


def check_divisor_bessel(points: Sequence[float] = (0.5, 1.0, 2.0)) -> ClaimEntry:
    m, r = {}, {}
    ratios = []
    for x in points:
        res = check_theorem13(x)
        m[f"lhs @ {x:g}"] = res["lhs"]
        m[f"rhs @ {x:g}"] = res["rhs"]
        m[f"ratio @ {x:g}"] = res["ratio"]
        r[f"ratio @ {x:g}"] = 1.0
        ratios.append(res["ratio"])
    m["ratio_spread"] = float(np.ptp(ratios))
    return ClaimEntry.make("divisor-bessel-identity",
                           "x sum d2(n) n K1(2xn sqrt(pi)) = (1/(4 sqrt(pi))) int P(X_1 <= y) sum e^{-(xny)^2} dy",
                           m, r, 1e-6, "P(X_1 <= y) is the normalised closed form 4 pi y^-3 sum n^2 e^{-pi n^2/y^2}")


# ---------------------------------------------------------------------------
# law of large numbers
# ---------------------------------------------------------------------------


def _sample_means(k, n, trials, seed):
    d = dist.build(k)
    state = dist.SamplerState(seed)
    draws = dist.sample(d, n * trials, state).reshape(trials, n)
    # fixed-order reduction
    return np.array([math.fsum(row) for row in draws]) / n


def run_lln(k: int, n: int, trials: int, seed: int, eps: Sequence[float] = (0.05, 0.01)) -> dict:
    """Fractions of trials with |S_n/n - 1| <= eps, plus the mean absolute deviation."""
    if n < 100 or trials < 10:
        raise DomainError("run_lln needs n >= 100 and trials >= 10")
    means = _sample_means(k, n, trials, seed)
    dev = np.abs(means - 1.0)
    out = {f"frac_within_{e:g}": float(np.mean(dev <= e)) for e in eps}
    out["mean_abs_dev"] = float(np.mean(dev))
    out["mean_of_means_minus_1"] = float(np.mean(means) - 1.0)
    return out


def check_lln(seed: int = DEFAULT_SEED) -> ClaimEntry:
    big = run_lln(1, 10_000, 100, seed)
    small = run_lln(1, 100, 100, seed + 1)
    big2 = run_lln(2, 10_000, 100, seed + 2)
    m = {"k1_frac_within_0.01": big["frac_within_0.01"],
         "k1_mean_abs_dev_n1e4": big["mean_abs_dev"],
         "k1_mean_abs_dev_n100": small["mean_abs_dev"],
         "k1_shrink_factor": small["mean_abs_dev"] / big["mean_abs_dev"],
         "k2_frac_within_0.05": big2["frac_within_0.05"],
         "k2_mean_abs_dev_n1e4": big2["mean_abs_dev"]}
    r = {"k1_frac_within_0.01": 1.0, "k2_frac_within_0.05": 1.0}
    return ClaimEntry.make("lln", "S_n / n -> 1 in probability", m, r, 0.025,
                           "100 trials each; tolerance 0.025 on a reference of 1 accepts >= 95 of 100; "
                           "shrink factor n=100 -> 1e4 should be near 10")


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


def _one(fn: Callable[[], ClaimEntry]):
    return lambda: [fn()]


def _functional(i):
    return lambda: [check_functional_equations()[i]]


REGISTRY: dict = {
    "xi-symmetry": _one(check_xi_symmetry),
    "xi-at-zero": _one(check_xi_values),
    "theta-mellin": _one(check_theta_mellin),
    "theta-reciprocity": _functional(0),
    "theta-density-mass": _one(check_theta_density),
    "cdf-theta-prime": _one(check_theta_prime),
    "cdf-closed-form": _one(check_cdf_closed_form),
    "w-series": _one(check_w_series),
    "v1-theta": _one(check_v1_theta),
    "v2-series-printed": _one(check_v2_printed),
    "v2-operator-series": _one(check_v2_operator),
    "vk-reciprocity-1": _functional(1),
    "vk-reciprocity-2": _functional(2),
    "vk-reciprocity-3": _functional(3),
    "normalization": _one(check_normalization),
    "moments": _one(check_moments),
    "moment-symmetry": _one(check_moment_symmetry),
    "mean": _one(check_mean),
    "variance": _one(check_variance),
    "size-bias": _one(check_size_bias),
    "dominance-2": _one(lambda: check_dominance(2)),
    "dominance-3": _one(lambda: check_dominance(3)),
    "bessel-transform": _one(check_bessel_transform),
    "bessel-theta-sum": _one(check_bessel_theta_sum),
    "divisor-bessel-identity": _one(check_divisor_bessel),
    "lln": _one(check_lln),
}


def claim_ids() -> list:
    return list(REGISTRY)


def build_ledger(selection: Iterable[str] | str | None = "all") -> ClaimLedger:
    """Run the selected checks in registry order."""
    if selection is None:
        return ClaimLedger(())
    if selection == "all":
        wanted = list(REGISTRY)
    else:
        wanted = list(selection)
        unknown = [c for c in wanted if c not in REGISTRY]
        if unknown:
            raise KeyError(f"unknown claim id(s): {', '.join(unknown)}")
    entries = []
    fe_cache = None
    for cid in REGISTRY:
        if cid not in wanted:
            continue
        if cid in ("theta-reciprocity", "vk-reciprocity-1", "vk-reciprocity-2", "vk-reciprocity-3"):
            if fe_cache is None:
                fe_cache = {e.claim_id: e for e in check_functional_equations()}
            entries.append(fe_cache[cid])
        else:
            entries.extend(REGISTRY[cid]())
    return ClaimLedger(tuple(entries))
