"""Quadrature engine - moments, CDF and quantiles of GPFP laws, exact free Poisson moments."""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import integrate, optimize, special

from src.core.nc_lattice import LATTICE_CAP, cumulants_to_moments
from src.models.distribution import GPFPSpec, PowerSpec
from src.models.sequences import MomentValue, QuadratureRule
from src.utils.errors import DomainError, ExactPathUnavailable, ToleranceNotMetError
from src.utils.numbers import to_exact

logger = logging.getLogger(__name__)

Distribution = Union[GPFPSpec, PowerSpec]

DEFAULT_RULE = QuadratureRule()
ALIGNMENT_TOL = 1e-12
_CDF_START_NODES = 64
_TABLE_PANELS = 4096
_CDF_MAX_NODES = 4096


def carrier_of(dist: Distribution) -> Tuple[GPFPSpec, float]:
    """The GPFP law integrated over and the power applied to its variable."""
    if isinstance(dist, PowerSpec):
        return dist.carrier, dist.rho
    if isinstance(dist, GPFPSpec):
        return dist, 1.0
    raise DomainError(f"expected a GPFPSpec or PowerSpec, got {type(dist).__name__}")


def select_rule(dist: Distribution, rule: Optional[QuadratureRule] = None) -> QuadratureRule:
    """Switch to the adaptive rule when the support touches zero."""
    rule = rule or DEFAULT_RULE
    spec, _ = carrier_of(dist)
    if spec.a == 0.0 and rule.kind != "adaptive":
        return rule.with_kind("adaptive")
    return rule


def _psi(spec: GPFPSpec, x: np.ndarray) -> np.ndarray:
    """sum_k alpha_k x^(-l_k - 1)."""
    out = np.zeros_like(x, dtype=float)
    for alpha, l in zip(spec.alpha, spec.l):
        out += alpha * np.power(x, -l - 1.0)
    return out


def density_nodes(spec: GPFPSpec, panels: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes and weights of the cosine-substitution rule.

    With x = c - h cos(phi) the measure becomes ``norm h^2 sin^2(phi) psi(x) dphi``;
    the trapezoid rule on ``panels`` equal phi-panels (endpoints carry zero
    weight) integrates it spectrally.

    Returns:
        (x_i, w_i) with ``int g dmu ~ sum_i w_i g(x_i)``; raw specs use norm 1
    """
    c = 0.5 * (spec.a + spec.b)
    h = 0.5 * (spec.b - spec.a)
    phi = np.arange(1, panels) * (math.pi / panels)
    x = c - h * np.cos(phi)
    sin = np.sin(phi)
    norm = spec.norm if spec.norm is not None else 1.0
    weights = (math.pi / panels) * norm * h * h * sin * sin * _psi(spec, x)
    return x, weights


def _cosine_expectation(
    spec: GPFPSpec, rho: float, g: Callable[[np.ndarray], np.ndarray], rule: QuadratureRule
) -> Tuple[complex, float]:
    panels = rule.nodes + 1
    x, w = density_nodes(spec, panels)
    previous = np.dot(g(np.power(x, rho)), w)
    while True:
        panels *= 2
        if panels - 1 > rule.max_nodes:
            raise ToleranceNotMetError(
                f"quadrature did not reach tol={rule.tol:g} within {rule.max_nodes} nodes"
            )
        x, w = density_nodes(spec, panels)
        current = np.dot(g(np.power(x, rho)), w)
        err = float(np.max(np.abs(current - previous)))
        scale = max(1.0, float(np.max(np.abs(current))))
        if err <= rule.tol * scale:
            logger.debug("cosine rule converged at %d nodes (err %.3g)", panels - 1, err)
            return current, err
        previous = current


def _quad_alg(fun: Callable[[float], complex], lo: float, hi: float, wvar: Tuple[float, float]) -> Tuple[complex, float]:
    """Complex-valued QUADPACK integral with algebraic endpoint weights."""
    re, re_err = integrate.quad(lambda t: float(np.real(fun(t))), lo, hi, weight="alg", wvar=wvar, limit=200)
    im, im_err = integrate.quad(lambda t: float(np.imag(fun(t))), lo, hi, weight="alg", wvar=wvar, limit=200)
    return complex(re, im), re_err + im_err


def _adaptive_expectation(
    spec: GPFPSpec,
    rho: float,
    g: Callable[[np.ndarray], np.ndarray],
    power: float = 0.0,
) -> Tuple[complex, float]:
    """
    Adaptive rule with the endpoint powers folded into QUADPACK's weight.

    ``power`` is an extra real exponent of the carrier variable moved into the
    weight (used by moments, where x^s is singular at zero).
    """
    norm = spec.norm if spec.norm is not None else 1.0
    total, err = 0j, 0.0
    for alpha, l in zip(spec.alpha, spec.l):
        if spec.a == 0.0:
            lower = 0.5 - 1.0 - l + power
            if lower <= -1.0:
                raise DomainError(f"integrand not integrable at 0 (exponent {lower:g})")
            fun = lambda t, al=alpha: norm * al * g(np.asarray(t) ** rho) * math.sqrt(spec.b - t)
            wvar = (lower, 0.0)
        else:
            fun = lambda t, al=alpha, ll=l: (
                norm * al * t ** (-ll - 1.0 + power) * g(np.asarray(t) ** rho)
            )
            wvar = (0.5, 0.5)
        value, e = _quad_alg(fun, spec.a, spec.b, wvar)
        total += value
        err += e
    return total, err


def expectation(
    dist: Distribution,
    g: Callable[[np.ndarray], np.ndarray],
    rule: Optional[QuadratureRule] = None,
) -> Tuple[complex, float]:
    """
    Integral of g against the law (vectorized g).

    Args:
        dist: GPFPSpec or PowerSpec; raw specs integrate the unnormalized density
        g: function of the law's variable; may return a stack of rows
        rule: quadrature settings

    Returns:
        (value, error estimate)
    """
    spec, rho = carrier_of(dist)
    rule = select_rule(dist, rule)
    if rule.kind == "adaptive":
        return _adaptive_expectation(spec, rho, g)
    return _cosine_expectation(spec, rho, g, rule)


def moment(dist: Distribution, s: complex, rule: Optional[QuadratureRule] = None) -> MomentValue:
    """
    Moment of real or complex order s by quadrature.

    Raises:
        DomainError: raw spec, or support touching 0 with Re(s) <= l_N - 1/2
    """
    spec, rho = carrier_of(dist)
    if spec.norm is None:
        raise DomainError("moments need a normalized spec")
    if s == 0:
        return MomentValue(0, 1.0, "exact-closed-form", 0.0)
    exponent = complex(s) * rho
    if spec.a == 0.0 and exponent.real <= spec.l[-1] - 0.5:
        raise DomainError(f"moment of order {s} diverges for a support starting at 0")
    rule = select_rule(dist, rule)
    if rule.kind == "adaptive":
        phase = exponent.imag
        value, err = _adaptive_expectation(
            spec, 1.0, lambda t: np.exp(1j * phase * np.log(t)), power=exponent.real
        )
    else:
        value, err = _cosine_expectation(spec, 1.0, lambda t: np.exp(exponent * np.log(t)), rule)
    value = complex(value)
    if isinstance(s, (int, float)) or (isinstance(s, complex) and s.imag == 0):
        value = value.real
    return MomentValue(s, value, "quadrature", float(err))


def fp_moment_exact(p: Union[int, float, Fraction, str], n: int) -> Fraction:
    """
    Exact moment of order n of the free Poisson law fp(p).

    Positive orders sum over NC(n) with every cumulant equal to p; negative
    orders use m_n = m_(-n-1) (p - 1)^(1 + 2n).
    """
    p = to_exact(p)
    if p <= 1:
        raise DomainError("fp(p) moments need p > 1")
    if not isinstance(n, int):
        raise DomainError(f"order must be an integer, got {n!r}")
    if n == 0:
        return Fraction(1)
    if n > 0:
        if n > LATTICE_CAP:
            raise DomainError(f"order {n} exceeds the lattice cap {LATTICE_CAP}")
        return Fraction(cumulants_to_moments([p] * n)[-1])
    mirror = -n - 1
    if mirror > LATTICE_CAP:
        raise DomainError(f"order {n} is below -(cap + 1) = {-(LATTICE_CAP + 1)}")
    return fp_moment_exact(p, mirror) * (p - 1) ** (1 + 2 * n)


def _fp_spec(p: float) -> GPFPSpec:
    root = math.sqrt(p)
    return GPFPSpec((root - 1.0) ** 2, (root + 1.0) ** 2, (1.0 / (2.0 * math.pi),), (0.0,), norm=1.0)


def reflection_residual(p: float, s: complex, rule: Optional[QuadratureRule] = None) -> float:
    """|m_s - m_(-s-1) (p-1)^(1+2s)| for fp(p), both sides by quadrature."""
    if p <= 1:
        raise DomainError("reflection identity needs p > 1")
    spec = _fp_spec(float(p))
    left = complex(moment(spec, s, rule).value)
    right = complex(moment(spec, -s - 1, rule).value) * complex(p - 1) ** (1 + 2 * s)
    return abs(left - right)


def check_alignment(spec: GPFPSpec) -> None:
    """Raise ExactPathUnavailable unless the exact form describes this spec."""
    form = spec.exact
    if form is None:
        raise ExactPathUnavailable("spec has no exact free Poisson form")
    if not spec.has_integer_l:
        raise ExactPathUnavailable("exact moments need integer exponents l")
    lo, hi = form.endpoints()
    if abs(lo - spec.a) > ALIGNMENT_TOL * max(1.0, hi) or abs(hi - spec.b) > ALIGNMENT_TOL * max(1.0, hi):
        raise ExactPathUnavailable(
            f"endpoints ({spec.a}, {spec.b}) do not match the exact form ({lo}, {hi})"
        )
    norm = spec.norm if spec.norm is not None else 1.0
    for w, alpha in zip(form.weights, spec.alpha):
        if abs(float(w) - 2.0 * math.pi * norm * alpha) > 1e-9 * float(w):
            raise ExactPathUnavailable(f"exact weight {w} does not match alpha {alpha}")


def gpfp_moment_exact(spec: GPFPSpec, n: int) -> Fraction:
    """
    Exact n-th moment of a spec aligned with a free Poisson support.

    m_n = sum_k w_k theta^(n - l_k + 1) m_(n - l_k)(fp(p)) with the exact
    weights w_k and scale theta of ``spec.exact``.
    """
    check_alignment(spec)
    form = spec.exact
    total = Fraction(0)
    for w, l in zip(form.weights, spec.l):
        shift = n - int(l)
        total += w * form.scale ** (shift + 1) * fp_moment_exact(form.p, shift)
    return total


# ── CDF and quantiles ─────────────────────────────────────────────


@lru_cache(maxsize=32)
def _legendre(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    t, w = special.roots_legendre(nodes)
    return t, w


def _phi_density(spec: GPFPSpec, phi: np.ndarray) -> np.ndarray:
    c = 0.5 * (spec.a + spec.b)
    h = 0.5 * (spec.b - spec.a)
    norm = spec.norm if spec.norm is not None else 1.0
    return norm * h * h * np.sin(phi) ** 2 * _psi(spec, c - h * np.cos(phi))


def _phi_of(spec: GPFPSpec, x: float) -> float:
    c = 0.5 * (spec.a + spec.b)
    h = 0.5 * (spec.b - spec.a)
    return math.acos(min(1.0, max(-1.0, (c - x) / h)))


def _carrier_cdf(spec: GPFPSpec, y: float, rule: QuadratureRule) -> float:
    if y <= spec.a:
        return 0.0
    if y >= spec.b:
        return 1.0
    if spec.a == 0.0:
        norm = spec.norm if spec.norm is not None else 1.0
        total = 0.0
        for alpha, l in zip(spec.alpha, spec.l):
            value, _ = integrate.quad(
                lambda t, al=alpha: norm * al * math.sqrt(spec.b - t),
                0.0, y, weight="alg", wvar=(-0.5 - l, 0.0), limit=200,
            )
            total += value
        return min(1.0, max(0.0, total))
    upper = _phi_of(spec, y)
    nodes = _CDF_START_NODES
    t, w = _legendre(nodes)
    previous = 0.5 * upper * np.dot(w, _phi_density(spec, 0.5 * upper * (t + 1.0)))
    while True:
        nodes *= 2
        if nodes > _CDF_MAX_NODES:
            raise ToleranceNotMetError(f"cdf did not converge within {_CDF_MAX_NODES} nodes")
        t, w = _legendre(nodes)
        current = 0.5 * upper * np.dot(w, _phi_density(spec, 0.5 * upper * (t + 1.0)))
        if abs(current - previous) <= rule.tol * 1e-2:
            return min(1.0, max(0.0, float(current)))
        previous = current


def cdf(dist: Distribution, x: float, rule: Optional[QuadratureRule] = None) -> float:
    """Distribution function P(X <= x)."""
    spec, rho = carrier_of(dist)
    if spec.norm is None:
        raise DomainError("cdf needs a normalized spec")
    if x <= 0.0:
        return 0.0
    return _carrier_cdf(spec, float(x) ** (1.0 / rho), rule or DEFAULT_RULE)


def quantile(dist: Distribution, q: float, rule: Optional[QuadratureRule] = None) -> float:
    """Inverse distribution function by bracketed root finding, for 0 < q < 1."""
    spec, rho = carrier_of(dist)
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile level {q} not in (0, 1)")
    if spec.norm is None:
        raise DomainError("quantiles need a normalized spec")
    rule = rule or DEFAULT_RULE
    y = optimize.brentq(
        lambda t: _carrier_cdf(spec, t, rule) - q, spec.a, spec.b, xtol=1e-15, rtol=4 * np.finfo(float).eps
    )
    return y ** rho


def quantile_batch(dist: Distribution, qs: np.ndarray, chunk: int = 1 << 16) -> np.ndarray:
    """
    Vectorized quantiles.

    The phi-CDF is tabulated on equal panels (16-point Gauss-Legendre each),
    inverted by linear interpolation and polished with two Newton steps.
    """
    spec, rho = carrier_of(dist)
    if spec.norm is None:
        raise DomainError("quantiles need a normalized spec")
    qs = np.asarray(qs, dtype=float)
    if np.any((qs <= 0.0) | (qs >= 1.0)):
        raise DomainError("quantile levels must lie in (0, 1)")
    if spec.a == 0.0:
        return np.array([quantile(dist, float(q)) for q in qs.ravel()]).reshape(qs.shape)

    edges = np.linspace(0.0, math.pi, _TABLE_PANELS + 1)
    t16, w16 = _legendre(16)
    half = 0.5 * (edges[1:] - edges[:-1])
    mids = 0.5 * (edges[1:] + edges[:-1])
    pts = mids[:, None] + half[:, None] * t16[None, :]
    panel_mass = half * (_phi_density(spec, pts) @ w16)
    table = np.concatenate([[0.0], np.cumsum(panel_mass)])
    total = table[-1]
    t8, w8 = _legendre(8)

    out = np.empty(qs.size)
    flat = qs.ravel()
    for start in range(0, flat.size, chunk):
        target = flat[start:start + chunk] * total
        idx = np.clip(np.searchsorted(table, target, side="right") - 1, 0, _TABLE_PANELS - 1)
        lo, hi = edges[idx], edges[idx + 1]
        span = table[idx + 1] - table[idx]
        frac = np.where(span > 0, (target - table[idx]) / np.where(span > 0, span, 1.0), 0.0)
        phi = lo + frac * (hi - lo)
        for _ in range(2):
            width = 0.5 * (phi - lo)
            nodes = (lo + width)[:, None] + width[:, None] * t8[None, :]
            partial = table[idx] + width * (_phi_density(spec, nodes) @ w8)
            slope = _phi_density(spec, phi)
            step = np.where(slope > 0, (partial - target) / np.where(slope > 0, slope, 1.0), 0.0)
            phi = np.clip(phi - step, lo, hi)
        c = 0.5 * (spec.a + spec.b)
        h = 0.5 * (spec.b - spec.a)
        out[start:start + chunk] = (c - h * np.cos(phi)) ** rho
    return out.reshape(qs.shape)


# ── Normalizing constants of the truncated families ──────────────


def _raw_mass(a: float, b: float, alpha: float, l: float, rule: Optional[QuadratureRule]) -> float:
    raw = GPFPSpec(a, b, (alpha,), (l,))
    value, _ = expectation(raw, lambda x: np.ones_like(x), rule)
    return float(np.real(value))


def constant_c(n: float, b: float, rule: Optional[QuadratureRule] = None) -> float:
    """c(n, b) = (int_{1/n}^{b} sqrt((x - 1/n)(b - x)) / (2 pi x) dx)^(-1)."""
    if n <= 0 or b <= 0 or 1.0 / n >= b:
        raise DomainError(f"c(n, b) needs 1/n < b, got n={n}, b={b}")
    return 1.0 / _raw_mass(1.0 / n, b, 1.0 / (2.0 * math.pi), 0.0, rule)


def constant_alpha(n: float, l: float, rule: Optional[QuadratureRule] = None) -> float:
    """alpha(n, l) = B(1/2 - l, 3/2) / int_{1/n}^{1} sqrt((1 - x)(x - 1/n)) / x^(1+l) dx."""
    if n <= 1:
        raise DomainError("alpha(n, l) needs n > 1")
    if l >= 0.5:
        raise DomainError("alpha(n, l) needs l < 1/2")
    return float(special.beta(0.5 - l, 1.5)) / _raw_mass(1.0 / n, 1.0, 1.0, l, rule)
