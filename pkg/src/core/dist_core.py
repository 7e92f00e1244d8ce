"""GPFP distribution family - densities, normalization, inverse and power maps, constructors."""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Dict, Optional, Sequence, Union

import numpy as np
import sympy
from scipy import special

from src.core import quad_engine
from src.models.distribution import ExactForm, GPFPSpec, PowerSpec
from src.models.sequences import QuadratureRule
from src.utils.errors import DomainError, NormalizationError
from src.utils.numbers import to_exact

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
ArrayLike = Union[float, Sequence[float], np.ndarray]


# ── Densities ─────────────────────────────────────────────────────


def gpfp_pdf(spec: GPFPSpec, x: ArrayLike) -> Union[float, np.ndarray]:
    """
    GPFP density, 0 outside (a, b) and at the endpoints.

    Raises:
        DomainError: negative x with a fractional exponent l_k
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) and not spec.has_integer_l:
        raise DomainError("negative x with fractional exponents l")
    inside = (arr > spec.a) & (arr < spec.b)
    safe = np.where(inside, arr, 0.5 * (spec.a + spec.b))
    norm = spec.norm if spec.norm is not None else 1.0
    terms = sum(alpha * np.power(safe, -l) for alpha, l in zip(spec.alpha, spec.l))
    values = norm * np.sqrt((spec.b - safe) * (safe - spec.a)) / safe * terms
    out = np.where(inside, values, 0.0)
    return float(out) if out.ndim == 0 else out


def normalize(raw: GPFPSpec, rule: Optional[QuadratureRule] = None) -> GPFPSpec:
    """
    Attach norm = 1 / total mass.

    Exact forms are rescaled exactly when the mass is known in closed form.

    Raises:
        NormalizationError: mass not finite and positive (support at 0 with l_N >= 1/2)
    """
    if raw.a == 0.0 and raw.l[-1] >= 0.5:
        raise NormalizationError(
            f"density is not integrable at 0 (l_N = {raw.l[-1]:g} >= 1/2)"
        )
    unit = GPFPSpec(raw.a, raw.b, raw.alpha, raw.l, norm=None, label=raw.label)
    if raw.exact is not None:
        mass_exact = _exact_mass(raw)
        exact = ExactForm(raw.exact.p, tuple(w / mass_exact for w in raw.exact.weights), raw.exact.scale)
        return unit.with_norm(1.0 / float(mass_exact), exact)
    mass, _ = quad_engine.expectation(unit, lambda t: np.ones_like(t), rule)
    mass = float(np.real(mass))
    if not math.isfinite(mass) or mass <= 0:
        raise NormalizationError(f"total mass {mass!r} is not finite and positive")
    logger.debug("normalized %s: mass %.17g", raw.label or "spec", mass)
    return unit.with_norm(1.0 / mass)


def _exact_mass(spec: GPFPSpec) -> Fraction:
    quad_engine.check_alignment(spec)
    return quad_engine.gpfp_moment_exact(spec, 0)


def gpfp_inverse(spec: GPFPSpec) -> GPFPSpec:
    """
    Law of X^-1.

    GPFP(1/b, 1/a, N, reversed alpha * sqrt(ab), reversed 1 - l); the norm is
    carried over since the change of variables preserves mass.
    """
    if spec.a == 0.0:
        raise DomainError("inverse law needs a > 0")
    root = math.sqrt(spec.a * spec.b)
    alpha = tuple(a * root for a in reversed(spec.alpha))
    l = tuple(1.0 - x for x in reversed(spec.l))
    exact = None
    if spec.exact is not None:
        form = spec.exact
        factor = form.scale * (form.p - 1)
        exact = ExactForm(
            form.p,
            tuple(w * factor for w in reversed(form.weights)),
            1 / ((form.p - 1) ** 2 * form.scale),
        )
    label = f"({spec.label})^-1" if spec.label else ""
    return GPFPSpec(1.0 / spec.b, 1.0 / spec.a, alpha, l, spec.norm, exact, label)


def make_power(spec: GPFPSpec, r: float) -> PowerSpec:
    """Law of X^r for |r| >= 1."""
    r = float(r)
    if abs(r) < 1.0:
        raise DomainError(f"power maps need |r| >= 1, got r={r}")
    if spec.norm is None:
        spec = normalize(spec)
    carrier = spec if r > 0 else gpfp_inverse(spec)
    rho = abs(r)
    return PowerSpec(spec, r, carrier, 1.0 / rho, carrier.a ** rho, carrier.b ** rho)


def power_pdf(spec: GPFPSpec, r: float, x: ArrayLike) -> Union[float, np.ndarray]:
    """
    Density of X^r.

    ``s sqrt((B^s - x^s)(x^s - A^s))/x * sum_k alpha_k x^(-s l_k)`` with the
    carrier's alpha, l and norm (A^s, B^s are the carrier endpoints).
    """
    dist = make_power(spec, r)
    return power_density(dist, x)


def power_density(dist: PowerSpec, x: ArrayLike) -> Union[float, np.ndarray]:
    """Density of a PowerSpec on (A, B)."""
    carrier, s = dist.carrier, dist.s
    arr = np.asarray(x, dtype=float)
    inside = (arr > dist.A) & (arr < dist.B)
    safe = np.where(inside, arr, 0.5 * (dist.A + dist.B))
    w = np.power(safe, s)
    terms = sum(alpha * np.power(safe, -s * l) for alpha, l in zip(carrier.alpha, carrier.l))
    root = np.sqrt(np.clip((carrier.b - w) * (w - carrier.a), 0.0, None))
    values = carrier.norm * s * root / safe * terms
    out = np.where(inside, values, 0.0)
    return float(out) if out.ndim == 0 else out


# ── Named constructors ────────────────────────────────────────────


def _fp_endpoints(p: float, theta: float = 1.0):
    root = math.sqrt(p)
    return theta * (root - 1.0) ** 2, theta * (root + 1.0) ** 2


def make_free_poisson(p, theta=1) -> GPFPSpec:
    """
    Free Poisson law fp(p, theta), p > 1.

    Support theta((sqrt(p) -+ 1)^2); density sqrt(...)/(2 pi theta x).
    """
    p_exact, theta_exact = to_exact(p), to_exact(theta)
    if p_exact <= 1:
        raise DomainError("fp(p) with an atom at 0 (p <= 1) is not a GPFP law")
    if theta_exact <= 0:
        raise DomainError("theta must be positive")
    a, b = _fp_endpoints(float(p_exact), float(theta_exact))
    weight = 1 / theta_exact
    exact = ExactForm(p_exact, (weight,), theta_exact)
    label = f"fp({p})" if theta_exact == 1 else f"fp({p},{theta})"
    return GPFPSpec(a, b, (float(weight) / TWO_PI,), (0.0,), 1.0, exact, label)


def make_fp(p) -> GPFPSpec:
    """Free Poisson law fp(p) on ((sqrt(p)-1)^2, (sqrt(p)+1)^2)."""
    return make_free_poisson(p, 1)


def make_semicircle(m: float, sigma: float = 1.0) -> GPFPSpec:
    """Semicircle S(m, sigma^2) written as a GPFP law with l = -1 (needs m > 2 sigma)."""
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    if m - 2.0 * sigma <= 0:
        raise DomainError("the semicircle must sit on the positive half-line (m > 2 sigma)")
    alpha = 1.0 / (TWO_PI * sigma * sigma)
    return GPFPSpec(m - 2.0 * sigma, m + 2.0 * sigma, (alpha,), (-1.0,), 1.0, label=f"S({m:g},{sigma * sigma:g})")


def make_shifted_semicircle(u: float) -> GPFPSpec:
    """Standard semicircle shifted by u > 2."""
    if u <= 2:
        raise DomainError("shift u must exceed 2")
    return make_semicircle(float(u), 1.0).with_label(f"S+{u:g}")


def make_truncated_stable(n: float, b: float, rule: Optional[QuadratureRule] = None) -> GPFPSpec:
    """S_{n,b} = GPFP(1/b, n, 1, c(n,b) sqrt(b/n)/(2 pi), 1)."""
    if n <= 1.0 / b:
        raise DomainError(f"need n > 1/b, got n={n}, b={b}")
    c = quad_engine.constant_c(n, b, rule)
    alpha = c * math.sqrt(b / n) / TWO_PI
    return GPFPSpec(1.0 / b, float(n), (alpha,), (1.0,), 1.0, label=f"S_{{{n:g},{b:g}}}")


def make_beta_related(n: float, l: float, rule: Optional[QuadratureRule] = None) -> GPFPSpec:
    """B_{n,l} = GPFP(1/n, 1, 1, alpha(n,l)/B(1/2-l, 3/2), l)."""
    alpha_nl = quad_engine.constant_alpha(n, l, rule)
    alpha = alpha_nl / float(special.beta(0.5 - l, 1.5))
    return GPFPSpec(1.0 / n, 1.0, (alpha,), (float(l),), 1.0, label=f"B_{{{n:g},{l:g}}}")


def _rational(value) -> sympy.Rational:
    exact = to_exact(value)
    return sympy.Rational(exact.numerator, exact.denominator)


def solve_fgig(a, b, lam) -> Dict[str, object]:
    """
    Solve the fGIG consistency system for (alpha1, alpha2).

        1 - lam + alpha1 sqrt(ab) - alpha2 (a+b)/(2ab) = 0
        1 + lam + alpha2/sqrt(ab) - alpha1 (a+b)/2 = 0

    Solved with sympy; exact (rational or algebraic) for rational inputs.
    """
    a_s, b_s, lam_s = (_rational(v) for v in (a, b, lam))
    if not 0 < a_s < b_s:
        raise DomainError("fGIG needs 0 < a < b")
    x1, x2 = sympy.symbols("alpha1 alpha2")
    root = sympy.sqrt(a_s * b_s)
    eqs = [
        1 - lam_s + x1 * root - x2 * (a_s + b_s) / (2 * a_s * b_s),
        1 + lam_s + x2 / root - x1 * (a_s + b_s) / 2,
    ]
    solution = sympy.solve(eqs, [x1, x2], dict=True)
    if not solution:
        raise DomainError(f"fGIG system is singular for a={a}, b={b}")
    alpha1 = sympy.radsimp(solution[0][x1])
    alpha2 = sympy.radsimp(solution[0][x2])
    residuals = [sympy.simplify(e.subs({x1: alpha1, x2: alpha2})) for e in eqs]
    return {"alpha1": alpha1, "alpha2": alpha2, "sqrt_ab": root, "residuals": residuals}


def make_fgig(a, b, lam) -> GPFPSpec:
    """
    Free generalized inverse Gaussian law on (a, b) with parameter lam.

    GPFP(a, b, 2, (alpha1/(2 pi), alpha2/(2 pi sqrt(ab))), (0, 1)) with
    (alpha1, alpha2) from :func:`solve_fgig`.
    """
    sol = solve_fgig(a, b, lam)
    alpha1, alpha2 = float(sol["alpha1"]), float(sol["alpha2"])
    if alpha1 <= 0 or alpha2 <= 0:
        raise DomainError(
            f"(a, b, lam) = ({a}, {b}, {lam}) gives non-positive weights ({alpha1:.6g}, {alpha2:.6g})"
        )
    root = float(sol["sqrt_ab"])
    spec = GPFPSpec(
        float(a), float(b),
        (alpha1 / TWO_PI, alpha2 / (TWO_PI * root)),
        (0.0, 1.0),
        label=f"fGIG({a},{b},{lam})",
    )
    normalized = normalize(spec)
    if abs(normalized.norm - 1.0) > 1e-9:
        logger.warning("fGIG(%s, %s, %s) weights give norm %.12g", a, b, lam, normalized.norm)
    return normalized


# ── Lemma measures on the free Poisson support ───────────────────


def check_prob_condition(kind: str, p, alpha1, alpha2) -> bool:
    """
    Exact normalization test for the two reference measures.

    ``sigma``: alpha1 + alpha2 p = p - 1; ``eta``: alpha1 + p/(p-1)^3 alpha2 = 1.
    Floats are read as their decimal literals.
    """
    p, alpha1, alpha2 = to_exact(p), to_exact(alpha1), to_exact(alpha2)
    if p <= 1:
        raise DomainError("need p > 1")
    if kind == "sigma":
        return alpha1 + alpha2 * p == p - 1
    if kind == "eta":
        return alpha1 + p / (p - 1) ** 3 * alpha2 == 1
    raise DomainError(f"unknown measure kind {kind!r}")


def _lemma_measure(kind: str, p, alpha1, alpha2) -> GPFPSpec:
    p_e, a1, a2 = to_exact(p), to_exact(alpha1), to_exact(alpha2)
    if a1 <= 0 or a2 <= 0:
        raise DomainError("alpha1 and alpha2 must be positive")
    if not check_prob_condition(kind, p_e, a1, a2):
        raise NormalizationError(f"({alpha1}, {alpha2}) does not normalize the {kind} measure for p={p}")
    if kind == "sigma":
        theta = 1 / (p_e - 1) ** 2
        l = (1.0, 2.0)
    else:
        theta = Fraction(1)
        l = (0.0, 2.0)
    a, b = _fp_endpoints(float(p_e), float(theta))
    exact = ExactForm(p_e, (a1, a2), theta)
    alpha = (float(a1) / TWO_PI, float(a2) / TWO_PI)
    name = "sigma" if kind == "sigma" else "eta"
    return GPFPSpec(a, b, alpha, l, 1.0, exact, f"{name}_{{{alpha1},{alpha2}}}")


def make_sigma(p, alpha1, alpha2) -> GPFPSpec:
    """sqrt(...)/(2 pi x) (alpha1/x + alpha2/x^2) on (1/(sqrt(p)+1)^2, 1/(sqrt(p)-1)^2)."""
    return _lemma_measure("sigma", p, alpha1, alpha2)


def make_eta(p, alpha1, alpha2) -> GPFPSpec:
    """sqrt(...)/(2 pi x) (alpha1 + alpha2/x^2) on the fp(p) support."""
    return _lemma_measure("eta", p, alpha1, alpha2)


def _complement(alpha2):
    value = to_exact(alpha2)
    if not 0 < value < Fraction(1, 2):
        raise DomainError(f"alpha2 must lie in (0, 1/2), got {alpha2}")
    return value, 1 - 2 * value


def sigma_measure(alpha2) -> GPFPSpec:
    """sigma_{1-2 alpha2, alpha2} for p = 2."""
    a2, a1 = _complement(alpha2)
    return make_sigma(2, a1, a2)


def eta_measure(alpha2) -> GPFPSpec:
    """eta_{1-2 alpha2, alpha2} for p = 2 (then p/(p-1)^3 = 2)."""
    a2, a1 = _complement(alpha2)
    return make_eta(2, a1, a2)


# ── Limit laws ────────────────────────────────────────────────────


def free_stable_pdf(b: float, x: ArrayLike) -> Union[float, np.ndarray]:
    """Density of S_b: (4/b) sqrt(b x - 1)/(2 pi x^2) on (1/b, inf)."""
    arr = np.asarray(x, dtype=float)
    inside = arr > 1.0 / b
    safe = np.where(inside, arr, 2.0 / b)
    out = np.where(inside, (4.0 / b) * np.sqrt(b * safe - 1.0) / (TWO_PI * safe * safe), 0.0)
    return float(out) if out.ndim == 0 else out


def beta_pdf(l: float, x: ArrayLike) -> Union[float, np.ndarray]:
    """Density of beta_{1/2 - l, 3/2} on (0, 1)."""
    arr = np.asarray(x, dtype=float)
    inside = (arr > 0) & (arr < 1)
    safe = np.where(inside, arr, 0.5)
    out = np.where(
        inside, np.power(safe, -0.5 - l) * np.sqrt(1.0 - safe) / special.beta(0.5 - l, 1.5), 0.0
    )
    return float(out) if out.ndim == 0 else out


# ── Sampling ──────────────────────────────────────────────────────


def sample(dist: Union[GPFPSpec, PowerSpec], seed: int, count: int) -> np.ndarray:
    """
    Draw ``count`` samples by inverse-CDF transform.

    Deterministic given ``seed`` (numpy PCG64).
    """
    spec, _ = quad_engine.carrier_of(dist)
    if spec.norm is None:
        raise DomainError("sampling needs a normalized spec")
    if count < 0:
        raise DomainError("count must be non-negative")
    rng = np.random.default_rng(seed)
    return quad_engine.quantile_batch(dist, rng.uniform(np.nextafter(0.0, 1.0), 1.0, size=count))


# ── JSON mapping ──────────────────────────────────────────────────


def spec_from_dict(data: Dict) -> GPFPSpec:
    """Build a spec from the JSON mapping; ``norm: null`` normalizes."""
    exact = None
    if data.get("exact"):
        block = data["exact"]
        exact = ExactForm(
            to_exact(str(block["p"])),
            tuple(to_exact(str(w)) for w in block["weights"]),
            to_exact(str(block.get("scale", "1"))),
        )
    spec = GPFPSpec(
        data["a"], data["b"], tuple(data["alpha"]), tuple(data["l"]),
        data.get("norm"), exact, data.get("label", ""),
    )
    if spec.norm is None:
        return normalize(spec)
    return spec


def spec_to_dict(spec: GPFPSpec) -> Dict:
    return spec.to_dict()
