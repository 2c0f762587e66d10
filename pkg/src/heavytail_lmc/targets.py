"""Radially symmetric target distributions with polynomial or stretched tails.

This module is the root of the package: it defines the potential families,
their analytic structure (gradients, growth envelopes, smoothness constants,
normalizing constants, moments, tail bounds), exact samplers, and the
radius-penalized modification of a target used by the discretization
analysis.  Everything downstream (chains, diagnostics, bound calculators,
functional-inequality checkers) consumes the small frozen dataclasses
declared here.

Families
--------
``GenCauchy(d, nu)``
    pi(x) proportional to (1 + |x|^2)^(-(d+nu)/2).  Polynomial tails; moments
    of order p exist iff p < nu.  The potential is V(x) =
    ((d+nu)/2) * log(1+|x|^2) with V(0) = 0.
``Sublinear(d, alpha, lam)``
    V(x) = (1 + lam^(2/alpha) |x|^2)^(alpha/2) with alpha in (0, 1].
    Stretched-exponential tails; all moments finite.  V(0) = 1.
``Gaussian(d)``
    V(x) = |x|^2 / 2.  The light-tailed reference point of the family scale.
``RadialCustom(d, f, fprime)``
    V(x) = f(|x|^2) for a user-supplied radial profile.  Only generic
    (quadrature-backed) operations are available.

Conventions
-----------
* Points are row vectors: arrays of shape ``(n, d)`` or a single ``(d,)``.
* All radial profiles act on t = |x|^2, not on |x|.
* Normalizing constants Z satisfy pi(x) = exp(-V(x)) / Z.
* Growth envelopes are stated as |grad V(x)| <= b |x| / (1+|x|^2)^(1-alpha/2),
  so alpha = 0 is the heaviest (polynomial) regime and alpha = 2 the
  quadratic one.

Errors
------
All exceptions derive from :class:`HeavyTailError`; operations that are
structurally undefined for a family raise :class:`UnsupportedFamilyError`,
divergent integrals raise :class:`MomentUndefinedError`, and bad arguments
raise :class:`InputValidationError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

import numpy as np
from scipy import integrate, optimize, special

__all__ = [
    "HeavyTailError",
    "InputValidationError",
    "UnsupportedFamilyError",
    "MomentUndefinedError",
    "NumericsError",
    "AssumptionViolatedError",
    "GenCauchy",
    "Sublinear",
    "Gaussian",
    "RadialCustom",
    "PotentialSpec",
    "GrowthParams",
    "HolderSmoothness",
    "SublinearMomentBound",
    "potential",
    "grad_potential",
    "radial_profile",
    "growth_params",
    "holder_smoothness",
    "log_normalizing_constant",
    "normalizing_constant",
    "radial_moment",
    "closed_form_moment",
    "tilde_moment",
    "tilde_log_normalizing_constant",
    "tail_bound",
    "tail_mass",
    "direct_sampler",
    "median_radius",
    "modified_target_m",
    "modified_target_spec",
    "spec_to_json",
    "spec_from_json",
]


# ---------------------------------------------------------------------------
# Exceptions
# ---------------------------------------------------------------------------


class HeavyTailError(Exception):
    """Base class for all errors raised by this package."""


class InputValidationError(HeavyTailError, ValueError):
    """An argument is outside the domain an operation is defined on."""


class UnsupportedFamilyError(HeavyTailError, ValueError):
    """The requested operation is not defined for this potential family."""


class MomentUndefinedError(HeavyTailError, ValueError):
    """A requested moment (or moment-based quantity) diverges for the target."""


class NumericsError(HeavyTailError, RuntimeError):
    """A quadrature or root-finding step failed to reach its tolerance."""


class AssumptionViolatedError(HeavyTailError, RuntimeError):
    """A structural assumption checked at runtime (monotonicity, convexity,
    stability) does not hold for the supplied inputs."""


# ---------------------------------------------------------------------------
# Family dataclasses
# ---------------------------------------------------------------------------


def _validate_dimension(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 1:
        raise InputValidationError(f"dimension d must be a positive integer, got {d!r}")


@dataclass(frozen=True)
class GenCauchy:
    """Generalized Cauchy target: pi(x) ~ (1 + |x|^2)^(-(d+nu)/2).

    Parameters
    ----------
    d : int
        Ambient dimension.
    nu : float
        Tail index; moments of order p exist iff p < nu.
    """

    d: int
    nu: float

    def __post_init__(self) -> None:
        _validate_dimension(self.d)
        if not (math.isfinite(self.nu) and self.nu > 0):
            raise InputValidationError(f"nu must be a finite positive real, got {self.nu!r}")


@dataclass(frozen=True)
class Sublinear:
    """Stretched-tail target with sub-linearly growing potential.

    V(x) = (1 + lam^(2/alpha) |x|^2)^(alpha/2), alpha in (0, 1], lam > 0.
    """

    d: int
    alpha: float
    lam: float = 1.0

    def __post_init__(self) -> None:
        _validate_dimension(self.d)
        if not (math.isfinite(self.alpha) and 0.0 < self.alpha <= 1.0):
            raise InputValidationError(
                f"Sublinear alpha must lie in (0, 1], got {self.alpha!r}"
            )
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise InputValidationError(f"lam must be a positive real, got {self.lam!r}")


@dataclass(frozen=True)
class Gaussian:
    """Standard Gaussian target: V(x) = |x|^2 / 2."""

    d: int

    def __post_init__(self) -> None:
        _validate_dimension(self.d)


@dataclass(frozen=True)
class RadialCustom:
    """Target defined by a user-supplied radial potential profile.

    Parameters
    ----------
    d : int
        Ambient dimension.
    f : callable
        Profile on the squared radius: V(x) = f(|x|^2).  Must accept numpy
        arrays elementwise.
    fprime : callable, optional
        Derivative of ``f`` with respect to t = |x|^2.  When omitted, a
        central finite difference with relative step ~cbrt(eps) is used.
    """

    d: int
    f: Callable[[np.ndarray], np.ndarray]
    fprime: Union[Callable[[np.ndarray], np.ndarray], None] = field(default=None)

    def __post_init__(self) -> None:
        _validate_dimension(self.d)
        if not callable(self.f):
            raise InputValidationError("RadialCustom.f must be callable")
        if self.fprime is not None and not callable(self.fprime):
            raise InputValidationError("RadialCustom.fprime must be callable or None")


PotentialSpec = Union[GenCauchy, Sublinear, Gaussian, RadialCustom]

_FAMILIES = (GenCauchy, Sublinear, Gaussian, RadialCustom)


@dataclass(frozen=True)
class GrowthParams:
    """Envelope constants (b, alpha) with |grad V| <= b r / (1+r^2)^(1-alpha/2)."""

    b: float
    alpha: float


@dataclass(frozen=True)
class HolderSmoothness:
    """Gradient smoothness: |grad V(x) - grad V(y)| <= L |x-y|^s, clamped to L >= 1."""

    L: float
    s: float


@dataclass(frozen=True)
class SublinearMomentBound:
    """Moment pair for the sublinear family.

    ``tilde_exact`` is the exact moment of the pure-power surrogate potential
    lam^... |x|^alpha; ``upper`` = e * tilde_exact bounds the family moment
    from above (and tilde_exact / e bounds it from below).
    """

    tilde_exact: float
    upper: float


# ---------------------------------------------------------------------------
# Pointwise potential / gradient evaluation
# ---------------------------------------------------------------------------


def _as_points(spec: PotentialSpec, x: np.ndarray) -> tuple[np.ndarray, bool]:
    """Coerce x to shape (n, d); return (points, was_single)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        if arr.shape[0] != spec.d:
            raise InputValidationError(
                f"point has dimension {arr.shape[0]}, spec has d={spec.d}"
            )
        return arr[None, :], True
    if arr.ndim == 2:
        if arr.shape[1] != spec.d:
            raise InputValidationError(
                f"points have dimension {arr.shape[1]}, spec has d={spec.d}"
            )
        return arr, False
    raise InputValidationError(f"x must have shape (d,) or (n, d), got {arr.shape}")


def radial_profile(
    spec: PotentialSpec,
) -> tuple[Callable[[np.ndarray], np.ndarray], Callable[[np.ndarray], np.ndarray]]:
    """Return (f, fprime) acting on the squared radius t, with V(x) = f(|x|^2).

    Both callables are vectorized over numpy arrays.  For
    :class:`RadialCustom` without an explicit derivative, ``fprime`` is a
    central finite difference with step ``cbrt(eps) * max(1, |t|)``.
    """
    if isinstance(spec, GenCauchy):
        half = 0.5 * (spec.d + spec.nu)

        def f(t: np.ndarray) -> np.ndarray:
            return half * np.log1p(t)

        def fp(t: np.ndarray) -> np.ndarray:
            return half / (1.0 + np.asarray(t, dtype=float))

        return f, fp
    if isinstance(spec, Sublinear):
        a = spec.alpha
        c = spec.lam ** (2.0 / a)

        def f(t: np.ndarray) -> np.ndarray:
            return (1.0 + c * np.asarray(t, dtype=float)) ** (0.5 * a)

        def fp(t: np.ndarray) -> np.ndarray:
            return 0.5 * a * c * (1.0 + c * np.asarray(t, dtype=float)) ** (0.5 * a - 1.0)

        return f, fp
    if isinstance(spec, Gaussian):

        def f(t: np.ndarray) -> np.ndarray:
            return 0.5 * np.asarray(t, dtype=float)

        def fp(t: np.ndarray) -> np.ndarray:
            return np.full_like(np.asarray(t, dtype=float), 0.5)

        return f, fp
    if isinstance(spec, RadialCustom):
        if spec.fprime is not None:
            return spec.f, spec.fprime
        f = spec.f
        rel = float(np.cbrt(np.finfo(float).eps))

        def fp(t: np.ndarray) -> np.ndarray:
            tt = np.asarray(t, dtype=float)
            h = rel * np.maximum(1.0, np.abs(tt))
            lo = np.maximum(tt - h, 0.0)
            hi = tt + h
            return (np.asarray(f(hi), dtype=float) - np.asarray(f(lo), dtype=float)) / (
                hi - lo
            )

        return f, fp
    raise UnsupportedFamilyError(f"unknown potential spec {type(spec).__name__}")


def potential(spec: PotentialSpec, x: np.ndarray) -> np.ndarray:
    """Evaluate V at one point (returns a scalar) or a batch (returns (n,))."""
    pts, single = _as_points(spec, x)
    if not np.all(np.isfinite(pts)):
        raise InputValidationError("potential: points must be finite")
    f, _ = radial_profile(spec)
    t = np.einsum("ij,ij->i", pts, pts)
    v = np.asarray(f(t), dtype=float)
    return float(v[0]) if single else v


def grad_potential(spec: PotentialSpec, x: np.ndarray) -> np.ndarray:
    """Evaluate grad V; output shape matches the input shape."""
    pts, single = _as_points(spec, x)
    if not np.all(np.isfinite(pts)):
        raise InputValidationError("grad_potential: points must be finite")
    _, fp = radial_profile(spec)
    t = np.einsum("ij,ij->i", pts, pts)
    g = 2.0 * np.asarray(fp(t), dtype=float)[:, None] * pts
    return g[0] if single else g


# ---------------------------------------------------------------------------
# Growth and smoothness parameters
# ---------------------------------------------------------------------------


def growth_params(spec: PotentialSpec) -> GrowthParams:
    """Envelope (b, alpha) with |grad V(x)| <= b |x| / (1+|x|^2)^(1-alpha/2).

    Exact (attained) for each closed-form family:

    * GenCauchy: (b, alpha) = (d + nu, 0)
    * Sublinear: (b, alpha) = (alpha * max(lam^(2/alpha), lam), alpha)
    * Gaussian:  (b, alpha) = (1, 2)
    """
    if isinstance(spec, GenCauchy):
        return GrowthParams(b=float(spec.d + spec.nu), alpha=0.0)
    if isinstance(spec, Sublinear):
        c = spec.lam ** (2.0 / spec.alpha)
        return GrowthParams(b=spec.alpha * max(c, spec.lam), alpha=spec.alpha)
    if isinstance(spec, Gaussian):
        return GrowthParams(b=1.0, alpha=2.0)
    raise UnsupportedFamilyError(
        "growth_params is only defined for closed-form families, not RadialCustom"
    )


def holder_smoothness(spec: PotentialSpec) -> HolderSmoothness:
    """Gradient Holder constants (L, s); all closed-form families have s = 1.

    The discretization assumptions downstream require L >= 1, so the returned
    constant is clamped from below at 1 (only the sublinear family at small
    scale is affected).
    """
    if isinstance(spec, GenCauchy):
        return HolderSmoothness(L=float(spec.d + spec.nu), s=1.0)
    if isinstance(spec, Sublinear):
        c = spec.lam ** (2.0 / spec.alpha)
        return HolderSmoothness(L=max(1.0, spec.alpha * c), s=1.0)
    if isinstance(spec, Gaussian):
        return HolderSmoothness(L=1.0, s=1.0)
    raise UnsupportedFamilyError(
        "holder_smoothness is only defined for closed-form families, not RadialCustom"
    )


# ---------------------------------------------------------------------------
# Radial quadrature engine
# ---------------------------------------------------------------------------


def _log_sphere_area(d: int) -> float:
    """log of the surface area of the unit sphere S^{d-1} in R^d."""
    return math.log(2.0) + 0.5 * d * math.log(math.pi) - special.gammaln(0.5 * d)


def _radial_integral(
    f: Callable[[np.ndarray], np.ndarray],
    d: int,
    p: float = 0.0,
    lower: float = 0.0,
    rel_tol: float = 1e-8,
) -> float:
    """Integrate r^(d-1+p) * exp(-f(r^2)) over r in [lower, inf).

    The integrand's peak is located on a coarse log grid and the integral is
    split around it so adaptive quadrature sees well-scaled pieces.  Raises
    :class:`NumericsError` if the combined error estimate exceeds
    ``rel_tol`` relative to the value.
    """
    expo = d - 1.0 + p

    def integrand(r):
        r = np.asarray(r, dtype=float)
        t = r * r
        with np.errstate(divide="ignore", over="ignore"):
            logs = np.where(r > 0, expo * np.log(np.maximum(r, 1e-300)), 0.0 if expo == 0 else -np.inf)
            out = np.exp(logs - np.asarray(f(t), dtype=float))
        return out

    grid = np.geomspace(1e-6, 1e10, 257)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        logvals = expo * np.log(grid) - np.asarray(f(grid * grid), dtype=float)
    logvals = np.where(np.isfinite(logvals), logvals, -np.inf)
    r_peak = float(grid[int(np.argmax(logvals))])
    r_peak = max(r_peak, 1.0, 2.0 * lower)

    cuts = [lower, r_peak, 8.0 * r_peak, 64.0 * r_peak]
    cuts = sorted({c for c in cuts if c >= lower})
    total, err_total = 0.0, 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, err = integrate.quad(integrand, a, b, limit=400, epsabs=0.0, epsrel=1e-12)
        total += val
        err_total += abs(err)
    val, err = integrate.quad(integrand, cuts[-1], np.inf, limit=400, epsabs=0.0, epsrel=1e-12)
    total += val
    err_total += abs(err)
    if not math.isfinite(total) or total < 0:
        raise NumericsError(f"radial quadrature returned {total!r}")
    if total > 0 and err_total > rel_tol * total:
        raise NumericsError(
            f"radial quadrature error estimate {err_total:.3g} exceeds "
            f"{rel_tol:.1g} relative tolerance (value {total:.6g})"
        )
    return total


# ---------------------------------------------------------------------------
# Normalizing constants and moments
# ---------------------------------------------------------------------------


def log_normalizing_constant(spec: PotentialSpec) -> float:
    """log Z with pi(x) = exp(-V(x)) / Z.

    Closed form for GenCauchy and Gaussian; validated adaptive radial
    quadrature (relative tolerance 1e-8 or better) for the others.
    """
    if isinstance(spec, GenCauchy):
        return (
            0.5 * spec.d * math.log(math.pi)
            + special.gammaln(0.5 * spec.nu)
            - special.gammaln(0.5 * (spec.d + spec.nu))
        )
    if isinstance(spec, Gaussian):
        return 0.5 * spec.d * math.log(2.0 * math.pi)
    f, _ = radial_profile(spec)
    integral = _radial_integral(f, spec.d, p=0.0)
    return _log_sphere_area(spec.d) + math.log(integral)


def normalizing_constant(spec: PotentialSpec) -> float:
    """Z = integral of exp(-V)."""
    return math.exp(log_normalizing_constant(spec))


def radial_moment(spec: PotentialSpec, p: float) -> float:
    """E_pi |x|^p by validated quadrature (exact families included).

    Raises :class:`MomentUndefinedError` when the integral diverges
    (GenCauchy with p >= nu).
    """
    if p < 0:
        raise InputValidationError(f"moment order p must be >= 0, got {p}")
    if isinstance(spec, GenCauchy) and p >= spec.nu:
        raise MomentUndefinedError(
            f"GenCauchy moment of order p={p} diverges (requires p < nu={spec.nu})"
        )
    if p == 0:
        return 1.0
    f, _ = radial_profile(spec)
    num = _radial_integral(f, spec.d, p=p)
    den = _radial_integral(f, spec.d, p=0.0)
    return num / den


def closed_form_moment(spec: PotentialSpec, p: float):
    """Closed-form E_pi |x|^p where available.

    Returns a float for GenCauchy and Gaussian.  For Sublinear returns a
    :class:`SublinearMomentBound` pair (exact surrogate moment, e-factor
    upper bound).  RadialCustom has no closed form.
    """
    if p < 0:
        raise InputValidationError(f"moment order p must be >= 0, got {p}")
    if isinstance(spec, GenCauchy):
        if p >= spec.nu:
            raise MomentUndefinedError(
                f"GenCauchy moment of order p={p} diverges (requires p < nu={spec.nu})"
            )
        d, nu = spec.d, spec.nu
        lg = (
            math.log(d / (d + p))
            + special.gammaln(0.5 * (nu - p))
            + special.gammaln(0.5 * (d + 2 + p))
            - special.gammaln(0.5 * nu)
            - special.gammaln(0.5 * (d + 2))
        )
        return math.exp(lg)
    if isinstance(spec, Gaussian):
        lg = 0.5 * p * math.log(2.0) + special.gammaln(0.5 * (spec.d + p)) - special.gammaln(
            0.5 * spec.d
        )
        return math.exp(lg)
    if isinstance(spec, Sublinear):
        tilde = tilde_moment(spec.d, spec.alpha, spec.lam, p)
        return SublinearMomentBound(tilde_exact=tilde, upper=math.e * tilde)
    raise UnsupportedFamilyError(
        "closed_form_moment is not available for RadialCustom; use radial_moment"
    )


def tilde_moment(d: int, alpha: float, lam: float, p: float) -> float:
    """Exact E |x|^p under the pure-power potential lam^... |x|^alpha surrogate.

    The surrogate density is proportional to exp(-(lam |x|)^alpha) up to the
    scale convention lam^(2/alpha) |x|^2 inside the family potential; its
    moments are Gamma-ratios: lam^(-p/alpha) Gamma((d+p)/alpha) / Gamma(d/alpha).
    """
    _validate_dimension(d)
    if not (0 < alpha <= 1):
        raise InputValidationError(f"alpha must lie in (0, 1], got {alpha}")
    if lam <= 0:
        raise InputValidationError(f"lam must be positive, got {lam}")
    if p < 0:
        raise InputValidationError(f"moment order p must be >= 0, got {p}")
    lg = (
        -(p / alpha) * math.log(lam)
        + special.gammaln((d + p) / alpha)
        - special.gammaln(d / alpha)
    )
    return math.exp(lg)


def tilde_log_normalizing_constant(d: int, alpha: float, lam: float) -> float:
    """log Z of the pure-power surrogate: (d omega_d / alpha) Gamma(d/alpha) lam^(-d/alpha)."""
    _validate_dimension(d)
    if not (0 < alpha <= 1):
        raise InputValidationError(f"alpha must lie in (0, 1], got {alpha}")
    if lam <= 0:
        raise InputValidationError(f"lam must be positive, got {lam}")
    log_omega = 0.5 * d * math.log(math.pi) - special.gammaln(0.5 * d + 1.0)
    return (
        math.log(d / alpha)
        + log_omega
        + special.gammaln(d / alpha)
        - (d / alpha) * math.log(lam)
    )


# ---------------------------------------------------------------------------
# Tails
# ---------------------------------------------------------------------------


def tail_bound(spec: PotentialSpec, R: float) -> float:
    """Explicit upper bound on pi(|x| >= R); not clamped at 1.

    * GenCauchy: (nu + d)^(nu/2) * R^(-nu)
    * Sublinear (lam = 1): e^(1/2) * 2^(d/alpha) * exp(-(1+R^2)^(alpha/2)/2)

    The Gaussian and custom families have no registered bound.
    """
    if R <= 0:
        raise InputValidationError(f"tail radius R must be positive, got {R}")
    if isinstance(spec, GenCauchy):
        return (spec.nu + spec.d) ** (0.5 * spec.nu) * R ** (-spec.nu)
    if isinstance(spec, Sublinear):
        if spec.lam != 1.0:
            raise UnsupportedFamilyError(
                "tail_bound for Sublinear is registered only at lam = 1"
            )
        log_val = (
            0.5
            + (spec.d / spec.alpha) * math.log(2.0)
            - 0.5 * (1.0 + R * R) ** (0.5 * spec.alpha)
        )
        return math.exp(log_val)
    raise UnsupportedFamilyError(
        f"no registered tail bound for {type(spec).__name__}"
    )


def tail_mass(spec: PotentialSpec, R: float) -> float:
    """pi(|x| >= R) by quadrature (the oracle the bounds are tested against)."""
    if R < 0:
        raise InputValidationError(f"tail radius R must be >= 0, got {R}")
    if R == 0:
        return 1.0
    f, _ = radial_profile(spec)
    num = _radial_integral(f, spec.d, p=0.0, lower=R)
    den = _radial_integral(f, spec.d, p=0.0)
    return num / den


def median_radius(spec: PotentialSpec) -> float:
    """The radius R with pi(|x| >= R) = 1/2, found by bracketed root-finding."""
    target = 0.5

    def g(R: float) -> float:
        return tail_mass(spec, R) - target

    lo, hi = 1e-8, 1.0
    while g(hi) > 0:
        hi *= 2.0
        if hi > 1e12:
            raise NumericsError("median_radius: bracket expansion failed")
    r = optimize.brentq(g, lo, hi, xtol=1e-12, rtol=1e-10)
    return float(r)


def modified_target_m(spec: PotentialSpec) -> float:
    """Half the median radius: m = (1/2) inf{R : pi(|x| >= R) <= 1/2}."""
    return 0.5 * median_radius(spec)


def modified_target_spec(spec: PotentialSpec, T: float, m: Union[float, None] = None) -> RadialCustom:
    """Radius-penalized modification of the target over a time horizon T.

    The modified potential adds a quadratic penalty outside radius 2m:

        V_hat(x) = V(x) + (1/(6144 T)) * max(|x| - 2m, 0)^2

    which leaves the core of the target untouched while giving the tail a
    Gaussian envelope at scale ~T.  Returns a :class:`RadialCustom` with an
    analytic profile derivative.
    """
    if T <= 0:
        raise InputValidationError(f"time horizon T must be positive, got {T}")
    if m is None:
        m = modified_target_m(spec)
    if m < 0:
        raise InputValidationError(f"core radius m must be >= 0, got {m}")
    f, fp = radial_profile(spec)
    coef = 1.0 / (6144.0 * T)
    two_m = 2.0 * m

    def f_hat(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        r = np.sqrt(t)
        excess = np.maximum(r - two_m, 0.0)
        return np.asarray(f(t), dtype=float) + coef * excess * excess

    def fp_hat(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        r = np.sqrt(np.maximum(t, 1e-300))
        excess = np.maximum(r - two_m, 0.0)
        return np.asarray(fp(t), dtype=float) + coef * excess / r

    return RadialCustom(d=spec.d, f=f_hat, fprime=fp_hat)


# ---------------------------------------------------------------------------
# Exact samplers
# ---------------------------------------------------------------------------


def _sphere_directions(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    z = rng.standard_normal((n, d))
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    # Resample the (probability-zero) degenerate rows rather than dividing by 0.
    bad = norms[:, 0] < 1e-300
    while np.any(bad):
        z[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(z, axis=1, keepdims=True)
        bad = norms[:, 0] < 1e-300
    return z / norms


def _sublinear_r_max(spec: Sublinear, tail_eps: float = 1e-12) -> float:
    """Smallest R with the registered sublinear tail bound below tail_eps."""
    u = 2.0 * (
        math.log(1.0 / tail_eps) + 0.5 + (spec.d / spec.alpha) * math.log(2.0)
    )
    t = u ** (2.0 / spec.alpha) - 1.0
    return math.sqrt(max(t, 1.0))


def _custom_r_max(spec: PotentialSpec, tail_eps: float = 1e-12) -> float:
    R = 1.0
    while tail_mass(spec, R) > tail_eps:
        R *= 2.0
        if R > 1e12:
            raise NumericsError("direct_sampler: tail radius search failed")
    return R


def _radial_inverse_cdf(
    spec: PotentialSpec, r_max: float, n_nodes: int = 4096
) -> Callable[[np.ndarray], np.ndarray]:
    """Monotone (PCHIP) interpolant of the inverse radial CDF on [0, r_max]."""
    from scipy.interpolate import PchipInterpolator

    f, _ = radial_profile(spec)
    n_lin = n_nodes // 2
    r_knee = min(4.0 * median_radius(spec), r_max / 4.0)
    nodes = np.concatenate(
        [
            np.linspace(0.0, r_knee, n_lin, endpoint=False),
            np.geomspace(r_knee, r_max, n_nodes - n_lin),
        ]
    )
    t = nodes * nodes
    with np.errstate(divide="ignore"):
        log_dens = (spec.d - 1.0) * np.log(np.maximum(nodes, 1e-300)) - np.asarray(
            f(t), dtype=float
        )
    dens = np.exp(log_dens - log_dens.max())
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(nodes))])
    cdf /= cdf[-1]
    keep = np.concatenate([[True], np.diff(cdf) > 0])
    return PchipInterpolator(cdf[keep], nodes[keep], extrapolate=False)


def direct_sampler(spec: PotentialSpec, n: int, seed: int) -> np.ndarray:
    """Draw n exact (or numerically exact) samples from pi; returns (n, d).

    * GenCauchy: elliptical representation x = z / sqrt(w), z ~ N(0, I_d),
      w ~ chi-squared(nu) -- exact.
    * Gaussian: x ~ N(0, I_d) -- exact.
    * Sublinear / RadialCustom: radial inverse-CDF lookup on a 4096-node
      monotone interpolant (tail truncated below 1e-12 mass) times a uniform
      direction.

    The stream is a fresh Philox generator keyed by ``seed``; results are
    bit-reproducible for a fixed (spec, n, seed).
    """
    if n < 1:
        raise InputValidationError(f"sample count n must be >= 1, got {n}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    if isinstance(spec, GenCauchy):
        z = rng.standard_normal((n, spec.d))
        w = rng.chisquare(spec.nu, size=n)
        return z / np.sqrt(w)[:, None]
    if isinstance(spec, Gaussian):
        return rng.standard_normal((n, spec.d))
    if isinstance(spec, (Sublinear, RadialCustom)):
        r_max = (
            _sublinear_r_max(spec)
            if isinstance(spec, Sublinear) and spec.lam == 1.0
            else _custom_r_max(spec)
        )
        inv = _radial_inverse_cdf(spec, r_max)
        u = rng.random(n)
        r = np.asarray(inv(u), dtype=float)
        r = np.nan_to_num(r, nan=r_max)
        dirs = _sphere_directions(rng, n, spec.d)
        return r[:, None] * dirs
    raise UnsupportedFamilyError(f"unknown potential spec {type(spec).__name__}")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_FAMILY_TAGS = {"gen_cauchy": GenCauchy, "sublinear": Sublinear, "gaussian": Gaussian}


def spec_to_json(spec: PotentialSpec) -> dict:
    """Serialize a closed-form family spec to a plain JSON-compatible dict."""
    if isinstance(spec, GenCauchy):
        return {"family": "gen_cauchy", "d": spec.d, "nu": spec.nu, "lambda": 1.0}
    if isinstance(spec, Sublinear):
        return {"family": "sublinear", "d": spec.d, "alpha": spec.alpha, "lambda": spec.lam}
    if isinstance(spec, Gaussian):
        return {"family": "gaussian", "d": spec.d, "lambda": 1.0}
    raise UnsupportedFamilyError("RadialCustom specs cannot be serialized")


def spec_from_json(obj: Mapping) -> PotentialSpec:
    """Inverse of :func:`spec_to_json`; strict about fields and values.

    ``lambda`` defaults to 1 and must equal 1 for gen_cauchy and gaussian.
    """
    if not isinstance(obj, Mapping):
        raise InputValidationError(f"spec JSON must be a mapping, got {type(obj).__name__}")
    data = dict(obj)
    family = data.pop("family", None)
    if family not in _FAMILY_TAGS:
        raise UnsupportedFamilyError(
            f"unknown family tag {family!r}; expected one of {sorted(_FAMILY_TAGS)}"
        )
    try:
        d = int(data.pop("d"))
    except KeyError:
        raise InputValidationError("spec JSON missing required field 'd'") from None
    lam = float(data.pop("lambda", 1.0))
    if family == "gen_cauchy":
        try:
            nu = float(data.pop("nu"))
        except KeyError:
            raise InputValidationError("gen_cauchy spec requires field 'nu'") from None
        if lam != 1.0:
            raise InputValidationError("gen_cauchy only supports lambda = 1")
        spec: PotentialSpec = GenCauchy(d=d, nu=nu)
    elif family == "sublinear":
        try:
            alpha = float(data.pop("alpha"))
        except KeyError:
            raise InputValidationError("sublinear spec requires field 'alpha'") from None
        spec = Sublinear(d=d, alpha=alpha, lam=lam)
    else:
        if lam != 1.0:
            raise InputValidationError("gaussian only supports lambda = 1")
        spec = Gaussian(d=d)
    for key in ("alpha", "nu"):
        if key in data and data[key] is None:
            data.pop(key)
    if data:
        raise InputValidationError(f"unrecognized spec fields: {sorted(data)}")
    return spec
