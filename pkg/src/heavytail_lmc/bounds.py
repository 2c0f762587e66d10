"""Explicit complexity and divergence bounds for Langevin algorithms.

Every calculator here evaluates a closed-form bound and returns an auditable
:class:`BoundReport` carrying the value, the regime it was computed in, every
intermediate quantity, and a stable citation key.  Conventions:

* All asymptotic implicit constants are set to 1 and recorded in
  ``intermediates["implicit_const"]``; upper-bound values are therefore
  order-correct rather than certified numeric bounds.
* Quantities that can overflow a float are computed in the log domain and
  reported as ``inf`` when they exceed the exponential range; an ``inf``
  value always comes with an infeasibility note.
* Structural domain violations (an undefined transform, a negative rate)
  raise :class:`~heavytail_lmc.targets.InputValidationError`; violations of
  a theorem's convenience assumptions (e.g. ``m >= 1``) produce a report
  flagged infeasible, with the violated assumption named, so that the value
  can still be inspected.

The weak-Poincare weighting functions ``beta_*`` map a resolution r in
(0, 1] to the constant multiplying the gradient energy; smaller r buys a
tighter variance bound at the price of a larger constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

import numpy as np

from .diagnostics import gaussian_renyi, sigma2_eps
from .targets import (
    Gaussian,
    GenCauchy,
    GrowthParams,
    HolderSmoothness,
    InputValidationError,
    PotentialSpec,
    Sublinear,
    UnsupportedFamilyError,
    growth_params,
    holder_smoothness,
    log_normalizing_constant,
    modified_target_m,
    radial_profile,
)

__all__ = [
    "BoundQuery",
    "BoundReport",
    "beta_wpi_cauchy",
    "beta_wpi_cauchy_report",
    "beta_wpi_sublinear",
    "beta_wpi_sublinear_report",
    "beta_prime",
    "beta_for_spec",
    "diffusion_time_bound",
    "lmc_iteration_count",
    "lmc_iteration_bound",
    "disc_step_size",
    "lower_bound_complexity",
    "delta0_threshold",
    "step_size_upper_bound",
    "init_divergence_bound",
    "gen_cauchy_init_bound_simplified",
    "sublinear_init_bound_simplified",
    "warm_start_divergence_bound",
    "modified_target_m",
]

_EXP_MAX = 709.0  # ln(float max); exponents beyond this are reported as inf

_R_INIT_KEYS = frozenset({"q", "2q-1", "qprime", "kl", "r2_hat"})


def _safe_exp(x: float) -> float:
    if x >= _EXP_MAX:
        return math.inf
    return math.exp(x)


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound with its full audit trail.

    ``kind`` says what the value measures: a diffusion time (``time_T``), an
    iteration count (``iters_N``), a WPI weighting value (``beta``), a step
    size cap (``h_max`` / ``h_disc``), a minimal initial-divergence level
    (``delta0_min``), or an initialization divergence (``init_div``).
    ``regime`` is set for tail-growth-dispatched bounds (``alpha0``,
    ``alpha_mid``, ``alpha2``).  A non-finite or non-positive value always
    comes flagged ``feasible=False`` with the reason in ``infeasibility``.
    """

    value: float
    kind: str
    citation: str
    regime: Optional[str] = None
    intermediates: Mapping[str, float] = field(default_factory=dict)
    feasible: bool = True
    infeasibility: Optional[str] = None

    def to_dict(self) -> dict:
        def _num(v: float) -> Union[float, str]:
            if isinstance(v, float) and not math.isfinite(v):
                return repr(v)
            return v

        return {
            "value": _num(self.value),
            "kind": self.kind,
            "citation": self.citation,
            "regime": self.regime,
            "intermediates": {k: _num(v) for k, v in self.intermediates.items()},
            "feasible": self.feasible,
            "infeasibility": self.infeasibility,
        }


@dataclass(frozen=True)
class BoundQuery:
    """Inputs shared by the time/iteration bound calculators.

    ``r_init`` maps divergence names at initialization to their values:
    ``"q"`` (order-q Renyi vs the target), ``"2q-1"`` (order 2q-1),
    ``"qprime"`` (order q'; the sup-log-ratio when q' = inf), ``"kl"``
    (relative entropy), and ``"r2_hat"`` (order-2 Renyi vs the modified
    target).  Calculators state which keys they require.
    """

    q: float
    q_prime: float
    eps: float
    spec: Optional[PotentialSpec] = None
    h: Optional[float] = None
    delta0: Optional[float] = None
    sigma2: Optional[float] = None
    r_init: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (self.q > 1.0):
            raise InputValidationError(f"q must exceed 1, got {self.q}")
        if not (self.q_prime > self.q):
            raise InputValidationError(
                f"q_prime must exceed q (got q'={self.q_prime}, q={self.q})"
            )
        if not (0.0 < self.eps <= 1.0):
            raise InputValidationError(f"eps must lie in (0, 1], got {self.eps}")
        if self.h is not None and not (self.h > 0.0):
            raise InputValidationError(f"h must be positive, got {self.h}")
        if self.sigma2 is not None and not (self.sigma2 > 0.0):
            raise InputValidationError(f"sigma2 must be positive, got {self.sigma2}")
        if self.delta0 is not None and not (self.delta0 > 0.0):
            raise InputValidationError(f"delta0 must be positive, got {self.delta0}")
        unknown = set(self.r_init) - _R_INIT_KEYS
        if unknown:
            raise InputValidationError(
                f"unknown r_init keys {sorted(unknown)}; "
                f"allowed: {sorted(_R_INIT_KEYS)}"
            )
        for key, val in self.r_init.items():
            if not (val >= 0.0) or not math.isfinite(val):
                raise InputValidationError(
                    f"r_init[{key!r}] must be a finite non-negative real, got {val}"
                )

    def require(self, *keys: str) -> None:
        missing = [k for k in keys if k not in self.r_init]
        if missing:
            raise InputValidationError(
                f"query.r_init is missing required keys {missing}"
            )


# ---------------------------------------------------------------------------
# Weak-Poincare weightings
# ---------------------------------------------------------------------------


def beta_wpi_cauchy(nu: float, d: int, r: float) -> float:
    """WPI weighting 2/nu + 2(d/nu + 1) r^{-2/nu} for log-tailed targets."""
    if not (nu > 0.0):
        raise InputValidationError(f"nu must be positive, got {nu}")
    if d < 1:
        raise InputValidationError(f"d must be a positive integer, got {d}")
    if not (r > 0.0):
        raise InputValidationError(f"r must be positive, got {r}")
    log_term = math.log(2.0 * (d / nu + 1.0)) - (2.0 / nu) * math.log(r)
    return 2.0 / nu + _safe_exp(log_term)


def beta_wpi_cauchy_report(nu: float, d: int, r: float) -> BoundReport:
    """Report wrapper for :func:`beta_wpi_cauchy`."""
    value = beta_wpi_cauchy(nu, d, r)
    feasible = math.isfinite(value)
    return BoundReport(
        value=value,
        kind="beta",
        citation="wpi:log-tail-weighting",
        regime="alpha0",
        intermediates={"nu": nu, "d": float(d), "r": r},
        feasible=feasible,
        infeasibility=None if feasible else "r so small the weighting overflows",
    )


def _beta_sublinear_at(
    alpha: float, d: int, r: float, gamma: float
) -> tuple[float, dict]:
    """Value and intermediates of the subexponential WPI chain at fixed gamma.

    Log-domain throughout: the constituent a = gamma (e C)^{2/gamma} /
    (2(1-alpha)+gamma) overflows floats for small gamma.
    """
    c_da = 12.0 * d / alpha**3 + (d + alpha) / alpha**4
    denom = 2.0 * (1.0 - alpha) + gamma
    log_a = math.log(gamma) + (2.0 / gamma) * (1.0 + math.log(c_da)) - math.log(denom)
    b = 2.0 * (1.0 - alpha) / denom
    expo = 1.0 - alpha + gamma / 2.0
    # t < 1 is required for the chain's geometric-series prefactor (1-t)^{-2}.
    log_t = math.log(expo) + 0.5 * math.log(b) - ((alpha - gamma / 2.0) / 2.0) * log_a
    inter = {
        "gamma": gamma,
        "C_d_alpha": c_da,
        "log_a": log_a,
        "b": b,
        "exponent": expo,
    }
    if log_t >= 0.0:
        return math.inf, inter
    t = math.exp(log_t)
    # w aggregates the dimension and resolution contributions; -ln r is used
    # directly so that subnormal r (down to ~5e-324) stays representable.
    w = 1.0 + (2.0 * d / alpha) * math.log(2.0) + 2.0 * max(-math.log(r), 0.0)
    inter["w"] = w
    log_val = -2.0 * math.log1p(-t) + expo * np.logaddexp(
        log_a, math.log(b) + (2.0 / alpha) * math.log(w)
    )
    if log_val >= _EXP_MAX:
        return math.inf, inter
    return math.exp(log_val), inter


def beta_wpi_sublinear_report(
    alpha: float, d: int, r: float, gamma: Optional[float] = None
) -> BoundReport:
    """WPI weighting for subexponential tails, minimized over gamma if free.

    The fully explicit pre-simplification value, using
    C_{d,alpha} = 12 d / alpha^3 + (d + alpha) / alpha^4,
    a = gamma (e C_{d,alpha})^{2/gamma} / (2(1-alpha)+gamma), and
    b = 2(1-alpha) / (2(1-alpha)+gamma).  When ``gamma`` is omitted the
    value is minimized over a 64-point log grid on (0, 2 alpha].
    """
    if not (0.0 < alpha < 1.0):
        raise InputValidationError(
            f"alpha must lie in (0, 1) for the subexponential weighting, got {alpha}"
        )
    if d < 1:
        raise InputValidationError(f"d must be a positive integer, got {d}")
    if not (r > 0.0):
        raise InputValidationError(f"r must be positive, got {r}")
    if gamma is not None:
        if not (0.0 < gamma <= 2.0 * alpha):
            raise InputValidationError(
                f"gamma must lie in (0, 2*alpha] = (0, {2 * alpha}], got {gamma}"
            )
        value, inter = _beta_sublinear_at(alpha, d, r, gamma)
    else:
        value, inter = math.inf, {"gamma": 2.0 * alpha}
        for g in np.geomspace(2.0 * alpha * 1e-3, 2.0 * alpha, 64):
            v, i = _beta_sublinear_at(alpha, d, r, float(g))
            if v < value:
                value, inter = v, i
    feasible = math.isfinite(value)
    return BoundReport(
        value=value,
        kind="beta",
        citation="wpi:subexponential-weighting",
        regime="alpha_mid",
        intermediates=inter,
        feasible=feasible,
        infeasibility=None if feasible else "weighting overflows at every gamma",
    )


def beta_wpi_sublinear(
    alpha: float, d: int, r: float, gamma: Optional[float] = None
) -> float:
    """Value-only form of :func:`beta_wpi_sublinear_report`."""
    return beta_wpi_sublinear_report(alpha, d, r, gamma).value


def beta_prime(beta: Callable[[float], float], u: float, r: float) -> float:
    """Weighting for the variance-regularized inequality of order u > 2.

    beta'(r) = beta((r/5)^{u/(u-2)}) * ln((5/r)^{u/(u-2)} or 1, whichever
    is larger).  u <= 2 is rejected: that case is equivalent to an ordinary
    Poincare inequality and the transform is undefined.
    """
    if not (u > 2.0):
        raise InputValidationError(
            f"the regularized weighting needs u > 2, got u={u}"
        )
    if not (r > 0.0):
        raise InputValidationError(f"r must be positive, got {r}")
    expo = u / (u - 2.0)
    log_factor = max(expo * math.log(5.0 / r), 0.0)
    if log_factor == 0.0:
        return 0.0
    arg = math.exp(expo * math.log(r / 5.0))
    if arg == 0.0:
        # The inner resolution underflowed; every weighting we use diverges
        # as its argument tends to 0, so the product is reported as inf.
        return math.inf
    return beta(arg) * log_factor


def beta_for_spec(spec: PotentialSpec) -> Callable[[float], float]:
    """The target's own WPI weighting as a function of the resolution r.

    Gaussian targets satisfy an ordinary Poincare inequality; their
    weighting is the constant 1 (unit variance proxy).  Custom radial
    targets have no closed-form weighting.
    """
    if isinstance(spec, GenCauchy):
        nu, d = spec.nu, spec.d
        return lambda r: beta_wpi_cauchy(nu, d, r)
    if isinstance(spec, Sublinear):
        alpha, d = spec.alpha, spec.d
        return lambda r: beta_wpi_sublinear(alpha, d, r)
    if isinstance(spec, Gaussian):
        return lambda r: 1.0
    raise UnsupportedFamilyError(
        "no closed-form WPI weighting for custom radial targets"
    )


def _resolve_beta_hat(
    beta: Callable[[float], float], order: float, q_prime: float
) -> tuple[Callable[[float], float], Optional[float]]:
    """Pass beta through at q' = inf, else wrap it in the order-u transform.

    ``order`` is the Renyi order whose decay is being driven (q for the
    diffusion bound, 2q-1 for the LMC bound); u = 2 q' / order.
    """
    if math.isinf(q_prime):
        return beta, None
    u = 2.0 * q_prime / order
    return (lambda r: beta_prime(beta, u, r)), u


# ---------------------------------------------------------------------------
# Upper bounds: diffusion time, LMC iterations, step sizes
# ---------------------------------------------------------------------------


def diffusion_time_bound(
    query: BoundQuery, beta: Callable[[float], float]
) -> BoundReport:
    """Diffusion time sufficient for order-q Renyi accuracy eps.

    T = q beta^(1/(4 delta0)) R_q(rho0||pi) + (q/2) beta^(eps/(4 delta0))
    ln(1/eps), with delta0 = exp(q R_q'(rho0||pi)) and beta^ the weighting
    passed through unchanged when q' = inf, else transformed with
    u = 2 q' / q.  Requires r_init keys "q" and "qprime".
    """
    query.require("q", "qprime")
    q, q_prime, eps = query.q, query.q_prime, query.eps
    r_q0 = query.r_init["q"]
    r_qp0 = query.r_init["qprime"]
    beta_hat, u = _resolve_beta_hat(beta, q, q_prime)
    log_delta0 = q * r_qp0
    r1 = 0.25 * _safe_exp(-log_delta0)
    inter: dict = {"log_delta0": log_delta0, "r_accuracy": r1}
    if u is not None:
        inter["beta_transform_u"] = u
    if r1 == 0.0:
        return BoundReport(
            value=math.inf,
            kind="time_T",
            citation="diffusion:renyi-time-bound",
            intermediates=inter,
            feasible=False,
            infeasibility="initial order-q' divergence so large that the "
            "weighting argument underflows",
        )
    beta_1 = beta_hat(r1)
    inter["beta_at_quarter_delta0"] = beta_1
    term1 = q * beta_1 * r_q0
    if eps == 1.0:
        term2 = 0.0
    else:
        r2 = eps * r1
        beta_2 = beta_hat(r2)
        inter["beta_at_eps_delta0"] = beta_2
        term2 = 0.5 * q * beta_2 * math.log(1.0 / eps)
    value = term1 + term2
    inter["term_initial"] = term1
    inter["term_accuracy"] = term2
    feasible = math.isfinite(value) and value > 0.0
    return BoundReport(
        value=value,
        kind="time_T",
        citation="diffusion:renyi-time-bound",
        intermediates=inter,
        feasible=feasible,
        infeasibility=None if feasible else "bound overflowed to inf",
    )


def lmc_iteration_count(
    T: float,
    d: int,
    q: float,
    L: float,
    s: float,
    eps: float,
    m: float,
    r2_hat: float,
) -> float:
    """The iteration-count expression N(T) with unit implicit constant.

    N = T^{1+1/s} d q^{1/s} L^{2/s} / eps^{1/s} * max{1, t_drift, t_disc}
    where t_drift = eps^{1/(2s)} m^s / (L^{1/s-1} T^{1/(2s)} d) and t_disc
    carries the ln(q T L R2_hat / eps)^{s/2} discretization factor.
    """
    if T <= 0 or L <= 0 or eps <= 0 or m <= 0 or r2_hat <= 0 or q <= 1:
        raise InputValidationError(
            "lmc_iteration_count needs T, L, eps, m, r2_hat > 0 and q > 1"
        )
    if not (0.0 < s <= 1.0):
        raise InputValidationError(f"s must lie in (0, 1], got {s}")
    pref = T ** (1.0 + 1.0 / s) * d * q ** (1.0 / s) * L ** (2.0 / s) / eps ** (
        1.0 / s
    )
    l_fac = L ** (1.0 / s - 1.0)
    t_drift = eps ** (0.5 / s) * m**s / (l_fac * T ** (0.5 / s) * d)
    log_arg = q * T * L * r2_hat / eps
    log_pow = max(math.log(log_arg), 0.0) ** (0.5 * s)
    t_disc = (
        eps ** (0.5 / s)
        * r2_hat ** (0.5 * s)
        * log_pow
        / (l_fac * T ** ((1.0 - s * s) / (2.0 * s)) * d)
    )
    return pref * max(1.0, t_drift, t_disc)


def lmc_iteration_bound(
    query: BoundQuery,
    beta: Callable[[float], float],
    m: float,
    holder: Optional[HolderSmoothness] = None,
) -> BoundReport:
    """LMC iterations sufficient for order-q Renyi accuracy eps.

    First computes the diffusion horizon
    T = (2q-1) { beta^(1/(4 delta0)) R_{2q-1}(rho0||pi)
                 + beta^(eps/(8 delta0)) ln(2/eps) },
    with delta0 = exp((2q-1) R_q'(rho0||pi)) and the weighting transformed
    with u = 2q'/(2q-1) unless q' = inf, then evaluates
    :func:`lmc_iteration_count` at that horizon.  Requires r_init keys
    "2q-1", "qprime", and "r2_hat" (the latter measured against the
    modified target).  ``holder`` defaults to the smoothness parameters of
    ``query.spec``.

    The convenience assumptions (eps <= 1/q, q >= 2, and m, L, T, R2_hat,
    1/eps all >= 1) are validated; violations flag the report infeasible
    with the assumption named, while the value is still computed.
    q' <= 2q-1 is structural and raises.
    """
    query.require("2q-1", "qprime", "r2_hat")
    q, q_prime, eps = query.q, query.q_prime, query.eps
    order = 2.0 * q - 1.0
    if not math.isinf(q_prime) and not (q_prime > order):
        raise InputValidationError(
            f"q_prime must exceed 2q-1 = {order}, got {q_prime}"
        )
    if holder is None:
        if query.spec is None:
            raise InputValidationError(
                "pass holder smoothness explicitly or set query.spec"
            )
        holder = holder_smoothness(query.spec)
    if query.spec is not None:
        d = query.spec.d
    else:
        raise InputValidationError("query.spec is required (for the dimension)")
    L, s = holder.L, holder.s
    r_2q1 = query.r_init["2q-1"]
    r_qp0 = query.r_init["qprime"]
    r2_hat = query.r_init["r2_hat"]

    beta_hat, u = _resolve_beta_hat(beta, order, q_prime)
    log_delta0 = order * r_qp0
    r1 = 0.25 * _safe_exp(-log_delta0)
    inter: dict = {"log_delta0": log_delta0, "implicit_const": 1.0}
    if u is not None:
        inter["beta_transform_u"] = u
    if r1 == 0.0:
        return BoundReport(
            value=math.inf,
            kind="iters_N",
            citation="lmc:iteration-bound",
            intermediates=inter,
            feasible=False,
            infeasibility="initial order-q' divergence so large that the "
            "weighting argument underflows",
        )
    beta_1 = beta_hat(r1)
    beta_2 = beta_hat(0.5 * eps * r1)
    T = order * (beta_1 * r_2q1 + beta_2 * math.log(2.0 / eps))
    inter.update(
        {
            "beta_at_quarter_delta0": beta_1,
            "beta_at_eps_eighth_delta0": beta_2,
            "time_T": T,
        }
    )
    violations = []
    if eps > 1.0 / q:
        violations.append(f"eps <= 1/q violated (eps={eps}, 1/q={1.0 / q})")
    if q < 2.0:
        violations.append(f"q >= 2 violated (q={q})")
    if m < 1.0:
        violations.append(f"m >= 1 violated (m={m})")
    if L < 1.0:
        violations.append(f"L >= 1 violated (L={L})")
    if r2_hat < 1.0:
        violations.append(f"R2_hat >= 1 violated (R2_hat={r2_hat})")
    if math.isfinite(T) and T < 1.0:
        violations.append(f"T >= 1 violated (T={T})")
    if not math.isfinite(T):
        return BoundReport(
            value=math.inf,
            kind="iters_N",
            citation="lmc:iteration-bound",
            intermediates=inter,
            feasible=False,
            infeasibility="diffusion horizon overflowed to inf",
        )
    value = lmc_iteration_count(T, d, q, L, s, eps, m, r2_hat)
    inter["h_implied"] = T / value if math.isfinite(value) else 0.0
    feasible = not violations and math.isfinite(value)
    if violations:
        reason = "; ".join(violations)
    elif not math.isfinite(value):
        reason = "iteration count overflowed to inf"
    else:
        reason = None
    return BoundReport(
        value=value,
        kind="iters_N",
        citation="lmc:iteration-bound",
        intermediates=inter,
        feasible=feasible,
        infeasibility=reason,
    )


def disc_step_size(
    s: float,
    L: float,
    d: int,
    q: float,
    eps: float,
    T: float,
    m: float,
    r2_hat: float,
    n_guess: float,
) -> BoundReport:
    """Step size keeping the order-q discretization error below eps over [0, T].

    h <= eps^{1/s} / (d q^{1/s} L^{2/s} T^{1/s}) * min{1, t_drift, t_disc},
    with t_drift = L^{1/s-1} T^{1/(2s)} d / (eps^{1/(2s)} m^s) and t_disc
    the ln(N)^{s/2} term evaluated at ``n_guess`` and refined once through
    N = T / h.  Unit implicit constant; the convenience assumptions
    (1/eps, m, L, T, R2_hat >= 1 and q <= 1/eps) flag infeasibility.
    """
    if not (0.0 < s <= 1.0):
        raise InputValidationError(f"s must lie in (0, 1], got {s}")
    if min(L, eps, T, m, r2_hat) <= 0 or q <= 1 or d < 1:
        raise InputValidationError(
            "disc_step_size needs L, eps, T, m, r2_hat > 0, q > 1, d >= 1"
        )
    if not (n_guess > 1.0):
        raise InputValidationError(f"n_guess must exceed 1, got {n_guess}")
    base = eps ** (1.0 / s) / (d * q ** (1.0 / s) * L ** (2.0 / s) * T ** (1.0 / s))
    l_fac = L ** (1.0 / s - 1.0)
    t_drift = l_fac * T ** (0.5 / s) * d / (eps ** (0.5 / s) * m**s)

    def t_disc(n: float) -> float:
        return (
            l_fac
            * T ** ((1.0 - s * s) / (2.0 * s))
            * d
            / (eps ** (0.5 / s) * r2_hat ** (0.5 * s) * math.log(n) ** (0.5 * s))
        )

    h1 = base * min(1.0, t_drift, t_disc(n_guess))
    n_refined = max(T / h1, 1.0 + 1e-9)
    value = base * min(1.0, t_drift, t_disc(n_refined))
    violations = []
    if eps > 1.0 / q:
        violations.append(f"q <= 1/eps violated (q={q}, 1/eps={1.0 / eps})")
    for name, v in (("m", m), ("L", L), ("T", T), ("R2_hat", r2_hat)):
        if v < 1.0:
            violations.append(f"{name} >= 1 violated ({name}={v})")
    if eps > 1.0:
        violations.append(f"1/eps >= 1 violated (eps={eps})")
    feasible = not violations
    return BoundReport(
        value=value,
        kind="h_disc",
        citation="lmc:discretization-step-size",
        intermediates={
            "base": base,
            "term_drift": t_drift,
            "term_disc_guess": t_disc(n_guess),
            "term_disc_refined": t_disc(n_refined),
            "n_refined": n_refined,
            "implicit_const": 1.0,
        },
        feasible=feasible,
        infeasibility="; ".join(violations) if violations else None,
    )


def step_size_upper_bound(
    spec: PotentialSpec,
    q: float,
    eps: float,
    d: Optional[int] = None,
    sigma2_eps_override: Optional[float] = None,
) -> BoundReport:
    """Largest step size whose moment fixed point still meets accuracy eps.

    h <= (1/f'(sigma2_eps)) (1 - d / (2 f'(sigma2_eps) sigma2_eps)), where
    sigma2_eps is the second-moment level at which the moment surrogate
    equals eps.  The recursion-validity hypotheses on g(r) = (1-2hf'(r))^2 r
    are not checkable without h; they are verified downstream by the
    comparison process.
    """
    if d is not None and d != spec.d:
        raise InputValidationError(
            f"dimension argument {d} disagrees with spec.d = {spec.d}"
        )
    d_eff = spec.d
    s2e = sigma2_eps_override if sigma2_eps_override is not None else sigma2_eps(
        spec, q, eps
    )
    if not (s2e > 0.0):
        raise InputValidationError(f"sigma2_eps must be positive, got {s2e}")
    _, fprime = radial_profile(spec)
    fp = float(fprime(s2e))
    if fp <= 0.0:
        raise InputValidationError(
            f"radial slope f'(sigma2_eps) must be positive, got {fp}"
        )
    paren = 1.0 - d_eff / (2.0 * fp * s2e)
    value = paren / fp
    feasible = value > 0.0
    return BoundReport(
        value=value,
        kind="h_max",
        citation="lmc:moment-decay-step-cap",
        intermediates={"sigma2_eps": s2e, "f_prime": fp, "paren": paren},
        feasible=feasible,
        infeasibility=None
        if feasible
        else "no positive step size reaches this accuracy: the noise floor "
        "2hd exceeds the contraction at sigma2_eps",
    )


# ---------------------------------------------------------------------------
# Lower bounds and thresholds
# ---------------------------------------------------------------------------


def lower_bound_complexity(
    growth: GrowthParams,
    d: int,
    delta0: float,
    h: Optional[float] = None,
    nu: Optional[float] = None,
    threshold: Optional[float] = None,
    c: float = 1.0,
) -> BoundReport:
    """Complexity lower bound for reaching accuracy 1 from divergence delta0.

    Regimes by tail-growth exponent alpha:

    * alpha = 0 (log tails): T >= d e^{delta0/nu} / (4 nu) with
      nu = b - d (or the explicit ``nu``); N = T / h.
    * alpha in (0, 2): T >= (alpha^{2/alpha-1}/b)^{1-alpha/2} d^{1-alpha/2}
      delta0^{(2-alpha)^2/(2 alpha)} / (2 (2-alpha) b); N = T / h.
    * alpha = 2: N and T share the bound c ln(delta0/b) / (2 (1+c) b); this
      regime requires h < 1/b when h is given.

    ``threshold`` (from :func:`delta0_threshold`) gates validity: delta0
    below it flags the report infeasible.  The value is exact in delta0:
    in the alpha = 0 regime, value(delta0 + nu) / value(delta0) = e.
    """
    if d < 1:
        raise InputValidationError(f"d must be a positive integer, got {d}")
    if not (delta0 > 0.0) or not math.isfinite(delta0):
        raise InputValidationError(f"delta0 must be a positive real, got {delta0}")
    if h is not None and not (h > 0.0):
        raise InputValidationError(f"h must be positive, got {h}")
    alpha, b = growth.alpha, growth.b
    inter: dict = {"alpha": alpha, "b": b, "delta0": delta0}
    infeasibility = None
    if threshold is not None:
        inter["delta0_threshold"] = threshold
        if delta0 < threshold:
            infeasibility = (
                f"delta0 = {delta0} is below the validity threshold {threshold}"
            )

    if alpha == 0.0:
        nu_eff = nu if nu is not None else b - d
        if not (nu_eff > 0.0):
            raise InputValidationError(
                f"log-tail regime needs nu = b - d > 0, got {nu_eff}"
            )
        inter["nu"] = nu_eff
        time_t = d / (4.0 * nu_eff) * _safe_exp(delta0 / nu_eff)
        regime = "alpha0"
        citation = "lower:log-tail"
        iters = time_t / h if h is not None else None
    elif 0.0 < alpha < 2.0:
        log_t = (
            (1.0 - alpha / 2.0)
            * ((2.0 / alpha - 1.0) * math.log(alpha) - math.log(b) + math.log(d))
            + ((2.0 - alpha) ** 2 / (2.0 * alpha)) * math.log(delta0)
            - math.log(2.0 * (2.0 - alpha) * b)
        )
        time_t = _safe_exp(log_t)
        regime = "alpha_mid"
        citation = "lower:subexponential"
        iters = time_t / h if h is not None else None
    elif alpha == 2.0:
        if h is not None and not (h < 1.0 / b):
            raise InputValidationError(
                f"gaussian-tail regime requires h < 1/b = {1.0 / b}, got h={h}"
            )
        if delta0 <= b:
            time_t = 0.0
            infeasibility = infeasibility or (
                f"delta0 = {delta0} <= b = {b}: the log-decay bound is vacuous"
            )
        else:
            time_t = c * math.log(delta0 / b) / (2.0 * (1.0 + c) * b)
        inter["c"] = c
        regime = "alpha2"
        citation = "lower:gaussian"
        iters = time_t if h is not None else None
    else:
        raise InputValidationError(
            f"tail-growth exponent must lie in [0, 2], got {alpha}"
        )

    inter["time_T"] = time_t
    if iters is not None:
        inter["iters_N"] = iters
        value, kind = iters, "iters_N"
    else:
        value, kind = time_t, "time_T"
    feasible = infeasibility is None and math.isfinite(value) and value > 0.0
    if not feasible and infeasibility is None:
        infeasibility = "bound is non-finite or non-positive"
    return BoundReport(
        value=value,
        kind=kind,
        citation=citation,
        regime=regime,
        intermediates=inter,
        feasible=feasible,
        infeasibility=infeasibility,
    )


def delta0_threshold(
    regime: str,
    growth: GrowthParams,
    d: int,
    q: float,
    Z: float,
    pi_moment: float,
    v0: float = 0.0,
    c: float = 1.0,
) -> BoundReport:
    """Initial-divergence level above which the matching lower bound holds.

    The max-of-terms validity threshold for :func:`lower_bound_complexity`,
    per regime ("alpha0", "alpha_mid", "alpha2").  ``Z`` is the target's
    normalizing constant, ``pi_moment`` the order-2q/(q-1) radial moment,
    and ``v0`` the potential's value at the origin (it shifts the
    normalizing constant in the alpha = 2 regime).
    """
    if regime not in ("alpha0", "alpha_mid", "alpha2"):
        raise InputValidationError(f"unknown regime {regime!r}")
    if d < 1:
        raise InputValidationError(f"d must be a positive integer, got {d}")
    if not (q > 1.0):
        raise InputValidationError(f"q must exceed 1, got {q}")
    if not (Z > 0.0) or not math.isfinite(Z):
        raise InputValidationError(f"Z must be a finite positive real, got {Z}")
    if not (pi_moment > 0.0) or not math.isfinite(pi_moment):
        raise InputValidationError(
            f"pi_moment must be a finite positive real, got {pi_moment}"
        )
    alpha, b = growth.alpha, growth.b
    expected = {"alpha0": alpha == 0.0, "alpha_mid": 0.0 < alpha < 2.0,
                "alpha2": alpha == 2.0}[regime]
    if not expected:
        raise InputValidationError(
            f"regime {regime!r} is inconsistent with tail-growth alpha = {alpha}"
        )
    frac = (q - 1.0) / q
    log_z = math.log(Z)
    log_pm = math.log(pi_moment)
    if regime == "alpha0":
        nu = b - d
        if not (nu > 0.0):
            raise InputValidationError(f"log-tail regime needs b - d > 0, got {nu}")
        t1 = 1.0 + 2.0 * (
            log_z
            + 0.5 * (d + nu) * (math.log(d + nu) - 1.0)
            - 0.5 * d * math.log(2.0 * math.pi)
        )
        t2 = nu * (1.0 + math.log(2.0) + frac * log_pm - math.log(d))
        t3 = nu
    elif regime == "alpha_mid":
        e1 = alpha / (2.0 - alpha)
        log_ratio = (1.0 + 2.0 * log_z) / d - math.log(2.0 * math.pi)
        t1 = _safe_exp(
            e1 * (math.log(b) + max(log_ratio, 0.0)) - math.log(alpha)
        )
        t2 = _safe_exp(
            e1
            * (
                (2.0 / (2.0 - alpha)) * math.log(2.0)
                + 1.0
                + math.log(b)
                + frac * log_pm
                - (2.0 / alpha - 1.0) * math.log(alpha)
                - math.log(d)
            )
        )
        t3 = 1.0 / alpha
    else:
        t1 = b * d * _safe_exp(2.0 * (log_z + v0) / d - 1.0) / (4.0 * math.pi)
        t2 = b * _safe_exp((1.0 + c) * frac * (1.0 + log_pm))
        t3 = -math.inf
    value = max(t1, t2, t3)
    inter = {"term_normalizer": t1, "term_moment": t2}
    if t3 > -math.inf:
        inter["term_floor"] = t3
    feasible = math.isfinite(value)
    return BoundReport(
        value=value,
        kind="delta0_min",
        citation="lower:delta0-threshold",
        regime=regime,
        intermediates=inter,
        feasible=feasible,
        infeasibility=None if feasible else "threshold overflowed to inf",
    )


# ---------------------------------------------------------------------------
# Initialization divergences
# ---------------------------------------------------------------------------


def _rinf_bound_general(spec: PotentialSpec, sigma2: float) -> tuple[float, dict]:
    """Sup-log-ratio bound for N(0, sigma2 I) against a heavy-tailed target."""
    d = spec.d
    log_z = log_normalizing_constant(spec)
    if isinstance(spec, GenCauchy):
        nu = spec.nu
        if sigma2 < 1.0 / (d + nu):
            raise InputValidationError(
                f"log-tail bound needs sigma2 >= 1/(d+nu) = {1.0 / (d + nu)}, "
                f"got {sigma2}"
            )
        value = (
            0.5 * nu * math.log(sigma2)
            + log_z
            + 0.5 * (d + nu) * (math.log(d + nu) - 1.0)
            - 0.5 * d * math.log(2.0 * math.pi)
            + 0.5 / sigma2
        )
        return value, {"log_Z": log_z, "nu": nu}
    if isinstance(spec, Sublinear):
        g = growth_params(spec)
        b, alpha = g.b, g.alpha
        if sigma2 < 1.0 / b:
            raise InputValidationError(
                f"subexponential bound needs sigma2 >= 1/b = {1.0 / b}, got {sigma2}"
            )
        # V(0) - b/alpha corrects for the potential's value at the origin;
        # it vanishes at unit scale (lam = 1).
        origin_term = 1.0 - b / alpha
        peak = b ** (2.0 / (2.0 - alpha)) * sigma2 ** (alpha / (2.0 - alpha)) / alpha
        value = (
            peak
            + origin_term
            + log_z
            - 0.5 * d * math.log(2.0 * math.pi * sigma2)
            + 0.5 / sigma2
        )
        return value, {"log_Z": log_z, "b": b, "peak_term": peak}
    raise UnsupportedFamilyError(
        f"no sup-log-ratio bound for {type(spec).__name__}; gaussian targets "
        "have infinite sup-log-ratio at sigma2 > 1 - use kind='KL'"
    )


def init_divergence_bound(
    spec: PotentialSpec, sigma2: float, kind: str, T: float = 1.0
) -> BoundReport:
    """Divergence of the Gaussian start N(0, sigma2 I_d) from the target.

    kind = "Rinf": sup-log-ratio bound (GenCauchy and Sublinear families).
    kind = "KL": relative entropy (Gaussian family; exact there).
    kind = "R2_hat": order-2 Renyi against the modified target, via
    d ln 2 + R_2(N(0, 2 sigma2 I) || pi); needs sigma2 <= 3072 T.  For the
    Gaussian family the inner term is the exact closed form (finite only
    for sigma2 < 1); for heavy-tailed families it is the "Rinf" bound at
    doubled variance.
    """
    if not (sigma2 > 0.0) or not math.isfinite(sigma2):
        raise InputValidationError(f"sigma2 must be a positive real, got {sigma2}")
    d = spec.d
    if kind == "Rinf":
        if isinstance(spec, Gaussian):
            raise InputValidationError(
                "sup-log-ratio of a wide Gaussian start against a gaussian "
                "target is infinite; use kind='KL'"
            )
        value, inter = _rinf_bound_general(spec, sigma2)
    elif kind == "KL":
        if not isinstance(spec, Gaussian):
            raise UnsupportedFamilyError(
                "the KL initialization bound is stated for gaussian-tail "
                "targets; use kind='Rinf' for heavy-tailed families"
            )
        b = growth_params(spec).b
        log_z = log_normalizing_constant(spec)
        value = (
            0.5 * d * (b * sigma2 - 1.0)
            + log_z
            - 0.5 * d * math.log(2.0 * math.pi * sigma2)
        )
        inter = {"log_Z": log_z, "b": b}
    elif kind == "R2_hat":
        if not (T > 0.0):
            raise InputValidationError(f"T must be positive, got {T}")
        if sigma2 > 3072.0 * T:
            raise InputValidationError(
                f"modified-target comparison needs sigma2 <= 3072 T = {3072.0 * T}, "
                f"got {sigma2}"
            )
        if isinstance(spec, Gaussian):
            if sigma2 >= 1.0:
                raise InputValidationError(
                    "order-2 Renyi of N(0, 2 sigma2) against the unit gaussian "
                    "target is infinite for sigma2 >= 1"
                )
            inner = gaussian_renyi(2.0, 2.0 * sigma2, 1.0, d)
            inter = {"inner_r2": inner}
        else:
            inner, inter = _rinf_bound_general(spec, 2.0 * sigma2)
            inter["inner_rinf"] = inner
        value = d * math.log(2.0) + inner
    else:
        raise InputValidationError(
            f"kind must be 'Rinf', 'KL', or 'R2_hat', got {kind!r}"
        )
    inter["sigma2"] = sigma2
    feasible = math.isfinite(value)
    return BoundReport(
        value=value,
        kind="init_div",
        citation="init:gaussian-start",
        intermediates=inter,
        feasible=feasible,
        infeasibility=None if feasible else "bound is non-finite",
    )


def gen_cauchy_init_bound_simplified(d: int, nu: float, sigma2: float) -> float:
    """Closed display form of the log-tail Gaussian-start bound, d >= 2.

    (nu/2) ln sigma2 + ln(2^{nu/2} Gamma(nu/2)) + ln((d+nu)/(2e)).  This
    display drops the +1/(2 sigma2) remainder of the generic bound, so it
    is not itself a certified upper bound at small sigma2; use
    :func:`init_divergence_bound` for domination.
    """
    if d < 2:
        raise InputValidationError(f"the display form requires d >= 2, got {d}")
    if not (nu > 0.0):
        raise InputValidationError(f"nu must be positive, got {nu}")
    if sigma2 < 1.0 / (d + nu):
        raise InputValidationError(
            f"requires sigma2 >= 1/(d+nu) = {1.0 / (d + nu)}, got {sigma2}"
        )
    return (
        0.5 * nu * math.log(sigma2)
        + 0.5 * nu * math.log(2.0)
        + math.lgamma(0.5 * nu)
        + math.log((d + nu) / (2.0 * math.e))
    )


def sublinear_init_bound_simplified(d: int, alpha: float, sigma2: float) -> float:
    """Closed display form of the subexponential Gaussian-start bound, d >= 2.

    (alpha sigma2)^{alpha/(2-alpha)} + (d/alpha - d/2) ln(d/alpha)
    - (d/2) ln(2 sigma2) + 1/(2 sigma2), valid for sigma2 >= 1/alpha.
    """
    if d < 2:
        raise InputValidationError(f"the display form requires d >= 2, got {d}")
    if not (0.0 < alpha < 1.0):
        raise InputValidationError(f"alpha must lie in (0, 1), got {alpha}")
    if sigma2 < 1.0 / alpha:
        raise InputValidationError(
            f"requires sigma2 >= 1/alpha = {1.0 / alpha}, got {sigma2}"
        )
    return (
        (alpha * sigma2) ** (alpha / (2.0 - alpha))
        + (d / alpha - 0.5 * d) * math.log(d / alpha)
        - 0.5 * d * math.log(2.0 * sigma2)
        + 0.5 / sigma2
    )


def warm_start_divergence_bound(
    spec: PotentialSpec, T: float = 1.0, target: str = "pi"
) -> BoundReport:
    """Sup-log-ratio of the warm start N(0, (2L+1)^{-1} I_d) from the target.

    target = "pi":     2 + L + V(0) - min V + (d/2) ln(12 m^2 L)
    target = "pi_hat": 3 + L + V(0) - min V + (d/2) ln(12 (m + 6144 T)^2 L)

    with L the Holder constant and m half the median radius.  min V is
    V(0) for the built-in families (radial profiles are non-decreasing);
    for custom radial targets it is estimated on a dense grid.
    """
    if target not in ("pi", "pi_hat"):
        raise InputValidationError(f"target must be 'pi' or 'pi_hat', got {target!r}")
    if not (T > 0.0):
        raise InputValidationError(f"T must be positive, got {T}")
    d = spec.d
    hs = holder_smoothness(spec)
    L = hs.L
    m = modified_target_m(spec)
    f, _ = radial_profile(spec)
    v0 = float(f(0.0))
    grid = np.concatenate([[0.0], np.geomspace(1e-8, max(64.0 * m, 1.0) ** 2, 4097)])
    v_min = float(np.min(np.asarray(f(grid), dtype=float)))
    if target == "pi":
        value = 2.0 + L + v0 - v_min + 0.5 * d * math.log(12.0 * m * m * L)
        radius = m
    else:
        radius = m + 6144.0 * T
        value = 3.0 + L + v0 - v_min + 0.5 * d * math.log(12.0 * radius * radius * L)
    inter = {
        "L": L,
        "m": m,
        "v0": v0,
        "v_min": v_min,
        "init_variance": 1.0 / (2.0 * L + 1.0),
        "log_radius_term": 0.5 * d * math.log(12.0 * radius * radius * L),
    }
    feasible = math.isfinite(value)
    return BoundReport(
        value=value,
        kind="init_div",
        citation="init:warm-start",
        intermediates=inter,
        feasible=feasible,
        infeasibility=None if feasible else "bound is non-finite",
    )
