"""Quadrature-based falsification checks of the library's functional
inequalities, and a 1D Fokker-Planck solver for Renyi-decay experiments.

The inequality checkers evaluate both sides of a variance inequality for a
fixed battery of smooth test functions and report any violation beyond a
1e-9 quadrature slack.  A finite test set can only falsify, never prove;
every report says so, and every checker has a built-in falsification mode
(the constant divided by 1e6) demonstrating that it can detect violations.

The solver evolves a cell-averaged density on a non-uniform 1D grid with a
conservative explicit finite-volume scheme in the density-ratio variable
u = rho/pi: the face flux is pi_face * (u_{i+1} - u_i) / delta_face with
geometric-mean face weights.  The scheme conserves mass to roundoff, keeps
the target exactly stationary, and satisfies a discrete analogue of the
dissipation identity dF_q/dt = -(4(q-1)/q) E_pi |grad u^{q/2}|^2.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from .targets import (
    InputValidationError,
    NumericsError,
    PotentialSpec,
    UnsupportedFamilyError,
    log_normalizing_constant,
    radial_profile,
    tail_mass,
)

__all__ = [
    "DensityGrid",
    "TestFunction",
    "TestFunctionSet",
    "default_test_functions",
    "FIReport",
    "wpi_check",
    "converse_pi_check",
    "weighted_pi_check",
    "make_grid",
    "gaussian_on_grid",
    "pi_on_grid",
    "FPTrajectory",
    "fokker_planck_evolve_1d",
    "renyi_quadrature",
    "fq_gq",
    "grid_r_inf",
    "write_fp_csv",
]


# ---------------------------------------------------------------------------
# Density grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityGrid:
    """Cell-averaged 1D density: sorted centers, positive widths, unit mass."""

    nodes: np.ndarray
    widths: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        widths = np.asarray(self.widths, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "values", values)
        if nodes.ndim != 1 or nodes.shape != widths.shape or nodes.shape != values.shape:
            raise InputValidationError(
                "nodes, widths, values must be 1D arrays of equal length"
            )
        if nodes.size < 2:
            raise InputValidationError("a density grid needs at least 2 cells")
        if np.any(np.diff(nodes) <= 0.0):
            raise InputValidationError("nodes must be strictly increasing")
        if np.any(widths <= 0.0) or not np.all(np.isfinite(widths)):
            raise InputValidationError("widths must be positive finite reals")
        if np.any(values < 0.0) or not np.all(np.isfinite(values)):
            raise InputValidationError("values must be non-negative finite reals")
        mass = float(values @ widths)
        if abs(mass - 1.0) > 1e-8:
            raise InputValidationError(
                f"grid mass must equal 1 within 1e-8, got {mass!r}"
            )

    @property
    def mass(self) -> float:
        return float(self.values @ self.widths)

    @property
    def m2(self) -> float:
        return float((self.values * self.nodes**2) @ self.widths)


def _cell_edges(core_halfwidth: float, n_core: int, window: float, n_tail: int
                ) -> np.ndarray:
    """Uniform core on [-c, c] plus geometric tail cells out to the window."""
    core = np.linspace(-core_halfwidth, core_halfwidth, n_core + 1)
    if window <= core_halfwidth:
        return core
    tail = np.geomspace(core_halfwidth, window, n_tail + 1)[1:]
    return np.concatenate([-tail[::-1], core, tail])


def _cell_average_density(
    log_density: Callable[[np.ndarray], np.ndarray], edges: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cell centers, widths, and cell-averaged density via per-cell Simpson."""
    n_sub = 4
    n_cells = len(edges) - 1
    # Per-cell Simpson nodes: offsets 0, 1/4, 1/2, 3/4, 1 of each cell.
    frac = np.linspace(0.0, 1.0, n_sub + 1)
    lo = edges[:-1][:, None]
    w = np.diff(edges)[:, None]
    pts = lo + w * frac[None, :]
    dens = np.exp(log_density(pts.reshape(-1))).reshape(n_cells, n_sub + 1)
    simpson_w = np.array([1.0, 4.0, 2.0, 4.0, 1.0]) / 12.0
    masses = (dens * simpson_w).sum(axis=1) * w[:, 0]
    centers = 0.5 * (edges[:-1] + edges[1:])
    widths = np.diff(edges)
    return centers, widths, masses / widths


def make_grid(
    spec: PotentialSpec,
    n_core: int = 1536,
    n_tail: int = 256,
    core_halfwidth: Optional[float] = None,
    window_tail_mass: float = 1e-10,
) -> DensityGrid:
    """Grid-discretized target: dense uniform core, geometric tail cells.

    The window is wide enough that the target mass beyond it is below
    ``window_tail_mass``; the density is renormalized on the window (a
    relative adjustment of at most the truncated mass).  The core covers
    the target's central 1 - 1e-4 mass (override with ``core_halfwidth``).
    """
    if spec.d != 1:
        raise InputValidationError("density grids are 1-dimensional")
    if core_halfwidth is None:
        core_halfwidth = 1.5 * _tail_quantile(spec, 1e-4)
    window = max(_tail_quantile(spec, window_tail_mass), 2.0 * core_halfwidth)
    edges = _cell_edges(core_halfwidth, n_core, window, n_tail)
    f, _ = radial_profile(spec)
    log_z = log_normalizing_constant(spec)

    def log_pi(x: np.ndarray) -> np.ndarray:
        return -np.asarray(f(x * x), dtype=float) - log_z

    centers, widths, values = _cell_average_density(log_pi, edges)
    total = float(values @ widths)
    if total < 1.0 - 1e-6:
        raise NumericsError(
            f"grid window captured only {total} of the target mass"
        )
    return DensityGrid(nodes=centers, widths=widths, values=values / total)


def _tail_quantile(spec: PotentialSpec, mass: float) -> float:
    """Radius beyond which the target's two-sided mass is at most ``mass``.

    Shallow quantiles (mass >= 1e-5) are exact, by root-finding on the
    quadrature tail mass.  Deeper ones invert an analytic tail estimate
    instead (quadrature degrades in the far tail), which errs on the wide
    side -- harmless for window selection.
    """
    from .targets import Gaussian, GenCauchy, Sublinear

    if mass >= 1e-5:
        hi = 8.0
        while tail_mass(spec, hi) > mass:
            hi *= 2.0
            if hi > 1e14:
                raise NumericsError("tail quantile search exceeded 1e14")
        return float(
            brentq(lambda r: tail_mass(spec, r) - mass, 1e-6, hi, xtol=1e-9)
        )
    log_mass = math.log(mass)
    if isinstance(spec, GenCauchy):
        # (nu+d)^{nu/2} R^{-nu} = mass
        return math.exp(
            (0.5 * spec.nu * math.log(spec.nu + spec.d) - log_mass) / spec.nu
        )
    if isinstance(spec, Sublinear):
        # e^{1/2} 2^{d/alpha} exp(-(1+R^2)^{alpha/2}/2) = mass, then rescale
        # by lam^{-1/alpha} (the family is a dilation of the lam = 1 case).
        a = 2.0 * (0.5 + (spec.d / spec.alpha) * math.log(2.0) - log_mass)
        r1 = math.sqrt(max(a ** (2.0 / spec.alpha) - 1.0, 1.0))
        return r1 / spec.lam ** (1.0 / spec.alpha)
    if isinstance(spec, Gaussian):
        from scipy.special import erfcinv

        return math.sqrt(2.0) * float(erfcinv(mass))
    raise UnsupportedFamilyError(
        f"no deep tail quantile for {type(spec).__name__}; "
        "pass an explicit window"
    )


def pi_on_grid(spec: PotentialSpec, grid: DensityGrid) -> np.ndarray:
    """Cell-averaged target density on an existing grid (window-renormalized)."""
    edges = np.empty(len(grid.nodes) + 1)
    edges[:-1] = grid.nodes - 0.5 * grid.widths
    edges[-1] = grid.nodes[-1] + 0.5 * grid.widths[-1]
    f, _ = radial_profile(spec)
    log_z = log_normalizing_constant(spec)

    def log_pi(x: np.ndarray) -> np.ndarray:
        return -np.asarray(f(x * x), dtype=float) - log_z

    _, _, values = _cell_average_density(log_pi, edges)
    total = float(values @ grid.widths)
    return values / total


def gaussian_on_grid(grid: DensityGrid, sigma2: float) -> DensityGrid:
    """N(0, sigma2) discretized on an existing grid's cells.

    The window must capture the gaussian: truncating more than 1e-6 of its
    mass is rejected (it would silently bias every downstream functional).
    """
    if not (sigma2 > 0.0):
        raise InputValidationError(f"sigma2 must be positive, got {sigma2}")
    edges = np.empty(len(grid.nodes) + 1)
    edges[:-1] = grid.nodes - 0.5 * grid.widths
    edges[-1] = grid.nodes[-1] + 0.5 * grid.widths[-1]

    def log_rho(x: np.ndarray) -> np.ndarray:
        return -0.5 * x * x / sigma2 - 0.5 * math.log(2.0 * math.pi * sigma2)

    _, _, values = _cell_average_density(log_rho, edges)
    total = float(values @ grid.widths)
    if total < 1.0 - 1e-6:
        raise InputValidationError(
            f"grid window truncates {1.0 - total:.3g} of N(0, {sigma2}); "
            "widen the grid"
        )
    return DensityGrid(nodes=grid.nodes, widths=grid.widths, values=values / total)


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """A smooth test function with its closed-form derivative."""

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    fprime: Callable[[np.ndarray], np.ndarray]
    support: Optional[float] = None  # |x| beyond which f vanishes, if compact


@dataclass(frozen=True)
class TestFunctionSet:
    functions: tuple[TestFunction, ...]

    def __len__(self) -> int:
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)


def _bump_pair(a: float):
    """The mollifier B(x) = exp(1 - 1/(1 - (x/a)^2)) on (-a, a) and B'."""

    def bump(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        t2 = (x / a) ** 2
        inside = 1.0 - t2 > 1e-12
        out = np.zeros_like(x)
        g = 1.0 - t2[inside]
        out[inside] = np.exp(1.0 - 1.0 / g)
        return out

    def bump_prime(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        t = x / a
        g = 1.0 - t * t
        inside = g > 1e-12
        out = np.zeros_like(x)
        gi = g[inside]
        out[inside] = np.exp(1.0 - 1.0 / gi) * (-2.0 * t[inside] / (a * gi * gi))
        return out

    return bump, bump_prime


def default_test_functions() -> TestFunctionSet:
    """The standard battery: 22 smooth functions with analytic derivatives.

    14 polynomial-times-bump functions (degrees 0..6, support half-widths 2
    and 8), 6 bounded tanh ramps, and 2 oscillatory sine-times-bump
    functions.  All have finite oscillation; the compactly supported ones
    record their support for quadrature windowing.
    """
    funcs: list[TestFunction] = []
    for a in (2.0, 8.0):
        bump, bump_p = _bump_pair(a)
        for deg in range(7):

            def f(x, _d=deg, _b=bump):
                x = np.asarray(x, dtype=float)
                return x**_d * _b(x)

            def fp(x, _d=deg, _b=bump, _bp=bump_p):
                x = np.asarray(x, dtype=float)
                poly_d = _d * x ** (_d - 1) if _d > 0 else np.zeros_like(x)
                return poly_d * _b(x) + x**_d * _bp(x)

            funcs.append(
                TestFunction(name=f"poly{deg}_bump{a:g}", f=f, fprime=fp, support=a)
            )
    for c, s in ((0.0, 1.0), (0.0, 0.25), (1.0, 0.5), (-2.0, 2.0), (5.0, 3.0),
                 (0.0, 4.0)):

        def f(x, _c=c, _s=s):
            return np.tanh((np.asarray(x, dtype=float) - _c) / _s)

        def fp(x, _c=c, _s=s):
            th = np.tanh((np.asarray(x, dtype=float) - _c) / _s)
            return (1.0 - th * th) / _s

        funcs.append(TestFunction(name=f"tanh_c{c:g}_s{s:g}", f=f, fprime=fp))
    bump4, bump4_p = _bump_pair(4.0)
    for omega in (2.0, 5.0):

        def f(x, _w=omega):
            x = np.asarray(x, dtype=float)
            return np.sin(_w * x) * bump4(x)

        def fp(x, _w=omega):
            x = np.asarray(x, dtype=float)
            return _w * np.cos(_w * x) * bump4(x) + np.sin(_w * x) * bump4_p(x)

        funcs.append(TestFunction(name=f"sin{omega:g}_bump4", f=f, fprime=fp,
                                  support=4.0))
    return TestFunctionSet(functions=tuple(funcs))


# ---------------------------------------------------------------------------
# Inequality checkers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FIReport:
    """Outcome of one inequality battery.

    ``entries`` holds one dict per (function, resolution) pair with both
    sides and the margin (rhs - lhs; negative means violated).  A finite
    test set can only falsify an inequality, never prove it; ``note``
    restates this in every report.
    """

    check: str
    entries: tuple[dict, ...]
    n_violations: int
    max_violation: float
    passed: bool
    falsify: bool
    note: str = (
        "a finite test-function battery can only falsify a for-all-f "
        "inequality, never prove it"
    )

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "passed": self.passed,
            "falsify": self.falsify,
            "n_violations": self.n_violations,
            "max_violation": self.max_violation,
            "entries": list(self.entries),
            "note": self.note,
        }


_SLACK = 1e-9


def _pi_quadrature(
    spec: PotentialSpec,
    integrand: Callable[[np.ndarray], np.ndarray],
    window: float,
    support: Optional[float],
    points: Sequence[float],
) -> float:
    """integral of integrand(x) pi(x) dx over [-window, window] (or support)."""
    f, _ = radial_profile(spec)
    log_z = log_normalizing_constant(spec)

    def full(x: float) -> float:
        xa = np.asarray([x])
        val = integrand(xa)[0] * math.exp(-float(f(xa * xa)[0]) - log_z)
        return val

    lo, hi = -window, window
    if support is not None:
        lo, hi = max(lo, -support), min(hi, support)
    pts = sorted(p for p in points if lo < p < hi)
    with warnings.catch_warnings():
        # The explicit error-estimate gate below is the accuracy control;
        # quad's tolerance warnings on heavy-tail integrands are redundant.
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(full, lo, hi, points=pts or None, limit=400,
                        epsabs=1e-13, epsrel=1e-11)
    if err > 1e-7 * max(1.0, abs(val)):
        raise NumericsError(
            f"quadrature error {err} too large for value {val}"
        )
    return val


def _function_stats(
    spec: PotentialSpec, tf: TestFunction, window: float, weight: Optional[
        Callable[[np.ndarray], np.ndarray]] = None
) -> dict:
    """Var_pi(f), E_pi[w f'^2], Osc(f), and weighted first moments."""
    kinks = [-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0]
    mean = _pi_quadrature(spec, tf.f, window, tf.support, kinks)
    second = _pi_quadrature(spec, lambda x: tf.f(x) ** 2, window, tf.support, kinks)
    if weight is None:
        grad2 = _pi_quadrature(
            spec, lambda x: tf.fprime(x) ** 2, window, tf.support, kinks
        )
    else:
        grad2 = _pi_quadrature(
            spec, lambda x: weight(x) * tf.fprime(x) ** 2, window, tf.support, kinks
        )
    span = tf.support if tf.support is not None else window
    xs = np.linspace(-span, span, 65537)
    fv = tf.f(xs)
    osc = float(fv.max() - fv.min())
    return {
        "mean": mean,
        "var": max(second - mean * mean, 0.0),
        "grad2": grad2,
        "osc": osc,
    }


def wpi_check(
    spec: PotentialSpec,
    beta: Callable[[float], float],
    fset: TestFunctionSet,
    r_grid: Sequence[float],
    falsify: bool = False,
) -> FIReport:
    """Check Var_pi(f) <= beta(r) E_pi[f'^2] + r Osc(f)^2 for all (f, r).

    ``falsify=True`` divides the weighting by 1e6, which must produce
    violations on a sound battery (it demonstrates the checker has power).
    """
    if spec.d != 1:
        raise InputValidationError("inequality checks are 1-dimensional")
    r_grid = [float(r) for r in r_grid]
    if not r_grid or any(r <= 0.0 for r in r_grid):
        raise InputValidationError("r_grid must be non-empty with positive entries")
    scale = 1e-6 if falsify else 1.0
    window = _tail_quantile(spec, 1e-13)
    entries: list[dict] = []
    worst = 0.0
    n_bad = 0
    for tf in fset:
        stats = _function_stats(spec, tf, window)
        for r in r_grid:
            rhs = scale * beta(r) * stats["grad2"] + r * stats["osc"] ** 2
            margin = rhs + _SLACK - stats["var"]
            violated = margin < 0.0
            n_bad += violated
            worst = min(worst, margin)
            entries.append(
                {
                    "function": tf.name,
                    "r": r,
                    "lhs_var": stats["var"],
                    "rhs": rhs,
                    "margin": margin,
                    "violated": bool(violated),
                }
            )
    return FIReport(
        check="wpi" if not falsify else "wpi-falsify",
        entries=tuple(entries),
        n_violations=int(n_bad),
        max_violation=float(-worst),
        passed=(n_bad == 0),
        falsify=falsify,
    )


def converse_pi_check(
    spec: PotentialSpec, fset: TestFunctionSet, falsify: bool = False
) -> FIReport:
    """Check inf_c int (f-c)^2 w dpi <= C int f'^2 dpi, w(x) = 1/(1+x^2).

    The constant is 1/(d+nu) when nu >= d+2 and 2/nu otherwise.  The inf
    over c is the w-weighted mean, solved exactly.
    """
    from .targets import GenCauchy

    if not isinstance(spec, GenCauchy) or spec.d != 1:
        raise InputValidationError(
            "the converse inequality check targets 1D log-tailed families"
        )
    nu, d = spec.nu, spec.d
    c_const = 1.0 / (d + nu) if nu >= d + 2 else 2.0 / nu
    scale = 1e-6 if falsify else 1.0
    window = _tail_quantile(spec, 1e-13)
    w = lambda x: 1.0 / (1.0 + np.asarray(x, dtype=float) ** 2)
    kinks = [-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0]
    entries: list[dict] = []
    worst = 0.0
    n_bad = 0
    for tf in fset:
        w_mass = _pi_quadrature(spec, w, window, None, kinks)
        fw = _pi_quadrature(spec, lambda x: tf.f(x) * w(x), window, tf.support,
                            kinks)
        f2w = _pi_quadrature(spec, lambda x: tf.f(x) ** 2 * w(x), window,
                             tf.support, kinks)
        lhs = max(f2w - fw * fw / w_mass, 0.0)
        grad2 = _pi_quadrature(spec, lambda x: tf.fprime(x) ** 2, window,
                               tf.support, kinks)
        rhs = scale * c_const * grad2
        margin = rhs + _SLACK - lhs
        violated = margin < 0.0
        n_bad += violated
        worst = min(worst, margin)
        entries.append(
            {
                "function": tf.name,
                "lhs_weighted_var": lhs,
                "rhs": rhs,
                "margin": margin,
                "violated": bool(violated),
            }
        )
    return FIReport(
        check="converse-pi" if not falsify else "converse-pi-falsify",
        entries=tuple(entries),
        n_violations=int(n_bad),
        max_violation=float(-worst),
        passed=(n_bad == 0),
        falsify=falsify,
    )


def weighted_pi_check(
    spec: PotentialSpec, fset: TestFunctionSet, falsify: bool = False
) -> FIReport:
    """Check Var_pi(f) <= e C_{d,alpha} int |x|^{2(1-alpha)} f'^2 dpi.

    C_{d,alpha} = 12 d / alpha^3 + (d + alpha) / alpha^4 (upper estimate).
    """
    from .targets import Sublinear

    if not isinstance(spec, Sublinear) or spec.d != 1:
        raise InputValidationError(
            "the weighted inequality check targets 1D subexponential families"
        )
    alpha, d = spec.alpha, spec.d
    if not (0.0 < alpha < 1.0):
        raise InputValidationError(
            f"the weighted inequality needs alpha in (0, 1), got {alpha}"
        )
    c_const = 12.0 * d / alpha**3 + (d + alpha) / alpha**4
    scale = 1e-6 if falsify else 1.0
    window = _tail_quantile(spec, 1e-13)
    expo = 2.0 * (1.0 - alpha)
    weight = lambda x: np.abs(np.asarray(x, dtype=float)) ** expo
    entries: list[dict] = []
    worst = 0.0
    n_bad = 0
    for tf in fset:
        stats = _function_stats(spec, tf, window, weight=weight)
        rhs = scale * math.e * c_const * stats["grad2"]
        margin = rhs + _SLACK - stats["var"]
        violated = margin < 0.0
        n_bad += violated
        worst = min(worst, margin)
        entries.append(
            {
                "function": tf.name,
                "lhs_var": stats["var"],
                "rhs": rhs,
                "margin": margin,
                "violated": bool(violated),
            }
        )
    return FIReport(
        check="weighted-pi" if not falsify else "weighted-pi-falsify",
        entries=tuple(entries),
        n_violations=int(n_bad),
        max_violation=float(-worst),
        passed=(n_bad == 0),
        falsify=falsify,
    )


# ---------------------------------------------------------------------------
# Fokker-Planck evolution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FPTrajectory:
    """Recorded Fokker-Planck evolution on a fixed grid."""

    times: np.ndarray
    densities: tuple[DensityGrid, ...]
    dt: float

    def __len__(self) -> int:
        return len(self.densities)


def fokker_planck_evolve_1d(
    spec: PotentialSpec,
    rho0: DensityGrid,
    t_final: float,
    dt: float,
    record_every: Optional[int] = None,
) -> FPTrajectory:
    """Evolve rho0 under the overdamped Langevin Fokker-Planck flow to t_final.

    Conservative explicit finite-volume scheme in u = rho/pi with
    geometric-mean face weights and zero-flux boundaries.  The stability
    bound dt * max_i coef_i <= 0.9 is enforced up front (the error message
    suggests a valid dt).  Mass is conserved to roundoff at every step and
    the target itself is exactly stationary.
    """
    if not (t_final > 0.0):
        raise InputValidationError(f"t_final must be positive, got {t_final}")
    if not (dt > 0.0):
        raise InputValidationError(f"dt must be positive, got {dt}")
    pi_vals = pi_on_grid(spec, rho0)
    if np.any(pi_vals <= 0.0):
        raise NumericsError("target density underflowed on the grid")
    nodes, widths = rho0.nodes, rho0.widths
    delta = np.diff(nodes)
    pi_face = np.sqrt(pi_vals[:-1] * pi_vals[1:])
    cond = pi_face / delta
    # Explicit-Euler stability: the update coefficient on cell i is
    # (cond_{i-1/2} + cond_{i+1/2}) / (w_i pi_i); require dt * coef <= 0.9.
    coef = np.zeros_like(nodes)
    coef[:-1] += cond
    coef[1:] += cond
    coef /= widths * pi_vals
    dt_max = 0.9 / float(coef.max())
    if dt > dt_max:
        raise InputValidationError(
            f"dt = {dt} violates the explicit-scheme stability bound; "
            f"use dt <= {dt_max:.6g}"
        )
    n_steps = int(math.ceil(t_final / dt - 1e-12))
    if record_every is None:
        record_every = max(1, n_steps // 200)

    rho = rho0.values.copy()
    times = [0.0]
    frames = [DensityGrid(nodes=nodes, widths=widths, values=rho.copy())]
    for k in range(1, n_steps + 1):
        u = rho / pi_vals
        flux = cond * np.diff(u)
        div = np.zeros_like(rho)
        div[:-1] += flux
        div[1:] -= flux
        rho = rho + dt * div / widths
        if k % record_every == 0 or k == n_steps:
            np.clip(rho, 0.0, None, out=rho)
            times.append(k * dt)
            frames.append(DensityGrid(nodes=nodes, widths=widths,
                                      values=rho.copy()))
    return FPTrajectory(times=np.asarray(times), densities=tuple(frames), dt=dt)


def fq_gq(rho: DensityGrid, spec: PotentialSpec, q: float) -> tuple[float, float]:
    """Moment and dissipation functionals of the density ratio on the grid.

    F_q = E_pi[(rho/pi)^q]; G_q = (4/q^2) E_pi |grad (rho/pi)^{q/2}|^2 with
    the gradient taken between adjacent cells.  Returns (inf, inf) if rho
    puts mass where the grid target has underflowed to zero.
    """
    if not (q > 1.0):
        raise InputValidationError(f"q must exceed 1, got {q}")
    pi_vals = pi_on_grid(spec, rho)
    bad = (pi_vals < 1e-300) & (rho.values > 0.0)
    if np.any(bad):
        return math.inf, math.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(pi_vals > 0.0, rho.values / pi_vals, 0.0)
    f_q = float((pi_vals * u**q) @ rho.widths)
    v = u ** (0.5 * q)
    delta = np.diff(rho.nodes)
    pi_face = np.sqrt(pi_vals[:-1] * pi_vals[1:])
    g_q = (4.0 / q**2) * float(pi_face @ (np.diff(v) ** 2 / delta))
    return f_q, g_q


def renyi_quadrature(rho: DensityGrid, spec: PotentialSpec, q: float) -> float:
    """Order-q Renyi divergence of the grid density from the target."""
    f_q, _ = fq_gq(rho, spec, q)
    if not math.isfinite(f_q):
        return math.inf
    if f_q <= 0.0:
        return math.inf
    return math.log(f_q) / (q - 1.0)


def grid_r_inf(rho: DensityGrid, spec: PotentialSpec) -> float:
    """Sup over cells of ln(rho/pi): the grid sup-log-ratio divergence."""
    pi_vals = pi_on_grid(spec, rho)
    pos = rho.values > 0.0
    if np.any(pos & (pi_vals < 1e-300)):
        return math.inf
    with np.errstate(divide="ignore"):
        ratios = np.log(rho.values[pos]) - np.log(pi_vals[pos])
    return float(ratios.max())


def write_fp_csv(
    path: str, traj: FPTrajectory, spec: PotentialSpec, q: float
) -> None:
    """Export a trajectory as CSV rows t, R_q, F_q, G_q, mass, m2."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "R_q", "F_q", "G_q", "mass", "m2"])
        for t, frame in zip(traj.times, traj.densities):
            f_q, g_q = fq_gq(frame, spec, q)
            r_q = math.log(f_q) / (q - 1.0) if math.isfinite(f_q) and f_q > 0 \
                else math.inf
            writer.writerow(
                [
                    f"{t:.12g}",
                    f"{r_q:.12g}",
                    f"{f_q:.12g}",
                    f"{g_q:.12g}",
                    f"{frame.mass:.12g}",
                    f"{frame.m2:.12g}",
                ]
            )
