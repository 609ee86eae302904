"""One-dimensional probability densities with closed-form log-derivatives.

Every family exposes the chain u = (log f)', u' = (log f)'' and, where
cheap, u'' = (log f)'''.  Everything else derives from it: f' = f*u,
log|f'| = log f + log|u|, and the curvature ratio r = f*f''/f'^2
= 1 + u'/u^2.  Densities are immutable and safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DivergentIntegral,
    NotDifferentiable,
    NotNormalizable,
    OutsideSupport,
    SupportMismatch,
    ZeroMass,
)
from .quadrature import (
    DEFAULT_CONFIG,
    Interval,
    QuadratureConfig,
    cumulative,
    integrate,
    probe_grid,
)

__all__ = [
    "Density",
    "Uniform",
    "Exponential",
    "Gaussian",
    "GeneralizedNormal",
    "HalfGeneralizedNormal",
    "QExponential",
    "Weibull",
    "GeneralizedGamma",
    "Pareto",
    "Rayleigh",
    "Modifier",
    "NumericDensity",
    "power_of_base",
    "power_tilt",
    "exp_tilt",
    "derivative_tilt",
    "tail_tilt",
    "relative_tilt",
    "curvature_tilt",
    "normalize",
    "escort",
    "check_density",
    "DensityCheck",
    "evaluate",
    "parse_density",
    "spec_string",
]


def _inside(support: Interval, x: np.ndarray) -> np.ndarray:
    return (x > support.lo) & (x < support.hi)


class Density:
    """Base interface; subclasses fill in log_pdf and the log-derivatives."""

    support: Interval
    decreasing: bool = False  # nonincreasing on the open support
    smooth_order: int = 3  # log-derivatives available (0 = none)
    singular_points: tuple[float, ...] = ()  # where integrand powers blow up
    stationary_points: tuple[float, ...] = ()  # zeros of f' inside the support

    def log_pdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dlog_pdf(self, x: np.ndarray) -> np.ndarray:
        raise NotDifferentiable(f"{self} has no first derivative")

    def d2log_pdf(self, x: np.ndarray) -> np.ndarray:
        raise NotDifferentiable(f"{self} has no second derivative")

    def d3log_pdf(self, x: np.ndarray) -> np.ndarray:
        raise NotDifferentiable(f"{self} has no third log-derivative")

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.exp(self.log_pdf(x))

    def log_abs_deriv(self, x: np.ndarray) -> np.ndarray:
        """log|f'| = log f + log|u|; -inf at stationary points."""
        with np.errstate(all="ignore"):
            return self.log_pdf(x) + np.log(np.abs(self.dlog_pdf(x)))

    def curvature(self, x: np.ndarray) -> np.ndarray:
        """r = f f''/f'^2 = 1 + u'/u^2; undefined where f' = 0."""
        u = self.dlog_pdf(x)
        with np.errstate(all="ignore"):
            return 1.0 + self.d2log_pdf(x) / (u * u)

    def __str__(self) -> str:
        return spec_string(self)


def evaluate(d: Density, x: float, order: int = 0) -> float:
    """f(x), f'(x) or f''(x) at a single interior point."""
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    if not d.support.contains(x):
        raise OutsideSupport(f"x={x!r} outside open support {d.support}")
    if order > d.smooth_order:
        raise NotDifferentiable(f"{d} supports derivatives up to {d.smooth_order}")
    xa = np.asarray([float(x)])
    f = float(np.exp(d.log_pdf(xa))[0])
    if order == 0:
        return f
    u = float(d.dlog_pdf(xa)[0])
    if order == 1:
        return f * u
    up = float(d.d2log_pdf(xa)[0])
    return f * (u * u + up)


@dataclass(frozen=True)
class Uniform(Density):
    lo: float
    hi: float
    smooth_order = 0

    def __post_init__(self) -> None:
        if not self.hi > self.lo:
            raise ValueError("uniform needs hi > lo")

    @property
    def support(self) -> Interval:
        return Interval(self.lo, self.hi)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(_inside(self.support, x), -math.log(self.hi - self.lo), -np.inf)


@dataclass(frozen=True)
class Exponential(Density):
    rate: float
    decreasing = True
    smooth_order = 99

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise ValueError("rate must be positive")

    @property
    def support(self) -> Interval:
        return Interval(0.0, math.inf)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(_inside(self.support, x), math.log(self.rate) - self.rate * x, -np.inf)

    def dlog_pdf(self, x):
        return np.full_like(np.asarray(x, dtype=float), -self.rate)

    def d2log_pdf(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def d3log_pdf(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Gaussian(Density):
    mu: float
    sigma: float
    smooth_order = 99

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @property
    def support(self) -> Interval:
        return Interval(-math.inf, math.inf)

    @property
    def stationary_points(self) -> tuple[float, ...]:
        return (self.mu,)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.mu) / self.sigma
        return -math.log(self.sigma) - 0.5 * math.log(2.0 * math.pi) - 0.5 * z * z

    def dlog_pdf(self, x):
        x = np.asarray(x, dtype=float)
        return -(x - self.mu) / self.sigma**2

    def d2log_pdf(self, x):
        return np.full_like(np.asarray(x, dtype=float), -1.0 / self.sigma**2)

    def d3log_pdf(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class GeneralizedNormal(Density):
    """f ∝ exp(-(|x|/scale)^k) on the whole line."""

    k: float
    scale: float

    def __post_init__(self) -> None:
        if not (self.k > 0 and self.scale > 0):
            raise ValueError("shape and scale must be positive")

    @property
    def support(self) -> Interval:
        return Interval(-math.inf, math.inf)

    @property
    def singular_points(self) -> tuple[float, ...]:
        return () if self.k == 2.0 else (0.0,)

    @property
    def stationary_points(self) -> tuple[float, ...]:
        return (0.0,) if self.k > 1.0 else ()

    def _const(self) -> float:
        return math.log(self.k) - math.log(2.0 * self.scale) - math.lgamma(1.0 / self.k)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return self._const() - (np.abs(x) / self.scale) ** self.k

    def dlog_pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, s = self.k, self.scale
        with np.errstate(all="ignore"):
            return -(k / s) * (np.abs(x) / s) ** (k - 1.0) * np.sign(x)

    def d2log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, s = self.k, self.scale
        if k == 1.0:
            return np.zeros_like(x)
        with np.errstate(all="ignore"):
            return -(k * (k - 1.0) / s**2) * (np.abs(x) / s) ** (k - 2.0)

    def d3log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, s = self.k, self.scale
        if k in (1.0, 2.0):
            return np.zeros_like(x)
        with np.errstate(all="ignore"):
            return -(k * (k - 1.0) * (k - 2.0) / s**3) * (np.abs(x) / s) ** (k - 3.0) * np.sign(x)


@dataclass(frozen=True)
class HalfGeneralizedNormal(Density):
    """f ∝ exp(-(x/scale)^k) on (0, inf); k=2 is the half-Gaussian."""

    k: float
    scale: float
    decreasing = True

    def __post_init__(self) -> None:
        if not (self.k > 0 and self.scale > 0):
            raise ValueError("shape and scale must be positive")

    @property
    def support(self) -> Interval:
        return Interval(0.0, math.inf)

    @property
    def singular_points(self) -> tuple[float, ...]:
        return () if self.k == 1.0 else (0.0,)

    def _const(self) -> float:
        return math.log(self.k) - math.log(self.scale) - math.lgamma(1.0 / self.k)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = self._const() - (x / self.scale) ** self.k
        return np.where(_inside(self.support, x), v, -np.inf)

    def dlog_pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, s = self.k, self.scale
        with np.errstate(all="ignore"):
            return -(k / s) * (x / s) ** (k - 1.0)

    def d2log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, s = self.k, self.scale
        if k == 1.0:
            return np.zeros_like(x)
        with np.errstate(all="ignore"):
            return -(k * (k - 1.0) / s**2) * (x / s) ** (k - 2.0)

    def d3log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, s = self.k, self.scale
        if k in (1.0, 2.0):
            return np.zeros_like(x)
        with np.errstate(all="ignore"):
            return -(k * (k - 1.0) * (k - 2.0) / s**3) * (x / s) ** (k - 3.0)


@dataclass(frozen=True)
class QExponential(Density):
    """f = (2-q) rate (1-(1-q) rate x)_+^{1/(1-q)}; constant curvature r = q."""

    q: float
    rate: float
    decreasing = True

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        if not self.q < 2 or self.q == 1.0:
            raise ValueError("need q < 2, q != 1 for a normalizable density")

    @property
    def support(self) -> Interval:
        if self.q < 1.0:
            return Interval(0.0, 1.0 / ((1.0 - self.q) * self.rate))
        return Interval(0.0, math.inf)

    @property
    def singular_points(self) -> tuple[float, ...]:
        return (self.support.hi,) if self.q < 1.0 else ()

    def _w(self, x: np.ndarray) -> np.ndarray:
        return 1.0 - (1.0 - self.q) * self.rate * x

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = math.log((2.0 - self.q) * self.rate) + np.log(self._w(x)) / (1.0 - self.q)
        return np.where(_inside(self.support, x), v, -np.inf)

    def dlog_pdf(self, x):
        return -self.rate / self._w(np.asarray(x, dtype=float))

    def d2log_pdf(self, x):
        return -(1.0 - self.q) * self.rate**2 / self._w(np.asarray(x, dtype=float)) ** 2

    def d3log_pdf(self, x):
        return -2.0 * (1.0 - self.q) ** 2 * self.rate**3 / self._w(np.asarray(x, dtype=float)) ** 3


@dataclass(frozen=True)
class Weibull(Density):
    shape: float
    scale: float

    def __post_init__(self) -> None:
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError("shape and scale must be positive")

    @property
    def support(self) -> Interval:
        return Interval(0.0, math.inf)

    @property
    def decreasing(self) -> bool:
        return self.shape <= 1.0

    @property
    def singular_points(self) -> tuple[float, ...]:
        return () if self.shape == 1.0 else (0.0,)

    @property
    def stationary_points(self) -> tuple[float, ...]:
        k = self.shape
        if k <= 1.0:
            return ()
        return (self.scale * ((k - 1.0) / k) ** (1.0 / k),)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, s = self.shape, self.scale
        with np.errstate(all="ignore"):
            v = math.log(k / s) + (k - 1.0) * np.log(x / s) - (x / s) ** k
        return np.where(_inside(self.support, x), v, -np.inf)

    def dlog_pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, s = self.shape, self.scale
        with np.errstate(all="ignore"):
            return (k - 1.0) / x - (k / s) * (x / s) ** (k - 1.0)

    def d2log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, s = self.shape, self.scale
        with np.errstate(all="ignore"):
            return -(k - 1.0) / x**2 - (k * (k - 1.0) / s**2) * (x / s) ** (k - 2.0)

    def d3log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, s = self.shape, self.scale
        with np.errstate(all="ignore"):
            return 2.0 * (k - 1.0) / x**3 - (k * (k - 1.0) * (k - 2.0) / s**3) * (x / s) ** (k - 3.0)


@dataclass(frozen=True)
class GeneralizedGamma(Density):
    """f ∝ x^{d-1} exp(-(x/a)^p) on (0, inf) (Stacy parameterization)."""

    a: float
    d: float
    p: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.d > 0 and self.p > 0):
            raise ValueError("all parameters must be positive")

    @property
    def support(self) -> Interval:
        return Interval(0.0, math.inf)

    @property
    def decreasing(self) -> bool:
        return self.d <= 1.0

    @property
    def singular_points(self) -> tuple[float, ...]:
        if self.d == 1.0 and self.p in (1.0, 2.0):
            return ()
        return (0.0,)

    @property
    def stationary_points(self) -> tuple[float, ...]:
        if self.d <= 1.0:
            return ()
        return (self.a * ((self.d - 1.0) / self.p) ** (1.0 / self.p),)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        a, d, p = self.a, self.d, self.p
        c = math.log(p) - d * math.log(a) - math.lgamma(d / p)
        with np.errstate(all="ignore"):
            v = c + (d - 1.0) * np.log(x) - (x / a) ** p
        return np.where(_inside(self.support, x), v, -np.inf)

    def dlog_pdf(self, x):
        x = np.asarray(x, dtype=float)
        a, d, p = self.a, self.d, self.p
        with np.errstate(all="ignore"):
            return (d - 1.0) / x - (p / a) * (x / a) ** (p - 1.0)

    def d2log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        a, d, p = self.a, self.d, self.p
        with np.errstate(all="ignore"):
            return -(d - 1.0) / x**2 - (p * (p - 1.0) / a**2) * (x / a) ** (p - 2.0)

    def d3log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        a, d, p = self.a, self.d, self.p
        with np.errstate(all="ignore"):
            return 2.0 * (d - 1.0) / x**3 - (p * (p - 1.0) * (p - 2.0) / a**3) * (x / a) ** (p - 3.0)


@dataclass(frozen=True)
class Pareto(Density):
    xm: float
    alpha: float
    decreasing = True
    smooth_order = 99

    def __post_init__(self) -> None:
        if not (self.xm > 0 and self.alpha > 0):
            raise ValueError("xm and alpha must be positive")

    @property
    def support(self) -> Interval:
        return Interval(self.xm, math.inf)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = math.log(self.alpha) + self.alpha * math.log(self.xm) - (self.alpha + 1.0) * np.log(x)
        return np.where(_inside(self.support, x), v, -np.inf)

    def dlog_pdf(self, x):
        return -(self.alpha + 1.0) / np.asarray(x, dtype=float)

    def d2log_pdf(self, x):
        return (self.alpha + 1.0) / np.asarray(x, dtype=float) ** 2

    def d3log_pdf(self, x):
        return -2.0 * (self.alpha + 1.0) / np.asarray(x, dtype=float) ** 3


@dataclass(frozen=True)
class Rayleigh(Density):
    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @property
    def support(self) -> Interval:
        return Interval(0.0, math.inf)

    @property
    def singular_points(self) -> tuple[float, ...]:
        return (0.0,)

    @property
    def stationary_points(self) -> tuple[float, ...]:
        return (self.sigma,)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = np.log(x) - 2.0 * math.log(self.sigma) - x**2 / (2.0 * self.sigma**2)
        return np.where(_inside(self.support, x), v, -np.inf)

    def dlog_pdf(self, x):
        x = np.asarray(x, dtype=float)
        return 1.0 / x - x / self.sigma**2

    def d2log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        return -1.0 / x**2 - 1.0 / self.sigma**2

    def d3log_pdf(self, x):
        return 2.0 / np.asarray(x, dtype=float) ** 3


@dataclass(frozen=True)
class Modifier:
    """Multiplicative reshaping of a base density f.

    The unnormalized result is
    f^power_base * |f'|^power_deriv * |curv_offset - r|^power_curv
    * |x|^power_abs_x * e^{exp_rate*x} * (f/relative)^power_rel
    * Y_tail(x)^power_tail
    with r = f f''/f'^2 and Y_tail the weighted upper-tail integral of f
    for tail_index b: Y(x) = ∫_x^sup |(b-2) t|^{1/(b-2)} f(t) dt.
    """

    power_base: float = 1.0
    power_deriv: float = 0.0
    power_curv: float = 0.0
    curv_offset: float = 0.0
    power_abs_x: float = 0.0
    exp_rate: float = 0.0
    power_rel: float = 0.0
    relative: Density | None = None
    power_tail: float = 0.0
    tail_index: float | None = None

    def __post_init__(self) -> None:
        if self.power_rel != 0.0 and self.relative is None:
            raise ValueError("power_rel needs a relative density")
        if self.power_tail != 0.0:
            if self.tail_index is None:
                raise ValueError("power_tail needs a tail_index")
            if self.tail_index == 2.0:
                raise ValueError("tail_index 2 is the exponential-weight case, not a power")


def power_of_base(e: float) -> Modifier:
    """g ∝ f^e."""
    return Modifier(power_base=e)


def power_tilt(r: float) -> Modifier:
    """g ∝ f(x) |x|^r."""
    return Modifier(power_abs_x=r)


def exp_tilt(s: float) -> Modifier:
    """g ∝ f(x) e^{s x}."""
    return Modifier(exp_rate=s)


def derivative_tilt(a: float, b: float) -> Modifier:
    """g ∝ f^a |f'|^b."""
    return Modifier(power_base=a, power_deriv=b)


def tail_tilt(b: float, r: float) -> Modifier:
    """g ∝ f(x) (∫_x^sup |(b-2)t|^{1/(b-2)} f dt)^r."""
    return Modifier(power_tail=r, tail_index=b)


def relative_tilt(h: Density, r: float) -> Modifier:
    """g ∝ f (f/h)^r."""
    return Modifier(power_rel=r, relative=h)


def curvature_tilt(xi: float, e: float) -> Modifier:
    """g ∝ f |xi - r|^e with r = f f''/f'^2."""
    return Modifier(power_curv=e, curv_offset=xi)


class NumericDensity(Density):
    """Base density reshaped by a Modifier and renormalized by quadrature."""

    def __init__(
        self,
        base: Density,
        modifier: Modifier,
        config: QuadratureConfig = DEFAULT_CONFIG,
    ) -> None:
        if modifier.relative is not None and modifier.relative.support != base.support:
            raise SupportMismatch("relative density must share the base support")
        self.base = base
        self.modifier = modifier
        self.support = base.support
        self._decreasing: bool | None = None

        self._tail_table = None
        self._tail_exp = 0.0
        if modifier.power_tail != 0.0:
            b = modifier.tail_index
            self._tail_exp = 1.0 / (b - 2.0)
            cfg = config.with_singularities(
                base.singular_points + ((0.0,) if base.support.contains(0.0, closure=True) else ())
            )
            self._tail_table = cumulative(self._tail_weight, base.support, config=cfg)

        sing = set(base.singular_points)
        if modifier.power_deriv != 0.0 or modifier.power_curv != 0.0:
            sing.update(base.stationary_points)
        if modifier.power_abs_x != 0.0 and base.support.contains(0.0, closure=True):
            sing.add(0.0)
        if modifier.relative is not None:
            sing.update(modifier.relative.singular_points)
        self.singular_points = tuple(sorted(s for s in sing if math.isfinite(s)))
        self.smooth_order = 0 if base.smooth_order == 0 else (1 if modifier.power_curv else 2)

        cfg = config.with_singularities(self.singular_points)
        try:
            res = integrate(lambda t: np.exp(self._log_unnorm(t)), self.support, cfg)
        except DivergentIntegral as exc:
            raise NotNormalizable(f"modifier mass diverges: {exc}") from exc
        if not (res.converged and math.isfinite(res.value)):
            raise NotNormalizable("modifier mass did not converge")
        if res.value <= 1e-300:
            raise ZeroMass("modifier mass vanishes")
        self.normalizer = res.value
        self._log_norm = math.log(res.value)

    def _tail_weight(self, x: np.ndarray) -> np.ndarray:
        b = self.modifier.tail_index
        with np.errstate(all="ignore"):
            return np.exp(self.base.log_pdf(x) + self._tail_exp * np.log(np.abs((b - 2.0) * x)))

    def _log_unnorm(self, x: np.ndarray) -> np.ndarray:
        m, base = self.modifier, self.base
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = m.power_base * base.log_pdf(x)
            if m.power_deriv != 0.0:
                out = out + m.power_deriv * base.log_abs_deriv(x)
            if m.power_curv != 0.0:
                out = out + m.power_curv * np.log(np.abs(m.curv_offset - base.curvature(x)))
            if m.power_abs_x != 0.0:
                out = out + m.power_abs_x * np.log(np.abs(x))
            if m.exp_rate != 0.0:
                out = out + m.exp_rate * x
            if m.power_rel != 0.0:
                out = out + m.power_rel * (base.log_pdf(x) - m.relative.log_pdf(x))
            if m.power_tail != 0.0:
                out = out + m.power_tail * np.log(self._tail_table(x))
        return out

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(_inside(self.support, x), self._log_unnorm(x) - self._log_norm, -np.inf)

    def dlog_pdf(self, x):
        m, base = self.modifier, self.base
        x = np.asarray(x, dtype=float)
        u = base.dlog_pdf(x)
        with np.errstate(all="ignore"):
            out = m.power_base * u
            if m.power_deriv != 0.0:
                out = out + m.power_deriv * (u + base.d2log_pdf(x) / u)
            if m.power_curv != 0.0:
                up = base.d2log_pdf(x)
                rp = base.d3log_pdf(x) / u**2 - 2.0 * up**2 / u**3
                r = 1.0 + up / u**2
                out = out - m.power_curv * rp / (m.curv_offset - r)
            if m.power_abs_x != 0.0:
                out = out + m.power_abs_x / x
            if m.exp_rate != 0.0:
                out = out + m.exp_rate
            if m.power_rel != 0.0:
                out = out + m.power_rel * (u - m.relative.dlog_pdf(x))
            if m.power_tail != 0.0:
                out = out - m.power_tail * self._tail_weight(x) / self._tail_table(x)
        return out

    def d2log_pdf(self, x):
        m, base = self.modifier, self.base
        if m.power_curv != 0.0:
            raise NotDifferentiable("curvature tilt carries no second log-derivative")
        x = np.asarray(x, dtype=float)
        u = base.dlog_pdf(x)
        up = base.d2log_pdf(x)
        with np.errstate(all="ignore"):
            out = m.power_base * up
            if m.power_deriv != 0.0:
                upp = base.d3log_pdf(x)
                out = out + m.power_deriv * (up + (upp * u - up**2) / u**2)
            if m.power_abs_x != 0.0:
                out = out - m.power_abs_x / x**2
            if m.power_rel != 0.0:
                out = out + m.power_rel * (up - m.relative.d2log_pdf(x))
            if m.power_tail != 0.0:
                w = self._tail_weight(x)
                y = self._tail_table(x)
                wp_over_w = self._tail_exp / x + u
                out = out - m.power_tail * (wp_over_w * w / y + (w / y) ** 2)
        return out

    @property
    def decreasing(self) -> bool:
        if self._decreasing is None:
            xs = probe_grid(self.support, 257)
            try:
                slope = self.dlog_pdf(xs)
            except NotDifferentiable:
                lp = self.log_pdf(xs)
                slope = np.diff(lp) / np.diff(xs)
            slope = slope[np.isfinite(slope)]
            self._decreasing = bool(slope.size > 0 and np.all(slope <= 1e-12))
        return self._decreasing

    def __str__(self) -> str:
        return spec_string(self)


def normalize(
    base: Density,
    modifier: Modifier | None = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> Density:
    """Attach a modifier and renormalize; identity when modifier is None."""
    if modifier is None:
        return base
    return NumericDensity(base, modifier, config)


def escort(f: Density, e: float, config: QuadratureConfig = DEFAULT_CONFIG) -> Density:
    """Normalized f^e."""
    return normalize(f, power_of_base(e), config)


@dataclass(frozen=True)
class DensityCheck:
    mass: float
    min_pdf_sampled: float
    ok: bool


def check_density(d: Density, config: QuadratureConfig = DEFAULT_CONFIG) -> DensityCheck:
    """Mass and sampled positivity diagnostic."""
    cfg = config.with_singularities(d.singular_points)
    res = integrate(lambda x: np.exp(d.log_pdf(x)), d.support, cfg)
    lp = d.log_pdf(probe_grid(d.support, 512))
    # positivity judged on the log scale; deep-tail exp() underflow is fine
    ok = abs(res.value - 1.0) <= 1e-8 and bool(np.all(lp > -np.inf))
    return DensityCheck(mass=res.value, min_pdf_sampled=float(np.exp(np.min(lp))), ok=ok)


# --- CLI spec-string grammar -------------------------------------------------
#
# family:key=value[,key=value...]; nested densities parenthesized, e.g.
# escort:base=(pareto:xm=1,alpha=2),exp=2

_FAMILY_FIELDS = {
    "uniform": (Uniform, ("lo", "hi")),
    "exponential": (Exponential, ("rate",)),
    "gaussian": (Gaussian, ("mu", "sigma")),
    "gennormal": (GeneralizedNormal, ("k", "scale")),
    "halfgennormal": (HalfGeneralizedNormal, ("k", "scale")),
    "qexp": (QExponential, ("q", "rate")),
    "weibull": (Weibull, ("shape", "scale")),
    "gengamma": (GeneralizedGamma, ("a", "d", "p")),
    "pareto": (Pareto, ("xm", "alpha")),
    "rayleigh": (Rayleigh, ("sigma",)),
}

_MODIFIER_GRAMMAR = {
    "escort": (("exp",), lambda v: power_of_base(v["exp"])),
    "tilt_power": (("r",), lambda v: power_tilt(v["r"])),
    "tilt_exp": (("s",), lambda v: exp_tilt(v["s"])),
    "tilt_deriv": (("a", "b"), lambda v: derivative_tilt(v["a"], v["b"])),
    "tilt_tail": (("b", "r"), lambda v: tail_tilt(v["b"], v["r"])),
    "tilt_curv": (("xi", "e"), lambda v: curvature_tilt(v["xi"], v["e"])),
}


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced parentheses in {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ValueError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur))
    return parts


def _parse_kv(body: str) -> dict[str, str]:
    out: dict[str, str] = {}
    if not body:
        return out
    for part in _split_top(body):
        key, sep, value = part.partition("=")
        if not sep or not key:
            raise ValueError(f"expected key=value, got {part!r}")
        out[key.strip()] = value.strip()
    return out


def _parse_nested(value: str) -> Density:
    if value.startswith("(") and value.endswith(")"):
        value = value[1:-1]
    return parse_density(value)


def parse_density(text: str) -> Density:
    """Parse the family:key=value grammar into a Density."""
    head, _, body = text.strip().partition(":")
    head = head.strip().lower()
    kv = _parse_kv(body)
    if head in _FAMILY_FIELDS:
        cls, fields = _FAMILY_FIELDS[head]
        missing = [f for f in fields if f not in kv]
        extra = [k for k in kv if k not in fields]
        if missing or extra:
            raise ValueError(f"{head} takes {fields}; missing {missing}, extra {extra}")
        return cls(**{f: float(kv[f]) for f in fields})
    if head == "tilt_rel":
        needed = {"base", "h", "r"}
        if set(kv) != needed:
            raise ValueError(f"tilt_rel takes base, h, r; got {sorted(kv)}")
        base = _parse_nested(kv["base"])
        return NumericDensity(base, relative_tilt(_parse_nested(kv["h"]), float(kv["r"])))
    if head in _MODIFIER_GRAMMAR:
        keys, build = _MODIFIER_GRAMMAR[head]
        needed = set(keys) | {"base"}
        if set(kv) != needed:
            raise ValueError(f"{head} takes {sorted(needed)}; got {sorted(kv)}")
        base = _parse_nested(kv["base"])
        return NumericDensity(base, build({k: float(kv[k]) for k in keys}))
    raise ValueError(f"unknown density family {head!r}")


def spec_string(d: Density) -> str:
    """Inverse of parse_density for the built-in families."""
    for name, (cls, fields) in _FAMILY_FIELDS.items():
        if type(d) is cls:
            return name + ":" + ",".join(f"{f}={getattr(d, f)!r}" for f in fields)
    if isinstance(d, NumericDensity):
        m = d.modifier
        base = spec_string(d.base)
        if m == power_of_base(m.power_base):
            return f"escort:base=({base}),exp={m.power_base!r}"
        if m == power_tilt(m.power_abs_x):
            return f"tilt_power:base=({base}),r={m.power_abs_x!r}"
        if m == exp_tilt(m.exp_rate):
            return f"tilt_exp:base=({base}),s={m.exp_rate!r}"
        if m == derivative_tilt(m.power_base, m.power_deriv):
            return f"tilt_deriv:base=({base}),a={m.power_base!r},b={m.power_deriv!r}"
        if m.relative is not None and m == relative_tilt(m.relative, m.power_rel):
            return f"tilt_rel:base=({base}),h=({spec_string(m.relative)}),r={m.power_rel!r}"
        if m.tail_index is not None and m == tail_tilt(m.tail_index, m.power_tail):
            return f"tilt_tail:base=({base}),b={m.tail_index!r},r={m.power_tail!r}"
        return f"numeric:base=({base})"
    return type(d).__name__.lower()
