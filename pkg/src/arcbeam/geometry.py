"""Undeformed centerline shapes parametrized by arc length.

Every shape is described in the local frame attached to its left end section:
``x`` is the arc-length coordinate (equal to the abscissa of the fictitious
straight configuration), ``phi0(x)`` is the section rotation relative to the
left end (counterclockwise positive), and ``u0(x)``, ``w0(x)`` are the
centerline offsets from the straight configuration, so that the centerline
point sits at ``(x + u0(x), w0(x))``.  The offsets satisfy

    u0' = cos(phi0) - 1,    w0' = -sin(phi0)

which implies that positive ``w`` points to the right of the left-end tangent
when positive rotations are drawn counterclockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "Spacing",
    "InitialShape",
    "Straight",
    "Circle",
    "Parabola",
    "parabola_pieces",
    "LogSpiral",
    "PiecewiseStraight",
    "GridSpec",
    "shape_straight",
    "shape_circle",
    "shape_parabola",
    "parabola_from_span",
    "solve_parabola_u",
    "shape_logspiral",
    "shape_zigzag",
    "build_grid",
]


class Spacing(str, Enum):
    UNIFORM_ARC_LENGTH = "arc"
    UNIFORM_PROJECTION = "projection"


@dataclass(frozen=True)
class InitialShape:
    """Base class; subclasses implement the four shape functions."""

    L: float

    kind = "base"

    def phi0(self, x):
        raise NotImplementedError

    def u0(self, x):
        raise NotImplementedError

    def w0(self, x):
        raise NotImplementedError

    def kappa0(self, x):
        raise NotImplementedError

    def end_point(self) -> tuple[float, float]:
        """Local coordinates ``(L + u0(L), w0(L))`` of the right end."""
        return float(self.L + self.u0(self.L)), float(self.w0(self.L))

    def kinks(self) -> np.ndarray:
        """Arc-length coordinates of slope discontinuities (interior only)."""
        return np.empty(0)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Straight(InitialShape):
    kind = "straight"

    def phi0(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def u0(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def w0(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def kappa0(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def to_dict(self) -> dict:
        return {"kind": "straight", "L": self.L}


@dataclass(frozen=True)
class Circle(InitialShape):
    """Circular arc with signed curvature (negative turns clockwise)."""

    kappa0_signed: float = 1.0
    kind = "circle"

    def phi0(self, x):
        return self.kappa0_signed * np.asarray(x, dtype=float)

    def u0(self, x):
        x = np.asarray(x, dtype=float)
        k = self.kappa0_signed
        return np.sin(k * x) / k - x

    def w0(self, x):
        x = np.asarray(x, dtype=float)
        k = self.kappa0_signed
        return (np.cos(k * x) - 1.0) / k

    def kappa0(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.kappa0_signed)

    def to_dict(self) -> dict:
        return {"kind": "circle", "kappa0": self.kappa0_signed, "L": self.L}


def solve_parabola_u(a: float, x, *, maxiter: int = 100):
    """Solve ``a X sqrt(1 + a^2 X^2) + asinh(a X) = 2 a x`` for ``u0 = X - x``.

    Safeguarded Newton on the bracket ``0 <= X <= x`` (the projection never
    exceeds the arc length). Works elementwise on arrays.
    """
    x = np.asarray(x, dtype=float)
    target = 2.0 * a * x
    lo = np.zeros_like(x)
    hi = x.copy()
    X = x.copy()
    tol = 1e-13 * (1.0 + target)
    for _ in range(maxiter):
        aX = a * X
        root = np.sqrt(1.0 + aX * aX)
        res = aX * root + np.arcsinh(aX) - target
        if np.all(np.abs(res) <= tol):
            # one more Newton step: the error is squared, so small targets
            # also end up at round-off
            return np.clip(X - res / (2.0 * a * root), lo, hi) - x
        lo = np.where(res < 0.0, X, lo)
        hi = np.where(res > 0.0, X, hi)
        step = X - res / (2.0 * a * root)
        outside = (step <= lo) | (step >= hi)
        X = np.where(outside, 0.5 * (lo + hi), step)
    raise RuntimeError("parabola arc-length inversion did not converge")


def _parabola_arc(a: float, X):
    X = np.asarray(X, dtype=float)
    aX = a * X
    return (aX * np.sqrt(1.0 + aX * aX) + np.arcsinh(aX)) / (2.0 * a)


@dataclass(frozen=True)
class Parabola(InitialShape):
    """Arc of the parabola ``Z = a/2 X^2`` starting at projection ``X = x0``.

    With ``x0 = 0`` the left end is the apex and ``w0 = a/2 (x + u0)^2``.
    Otherwise the local frame keeps the parabola's axes with its origin moved
    to the starting point, so ``phi0(0) = -atan(a x0)``.
    """

    a: float = 1.0
    x0: float = 0.0
    kind = "parabola"

    @property
    def s0(self) -> float:
        return float(_parabola_arc(self.a, self.x0))

    def _X(self, x):
        S = self.s0 + np.asarray(x, dtype=float)
        return S + solve_parabola_u(self.a, S)

    def projection(self, x):
        """Local projection ``x + u0(x)`` measured from the starting point."""
        return self._X(x) - self.x0

    def arc_length(self, X):
        """Arc length from the starting point to local projection ``X``."""
        return _parabola_arc(self.a, np.asarray(X, dtype=float) + self.x0) - self.s0

    def phi0(self, x):
        return -np.arctan(self.a * self._X(x))

    def u0(self, x):
        return self.projection(x) - np.asarray(x, dtype=float)

    def w0(self, x):
        return 0.5 * self.a * (self._X(x) ** 2 - self.x0**2)

    def kappa0(self, x):
        aX = self.a * self._X(x)
        return -self.a / (1.0 + aX * aX) ** 1.5

    def to_dict(self) -> dict:
        d = {"kind": "parabola", "a": self.a, "L": self.L}
        if self.x0:
            d["x0"] = self.x0
        return d


@dataclass(frozen=True)
class LogSpiral(InitialShape):
    """Logarithmic spiral ``r = a exp(b theta)`` starting at ``theta = 0``."""

    a: float = 1.0
    b: float = 0.15
    theta_max: float = 4.0 * math.pi
    kind = "logspiral"

    @property
    def c(self) -> float:
        return self.b / (self.a * math.sqrt(1.0 + self.b**2))

    @property
    def phi_star(self) -> float:
        return math.atan(self.b)

    def phi0(self, x):
        return np.log1p(self.c * np.asarray(x, dtype=float)) / self.b

    def u0(self, x):
        x = np.asarray(x, dtype=float)
        ps = self.phi_star
        return self.a * ((1.0 + self.c * x) * np.sin(self.phi0(x) + ps) - math.sin(ps)) - x

    def w0(self, x):
        x = np.asarray(x, dtype=float)
        ps = self.phi_star
        return self.a * ((1.0 + self.c * x) * np.cos(self.phi0(x) + ps) - math.cos(ps))

    def kappa0(self, x):
        return self.c / (self.b * (1.0 + self.c * np.asarray(x, dtype=float)))

    def to_dict(self) -> dict:
        return {"kind": "logspiral", "a": self.a, "b": self.b, "theta_max": self.theta_max}


@dataclass(frozen=True)
class PiecewiseStraight(InitialShape):
    """Polyline of straight segments, each with a constant rotation."""

    segments: tuple[tuple[float, float], ...] = ()
    kind = "zigzag"
    _breaks: np.ndarray = field(init=False, repr=False, compare=False)
    _u_start: np.ndarray = field(init=False, repr=False, compare=False)
    _w_start: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lengths = np.array([s[0] for s in self.segments], dtype=float)
        angles = np.array([s[1] for s in self.segments], dtype=float)
        breaks = np.concatenate([[0.0], np.cumsum(lengths)])
        u_start = np.concatenate([[0.0], np.cumsum(lengths * (np.cos(angles) - 1.0))])
        w_start = np.concatenate([[0.0], np.cumsum(-lengths * np.sin(angles))])
        object.__setattr__(self, "_breaks", breaks)
        object.__setattr__(self, "_u_start", u_start)
        object.__setattr__(self, "_w_start", w_start)

    @property
    def angles(self) -> np.ndarray:
        return np.array([s[1] for s in self.segments], dtype=float)

    def _segment(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self._breaks, x, side="right") - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def phi0(self, x):
        return self.angles[self._segment(x)]

    def u0(self, x):
        x = np.asarray(x, dtype=float)
        i = self._segment(x)
        return self._u_start[i] + (x - self._breaks[i]) * (np.cos(self.angles[i]) - 1.0)

    def w0(self, x):
        x = np.asarray(x, dtype=float)
        i = self._segment(x)
        return self._w_start[i] - (x - self._breaks[i]) * np.sin(self.angles[i])

    def kappa0(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def kinks(self) -> np.ndarray:
        return self._breaks[1:-1].copy()

    def to_dict(self) -> dict:
        return {"kind": "zigzag", "segments": [list(s) for s in self.segments]}


def shape_straight(L: float) -> Straight:
    if L <= 0:
        raise ValueError("length must be positive")
    return Straight(L=float(L))


def shape_circle(kappa0_signed: float, L: float) -> Circle:
    if kappa0_signed == 0:
        raise ValueError("zero curvature: use shape_straight")
    if L <= 0:
        raise ValueError("length must be positive")
    return Circle(L=float(L), kappa0_signed=float(kappa0_signed))


def shape_parabola(a: float, L: float, x0: float = 0.0) -> Parabola:
    if a <= 0:
        raise ValueError("parabola parameter a must be positive")
    if L <= 0:
        raise ValueError("length must be positive")
    if x0 < 0:
        raise ValueError("x0 must be non-negative")
    return Parabola(L=float(L), a=float(a), x0=float(x0))


def parabola_from_span(half_span: float, rise: float) -> Parabola:
    """Half of a symmetric parabolic arch, apex to support.

    ``rise`` is the apex height above the supports, ``half_span`` the
    horizontal apex-to-support distance.
    """
    a = 2.0 * rise / half_span**2
    return shape_parabola(a, float(_parabola_arc(a, half_span)))


def parabola_pieces(half_span: float, rise: float, n: int) -> list[Parabola]:
    """The half arch of :func:`parabola_from_span` cut into ``n`` pieces of equal projection."""
    a = 2.0 * rise / half_span**2
    cuts = np.linspace(0.0, half_span, n + 1)
    return [
        shape_parabola(a, float(_parabola_arc(a, X1) - _parabola_arc(a, X0)), float(X0))
        for X0, X1 in zip(cuts[:-1], cuts[1:])
    ]


def shape_logspiral(a: float, b: float, theta_max: float) -> LogSpiral:
    if a <= 0 or theta_max <= 0:
        raise ValueError("spiral needs a > 0 and theta_max > 0")
    if b <= 1e-6:
        raise ValueError("spiral parameter b must exceed 1e-6; use shape_circle for b -> 0")
    c = b / (a * math.sqrt(1.0 + b * b))
    L = math.expm1(b * theta_max) / c
    return LogSpiral(L=L, a=float(a), b=float(b), theta_max=float(theta_max))


def shape_zigzag(segments) -> PiecewiseStraight:
    segs = tuple((float(s[0]), float(s[1])) for s in segments)
    if not segs:
        raise ValueError("zig-zag shape needs at least one segment")
    if any(length <= 0 for length, _ in segs):
        raise ValueError("segment lengths must be positive")
    if segs[0][1] != 0.0:
        raise ValueError("the first segment defines the local frame; its angle must be 0")
    return PiecewiseStraight(L=sum(s[0] for s in segs), segments=segs)


@dataclass(frozen=True)
class GridSpec:
    """Integration grid along the element.

    ``x_nodes``/``x_mid`` are arc-length coordinates; ``h`` holds the step
    used by the marcher for each segment; ``proj_nodes`` holds ``x + u0(x)``
    at the nodes.
    """

    N: int
    spacing: Spacing
    x_nodes: np.ndarray
    x_mid: np.ndarray
    h: np.ndarray
    proj_nodes: np.ndarray


def build_grid(shape: InitialShape, N: int, spacing: Spacing | str = Spacing.UNIFORM_ARC_LENGTH) -> GridSpec:
    spacing = Spacing(spacing)
    if N < 1:
        raise ValueError("NIS must be at least 1")
    if spacing is Spacing.UNIFORM_PROJECTION:
        if not isinstance(shape, Parabola):
            raise ValueError("projection spacing is only available for parabolic shapes")
        Lp = float(shape.projection(shape.L))
        hp = Lp / N
        Xn = hp * np.arange(N + 1)
        Xn[-1] = Lp
        xn = shape.arc_length(Xn)
        xn[-1] = shape.L
        xm = shape.arc_length(hp * (np.arange(1, N + 1) - 0.5))
        wn = 0.5 * shape.a * ((Xn + shape.x0) ** 2 - shape.x0**2)
        h = np.hypot(np.diff(Xn), np.diff(wn))
        return GridSpec(N, spacing, xn, xm, h, Xn)

    kinks = shape.kinks()
    if kinks.size:
        n_phys = kinks.size + 1
        if N < n_phys:
            raise ValueError(f"NIS={N} is smaller than the number of straight segments ({n_phys})")
        pos = kinks / shape.L * N
        if np.any(np.abs(pos - np.round(pos)) > 1e-9 * N):
            raise ValueError(f"NIS={N} cannot place every kink on a grid point")
    hs = shape.L / N
    xn = hs * np.arange(N + 1)
    xn[-1] = shape.L
    xm = hs * (np.arange(1, N + 1) - 0.5)
    h = np.full(N, hs)
    return GridSpec(N, spacing, xn, xm, h, xn + shape.u0(xn))
