"""Sectional characteristics and constitutive laws for curved beams.

A fiber at distance ``z`` from the centerline of a section with initial
curvature ``kappa0`` has stretch ``(lambda_s + z kappa) / (1 + z kappa0)``,
so even a linear stress-strain law yields coupled sectional equations.  The
linear (Biot) law is used by the element; the St. Venant-Kirchhoff and
generic-law quadratures exist for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

__all__ = [
    "Law",
    "Inertia",
    "SectionModel",
    "CurvedCharacteristics",
    "StrainState",
    "Resultants",
    "StVKCharacteristics",
    "modified_inertia_rect",
    "characteristics",
    "forces_from_strain",
    "strain_from_forces",
    "stvk_characteristics",
    "stvk_resultants",
    "resultants_from_law",
    "straightening_moment",
]

# below this |h kappa0| the power series is summed instead of the log formula
SERIES_SWITCH = 0.5


class Law(str, Enum):
    CONSISTENT = "consistent"
    SIMPLIFIED = "simplified"


class Inertia(str, Enum):
    """How the modified moment of inertia of a rectangle is evaluated."""

    EXACT = "exact"
    TWO_TERM = "two_term"  # b h^3 (1/12 + h^2 k^2 / 80)


@dataclass(frozen=True)
class SectionModel:
    """Elastic section.

    Rectangles carry ``b`` and ``h``; sections given by stiffnesses store
    ``E = 1`` with ``A = EA`` and ``I = EI`` plus the equivalent rectangle
    ``h = sqrt(12 EI / EA)``, ``b = EA / h`` so the consistent law can still
    form curvature corrections.
    """

    E: float
    A: float
    I: float
    b: float
    h: float
    law: Law = Law.SIMPLIFIED
    from_stiffness: bool = False
    inertia: Inertia = Inertia.EXACT

    def __post_init__(self):
        if not (self.E > 0 and self.A > 0 and self.I > 0 and self.b > 0 and self.h > 0):
            raise ValueError("E, A, I, b and h must be positive")
        object.__setattr__(self, "law", Law(self.law))
        object.__setattr__(self, "inertia", Inertia(self.inertia))

    @classmethod
    def rectangle(
        cls, E: float, b: float, h: float, law: Law | str = Law.CONSISTENT, inertia: Inertia | str = Inertia.EXACT
    ) -> SectionModel:
        return cls(E=float(E), A=b * h, I=b * h**3 / 12.0, b=float(b), h=float(h), law=Law(law), inertia=Inertia(inertia))

    @classmethod
    def stiffness(
        cls, EA: float, EI: float, law: Law | str = Law.SIMPLIFIED, inertia: Inertia | str = Inertia.EXACT
    ) -> SectionModel:
        h = math.sqrt(12.0 * EI / EA)
        return cls(
            E=1.0, A=float(EA), I=float(EI), b=EA / h, h=h, law=Law(law), from_stiffness=True, inertia=Inertia(inertia)
        )

    @property
    def EA(self) -> float:
        return self.E * self.A

    @property
    def EI(self) -> float:
        return self.E * self.I

    def with_law(self, law: Law | str) -> SectionModel:
        return SectionModel(self.E, self.A, self.I, self.b, self.h, Law(law), self.from_stiffness, self.inertia)

    def modified_inertia(self, kappa0):
        """``I_k`` at curvature ``kappa0`` according to ``self.inertia``."""
        if self.inertia is Inertia.TWO_TERM:
            k = np.asarray(kappa0, dtype=float)
            out = self.b * self.h**3 * (1.0 / 12.0 + (self.h * k) ** 2 / 80.0)
            return out if out.ndim else float(out)
        return modified_inertia_rect(self.b, self.h, kappa0)

    def to_dict(self) -> dict:
        if self.from_stiffness:
            d = {"EA": self.EA, "EI": self.EI, "law": self.law.value}
        else:
            d = {"E": self.E, "b": self.b, "h": self.h, "law": self.law.value}
        if self.inertia is not Inertia.EXACT:
            d["inertia"] = self.inertia.value
        return d


class CurvedCharacteristics(NamedTuple):
    kappa0: float
    A_k: float
    S_k: float
    I_k: float


class StrainState(NamedTuple):
    eps_s: float
    dkappa: float


class Resultants(NamedTuple):
    N: float
    M: float


def _inertia_series(t):
    # I_k / (b h^3) = sum_{k>=1} t^(2k-2) / (4^k (2k+1))
    t2 = t * t
    total = np.zeros_like(t)
    term = np.full_like(t, 1.0)
    for k in range(1, 60):
        inc = term / (4.0**k * (2 * k + 1))
        total = total + inc
        if np.all(np.abs(inc) <= 1e-18 * np.abs(total)):
            break
        term = term * t2
    return total


def modified_inertia_rect(b: float, h: float, kappa0):
    """Modified moment of inertia of a ``b x h`` rectangle.

    ``I_k = b / k^3 (ln((2 + h k) / (2 - h k)) - h k)``; the convergent power
    series in ``t = h k`` is used for ``|t| <= 0.5`` where the closed form
    loses digits to cancellation.
    """
    k = np.asarray(kappa0, dtype=float)
    t = h * k
    if np.any(np.abs(t) >= 2.0):
        raise ValueError("|h * kappa0| >= 2: the inner fiber reaches the center of curvature")
    small = np.abs(t) <= SERIES_SWITCH
    out = b * h**3 * _inertia_series(np.where(small, t, 0.0))
    if not np.all(small):
        kk = np.where(small, 1.0, k)
        tt = np.where(small, 1.0, t)
        exact = b / kk**3 * (np.log((2.0 + tt) / (2.0 - tt)) - tt)
        out = np.where(small, out, exact)
    return out if out.ndim else float(out)


def characteristics(section: SectionModel, kappa0: float) -> CurvedCharacteristics:
    """``(A_k, S_k, I_k)``; the simplified law ignores curvature, giving ``(A, 0, I)``."""
    if section.law is Law.SIMPLIFIED:
        return CurvedCharacteristics(float(kappa0), section.A, 0.0, section.I)
    I_k = float(section.modified_inertia(kappa0))
    return CurvedCharacteristics(float(kappa0), section.A + kappa0**2 * I_k, -kappa0 * I_k, I_k)


def forces_from_strain(section: SectionModel, chars: CurvedCharacteristics, eps_s, dkappa) -> Resultants:
    E = section.E
    if section.law is Law.SIMPLIFIED:
        return Resultants(E * section.A * eps_s, E * section.I * dkappa)
    return Resultants(
        E * chars.A_k * eps_s + E * chars.S_k * dkappa,
        E * chars.S_k * eps_s + E * chars.I_k * dkappa,
    )


def strain_from_forces(section: SectionModel, chars: CurvedCharacteristics, N, M) -> StrainState:
    """Inverted law: ``eps = (N + k0 M)/EA``, ``dkappa = M/(E I_k) + k0 eps``."""
    if section.law is Law.SIMPLIFIED:
        return StrainState(N / section.EA, M / section.EI)
    k0 = chars.kappa0
    eps = (N + k0 * M) / section.EA
    return StrainState(eps, M / (section.E * chars.I_k) + k0 * eps)


def straightening_moment(section: SectionModel, kappa0: float) -> float:
    """Moment ``M`` whose pure-bending curvature change is ``-kappa0``.

    Under zero normal force the inverted law gives
    ``dkappa = (1/(E I_k) + kappa0^2/EA) M``; the simplified law reduces
    this to ``EI kappa0``.
    """
    if section.law is Law.SIMPLIFIED:
        return section.EI * kappa0
    I_k = float(section.modified_inertia(kappa0))
    return kappa0 / (1.0 / (section.E * I_k) + kappa0**2 / section.EA)


class StVKCharacteristics(NamedTuple):
    A3: float
    S3: float
    I3: float
    J3: float
    K3: float


def stvk_characteristics(section: SectionModel, kappa0: float) -> StVKCharacteristics:
    """Integrals of ``z^n / (1 + z kappa0)^3`` over the rectangle, n = 0..4."""
    b, h = section.b, section.h
    if abs(h * kappa0) >= 2.0:
        raise ValueError("|h * kappa0| >= 2")
    vals = []
    for n in range(5):
        val, err = integrate.quad(
            lambda z, n=n: z**n / (1.0 + z * kappa0) ** 3, -h / 2, h / 2,
            epsabs=1e-12 * (h / 2) ** (n + 1), epsrel=1e-10, limit=200,
        )
        if not math.isfinite(val):
            raise ArithmeticError("quadrature failed")
        vals.append(b * val)
    return StVKCharacteristics(*vals)


def stvk_resultants(section: SectionModel, kappa0: float, eps_s: float, dkappa: float) -> Resultants:
    """St. Venant-Kirchhoff resultants in closed polynomial form."""
    A3, S3, I3, J3, K3 = stvk_characteristics(section, kappa0)
    E, e, d, k = section.E, eps_s, dkappa, kappa0
    p0 = 2 * e + 3 * e**2 + e**3
    p1 = k * e * (4 + 3 * e) + (2 + 6 * e + 3 * e**2) * d
    p2 = (2 * k**2 + 6 * k * d + 3 * d**2) * e + 4 * k * d + 3 * d**2
    p3 = 2 * k**2 * d + 3 * k * d**2 + d**3
    N = 0.5 * E * (A3 * p0 + S3 * p1 + I3 * p2 + J3 * p3)
    M = 0.5 * E * (S3 * p0 + I3 * p1 + J3 * p2 + K3 * p3)
    return Resultants(N, M)


def resultants_from_law(
    section: SectionModel,
    kappa0: float,
    eps_s: float,
    dkappa: float,
    stress: Callable[[float], float],
) -> Resultants:
    """``N, M`` by quadrature of a uniaxial law ``stress(stretch)`` over the rectangle."""
    b, h = section.b, section.h

    def stretch(z):
        return 1.0 + (eps_s + z * dkappa) / (1.0 + z * kappa0)

    opts = dict(epsabs=0.0, epsrel=1e-10, limit=200)
    N, _ = integrate.quad(lambda z: stress(stretch(z)), -h / 2, h / 2, **opts)
    M, _ = integrate.quad(lambda z: z * stress(stretch(z)), -h / 2, h / 2, **opts)
    if not (math.isfinite(N) and math.isfinite(M)):
        raise ArithmeticError("quadrature failed")
    return Resultants(b * N, b * M)
