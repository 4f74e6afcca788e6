"""Placement of a curved element between two joints of a planar frame.

Global displacements of the end joints are converted into the local target
for shooting, and the converged left-end forces are turned back into the six
global end forces together with the 6x6 tangent stiffness.  Angles are never
formed explicitly; only their sines and cosines are stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .element import BeamElement, ShootOptions, ShootResult, SingularJacobian

__all__ = [
    "PlacementError",
    "ElementPlacement",
    "place_element",
    "local_target_from_global",
    "global_forces_from_local",
    "ElementState",
    "element_state",
    "element_tangent",
    "deformed_global",
    "end_normal_forces",
]

CONSISTENCY_TOL = 1e-9


class PlacementError(ValueError):
    pass


@dataclass(frozen=True)
class ElementPlacement:
    xa: float
    za: float
    xb: float
    zb: float
    L_ab: float
    cos_beta0: float
    sin_beta0: float
    cos_alpha0: float
    sin_alpha0: float

    def T(self, phi_a: float):
        """Rotation matrix and its derivative with respect to ``phi_a``."""
        ca, sa = math.cos(phi_a), math.sin(phi_a)
        c = self.cos_alpha0 * ca + self.sin_alpha0 * sa
        s = self.sin_alpha0 * ca - self.cos_alpha0 * sa
        T = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
        dT = np.array([[s, -c, 0.0], [c, s, 0.0], [0.0, 0.0, 0.0]])
        return T, dT

    def l(self, phi_a: float):
        ca, sa = math.cos(phi_a), math.sin(phi_a)
        cb = self.cos_beta0 * ca - self.sin_beta0 * sa
        sb = self.sin_beta0 * ca + self.cos_beta0 * sa
        lv = self.L_ab * np.array([cb - self.cos_beta0, sb - self.sin_beta0, 0.0])
        dl = self.L_ab * np.array([-sb, cb, 0.0])
        return lv, dl


def place_element(element: BeamElement, a_xy, b_xy, name: str = "element") -> ElementPlacement:
    """Build the placement and check that the shape's chord fits the joints."""
    xa, za = (float(v) for v in a_xy)
    xb, zb = (float(v) for v in b_xy)
    L_ab = math.hypot(xb - xa, zb - za)
    if L_ab <= 0.0:
        raise PlacementError(f"{name}: end joints coincide; drive such elements directly")
    xe, ze = element.end_local
    chord = math.hypot(xe, ze)
    if abs(chord**2 - L_ab**2) > CONSISTENCY_TOL * L_ab**2:
        raise PlacementError(
            f"{name}: joint distance {L_ab:.12g} does not match the chord {chord:.12g} of the initial shape"
        )
    cg, sg = (xb - xa) / L_ab, (zb - za) / L_ab
    cb, sb = xe / chord, ze / chord
    return ElementPlacement(
        xa=xa, za=za, xb=xb, zb=zb, L_ab=L_ab,
        cos_beta0=cb, sin_beta0=sb,
        cos_alpha0=cg * cb + sg * sb, sin_alpha0=sg * cb - cg * sb,
    )


def local_target_from_global(p: ElementPlacement, ua, ub) -> np.ndarray:
    """Right-end local displacements ``T (u_b - u_a) + l`` for global end DOFs."""
    ua = np.asarray(ua, dtype=float)
    ub = np.asarray(ub, dtype=float)
    T, _ = p.T(ua[2])
    lv, _ = p.l(ua[2])
    return T @ (ub - ua) + lv


def global_forces_from_local(p: ElementPlacement, phi_a: float, f_local) -> np.ndarray:
    T, _ = p.T(phi_a)
    return T.T @ np.asarray(f_local, dtype=float)


@dataclass
class ElementState:
    """Converged element response for given global end DOFs."""

    f_local: np.ndarray
    forces: np.ndarray  # (X_ab, Z_ab, M_ab, X_ba, Z_ba, M_ba), global
    shoot: ShootResult
    target: np.ndarray


def element_state(
    element: BeamElement,
    p: ElementPlacement,
    ua,
    ub,
    f_guess=None,
    options: ShootOptions | None = None,
) -> ElementState:
    ua = np.asarray(ua, dtype=float)
    ub = np.asarray(ub, dtype=float)
    target = local_target_from_global(p, ua, ub)
    res = element.shoot(target, f_guess, options)
    fG = global_forces_from_local(p, ua[2], res.f_ab)
    dx = p.xb - p.xa + ub[0] - ua[0]
    dz = p.zb - p.za + ub[1] - ua[1]
    M_ba = -fG[2] + fG[0] * dz - fG[1] * dx
    forces = np.array([fG[0], fG[1], fG[2], -fG[0], -fG[1], M_ba])
    return ElementState(res.f_ab, forces, res, target)


def element_tangent(p: ElementPlacement, ua, ub, state: ElementState) -> np.ndarray:
    """6x6 tangent stiffness in global components."""
    ua = np.asarray(ua, dtype=float)
    ub = np.asarray(ub, dtype=float)
    T, dT = p.T(ua[2])
    _, dl = p.l(ua[2])
    try:
        Ginv = np.linalg.inv(state.shoot.G)
    except np.linalg.LinAlgError as exc:
        raise SingularJacobian("element Jacobian is singular") from exc
    A = T.T @ Ginv @ T
    c = T.T @ Ginv @ (dT @ (ub - ua) + dl) + dT.T @ state.f_local
    K = np.zeros((6, 6))
    K[0:3, 0:3] = -A
    K[0:3, 2] += c
    K[0:3, 3:6] = A
    K[3:5, :] = -K[0:2, :]
    dx = p.xb - p.xa + ub[0] - ua[0]
    dz = p.zb - p.za + ub[1] - ua[1]
    K[5, 0:5] = K[0:5, 5]
    K[5, 5] = dz * K[0, 5] - dx * K[1, 5] - K[2, 5]
    return K


def deformed_global(element: BeamElement, p: ElementPlacement, ua, f_local) -> np.ndarray:
    """Deformed centerline of a placed element as global ``(x, z)`` points."""
    ua = np.asarray(ua, dtype=float)
    local = element.deformed_shape(element.trace(f_local))
    T, _ = p.T(ua[2])
    R = T[:2, :2]
    return np.array([p.xa + ua[0], p.za + ua[1]]) + local @ R


def end_normal_forces(element: BeamElement, f_local) -> tuple[float, float]:
    """Normal force at the left and right ends for left-end forces ``f_local``."""
    X, Z, _ = (float(v) for v in f_local)
    tr = element.trace(f_local)
    phi_a = float(element.shape.phi0(0.0))
    phi_b = float(element.shape.phi0(element.L)) + float(tr.dphi[-1])
    return (-X * math.cos(phi_a) + Z * math.sin(phi_a), -X * math.cos(phi_b) + Z * math.sin(phi_b))
