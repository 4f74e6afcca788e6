"""One curved beam element evaluated by an explicit march and shooting.

Given the left-end forces ``f_ab = (X_ab, Z_ab, M_ab)`` in the local frame
of the left end (whose displacements and rotation are held at zero), the
march integrates the equilibrium, kinematic and constitutive equations along
the centerline and returns the right-end displacements and rotation
``g(f_ab)``.  Shooting inverts this map by Newton iterations with the
Jacobian ``G = dg/df_ab`` propagated by the tangent-linear march.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .geometry import GridSpec, InitialShape, Spacing, build_grid
from .section import Law, SectionModel

EPS = np.finfo(float).eps
# never accept a stalled residual above this, however bad the conditioning
STAGNATION_CAP = 1e-7

__all__ = [
    "ElementError",
    "DivergedMarch",
    "SingularJacobian",
    "NoConvergence",
    "MarchTrace",
    "ShootResult",
    "BeamElement",
    "ShootOptions",
]


class ElementError(RuntimeError):
    pass


class DivergedMarch(ElementError):
    pass


class SingularJacobian(ElementError):
    pass


class NoConvergence(ElementError):
    pass


@numba.njit(cache=True)
def _march_kernel(X, Z, Mab, h, phi0m, c00, s00, k0m, k0n, EA, EIk, w0n, projn, want_jac, want_trace, trace):
    n = h.size
    ub = np.zeros(3)
    G = np.zeros((3, 3))

    # (c00, s00) is the initial slope at the left end, (1, 0) unless the shape starts tilted
    M = -Mab
    eps = (-X * c00 + Z * s00 + k0n[0] * M) / EA
    dk = k0n[0] * eps + M / EIk[0]
    du = 0.0
    dw = 0.0
    dphi = 0.0

    # tangent state, one column per perturbation of (X, Z, Mab)
    ddu = np.zeros(3)
    ddw = np.zeros(3)
    ddphi = np.zeros(3)
    dM = np.zeros(3)
    ddk = np.zeros(3)
    if want_jac:
        dM[2] = -1.0
        for j in range(3):
            dN0 = -c00 if j == 0 else (s00 if j == 1 else 0.0)
            deps0 = (dN0 - k0n[0] * (1.0 if j == 2 else 0.0)) / EA
            ddk[j] = k0n[0] * deps0 + dM[j] / EIk[0]

    if want_trace:
        trace[0, 0] = 0.0
        trace[0, 1] = 0.0
        trace[0, 2] = 0.0
        trace[0, 3] = M
        trace[0, 4] = dk

    dphi_h = np.zeros(3)
    dN = np.zeros(3)
    for i in range(1, n + 1):
        hi = h[i - 1]
        dphi_half = dphi + dk * 0.5 * hi
        phi = phi0m[i - 1] + dphi_half
        c = math.cos(phi)
        s = math.sin(phi)
        Nm = -X * c + Z * s
        eps_m = (Nm + k0m[i - 1] * M) / EA
        du += ((1.0 + eps_m) * c - math.cos(phi0m[i - 1])) * hi
        dw += (math.sin(phi0m[i - 1]) - (1.0 + eps_m) * s) * hi
        M_new = -Mab + X * (w0n[i] + dw) - Z * (projn[i] + du)
        eps_n = (Nm + k0n[i] * M_new) / EA
        dk_new = k0n[i] * eps_n + M_new / EIk[i]

        if want_jac:
            for j in range(3):
                dX = 1.0 if j == 0 else 0.0
                dZ = 1.0 if j == 1 else 0.0
                dMab = 1.0 if j == 2 else 0.0
                dphi_h[j] = ddphi[j] + ddk[j] * 0.5 * hi
                dN[j] = -dX * c + dZ * s + (X * s + Z * c) * dphi_h[j]
                de_m = (dN[j] + k0m[i - 1] * dM[j]) / EA
                ddu[j] += (de_m * c - (1.0 + eps_m) * s * dphi_h[j]) * hi
                ddw[j] -= (de_m * s + (1.0 + eps_m) * c * dphi_h[j]) * hi
                dM[j] = -dMab + dX * (w0n[i] + dw) - dZ * (projn[i] + du) + X * ddw[j] - Z * ddu[j]
                de_n = (dN[j] + k0n[i] * dM[j]) / EA
                ddk[j] = k0n[i] * de_n + dM[j] / EIk[i]
                ddphi[j] = dphi_h[j] + ddk[j] * 0.5 * hi

        M = M_new
        dk = dk_new
        dphi = dphi_half + dk * 0.5 * hi

        if want_trace:
            trace[i, 0] = du
            trace[i, 1] = dw
            trace[i, 2] = dphi
            trace[i, 3] = M
            trace[i, 4] = dk
            trace[i, 5] = Nm
            trace[i, 6] = eps_m
            trace[i, 7] = phi

    ub[0] = du
    ub[1] = dw
    ub[2] = dphi
    if want_jac:
        for j in range(3):
            G[0, j] = ddu[j]
            G[1, j] = ddw[j]
            G[2, j] = ddphi[j]
    ok = np.isfinite(du) and np.isfinite(dw) and np.isfinite(dphi)
    if want_jac:
        for a in range(3):
            for b in range(3):
                if not np.isfinite(G[a, b]):
                    ok = False
    return ub, G, ok


@dataclass(frozen=True)
class MarchTrace:
    """Per-node and per-midpoint values of one march.

    Node arrays have ``N + 1`` entries, midpoint arrays ``N``.
    """

    x_nodes: np.ndarray
    du: np.ndarray
    dw: np.ndarray
    dphi: np.ndarray
    M: np.ndarray
    dkappa: np.ndarray
    x_mid: np.ndarray
    N_mid: np.ndarray
    eps_mid: np.ndarray
    phi_mid: np.ndarray


@dataclass(frozen=True)
class ShootResult:
    f_ab: np.ndarray
    u_b: np.ndarray
    G: np.ndarray
    iterations: int
    residual_norm: float


@dataclass(frozen=True)
class ShootOptions:
    tol_abs: float = 1e-12
    tol_rel: float = 1e-10
    stagnation_tol: float = 1e-9
    max_iter: int = 30
    max_halvings: int = 10
    singular_tol: float = 1e-14


class BeamElement:
    """A curved beam element with its own integration grid.

    ``nis`` is the number of integration segments; for the simplified law
    all curvature coupling in the march is switched off by zeroing the
    initial curvature entering the constitutive relations.
    """

    def __init__(
        self,
        shape: InitialShape,
        section: SectionModel,
        nis: int,
        spacing: Spacing | str = Spacing.UNIFORM_ARC_LENGTH,
    ):
        self.shape = shape
        self.section = section
        self.grid: GridSpec = build_grid(shape, int(nis), spacing)
        g = self.grid
        self._h = np.ascontiguousarray(g.h, dtype=float)
        self._phi0m = np.ascontiguousarray(shape.phi0(g.x_mid), dtype=float)
        phi_start = float(shape.phi0(0.0))
        self._c00, self._s00 = math.cos(phi_start), math.sin(phi_start)
        self._w0n = np.ascontiguousarray(shape.w0(g.x_nodes), dtype=float)
        self._projn = np.ascontiguousarray(g.proj_nodes, dtype=float)
        k_nodes = np.asarray(shape.kappa0(g.x_nodes), dtype=float) * np.ones(g.N + 1)
        k_mid = np.asarray(shape.kappa0(g.x_mid), dtype=float) * np.ones(g.N)
        if section.law is Law.CONSISTENT:
            self._k0n = k_nodes
            self._k0m = k_mid
            self._EIk = section.E * np.asarray(section.modified_inertia(k_nodes)) * np.ones(g.N + 1)
        else:
            self._k0n = np.zeros(g.N + 1)
            self._k0m = np.zeros(g.N)
            self._EIk = np.full(g.N + 1, section.EI)
        self._EA = float(section.EA)
        self._dummy = np.zeros((1, 8))
        x_end, z_end = float(self._projn[-1]), float(self._w0n[-1])
        self.end_local = (x_end, z_end)
        self.chord = math.hypot(x_end, z_end)
        self.L_ref = max(shape.L, self.chord)

    @property
    def nis(self) -> int:
        return self.grid.N

    @property
    def L(self) -> float:
        return self.shape.L

    def _run(self, f, jac: bool, trace: bool):
        X, Z, Mab = (float(v) for v in f)
        buf = np.empty((self.grid.N + 1, 8)) if trace else self._dummy
        ub, G, ok = _march_kernel(
            X, Z, Mab, self._h, self._phi0m, self._c00, self._s00, self._k0m, self._k0n, self._EA, self._EIk,
            self._w0n, self._projn, jac, trace, buf,
        )
        if not ok:
            raise DivergedMarch(f"non-finite values while marching with f_ab={tuple(f)}")
        return ub, G, buf

    def march(self, f_ab) -> np.ndarray:
        """Right-end ``(u_b, w_b, phi_b)`` for left-end forces ``f_ab``."""
        return self._run(f_ab, False, False)[0]

    def march_jacobian(self, f_ab) -> tuple[np.ndarray, np.ndarray]:
        ub, G, _ = self._run(f_ab, True, False)
        return ub, G

    def trace(self, f_ab) -> MarchTrace:
        _, _, b = self._run(f_ab, False, True)
        g = self.grid
        return MarchTrace(
            x_nodes=g.x_nodes.copy(), du=b[:, 0].copy(), dw=b[:, 1].copy(), dphi=b[:, 2].copy(),
            M=b[:, 3].copy(), dkappa=b[:, 4].copy(), x_mid=g.x_mid.copy(),
            N_mid=b[1:, 5].copy(), eps_mid=b[1:, 6].copy(), phi_mid=b[1:, 7].copy(),
        )

    def end_moment_right(self, f_ab, u_b) -> float:
        """Moment at the right end from global equilibrium of the element."""
        X, Z, Mab = f_ab
        xe, ze = self.end_local
        return -Mab + X * (ze + u_b[1]) - Z * (xe + u_b[0])

    def deformed_shape(self, trace: MarchTrace) -> np.ndarray:
        """Deformed centerline points ``(x, z)`` in the local frame."""
        g = self.grid
        return np.column_stack([g.proj_nodes + trace.du, self._w0n + trace.dw])

    def _dimensionless(self, G):
        # lengths over L_ref, moments times 1/L_ref
        d = np.array([self.L_ref, self.L_ref, 1.0])
        return G * (np.array([1.0, 1.0, self.L_ref]) / d[:, None])

    def _singular(self, G, tol) -> bool:
        Gs = self._dimensionless(G)
        scale = np.linalg.norm(Gs, 2)
        if not np.isfinite(scale) or scale == 0.0:
            return True
        return abs(np.linalg.det(Gs / scale)) < tol

    def _scaled(self, r):
        return np.array([r[0] / self.L_ref, r[1] / self.L_ref, r[2]])

    def shoot(self, u_target, f_guess=None, options: ShootOptions | None = None) -> ShootResult:
        """Left-end forces that produce the prescribed right-end displacements.

        Newton iterations start from ``f_guess``.  When they fail, the target
        is approached in sub-steps from the guess's own image, halving the
        increment up to ``max_halvings`` times.
        """
        opt = options or ShootOptions()
        u_target = np.asarray(u_target, dtype=float)
        if not np.all(np.isfinite(u_target)):
            raise ValueError("non-finite shooting target")
        f = np.zeros(3) if f_guess is None else np.asarray(f_guess, dtype=float).copy()
        try:
            return self._newton(u_target, f, opt)
        except ElementError as first:
            err = first
        # sub-stepping from the configuration reached by the guess
        try:
            u_start = self.march(f)
        except DivergedMarch:
            f = np.zeros(3)
            u_start = np.zeros(3)
        frac_done = 0.0
        step = 0.5
        halvings = 1
        total_iter = 0
        while frac_done < 1.0:
            trial = min(1.0, frac_done + step)
            tgt = u_start + trial * (u_target - u_start)
            try:
                res = self._newton(tgt, f, opt)
            except ElementError as exc:
                err = exc
                halvings += 1
                if halvings > opt.max_halvings:
                    raise NoConvergence(f"shooting failed after {opt.max_halvings} halvings: {err}") from err
                step *= 0.5
                continue
            f = res.f_ab
            total_iter += res.iterations
            frac_done = trial
        return ShootResult(res.f_ab, res.u_b, res.G, total_iter, res.residual_norm)

    def _newton(self, u_target, f, opt: ShootOptions) -> ShootResult:
        tol = opt.tol_abs + opt.tol_rel * np.linalg.norm(self._scaled(u_target))
        best = math.inf
        for it in range(opt.max_iter + 1):
            ub, G = self.march_jacobian(f)
            r = u_target - ub
            rn = float(np.linalg.norm(self._scaled(r)))
            if rn <= tol:
                return ShootResult(f, ub, G, it, rn)
            if it >= 3 and rn >= 0.5 * best:
                # round-off floor, which grows with the conditioning of G
                floor = max(opt.stagnation_tol, 100.0 * EPS * np.linalg.cond(self._dimensionless(G)))
                floor = min(floor, STAGNATION_CAP)
                if rn <= floor * (1.0 + np.linalg.norm(self._scaled(u_target))):
                    return ShootResult(f, ub, G, it, rn)
            best = min(best, rn)
            if self._singular(G, opt.singular_tol):
                raise SingularJacobian("element Jacobian is singular")
            try:
                f = f + np.linalg.solve(G, r)
            except np.linalg.LinAlgError as exc:
                raise SingularJacobian("element Jacobian is singular") from exc
        raise NoConvergence(f"shooting did not converge, residual {rn:.3e}")
