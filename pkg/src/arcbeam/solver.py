"""Planar frame assembly and equilibrium path following.

Joint displacements ``(u, w, phi)`` are the global unknowns; each element is
evaluated by shooting, warm-started from its last converged left-end forces.
Paths are traced under load control, direct displacement control, indirect
displacement control (load factor adjusted so that one DOF follows a
prescribed history) or spherical arc-length control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .element import BeamElement, ElementError, ShootOptions
from .frame import ElementPlacement, element_state, element_tangent, place_element

__all__ = [
    "SolverError",
    "PathFailure",
    "SolverOptions",
    "StructureModel",
    "LoadControl",
    "DisplacementControl",
    "IndirectControl",
    "ArcLength",
    "SolutionStep",
    "PathResult",
    "LimitPoint",
    "assemble",
    "solve_path",
    "initial_stiffness_ratio",
    "steps_to",
]

COMPONENTS = {"u": 0, "w": 1, "phi": 2}


class SolverError(RuntimeError):
    pass


class PathFailure(SolverError):
    """Raised when a step cannot be completed; ``steps`` holds the accepted part."""

    def __init__(self, message: str, steps=None):
        super().__init__(message)
        self.steps = list(steps or [])


@dataclass(frozen=True)
class SolverOptions:
    tol_residual: float = 1e-8
    tol_increment: float = 1e-10
    max_iter: int = 25
    max_halvings: int = 8
    # a step whose displacement per unit control exceeds this multiple of the
    # previous step's is split; if the jump survives, the path has left its branch
    jump_factor: float | None = 4.0
    shoot: ShootOptions = field(default_factory=lambda: ShootOptions(tol_abs=1e-14, tol_rel=1e-13))


@dataclass
class _ElementEntry:
    name: str
    element: BeamElement
    a: int
    b: int
    placement: ElementPlacement
    f_guess: np.ndarray = field(default_factory=lambda: np.zeros(3))


class StructureModel:
    """Nodes, supports, curved elements and a reference load pattern."""

    def __init__(self):
        self.node_ids: list[str] = []
        self.coords: list[tuple[float, float]] = []
        self.entries: list[_ElementEntry] = []
        self.fixed: set[int] = set()
        self._loads: dict[int, float] = {}

    # -- building -------------------------------------------------------
    def add_node(self, node_id, x: float, z: float) -> int:
        node_id = str(node_id)
        if node_id in self.node_ids:
            raise ValueError(f"duplicate node id {node_id!r}")
        self.node_ids.append(node_id)
        self.coords.append((float(x), float(z)))
        return len(self.node_ids) - 1

    def node_index(self, node_id) -> int:
        try:
            return self.node_ids.index(str(node_id))
        except ValueError:
            raise KeyError(f"unknown node {node_id!r}") from None

    def dof(self, node_id, component: str | int) -> int:
        comp = COMPONENTS[component] if isinstance(component, str) else int(component)
        return 3 * self.node_index(node_id) + comp

    def fix(self, node_id, components: Sequence[str] = ("u", "w", "phi")):
        for c in components:
            self.fixed.add(self.dof(node_id, c))

    def add_load(self, node_id, component: str, value: float):
        d = self.dof(node_id, component)
        self._loads[d] = self._loads.get(d, 0.0) + float(value)

    def add_element(self, name, element: BeamElement, node_a, node_b):
        ia, ib = self.node_index(node_a), self.node_index(node_b)
        p = place_element(element, self.coords[ia], self.coords[ib], name=str(name))
        self.entries.append(_ElementEntry(str(name), element, ia, ib, p))

    # -- queries --------------------------------------------------------
    @property
    def n_dof(self) -> int:
        return 3 * len(self.node_ids)

    @property
    def load_vector(self) -> np.ndarray:
        F = np.zeros(self.n_dof)
        for d, v in self._loads.items():
            F[d] = v
        return F

    def free_dofs(self, exclude: Sequence[int] = ()) -> np.ndarray:
        ex = set(self.fixed) | set(exclude)
        return np.array([d for d in range(self.n_dof) if d not in ex], dtype=int)

    def guesses(self) -> list[np.ndarray]:
        return [e.f_guess.copy() for e in self.entries]

    def set_guesses(self, fs):
        for e, f in zip(self.entries, fs):
            e.f_guess = np.array(f, dtype=float)

    def reset(self):
        for e in self.entries:
            e.f_guess = np.zeros(3)

    def validate(self):
        if not self.fixed:
            raise ValueError("model has no supports")
        if not self.entries:
            raise ValueError("model has no elements")


def assemble(model: StructureModel, u, options: SolverOptions | None = None, tangent: bool = True):
    """Internal end-force vector and tangent for the full DOF vector ``u``.

    Element guesses are updated in place with the converged forces.
    """
    opt = options or SolverOptions()
    u = np.asarray(u, dtype=float)
    n = model.n_dof
    fint = np.zeros(n)
    K = np.zeros((n, n)) if tangent else None
    for e in model.entries:
        idx = np.r_[3 * e.a : 3 * e.a + 3, 3 * e.b : 3 * e.b + 3]
        ua, ub = u[idx[:3]], u[idx[3:]]
        try:
            st = element_state(e.element, e.placement, ua, ub, e.f_guess, opt.shoot)
        except ElementError as exc:
            raise ElementError(f"element {e.name}: {exc}") from exc
        e.f_guess = st.f_local.copy()
        fint[idx] += st.forces
        if tangent:
            K[np.ix_(idx, idx)] += element_tangent(e.placement, ua, ub, st)
    return fint, K


# -- controls -------------------------------------------------------------


@dataclass(frozen=True)
class LoadControl:
    """Load factor raised to each value of ``targets`` in turn."""

    targets: tuple[float, ...]


@dataclass(frozen=True)
class DisplacementControl:
    """One DOF prescribed directly; its reaction is reported as the load."""

    dof: int
    targets: tuple[float, ...]
    load_factor: float = 0.0


@dataclass(frozen=True)
class IndirectControl:
    """Load factor unknown, adjusted so that ``dof`` follows ``targets``."""

    dof: int
    targets: tuple[float, ...]


@dataclass(frozen=True)
class ArcLength:
    ds: float
    n_steps: int
    psi: float = 0.0
    stop_dof: int | None = None
    stop_value: float | None = None  # stop once |u[stop_dof]| exceeds this
    stop_load: float | None = None  # stop once |lambda| exceeds this
    max_ds_factor: float = 1.0


def steps_to(total: float, n: int, start: float = 0.0) -> tuple[float, ...]:
    return tuple(start + (total - start) * (k + 1) / n for k in range(n))


@dataclass
class SolutionStep:
    step: int
    control: float
    lam: float
    load: float
    u: np.ndarray
    fint: np.ndarray
    f_local: list
    residual: float
    iterations: int
    det_sign: float = float("nan")


@dataclass(frozen=True)
class LimitPoint:
    control: float
    load: float
    u: np.ndarray


@dataclass
class PathResult:
    steps: list[SolutionStep]
    critical: LimitPoint | None = None
    max_load: LimitPoint | None = None

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.steps])

    def dof_history(self, dof: int) -> np.ndarray:
        return np.array([s.u[dof] for s in self.steps])


class _Problem:
    """Bordered Newton problem for one control mode."""

    def __init__(self, model: StructureModel, control, options: SolverOptions):
        self.model = model
        self.opt = options
        self.F = model.load_vector
        self.control = control
        self.c = getattr(control, "dof", None)
        if isinstance(control, DisplacementControl):
            if control.dof in model.fixed:
                raise ValueError("controlled DOF must not be fixed")
            self.eq = model.free_dofs(exclude=[control.dof])
        else:
            self.eq = model.free_dofs()
            if self.c is not None and self.c in model.fixed:
                raise ValueError("controlled DOF must not be fixed")
        self.bordered = isinstance(control, (IndirectControl, ArcLength))

    def load_of(self, u, lam, fint):
        if isinstance(self.control, DisplacementControl):
            return float(fint[self.c] - lam * self.F[self.c])
        return float(lam)

    def control_of(self, u, lam):
        if self.c is not None:
            return float(u[self.c])
        return float(lam)

    def scale(self, lam):
        return 1.0 + np.linalg.norm(lam * self.F)

    def det_sign(self, K):
        dofs = self.model.free_dofs()
        sign, _ = np.linalg.slogdet(K[np.ix_(dofs, dofs)])
        return float(sign)

    def newton(self, u, lam, constraint):
        """Iterate from ``(u, lam)``; ``constraint`` returns ``(g, dg_du_eq, dg_dlam)``."""
        opt = self.opt
        eq = self.eq
        u = u.copy()
        r0 = r_prev = step_n = math.inf
        for it in range(opt.max_iter + 1):
            fint, K = assemble(self.model, u, opt)
            r = lam * self.F - fint
            rE = r[eq]
            rn = float(np.linalg.norm(rE))
            tol_r = opt.tol_residual * self.scale(lam)
            if it == 0:
                r0 = max(rn, tol_r)
                stalled = False
            elif not math.isfinite(rn) or rn > 1e8 * r0:
                raise SolverError(f"global Newton diverged (residual {rn:.3e})")
            else:
                # an ill-conditioned tangent leaves the increment noisy once the
                # residual has hit round-off; accept when it stops decreasing
                stalled = it >= 2 and rn >= 0.5 * r_prev
            r_prev = rn
            if constraint is None:
                g = 0.0
                if it > 0 and rn <= tol_r and (
                    step_n <= opt.tol_increment * (1 + np.linalg.norm(u)) or rn <= 1e-4 * tol_r or stalled
                ):
                    return u, lam, fint, K, rn, it
                A = K[np.ix_(eq, eq)]
                b = rE
                dy = _solve(A, b)
                du, dlam = dy, 0.0
            else:
                g, dg_du, dg_dl = constraint(u, lam)
                g_ok = abs(g) <= 1e-10 * (1.0 + abs(constraint.scale))
                if it > 0 and rn <= tol_r and g_ok and (
                    step_n <= opt.tol_increment * (1 + np.linalg.norm(u)) or rn <= 1e-4 * tol_r or stalled
                ):
                    return u, lam, fint, K, rn, it
                m = eq.size
                J = np.zeros((m + 1, m + 1))
                J[:m, :m] = K[np.ix_(eq, eq)]
                J[:m, m] = -self.F[eq]
                J[m, :m] = dg_du
                J[m, m] = dg_dl
                rhs = np.concatenate([rE, [-g]])
                dy = _solve(J, rhs)
                du, dlam = dy[:m], dy[m]
            if not np.all(np.isfinite(du)) or not math.isfinite(dlam):
                raise SolverError("non-finite Newton update")
            u[eq] += du
            lam += dlam
            step_n = float(np.linalg.norm(du))
        raise SolverError(f"global Newton did not converge (residual {rn:.3e})")


def _solve(A, b):
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SolverError("singular global tangent") from exc
    if not np.all(np.isfinite(x)):
        raise SolverError("singular global tangent")
    return x


class _FixedDof:
    """Constraint ``u[c] = target``."""

    def __init__(self, eq, c, target):
        self.pos = int(np.nonzero(eq == c)[0][0])
        self.c = c
        self.target = target
        self.m = eq.size
        self.scale = abs(target)

    def __call__(self, u, lam):
        grad = np.zeros(self.m)
        grad[self.pos] = 1.0
        return u[self.c] - self.target, grad, 0.0


class _Sphere:
    """Spherical arc-length constraint around the last converged state."""

    def __init__(self, eq, u0, lam0, ds, psi2F2):
        self.eq = eq
        self.u0 = u0[eq].copy()
        self.lam0 = lam0
        self.ds = ds
        self.k = psi2F2
        self.scale = ds * ds

    def __call__(self, u, lam):
        du = u[self.eq] - self.u0
        dl = lam - self.lam0
        g = du @ du + self.k * dl * dl - self.ds**2
        return g, 2.0 * du, 2.0 * self.k * dl


def _snapshot(prob: _Problem, step, u, lam, fint, K, rn, it) -> SolutionStep:
    return SolutionStep(
        step=step,
        control=prob.control_of(u, lam),
        lam=float(lam),
        load=prob.load_of(u, lam, fint),
        u=u.copy(),
        fint=fint.copy(),
        f_local=prob.model.guesses(),
        residual=rn,
        iterations=it,
        det_sign=prob.det_sign(K),
    )


def _advance(prob: _Problem, state: SolutionStep, target: float) -> SolutionStep:
    """Move a load/displacement/indirect control from ``state`` to ``target``."""
    model = prob.model
    model.set_guesses(state.f_local)
    u = state.u.copy()
    lam = state.lam
    ctrl = prob.control
    eq = prob.eq
    # tangent predictor
    try:
        fint, K = assemble(model, u, prob.opt)
        Kee = K[np.ix_(eq, eq)]
        if isinstance(ctrl, LoadControl):
            u[eq] += _solve(Kee, prob.F[eq]) * (target - lam)
            lam = target
        elif isinstance(ctrl, DisplacementControl):
            delta = target - u[ctrl.dof]
            u[eq] -= _solve(Kee, K[eq, ctrl.dof]) * delta
            u[ctrl.dof] = target
        else:
            t = _solve(Kee, prob.F[eq])
            pos = int(np.nonzero(eq == ctrl.dof)[0][0])
            if abs(t[pos]) > 1e-300:
                dl = (target - u[ctrl.dof]) / t[pos]
                u[eq] += t * dl
                lam += dl
    except (SolverError, ElementError):
        u = state.u.copy()
        lam = state.lam
        if isinstance(ctrl, LoadControl):
            lam = target
        elif isinstance(ctrl, DisplacementControl):
            u[ctrl.dof] = target
    model.set_guesses(state.f_local)
    constraint = _FixedDof(eq, ctrl.dof, target) if isinstance(ctrl, IndirectControl) else None
    u, lam, fint, K, rn, it = prob.newton(u, lam, constraint)
    return _snapshot(prob, state.step + 1, u, lam, fint, K, rn, it)


def _advance_halving(prob: _Problem, state: SolutionStep, target: float, depth: int = 0) -> SolutionStep:
    try:
        return _advance(prob, state, target)
    except (SolverError, ElementError) as exc:
        if depth >= prob.opt.max_halvings:
            raise PathFailure(f"step to control value {target:.6g} failed: {exc}") from exc
    mid = 0.5 * (state.control + target)
    half = _advance_halving(prob, state, mid, depth + 1)
    return _advance_halving(prob, half, target, depth + 1)


def _advance_guarded(prob: _Problem, state: SolutionStep, target: float, rate_prev, depth: int = 0):
    """Advance and reject jumps onto another branch (snap-back under the chosen control)."""
    new = _advance_halving(prob, state, target)
    dc = abs(target - state.control)
    rate = float(np.linalg.norm(new.u - state.u)) / dc if dc > 0 else 0.0
    jump = prob.opt.jump_factor
    if jump is None or rate_prev is None or rate_prev == 0.0 or rate <= jump * rate_prev:
        return new, rate
    if depth >= prob.opt.max_halvings:
        raise PathFailure(
            f"equilibrium path jumps near control value {state.control:.6g} "
            f"(displacement rate grew {rate / rate_prev:.3g}x); this control cannot follow the path, use arc-length"
        )
    mid = 0.5 * (state.control + target)
    half, r1 = _advance_guarded(prob, state, mid, rate_prev, depth + 1)
    return _advance_guarded(prob, half, target, r1, depth + 1)


def _initial_state(prob: _Problem) -> SolutionStep:
    model = prob.model
    model.reset()
    u = np.zeros(model.n_dof)
    fint, K = assemble(model, u, prob.opt)
    return _snapshot(prob, 0, u, 0.0, fint, K, 0.0, 0)


def _arc_step(prob: _Problem, state: SolutionStep, prev: SolutionStep | None, ds: float) -> SolutionStep:
    model = prob.model
    eq = prob.eq
    F = prob.F
    psi2F2 = prob.control.psi**2 * float(F @ F)
    model.set_guesses(state.f_local)
    fint, K = assemble(model, state.u, prob.opt)
    Kee = K[np.ix_(eq, eq)]
    try:
        t = np.linalg.solve(Kee, F[eq])
    except np.linalg.LinAlgError:
        t = np.linalg.lstsq(Kee, F[eq], rcond=None)[0]
    dl = ds / math.sqrt(t @ t + psi2F2)
    if prev is not None:
        du_prev = state.u[eq] - prev.u[eq]
        dl_prev = state.lam - prev.lam
        if t @ du_prev * dl + psi2F2 * dl_prev * dl < 0:
            dl = -dl
    u = state.u.copy()
    u[eq] += t * dl
    lam = state.lam + dl
    model.set_guesses(state.f_local)
    u, lam, fint, K, rn, it = prob.newton(u, lam, _Sphere(eq, state.u, state.lam, ds, psi2F2))
    # reject a solution that went backwards along the path
    if prev is not None:
        du_prev = state.u[eq] - prev.u[eq]
        dl_prev = state.lam - prev.lam
        if (u[eq] - state.u[eq]) @ du_prev + psi2F2 * (lam - state.lam) * dl_prev < 0:
            raise SolverError("arc-length step reversed direction")
    return _snapshot(prob, state.step + 1, u, lam, fint, K, rn, it)


def _run_arc(prob: _Problem, state: SolutionStep, steps: list) -> list:
    ctrl: ArcLength = prob.control
    ds = ctrl.ds
    prev = None
    for _ in range(ctrl.n_steps):
        trial = ds
        for h in range(prob.opt.max_halvings + 1):
            try:
                new = _arc_step(prob, state, prev, trial)
                break
            except (SolverError, ElementError) as exc:
                err = exc
                trial *= 0.5
        else:
            raise PathFailure(f"arc-length step failed after {prob.opt.max_halvings} halvings: {err}", steps)
        # keep a length that worked after a cut, then grow back towards the cap
        ds = trial if trial < ds else min(ctrl.ds * ctrl.max_ds_factor, 2.0 * ds)
        prev, state = state, new
        steps.append(new)
        if ctrl.stop_dof is not None and ctrl.stop_value is not None and abs(new.u[ctrl.stop_dof]) >= ctrl.stop_value:
            break
        if ctrl.stop_load is not None and abs(new.lam) >= ctrl.stop_load:
            break
    return steps


def solve_path(
    model: StructureModel,
    control,
    options: SolverOptions | None = None,
    detect_critical: bool = False,
    refine_max_load: bool = False,
) -> PathResult:
    """Trace an equilibrium path from the undeformed state."""
    model.validate()
    opt = options or SolverOptions()
    prob = _Problem(model, control, opt)
    state = _initial_state(prob)
    steps = [state]
    if isinstance(control, ArcLength):
        _run_arc(prob, state, steps)
        return PathResult(steps)

    rate = None
    for target in control.targets:
        try:
            state, rate = _advance_guarded(prob, state, float(target), rate)
        except PathFailure as exc:
            raise PathFailure(str(exc), steps) from exc
        state.step = len(steps)
        steps.append(state)

    result = PathResult(steps)
    if detect_critical:
        result.critical = _find_critical(prob, steps)
    if refine_max_load:
        result.max_load = _find_max_load(prob, steps)
    return result


def _find_critical(prob: _Problem, steps: list[SolutionStep]) -> LimitPoint | None:
    """First sign change of the load-control tangent determinant, bisected."""
    for k in range(1, len(steps)):
        if steps[k].det_sign != steps[k - 1].det_sign:
            lo, hi = steps[k - 1], steps[k]
            for _ in range(60):
                if abs(hi.control - lo.control) <= 1e-12 * (1.0 + abs(hi.control)):
                    break
                mid = _advance_halving(prob, lo, 0.5 * (lo.control + hi.control))
                if mid.det_sign == lo.det_sign:
                    lo = mid
                else:
                    hi = mid
            return LimitPoint(0.5 * (lo.control + hi.control), 0.5 * (lo.load + hi.load), 0.5 * (lo.u + hi.u))
    return None


def _find_max_load(prob: _Problem, steps: list[SolutionStep]) -> LimitPoint | None:
    loads = np.array([s.load for s in steps])
    for k in range(1, len(steps) - 1):
        if loads[k] >= loads[k - 1] and loads[k] >= loads[k + 1] and loads[k] > 0:
            base = steps[k - 1]
            cache = {}

            def neg_load(c):
                st = _advance_halving(prob, base, float(c))
                cache[c] = st
                return -st.load

            a, b = steps[k - 1].control, steps[k + 1].control
            res = optimize.minimize_scalar(
                neg_load, bounds=(min(a, b), max(a, b)), method="bounded",
                options={"xatol": 1e-10 * max(abs(a), abs(b), 1e-300)},
            )
            st = cache.get(res.x) or _advance_halving(prob, base, float(res.x))
            return LimitPoint(float(res.x), st.load, st.u)
    return None


def initial_stiffness_ratio(model: StructureModel, dof: int, total_load: float | None = None) -> float:
    """Load-to-deflection ratio from the tangent in the undeformed state.

    The reference load pattern is applied with unit factor; ``total_load``
    is the load reported in the ratio (defaults to the load at ``dof``).
    """
    model.validate()
    model.reset()
    F = model.load_vector
    fint, K = assemble(model, np.zeros(model.n_dof))
    free = model.free_dofs()
    d = _solve(K[np.ix_(free, free)], F[free])
    pos = int(np.nonzero(free == dof)[0][0])
    P = F[dof] if total_load is None else total_load
    return float(P / d[pos])
