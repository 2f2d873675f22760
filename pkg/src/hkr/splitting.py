"""Scheme assembly: Lie/Strang/Suzuki compositions of transport and relaxation.

The six scheme labels fix the transport backend, the base reconstruction fed
to the well-balanced wrapper, the splitting, and the quadrature rule. Steady
profiles and the kinetic velocity are frozen once per outer step, so every
sub-operator of a composition preserves steady averages individually.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .boundary import BoundaryCondition, sponge_damp
from .core import (CellField, ConfigurationError, Mesh1D, StepFailureError,
                   quadrature_rule)
from .kinetic import (RelaxConfig, maxwellian_pair, omega, projection_step,
                      source_step)
from .transport import (StepContext, build_context, fv_explicit_step,
                        fv_implicit_step, sl_step)

_CBRT4 = 4.0 ** (1.0 / 3.0)
SUZUKI_GAMMA0 = 1.0 / (4.0 - _CBRT4)
# consistency (sum = 1) forces the middle coefficient negative
SUZUKI_GAMMAS = (SUZUKI_GAMMA0, SUZUKI_GAMMA0, 1.0 - 4.0 * SUZUKI_GAMMA0,
                 SUZUKI_GAMMA0, SUZUKI_GAMMA0)


@dataclass(frozen=True)
class SchemeDef:
    label: str
    transport: str       # explicit | implicit_be | implicit_trap | semi_lagrangian
    base: str            # constant | muscl | cwenoz3
    splitting: str       # lie | strang | suzuki
    rk_stages: int
    quad: str
    order: int

    @property
    def explicit(self) -> bool:
        return self.transport == "explicit"


SCHEMES = {
    "FV-HKR-O1-Exp": SchemeDef("FV-HKR-O1-Exp", "explicit", "constant", "lie", 1, "midpoint", 1),
    "FV-HKR-O2-Exp": SchemeDef("FV-HKR-O2-Exp", "explicit", "muscl", "strang", 2, "midpoint", 2),
    "FV-HKR-O3-Exp": SchemeDef("FV-HKR-O3-Exp", "explicit", "cwenoz3", "suzuki", 2, "gauss2", 3),
    "FV-HKR-O1-Imp": SchemeDef("FV-HKR-O1-Imp", "implicit_be", "constant", "lie", 1, "midpoint", 1),
    "FV-HKR-O2-Imp": SchemeDef("FV-HKR-O2-Imp", "implicit_trap", "muscl", "strang", 1, "midpoint", 2),
    "SL-HKR-O1": SchemeDef("SL-HKR-O1", "semi_lagrangian", "constant", "lie", 1, "midpoint", 1),
}

SCHEME_LABELS = tuple(SCHEMES)


def scheme_def(label: str) -> SchemeDef:
    try:
        return SCHEMES[label]
    except KeyError:
        raise ConfigurationError(
            f"unknown scheme {label!r}; valid labels: {', '.join(SCHEME_LABELS)}"
        ) from None


def splitting_plan(kind: str, dt: float):
    """Ordered (operator, substep) pairs; first entry is applied first."""
    if kind == "lie":
        return [("T", dt), ("R", dt)]
    if kind == "strang":
        return [("T", 0.5 * dt), ("R", dt), ("T", 0.5 * dt)]
    if kind == "suzuki":
        plan = []
        for g in reversed(SUZUKI_GAMMAS):
            h = g * dt
            plan += [("T", 0.25 * h), ("R", 0.5 * h), ("T", 0.5 * h),
                     ("R", 0.5 * h), ("T", 0.25 * h)]
        return plan
    raise ConfigurationError(f"unknown splitting {kind!r}")


@dataclass
class KineticState:
    fplus: np.ndarray
    fminus: np.ndarray
    t: float = 0.0

    @property
    def u(self) -> np.ndarray:
        return self.fplus + self.fminus


def lie_step(transport, relax, state, dt):
    """R(dt) o T(dt) applied to an (fp, fm) pair."""
    return relax(*transport(*state, dt), dt)


def strang_step(transport, relax, state, dt):
    fp, fm = transport(*state, 0.5 * dt)
    fp, fm = relax(fp, fm, dt)
    return transport(fp, fm, 0.5 * dt)


def suzuki_step(transport, relax, state, dt):
    fp, fm = state
    for op, h in splitting_plan("suzuki", dt):
        fp, fm = transport(fp, fm, h) if op == "T" else relax(fp, fm, h)
    return fp, fm


class KineticScheme:
    """Driver advancing a kinetic state with one of the six scheme variants."""

    def __init__(self, model, mesh: Mesh1D, label: str, cfl: float = 0.9,
                 bc: BoundaryCondition | None = None,
                 relax: RelaxConfig | None = None,
                 lambda_safety: float = 1.0, lambda_floor: float = 1e-8,
                 pinned=None, sponge_background: np.ndarray | None = None):
        self.model = model
        self.mesh = mesh
        self.sdef = scheme_def(label)
        if cfl <= 0.0:
            raise ConfigurationError("cfl must be positive")
        if self.sdef.explicit and cfl > 1.0:
            raise ConfigurationError("explicit schemes require cfl <= 1")
        self.cfl = cfl
        self.bc = bc or BoundaryCondition()
        self.relax = relax or RelaxConfig()
        self.quad = quadrature_rule(self.sdef.quad)
        self.lambda_safety = lambda_safety
        self.lambda_floor = lambda_floor
        self.pinned = pinned
        self.sponge_background = sponge_background

    @property
    def label(self) -> str:
        return self.sdef.label

    def _context(self, u) -> StepContext:
        return build_context(u, self.model, self.mesh, self.quad, self.sdef.base,
                             self.bc, self.sdef.rk_stages, self.lambda_safety,
                             self.lambda_floor, self.pinned)

    def initialize(self, u0: CellField | np.ndarray) -> KineticState:
        u = u0.values if isinstance(u0, CellField) else np.atleast_2d(np.asarray(u0, float))
        ctx = self._context(u)
        fp, fm = maxwellian_pair(u, ctx.lam, self.model)
        return KineticState(fp, fm, 0.0)

    def _transport(self, ctx):
        kind = self.sdef.transport
        if kind == "explicit":
            return lambda fp, fm, h: fv_explicit_step(fp, fm, ctx, h)
        if kind == "implicit_be":
            return lambda fp, fm, h: fv_implicit_step(fp, fm, ctx, h, "backward_euler")
        if kind == "implicit_trap":
            return lambda fp, fm, h: fv_implicit_step(fp, fm, ctx, h, "trapezoidal")
        if kind == "semi_lagrangian":
            return lambda fp, fm, h: sl_step(fp, fm, ctx, h)
        raise ConfigurationError(f"unknown transport backend {kind!r}")

    def _relax(self, ctx):
        def op(fp, fm, h):
            u_star = fp + fm
            u_next = source_step(u_star, ctx.steady_avg, ctx.centers, h, self.model)
            return projection_step(fp, fm, u_star, u_next, omega(h, self.relax),
                                   ctx.lam, self.model)
        return op

    def step(self, state: KineticState, dt: float | None = None,
             t_limit: float | None = None) -> KineticState:
        """Advance one outer step. dt defaults to cfl*dx/lambda, clipped at t_limit."""
        u = state.u
        if not np.isfinite(u).all():
            raise StepFailureError(f"non-finite state at t={state.t:g}")
        ctx = self._context(u)
        if dt is None:
            dt = self.cfl * self.mesh.dx / ctx.lam
        if t_limit is not None:
            dt = min(dt, t_limit - state.t)
        if dt <= 0.0:
            raise ConfigurationError("step size must be positive")
        transport = self._transport(ctx)
        relax = self._relax(ctx)
        fp, fm = state.fplus, state.fminus
        for op, h in splitting_plan(self.sdef.splitting, dt):
            if h == 0.0:
                continue
            fp, fm = transport(fp, fm, h) if op == "T" else relax(fp, fm, h)
        if self.bc.sponge is not None and self.sponge_background is not None:
            bg_p, bg_m = maxwellian_pair(self.sponge_background, ctx.lam, self.model)
            fp = sponge_damp(fp, bg_p, self.bc.sponge)
            fm = sponge_damp(fm, bg_m, self.bc.sponge)
        if not (np.isfinite(fp).all() and np.isfinite(fm).all()):
            raise StepFailureError(f"non-finite state produced at t={state.t + dt:g}")
        return KineticState(fp, fm, state.t + dt)

    def run(self, state: KineticState, t_end: float, fixed_dt: float | None = None,
            callback=None, max_steps: int = 10 ** 8) -> KineticState:
        eps = 1e-12 * max(1.0, abs(t_end))
        steps = 0
        while state.t < t_end - eps:
            state = self.step(state, dt=fixed_dt, t_limit=t_end)
            if callback is not None:
                callback(state)
            steps += 1
            if steps >= max_steps:
                raise StepFailureError("maximum step count exceeded")
        return state

    def solve(self, u0: CellField, t_end: float, **kwargs) -> CellField:
        state = self.run(self.initialize(u0), t_end, **kwargs)
        return CellField(self.mesh, state.u)
