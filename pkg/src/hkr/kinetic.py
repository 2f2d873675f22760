"""Kinetic equilibria, velocity selection, and the relaxation-source step.

The two-velocity kinetic decomposition carries f+ and f- with f+ + f- = u and
equilibria m+-(u) = u/2 +- F(u)/(2 lambda). The relaxation step advances the
cell ODE u' = S(u, x) - S(u_e, x) with Crank-Nicolson and then projects the
kinetic variables with the over-relaxation parameter omega. The kinetic
source terms themselves (gradient of m+- times S) are never formed: their
effect is entirely captured by the macroscopic source solve followed by the
projection, which also avoids flux Jacobians.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfigurationError, StepFailureError

OMEGA_FLOOR = 1e-12


def maxwellian(u, lam: float, sign: int, model):
    """Kinetic equilibrium m+-(u) = u/2 +- F(u)/(2 lambda)."""
    if lam <= 0.0:
        raise ConfigurationError("kinetic velocity lambda must be positive")
    return 0.5 * u + (0.5 * sign / lam) * model.flux(u)


def maxwellian_pair(u, lam: float, model):
    if lam <= 0.0:
        raise ConfigurationError("kinetic velocity lambda must be positive")
    half_flux = model.flux(u) / (2.0 * lam)
    half_u = 0.5 * u
    return half_u + half_flux, half_u - half_flux


def recover_u(fplus, fminus):
    return fplus + fminus


def equilibrium_of_profile(values, valid, lam: float, sign: int, model):
    """m+- applied to steady-profile values, with invalid rows mapped to zero.

    Invalid rows hold the zero fallback state, for which the equilibrium is
    the zero vector by the limit F(0) = 0; computing the flux there directly
    would divide by zero for the depth/density models.
    """
    out = np.zeros_like(values)
    if valid.all():
        return maxwellian(values, lam, sign, model)
    if valid.any():
        out[valid] = maxwellian(values[valid], lam, sign, model)
    return out


@dataclass(frozen=True)
class RelaxConfig:
    """Relaxation law turning the step size into the projection weight omega.

    ``omega_linear``: omega = 2 - C dt (the default, C=1).
    ``omega_from_tau``: tau = c_tau dt^2, omega = 2 dt / (2 tau + dt).
    Either way omega is clamped into (0, 2].
    """

    law: str = "omega_linear"
    C: float = 1.0
    c_tau: float = 0.25

    def __post_init__(self):
        if self.law not in ("omega_linear", "omega_from_tau"):
            raise ConfigurationError(f"unknown relaxation law {self.law!r}")


def omega(dt: float, cfg: RelaxConfig) -> float:
    if cfg.law == "omega_linear":
        w = 2.0 - cfg.C * dt
    else:
        tau = cfg.c_tau * dt * dt
        w = 2.0 * dt / (2.0 * tau + dt) if dt != 0.0 else 2.0
    return min(2.0, max(w, OMEGA_FLOOR))


def choose_lambda(u, profiles, own_nodes, model, safety: float = 1.0,
                  floor: float = 1e-8) -> float:
    """Kinetic velocity dominating both transient and steady wave speeds."""
    if safety < 1.0:
        raise ConfigurationError("lambda safety factor must be >= 1")
    lam = float(model.max_speed(u).max())
    rows = np.flatnonzero(profiles.valid)
    if rows.size:
        vals = profiles.take(rows).evaluate(own_nodes[rows])
        lam = max(lam, float(model.max_speed(vals).max()))
    return safety * max(lam, floor)


def source_step(u_star, steady_avg, x, dt: float, model, tol: float = 1e-12,
                max_iter: int = 50):
    """Crank-Nicolson solve of u' = S(u, x) - S(u_e, x) over one step.

    Newton iteration starts from u_star and converges immediately (zero
    iterations) when the state sits on the steady average, which keeps steady
    data an exact fixed point. Tolerance is absolute per component, scaled by
    1 + |u|.
    """
    u_star = np.asarray(u_star, dtype=float)
    se = model.source(steady_avg, x)
    target = u_star + 0.5 * dt * (model.source(u_star, x) - 2.0 * se)
    u = u_star.copy()
    m = u.shape[-1]
    eye = np.eye(m)
    for _ in range(max_iter + 1):
        resid = u - 0.5 * dt * model.source(u, x) - target
        if (np.abs(resid) <= tol * (1.0 + np.abs(u))).all():
            return u
        jac = eye - 0.5 * dt * model.source_jacobian(u, x)
        u = u + np.linalg.solve(jac, -resid[..., None])[..., 0]
        if not np.isfinite(u).all():
            break
    bad = int(np.argmax(~(np.abs(resid) <= tol * (1.0 + np.abs(u))).all(axis=-1)))
    raise StepFailureError(f"source Newton did not converge (first at cell {bad})")


def projection_step(fplus, fminus, u_star, u_next, w: float, lam: float, model):
    """Over-relaxation projection toward the averaged equilibria."""
    mp_s, mm_s = maxwellian_pair(u_star, lam, model)
    mp_n, mm_n = maxwellian_pair(u_next, lam, model)
    fp = (1.0 - w) * fplus + 0.5 * w * (mp_s + mp_n)
    fm = (1.0 - w) * fminus + 0.5 * w * (mm_s + mm_n)
    return fp, fm
