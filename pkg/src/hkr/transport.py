"""Transport backends for the kinetic fluctuation equation.

All three backends advance the fluctuations f+- minus their steady kinetic
projection: the explicit finite volume update (orders 1-3 via re-reconstructed
Heun stages), the unconditionally stable implicit update (backward Euler or
trapezoidal, reduced to bidiagonal sweeps per family), and semi-Lagrangian
characteristic backtracking through a globally continuous reconstruction.
Each backend leaves quadrature averages of a fitted steady state invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .boundary import BoundaryCondition
from .core import (ConfigurationError, Mesh1D, QuadratureRule,
                   StepFailureError)
from .kinetic import (choose_lambda, equilibrium_of_profile, maxwellian,
                      maxwellian_pair)
from .models import profile_cell_averages
from .reconstruction import RADIUS, WBReconstructor

CFL_TOL = 1e-9


@dataclass
class StepContext:
    """Frozen per-step data shared by every sub-stage of a splitting step.

    Steady profiles and the kinetic velocity are chosen once per outer step;
    sub-stages only re-reconstruct the fluctuations.
    """

    model: object
    mesh: Mesh1D
    quad: QuadratureRule
    bc: BoundaryCondition
    base_kind: str
    rk_stages: int
    lam: float
    profiles: object
    steady_avg: np.ndarray   # (nx, m) quadrature average of each cell's profile
    dfe_plus: np.ndarray     # (nx, m) f^e_+ right-minus-left interface gap
    dfe_minus: np.ndarray
    fe_center_plus: np.ndarray   # (nx, m) m+-(profile at cell center)
    fe_center_minus: np.ndarray
    centers: np.ndarray
    scaffold: WBReconstructor


def build_context(u, model, mesh: Mesh1D, quad: QuadratureRule, base_kind: str,
                  bc: BoundaryCondition, rk_stages: int = 1,
                  lambda_safety: float = 1.0, lambda_floor: float = 1e-8,
                  pinned=None) -> StepContext:
    """Fit steady profiles from the current averages and freeze step data."""
    r = RADIUS[base_kind]
    own_nodes = mesh.cell_nodes(quad)
    probe_cells = (np.arange(mesh.nx)[:, None]
                   + np.arange(-(r + 1), r + 2)[None, :])
    probe_nodes = (mesh.a + probe_cells[..., None] * mesh.dx
                   + quad.nodes[None, None, :] * mesh.dx).reshape(mesh.nx, -1)
    profiles = model.steady_fit(u, own_nodes, quad.weights, probe_nodes)
    if pinned is not None:
        idx, prof = pinned
        profiles.assign(idx, prof)
    lam = choose_lambda(u, profiles, own_nodes, model, lambda_safety, lambda_floor)
    steady_avg = profile_cell_averages(profiles, own_nodes, quad)
    steady_avg[~profiles.valid] = 0.0
    centers = mesh.centers()
    half = 0.5 * mesh.dx
    valid = profiles.valid
    eL = profiles.evaluate(centers - half)
    eR = profiles.evaluate(centers + half)
    dfe_plus = (equilibrium_of_profile(eR, valid, lam, +1, model)
                - equilibrium_of_profile(eL, valid, lam, +1, model))
    dfe_minus = (equilibrium_of_profile(eR, valid, lam, -1, model)
                 - equilibrium_of_profile(eL, valid, lam, -1, model))
    eC = profiles.evaluate(centers)
    fe_center_plus = equilibrium_of_profile(eC, valid, lam, +1, model)
    fe_center_minus = equilibrium_of_profile(eC, valid, lam, -1, model)
    scaffold = WBReconstructor(mesh, quad, base_kind, bc, profiles, n_recon_ghost=1)
    return StepContext(model, mesh, quad, bc, base_kind, rk_stages, lam, profiles,
                       steady_avg, dfe_plus, dfe_minus, fe_center_plus,
                       fe_center_minus, centers, scaffold)


def _upwind_traces(rec, ctx):
    """Kinetic interface traces of both families at every reconstructed cell."""
    uL, uR = rec.edge_values()
    return (maxwellian(uL, ctx.lam, +1, ctx.model),
            maxwellian(uR, ctx.lam, +1, ctx.model),
            maxwellian(uL, ctx.lam, -1, ctx.model),
            maxwellian(uR, ctx.lam, -1, ctx.model))


def _explicit_substep(fp, fm, ctx, dt):
    nu = ctx.lam * dt / ctx.mesh.dx
    if abs(nu) > 1.0 + CFL_TOL:
        raise ConfigurationError(
            f"explicit transport violates the CFL restriction (|nu|={abs(nu):.3f})")
    rec = ctx.scaffold.reconstruct(fp + fm)
    mpL, mpR, mmL, mmR = _upwind_traces(rec, ctx)
    if nu >= 0.0:
        diff_p = mpR[1:-1] - mpR[:-2]
        diff_m = mmL[2:] - mmL[1:-1]
    else:
        diff_p = mpL[2:] - mpL[1:-1]
        diff_m = mmR[1:-1] - mmR[:-2]
    fp_new = fp - nu * (diff_p - ctx.dfe_plus)
    fm_new = fm + nu * (diff_m - ctx.dfe_minus)
    return fp_new, fm_new


def fv_explicit_step(fp, fm, ctx: StepContext, dt: float):
    """Upwind finite volume transport; Heun stages when ctx.rk_stages == 2."""
    f1p, f1m = _explicit_substep(fp, fm, ctx, dt)
    if ctx.rk_stages == 1:
        return f1p, f1m
    f2p, f2m = _explicit_substep(f1p, f1m, ctx, dt)
    return 0.5 * (fp + f2p), 0.5 * (fm + f2m)


def _sweep_lower(c: float, rhs: np.ndarray, periodic: bool) -> np.ndarray:
    """Solve (1+c) phi_i - c phi_{i-1} = rhs_i by a left-to-right sweep."""
    n = rhs.shape[0]
    if abs(1.0 + c) < 1e-14:
        raise StepFailureError("singular implicit transport closure")
    ab = np.zeros((2, n))
    ab[0] = 1.0 + c
    ab[1, :-1] = -c
    phi = solve_banded((1, 0), ab, rhs)
    if periodic and n > 1:
        e = np.zeros((n, 1))
        e[0, 0] = c
        h = solve_banded((1, 0), ab, e)[:, 0]
        denom = 1.0 - h[-1]
        if abs(denom) < 1e-14:
            raise StepFailureError("singular periodic closure in implicit transport")
        phi_last = phi[-1] / denom
        phi = phi + h[:, None] * phi_last[None, :]
    return phi


def _sweep_upper(c: float, rhs: np.ndarray, periodic: bool) -> np.ndarray:
    return _sweep_lower(c, rhs[::-1], periodic)[::-1]


def fv_implicit_step(fp, fm, ctx: StepContext, dt: float, variant: str):
    """Implicit upwind transport; the unknowns enter only through the
    piecewise-constant temporal fluctuation, so each family reduces to a
    bidiagonal solve (rank-one corrected under periodic boundaries)."""
    if dt <= 0.0:
        raise ConfigurationError("implicit transport requires a positive step")
    nu = ctx.lam * dt / ctx.mesh.dx
    rec = ctx.scaffold.reconstruct(fp + fm)
    mpL, mpR, mmL, mmR = _upwind_traces(rec, ctx)
    d_plus = (mpR[1:-1] - mpR[:-2]) - ctx.dfe_plus
    d_minus = (mmL[2:] - mmL[1:-1]) - ctx.dfe_minus
    if variant == "backward_euler":
        c = nu
    elif variant == "trapezoidal":
        c = 0.5 * nu
    else:
        raise ConfigurationError(f"unknown implicit variant {variant!r}")
    periodic = ctx.bc.kind == "periodic"
    phi_p = _sweep_lower(c, -nu * d_plus, periodic)
    phi_m = _sweep_upper(c, nu * d_minus, periodic)
    return fp + phi_p, fm + phi_m


def sl_step(fp, fm, ctx: StepContext, dt: float):
    """Semi-Lagrangian transport: evaluate the continuous reconstruction at
    the characteristic feet and correct with the cell's own steady extension."""
    mesh = ctx.mesh
    shift = ctx.lam * dt
    nghost = int(np.ceil(abs(shift) / mesh.dx)) + 1
    scaffold = WBReconstructor(mesh, ctx.quad, ctx.base_kind, ctx.bc,
                               ctx.profiles, n_recon_ghost=nghost)
    rec = scaffold.reconstruct(fp + fm)
    feet_p = ctx.centers - shift
    feet_m = ctx.centers + shift
    up = rec.evaluate_continuous(feet_p)
    um = rec.evaluate_continuous(feet_m)
    valid = ctx.profiles.valid
    prof_p = equilibrium_of_profile(ctx.profiles.evaluate(feet_p), valid,
                                    ctx.lam, +1, ctx.model)
    prof_m = equilibrium_of_profile(ctx.profiles.evaluate(feet_m), valid,
                                    ctx.lam, -1, ctx.model)
    fp_new = maxwellian(up, ctx.lam, +1, ctx.model) - prof_p + ctx.fe_center_plus
    fm_new = maxwellian(um, ctx.lam, -1, ctx.model) - prof_m + ctx.fe_center_minus
    return fp_new, fm_new
