"""Reference solver: first-order exactly well-balanced local Lax-Friedrichs.

Solves the balance law directly (no kinetic decomposition) with the
piecewise-constant well-balanced reconstruction, a Rusanov interface flux, the
steady-flux correction, and the source quadrature of the fluctuations. Used to
generate fine-mesh reference solutions the kinetic schemes are checked against.
"""

from __future__ import annotations

import numpy as np

from .boundary import BoundaryCondition
from .core import (CellField, ConfigurationError, Mesh1D, StepFailureError,
                   midpoint_rule)
from .models import profile_cell_averages
from .reconstruction import WBReconstructor


def llf_wb_step(u: np.ndarray, model, mesh: Mesh1D, bc: BoundaryCondition,
                dt: float, quad=None) -> np.ndarray:
    """One forward-Euler step of the well-balanced LLF scheme."""
    quad = quad or midpoint_rule()
    own_nodes = mesh.cell_nodes(quad)
    probe_cells = np.arange(mesh.nx)[:, None] + np.arange(-1, 2)[None, :]
    probe_nodes = (mesh.a + probe_cells[..., None] * mesh.dx
                   + quad.nodes[None, None, :] * mesh.dx).reshape(mesh.nx, -1)
    profiles = model.steady_fit(u, own_nodes, quad.weights, probe_nodes)
    scaffold = WBReconstructor(mesh, quad, "constant", bc, profiles, n_recon_ghost=1)
    rec = scaffold.reconstruct(u)
    uL, uR = rec.edge_values()            # reconstructed cells -1 .. nx
    u_minus = uR[:-1]                      # left state at interfaces 0 .. nx
    u_plus = uL[1:]                        # right state at interfaces
    f_minus = model.flux(u_minus)
    f_plus = model.flux(u_plus)
    speed = np.maximum(model.max_speed(u_minus), model.max_speed(u_plus))
    flux = 0.5 * (f_minus + f_plus) - 0.5 * speed[:, None] * (u_plus - u_minus)

    valid = profiles.valid
    half = 0.5 * mesh.dx
    centers = mesh.centers()
    eL = profiles.evaluate(centers - half)
    eR = profiles.evaluate(centers + half)
    fe_gap = np.zeros_like(u)
    if valid.any():
        rows = np.flatnonzero(valid)
        fe_gap[rows] = model.flux(eR[rows]) - model.flux(eL[rows])

    # source quadrature of the fluctuation part
    rec_vals = rec.evaluate(np.repeat(np.arange(mesh.nx), quad.npoints),
                            own_nodes.ravel()).reshape(mesh.nx, quad.npoints, -1)
    prof_vals = profiles.evaluate(own_nodes)
    src = np.einsum("m,cm...->c...",
                    quad.weights,
                    model.source(rec_vals, own_nodes)
                    - model.source(prof_vals, own_nodes))

    return u + dt * (-(flux[1:] - flux[:-1]) / mesh.dx + fe_gap / mesh.dx + src)


def run_llf(model, mesh: Mesh1D, u0: np.ndarray, t_end: float,
            cfl: float = 0.45, bc: BoundaryCondition | None = None,
            max_steps: int = 10 ** 8) -> np.ndarray:
    """Advance the LLF scheme to t_end with a wave-speed-based step size."""
    bc = bc or BoundaryCondition()
    u = np.array(u0, dtype=float)
    t = 0.0
    eps = 1e-12 * max(1.0, abs(t_end))
    steps = 0
    while t < t_end - eps:
        dt = min(cfl * mesh.dx / max(float(model.max_speed(u).max()), 1e-8),
                 t_end - t)
        u = llf_wb_step(u, model, mesh, bc, dt)
        if not np.isfinite(u).all():
            raise StepFailureError(f"reference solver produced NaN at t={t:g}")
        t += dt
        steps += 1
        if steps >= max_steps:
            raise StepFailureError("reference solver exceeded maximum step count")
    return u


def restrict_block(values: np.ndarray, nx_out: int) -> np.ndarray:
    """Conservative restriction by exact block averaging."""
    nx_ref = values.shape[0]
    if nx_ref % nx_out != 0:
        raise ConfigurationError(
            f"reference mesh {nx_ref} is not a multiple of the target {nx_out}")
    k = nx_ref // nx_out
    return values.reshape(nx_out, k, -1).mean(axis=1)


def make_reference(case, nx_ref: int, nx_out: int | None = None,
                   cfl: float = 0.45) -> CellField:
    """Run the case on a fine LLF mesh and restrict to the comparison mesh.

    ``case`` provides model_factory, domain (a, b), ic, t_end, and bc_kind;
    nx_ref must be a multiple of nx_out.
    """
    nx_out = nx_out or case.nx
    if nx_ref % nx_out != 0:
        raise ConfigurationError(
            f"nx_ref={nx_ref} is not a multiple of nx={nx_out}")
    model = case.model_factory()
    mesh = Mesh1D(case.a, case.b, nx_ref)
    quad = midpoint_rule()
    nodes = mesh.cell_nodes(quad)
    u0 = np.einsum("m,cm...->c...", quad.weights,
                   np.asarray(case.ic(nodes), dtype=float))
    u = run_llf(model, mesh, u0, case.t_end, cfl=cfl,
                bc=BoundaryCondition(case.bc_kind))
    out_mesh = Mesh1D(case.a, case.b, nx_out)
    return CellField(out_mesh, restrict_block(u, nx_out))
