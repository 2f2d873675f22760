"""Ghost-cell population, index maps for padded stencils, and sponge damping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfigurationError, Mesh1D

KINDS = ("periodic", "free_flow")


@dataclass(frozen=True)
class SpongeLayer:
    """Quadratic blending toward the steady background in the outermost cells."""

    width: int = 10
    strength: float = 0.5

    def __post_init__(self):
        if self.width < 1 or not 0.0 <= self.strength <= 1.0:
            raise ConfigurationError("sponge needs width >= 1 and strength in [0, 1]")


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str = "free_flow"
    sponge: SpongeLayer | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown boundary kind {self.kind!r}")


def pad_index_map(nx: int, width: int, kind: str, length: float):
    """Interior indices and coordinate shifts for cells -width .. nx-1+width.

    Returns (idx, shift): ``idx[g]`` is the interior cell providing ghost cell
    g's data; ``shift[g]`` maps the ghost coordinate into that cell's home
    coordinate (nonzero only for periodic wrapping).
    """
    if width < 0:
        raise ConfigurationError("pad width must be >= 0")
    g = np.arange(-width, nx + width)
    if kind == "periodic":
        idx = np.mod(g, nx)
        shift = -np.floor_divide(g, nx).astype(float) * length
    elif kind == "free_flow":
        idx = np.clip(g, 0, nx - 1)
        shift = np.zeros(g.size)
    else:
        raise ConfigurationError(f"unknown boundary kind {kind!r}")
    return idx, shift


def fill_ghosts(values: np.ndarray, kind: str, width: int) -> np.ndarray:
    """Pad per-cell values with ghost rows: periodic wrap or zeroth-order copy."""
    values = np.asarray(values)
    idx, _ = pad_index_map(values.shape[0], width, kind, length=0.0)
    return values[idx]


def pad_averages_wb(u, profiles, mesh: Mesh1D, quad, kind: str, width: int,
                    idx=None, shift=None, prof_avg_pad=None):
    """Ghost-padded cell averages consistent with the well-balanced stencils.

    Periodic ghosts wrap. Free-flow ghosts carry the boundary cell's steady
    profile extended outward plus that cell's own fluctuation, which keeps the
    reconstruction of steady data exact in boundary cells; when no profile was
    fitted this reduces to a plain copy of the boundary value.
    """
    if idx is None:
        idx, shift = pad_index_map(mesh.nx, width, kind, mesh.length)
    u_pad = np.asarray(u)[idx]
    if kind == "free_flow" and width > 0:
        if prof_avg_pad is None:
            cells = np.arange(-width, mesh.nx + width)
            nodes = mesh.cell_nodes(quad, cells) + shift[:, None]
            prof_pad = profiles.take(idx)
            prof_avg_pad = np.einsum("m,cm...->c...", quad.weights, prof_pad.evaluate(nodes))
        fluct = u_pad - prof_avg_pad
        u_pad[:width] = prof_avg_pad[:width] + fluct[width]
        u_pad[-width:] = prof_avg_pad[-width:] + fluct[-width - 1]
    return u_pad


def sponge_damp(values: np.ndarray, background: np.ndarray, sponge: SpongeLayer,
                nx: int | None = None) -> np.ndarray:
    """Blend the outermost cells toward the background state.

    Cell at distance-from-interior index j (j=0 outermost) is damped by
    sigma_j = 1 - s*((W-j)/W)^2, so strength 1 pins the outermost cell to the
    background and the blend fades to identity at the interior edge.
    """
    u = np.array(values, dtype=float)
    n = u.shape[0] if nx is None else nx
    w = min(sponge.width, n // 2)
    if w == 0 or sponge.strength == 0.0:
        return u
    j = np.arange(w, dtype=float)
    sigma = 1.0 - sponge.strength * ((w - j) / w) ** 2
    sig_left = sigma[:, None]  # row 0 = outermost left cell
    sig_right = sigma[::-1][:, None]  # last row = outermost right cell
    u[:w] = background[:w] + sig_left * (u[:w] - background[:w])
    u[n - w:] = background[n - w:] + sig_right * (u[n - w:] - background[n - w:])
    return u
