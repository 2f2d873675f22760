"""Uniform 1D mesh, quadrature rules, cell fields, and error norms.

All types here are immutable after construction except ``CellField.values``;
every operation is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class HKRError(Exception):
    """Base class for solver errors."""


class ConfigurationError(HKRError, ValueError):
    """Invalid setup: mesh mismatch, bad CFL, unknown scheme, ..."""


class PositivityError(HKRError):
    """A state left the admissible set (h <= 0, rho <= 0, p <= 0)."""


class StepFailureError(HKRError):
    """A time step could not be completed (Newton divergence, NaN, ...)."""


class BoundaryExtensionError(HKRError):
    """An evaluation point fell outside the ghost-padded domain."""


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights on the reference interval [0, 1], exact to degree order-1."""

    name: str
    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if abs(self.weights.sum() - 1.0) > 1e-14:
            raise ConfigurationError("quadrature weights must sum to 1")

    @property
    def npoints(self) -> int:
        return self.nodes.size


def midpoint_rule() -> QuadratureRule:
    return QuadratureRule("midpoint", np.array([0.5]), np.array([1.0]), order=2)


def gauss2_rule() -> QuadratureRule:
    off = 0.5 / np.sqrt(3.0)
    return QuadratureRule(
        "gauss2", np.array([0.5 - off, 0.5 + off]), np.array([0.5, 0.5]), order=4
    )


_RULES = {"midpoint": midpoint_rule, "gauss2": gauss2_rule}


def quadrature_rule(name: str) -> QuadratureRule:
    try:
        return _RULES[name]()
    except KeyError:
        raise ConfigurationError(f"unknown quadrature rule {name!r}") from None


@dataclass(frozen=True)
class Mesh1D:
    """Uniform mesh of nx cells on [a, b]."""

    a: float
    b: float
    nx: int

    def __post_init__(self):
        if self.nx <= 0 or not self.b > self.a:
            raise ConfigurationError("mesh requires b > a and nx >= 1")

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.nx

    @property
    def length(self) -> float:
        return self.b - self.a

    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.nx) + 0.5) * self.dx

    def interfaces(self) -> np.ndarray:
        return self.a + np.arange(self.nx + 1) * self.dx

    def cell_nodes(self, quad: QuadratureRule, cells: np.ndarray | None = None) -> np.ndarray:
        """Quadrature node positions, shape (ncells, M).

        ``cells`` may contain any integer cell indices (ghost cells included).
        """
        if cells is None:
            cells = np.arange(self.nx)
        left = self.a + np.asarray(cells, dtype=float) * self.dx
        return left[:, None] + quad.nodes[None, :] * self.dx


@dataclass
class CellField:
    """Per-cell averages of an m-component state on a uniform mesh."""

    mesh: Mesh1D
    values: np.ndarray  # (nx, m)

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.values.shape[0] != self.mesh.nx:
            raise ConfigurationError(
                f"values have {self.values.shape[0]} rows for nx={self.mesh.nx}"
            )

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def copy(self) -> "CellField":
        return CellField(self.mesh, self.values.copy())


def cell_average(f, mesh: Mesh1D, quad: QuadratureRule, cells=None) -> np.ndarray:
    """Quadrature cell averages of a pointwise function, shape (ncells, m).

    ``f`` must accept an array of positions and return values with a trailing
    state axis (scalars may return the bare position shape).
    """
    nodes = mesh.cell_nodes(quad, cells)
    vals = np.asarray(f(nodes), dtype=float)
    if vals.shape == nodes.shape:  # scalar model without trailing axis
        vals = vals[..., None]
    return np.einsum("m,cm...->c...", quad.weights, vals)


def field_from_function(f, mesh: Mesh1D, quad: QuadratureRule) -> CellField:
    return CellField(mesh, cell_average(f, mesh, quad))


def window_mask(mesh: Mesh1D, window) -> np.ndarray:
    """Boolean cell mask for a union of [lo, hi] intervals over cell centers."""
    if window is None:
        return np.ones(mesh.nx, dtype=bool)
    x = mesh.centers()
    mask = np.zeros(mesh.nx, dtype=bool)
    for lo, hi in window:
        if lo < mesh.a - 1e-12 or hi > mesh.b + 1e-12:
            raise ConfigurationError("error window must lie inside the domain")
        mask |= (x >= lo) & (x <= hi)
    return mask


def l1_error(u: CellField, ref: CellField, window=None) -> np.ndarray:
    """Discrete L1 distance, dx * sum_i |u_i - ref_i|, per component.

    The dx scaling matches the convention used throughout the benchmark error
    tables. ``window`` restricts the sum to cells whose centers fall in a
    union of intervals.
    """
    if u.mesh != ref.mesh:
        raise ConfigurationError("fields live on different meshes")
    if u.m != ref.m:
        raise ConfigurationError("fields have different state dimensions")
    mask = window_mask(u.mesh, window)
    diff = np.abs(u.values[mask] - ref.values[mask])
    return u.mesh.dx * diff.sum(axis=0)
