"""Balance-law models: flux, source, wave-speed bounds, and steady families.

Each model packages the physics of one hyperbolic system u_t + F(u)_x = S(u, x)
together with a fit-from-average procedure for its steady-state family. Fits
are vectorized over cells and return a profile set object; cells whose fit
failed are marked invalid and evaluate to the zero state, which is the
fallback the well-balanced reconstruction expects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import PositivityError, QuadratureRule

EPS_REST = 1e-12  # relative scale deciding the "fluid at rest" branches


@dataclass(frozen=True)
class Geometry:
    """Bathymetry or gravitational potential H with its analytic derivative."""

    H: Callable[[np.ndarray], np.ndarray]
    Hp: Callable[[np.ndarray], np.ndarray]


def flat_geometry() -> Geometry:
    return Geometry(lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                    lambda x: np.zeros_like(np.asarray(x, dtype=float)))


def _weighted_avg(weights: np.ndarray, node_vals: np.ndarray) -> np.ndarray:
    return np.einsum("m,cm...->c...", weights, node_vals)


# ---------------------------------------------------------------------------
# Burgers with quadratic source
# ---------------------------------------------------------------------------


class BurgersProfiles:
    """Exponential steady branches u(x) = C * exp(alpha x), one C per cell."""

    def __init__(self, coef: np.ndarray, alpha: float, shift: np.ndarray | None = None):
        self.coef = np.asarray(coef, dtype=float)
        self.alpha = alpha
        self.shift = np.zeros_like(self.coef) if shift is None else np.asarray(shift, float)
        self.valid = np.ones(self.coef.shape, dtype=bool)

    def take(self, idx, shift=None):
        out = BurgersProfiles(self.coef[idx], self.alpha, self.shift[idx])
        if shift is not None:
            out.shift = out.shift + shift
        return out

    def assign(self, idx, other):
        self.coef[idx] = other.coef
        self.shift[idx] = other.shift

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xe = x + self.shift.reshape(self.shift.shape + (1,) * (x.ndim - 1))
        u = self.coef.reshape(self.coef.shape + (1,) * (x.ndim - 1)) * np.exp(self.alpha * xe)
        return u[..., None]


class Burgers:
    """Scalar Burgers equation with source alpha * u^2."""

    m = 1
    names = ("u",)

    def __init__(self, alpha: float, geometry: Geometry | None = None):
        self.alpha = alpha
        self.geometry = geometry or flat_geometry()

    def flux(self, u):
        return 0.5 * u * u

    def source(self, u, x):
        return self.alpha * u * u

    def source_jacobian(self, u, x):
        return (2.0 * self.alpha * u)[..., None]

    def max_speed(self, u):
        return np.abs(u[..., 0])

    def check_admissible(self, u):
        return None

    def steady_fit(self, ubar, own_nodes, weights, probe_nodes, **_):
        denom = _weighted_avg(weights, np.exp(self.alpha * own_nodes))
        return BurgersProfiles(ubar[:, 0] / denom, self.alpha)


# ---------------------------------------------------------------------------
# Shallow water with bathymetry
# ---------------------------------------------------------------------------

# branch codes for SweProfiles
SWE_NONE, SWE_REST, SWE_SUB, SWE_SUPER, SWE_TRANS = -1, 0, 1, 2, 3


def bernoulli_height(q0, E0, Hx, g, supercritical, max_iter=80):
    """Positive root of q0^2/(2 g h^2) + h - Hx = E0 on the requested branch.

    All arguments broadcast; ``supercritical`` selects the root below the
    critical height. Returns (h, ok); entries without a real root on the
    branch have ok=False and h=NaN.
    """
    q0, E0, Hx, sup = np.broadcast_arrays(
        np.asarray(q0, float), np.asarray(E0, float), np.asarray(Hx, float),
        np.asarray(supercritical, bool))
    hc = np.cbrt(q0 * q0 / g)
    scale = 1.0 + np.abs(E0) + np.abs(Hx) + hc
    margin = E0 + Hx - 1.5 * hc  # root exists iff >= 0
    ok = margin >= -1e-12 * scale
    crit = ok & (margin <= 1e-13 * scale)

    def phi(h):
        return q0 * q0 / (2.0 * g * h * h) + h - Hx - E0

    def dphi(h):
        return 1.0 - q0 * q0 / (g * h ** 3)

    lo = np.where(sup, np.sqrt(q0 * q0 / (2.0 * g * np.maximum(E0 + Hx, 1e-300))), hc)
    hi = np.where(sup, hc, np.maximum(E0 + Hx, hc))
    lo = np.minimum(lo, hi)
    h = np.where(sup, lo, hi).copy()
    h = np.where(ok, h, np.nan)
    act = ok & ~crit
    lo, hi = lo.copy(), hi.copy()
    tol = 4e-16 * scale
    for _ in range(max_iter):
        if not act.any():
            break
        f = phi(np.where(act, h, 1.0))
        conv = np.abs(f) <= tol
        act &= ~conv
        if not act.any():
            break
        # maintain the bracket, then take a safeguarded Newton step
        lo = np.where(act & (f < 0) & ~sup, h, lo)
        hi = np.where(act & (f > 0) & ~sup, h, hi)
        lo = np.where(act & (f > 0) & sup, h, lo)
        hi = np.where(act & (f < 0) & sup, h, hi)
        step = f / dphi(np.where(act, h, 1.0))
        hn = h - step
        bad = act & ((hn <= lo) | (hn >= hi) | ~np.isfinite(hn))
        hn = np.where(bad, 0.5 * (lo + hi), hn)
        h = np.where(act, hn, h)
    h = np.where(crit, hc, h)
    h = np.where(ok, h, np.nan)
    return h, ok


class SweProfiles:
    """Constant-discharge Bernoulli steady states, one (q0, E0, branch) per cell."""

    def __init__(self, kind, q0, E0, g, geometry, xc=None, shift=None):
        self.kind = np.asarray(kind, dtype=np.int8)
        self.q0 = np.asarray(q0, dtype=float)
        self.E0 = np.asarray(E0, dtype=float)
        self.g = g
        self.geometry = geometry
        self.xc = np.zeros_like(self.q0) if xc is None else np.asarray(xc, float)
        self.shift = np.zeros_like(self.q0) if shift is None else np.asarray(shift, float)

    @property
    def valid(self):
        return self.kind != SWE_NONE

    def take(self, idx, shift=None):
        out = SweProfiles(self.kind[idx], self.q0[idx], self.E0[idx], self.g,
                          self.geometry, self.xc[idx], self.shift[idx])
        if shift is not None:
            out.shift = out.shift + shift
        return out

    def assign(self, idx, other):
        for name in ("kind", "q0", "E0", "xc", "shift"):
            getattr(self, name)[idx] = getattr(other, name)

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        extra = (1,) * (x.ndim - 1)
        xe = x + self.shift.reshape(self.shift.shape + extra)
        kind = np.broadcast_to(self.kind.reshape(self.kind.shape + extra), xe.shape)
        q0 = np.broadcast_to(self.q0.reshape(self.q0.shape + extra), xe.shape)
        E0 = np.broadcast_to(self.E0.reshape(self.E0.shape + extra), xe.shape)
        xc = np.broadcast_to(self.xc.reshape(self.xc.shape + extra), xe.shape)
        Hx = self.geometry.H(xe)
        h = np.zeros_like(xe)
        rest = kind == SWE_REST
        h = np.where(rest, E0 + Hx, h)
        moving = (kind == SWE_SUB) | (kind == SWE_SUPER) | (kind == SWE_TRANS)
        if moving.any():
            sup = np.where(kind == SWE_TRANS, xe > xc, kind == SWE_SUPER)
            hm, ok = bernoulli_height(q0[moving], E0[moving], Hx[moving],
                                      self.g, sup[moving])
            if not ok.all() or not np.isfinite(hm).all():
                raise PositivityError("steady profile has no admissible height "
                                      "at a requested point")
            h[moving] = hm
        q = np.where(kind >= SWE_SUB, q0, 0.0)
        q = np.where(kind == SWE_NONE, 0.0, q)
        return np.stack([h, q], axis=-1)


class ShallowWater:
    """1D shallow water equations over bathymetry H(x) (source g h H'(x))."""

    m = 2
    names = ("h", "q")

    def __init__(self, g: float = 9.81, geometry: Geometry | None = None):
        self.g = g
        self.geometry = geometry or flat_geometry()

    def check_admissible(self, u):
        h = u[..., 0]
        if not (h > 0).all():
            bad = int(np.argmin(h > 0))
            raise PositivityError(f"non-positive water height (first at cell {bad})")

    def flux(self, u):
        self.check_admissible(u)
        h, q = u[..., 0], u[..., 1]
        return np.stack([q, q * q / h + 0.5 * self.g * h * h], axis=-1)

    def source(self, u, x):
        h = u[..., 0]
        z = np.zeros_like(h)
        return np.stack([z, self.g * h * self.geometry.Hp(x)], axis=-1)

    def source_jacobian(self, u, x):
        n = u.shape[:-1]
        jac = np.zeros(n + (2, 2))
        jac[..., 1, 0] = self.g * self.geometry.Hp(x)
        return jac

    def max_speed(self, u):
        self.check_admissible(u)
        h, q = u[..., 0], u[..., 1]
        return np.abs(q / h) + np.sqrt(self.g * h)

    def steady_fit(self, ubar, own_nodes, weights, probe_nodes, branch=None,
                   max_iter=50):
        """Fit (q0, E0, branch) so the quadrature average matches ubar.

        Branch selection follows the cell Froude number unless ``branch``
        forces 'subcritical'/'supercritical'. Cells where the Bernoulli cubic
        has no admissible root over the probe stencil are marked invalid.
        """
        hbar, qbar = ubar[:, 0], ubar[:, 1]
        if not (hbar > 0).all():
            bad = int(np.argmin(hbar > 0))
            raise PositivityError(f"non-positive mean water height at cell {bad}")
        n = hbar.size
        kind = np.full(n, SWE_NONE, dtype=np.int8)
        q0 = np.array(qbar, dtype=float)
        E0 = np.zeros(n)

        rest = np.abs(qbar) <= EPS_REST * (1.0 + np.abs(hbar) + np.abs(qbar))
        H_own = self.geometry.H(own_nodes)
        E0[rest] = hbar[rest] - _weighted_avg(weights, H_own)[rest]
        q0[rest] = 0.0
        kind[rest] = SWE_REST

        moving = ~rest
        if moving.any():
            hc = np.cbrt(qbar[moving] ** 2 / self.g)
            if branch is None:
                sup = hbar[moving] < hc
            else:
                sup = np.full(moving.sum(), branch == "supercritical")
            qm, hm = qbar[moving], hbar[moving]
            Hm = H_own[moving]
            # midpoint start: invert Bernoulli at the mean node position
            E = qm ** 2 / (2.0 * self.g * hm ** 2) + hm - Hm.mean(axis=1)
            ok = np.ones(qm.size, dtype=bool)
            if weights.size == 1:
                # single-node rule: the inversion above is already exact;
                # only branch consistency needs checking
                ok &= np.where(sup, hm <= hc * (1 + 1e-12), hm >= hc * (1 - 1e-12))
            else:
                tol = 1e-13 * (1.0 + np.abs(hm))
                act = ok.copy()
                for _ in range(max_iter):
                    hn, root_ok = bernoulli_height(qm[:, None], E[:, None], Hm,
                                                   self.g, sup[:, None])
                    act &= root_ok.all(axis=1)
                    res = _weighted_avg(weights, np.where(act[:, None], hn, 1.0)) - hm
                    done = np.abs(res) <= tol
                    if (done | ~act).all():
                        break
                    dh_dE = 1.0 / (1.0 - qm[:, None] ** 2 / (self.g * hn ** 3))
                    dres = _weighted_avg(weights, dh_dE)
                    step = np.where(act & ~done, res / dres, 0.0)
                    E = E - step
                else:
                    act &= done
                ok &= act
            km = np.where(sup, SWE_SUPER, SWE_SUB).astype(np.int8)
            kind[moving] = np.where(ok, km, SWE_NONE)
            E0[moving] = np.where(ok, E, 0.0)
            q0[moving] = np.where(ok, qm, 0.0)

        prof = SweProfiles(kind, q0, E0, self.g, self.geometry)
        self._validate(prof, probe_nodes)
        return prof

    def _validate(self, prof, probe_nodes):
        """Invalidate cells whose profile is not admissible over the probe stencil."""
        check = prof.valid
        if not check.any():
            return
        sub = prof.take(np.flatnonzero(check))
        Hx = self.geometry.H(probe_nodes[check] + sub.shift[:, None])
        bad = np.zeros(len(sub.kind), dtype=bool)
        rest = sub.kind == SWE_REST
        if rest.any():
            bad[rest] |= ((sub.E0[rest, None] + Hx[rest]) <= 0).any(axis=1)
        moving = sub.kind >= SWE_SUB
        if moving.any():
            supm = np.where(sub.kind[moving, None] == SWE_TRANS,
                            (probe_nodes[check][moving] + sub.shift[moving, None])
                            > sub.xc[moving, None],
                            (sub.kind[moving] == SWE_SUPER)[:, None])
            hm, okm = bernoulli_height(sub.q0[moving, None], sub.E0[moving, None],
                                       Hx[moving], self.g, supm)
            bad[moving] |= ~okm.all(axis=1)
            bad[moving] |= ~(np.nan_to_num(hm, nan=-1.0) > 0).all(axis=1)
        idx = np.flatnonzero(check)[bad]
        prof.kind[idx] = SWE_NONE
        prof.q0[idx] = 0.0
        prof.E0[idx] = 0.0


# ---------------------------------------------------------------------------
# Euler with gravitational potential
# ---------------------------------------------------------------------------


class EulerProfiles:
    """Hydrostatic family rho = C1 e^{-H}, q = 0, p = rho + C2, E = p/(gamma-1)."""

    def __init__(self, C1, C2, gamma, geometry, valid=None, shift=None):
        self.C1 = np.asarray(C1, dtype=float)
        self.C2 = np.asarray(C2, dtype=float)
        self.gamma = gamma
        self.geometry = geometry
        self.valid = np.ones(self.C1.shape, bool) if valid is None else np.asarray(valid, bool)
        self.shift = np.zeros_like(self.C1) if shift is None else np.asarray(shift, float)

    def take(self, idx, shift=None):
        out = EulerProfiles(self.C1[idx], self.C2[idx], self.gamma, self.geometry,
                            self.valid[idx], self.shift[idx])
        if shift is not None:
            out.shift = out.shift + shift
        return out

    def assign(self, idx, other):
        for name in ("C1", "C2", "valid", "shift"):
            getattr(self, name)[idx] = getattr(other, name)

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        extra = (1,) * (x.ndim - 1)
        xe = x + self.shift.reshape(self.shift.shape + extra)
        ok = self.valid.reshape(self.valid.shape + extra)
        C1 = self.C1.reshape(self.C1.shape + extra)
        C2 = self.C2.reshape(self.C2.shape + extra)
        rho = np.where(ok, C1 * np.exp(-self.geometry.H(xe)), 0.0)
        p = np.where(ok, rho + C2, 0.0)
        E = p / (self.gamma - 1.0)
        return np.stack([rho, np.zeros_like(rho), E], axis=-1)


class EulerGravity:
    """1D Euler equations with an external potential H(x)."""

    m = 3
    names = ("rho", "q", "E")

    def __init__(self, gamma: float = 1.4, geometry: Geometry | None = None):
        if gamma <= 1.0:
            raise PositivityError("adiabatic index must exceed 1")
        self.gamma = gamma
        self.geometry = geometry or flat_geometry()

    def pressure(self, u):
        rho, q, E = u[..., 0], u[..., 1], u[..., 2]
        return (self.gamma - 1.0) * (E - 0.5 * q * q / rho)

    def check_admissible(self, u):
        rho = u[..., 0]
        if not (rho > 0).all():
            bad = int(np.argmin(rho > 0))
            raise PositivityError(f"non-positive density (first at cell {bad})")
        p = self.pressure(u)
        if not (p > 0).all():
            bad = int(np.argmin(p > 0))
            raise PositivityError(f"non-positive pressure (first at cell {bad})")

    def flux(self, u):
        self.check_admissible(u)
        rho, q, E = u[..., 0], u[..., 1], u[..., 2]
        p = self.pressure(u)
        v = q / rho
        return np.stack([q, q * v + p, v * (E + p)], axis=-1)

    def source(self, u, x):
        rho, q = u[..., 0], u[..., 1]
        Hp = self.geometry.Hp(x)
        return np.stack([np.zeros_like(rho), -rho * Hp, -q * Hp], axis=-1)

    def source_jacobian(self, u, x):
        n = u.shape[:-1]
        Hp = self.geometry.Hp(x)
        jac = np.zeros(n + (3, 3))
        jac[..., 1, 0] = -Hp
        jac[..., 2, 1] = -Hp
        return jac

    def max_speed(self, u):
        self.check_admissible(u)
        rho, q = u[..., 0], u[..., 1]
        return np.abs(q / rho) + np.sqrt(self.gamma * self.pressure(u) / rho)

    def steady_fit(self, ubar, own_nodes, weights, probe_nodes, **_):
        """Fit the hydrostatic family through the density and energy averages.

        The family carries q_e = 0, so the momentum average always rides in
        the fluctuation part; tying validity to |q_mean| being tiny would
        drop the whole hydrostatic balance the moment any acoustic signal
        touches a cell. Cells fall back only when the fitted pressure loses
        positivity over the probe stencil.
        """
        rbar, qbar, Ebar = ubar[:, 0], ubar[:, 1], ubar[:, 2]
        if not (rbar > 0).all():
            bad = int(np.argmin(rbar > 0))
            raise PositivityError(f"non-positive mean density at cell {bad}")
        denom = _weighted_avg(weights, np.exp(-self.geometry.H(own_nodes)))
        C1 = rbar / denom
        C2 = (self.gamma - 1.0) * Ebar - rbar
        valid = C1 > 0
        if valid.any():
            p_probe = (C1[:, None] * np.exp(-self.geometry.H(probe_nodes)) + C2[:, None])
            valid &= (p_probe > 0).all(axis=1)
        return EulerProfiles(np.where(valid, C1, 0.0), np.where(valid, C2, 0.0),
                             self.gamma, self.geometry, valid)


def profile_cell_averages(profiles, nodes: np.ndarray, quad: QuadratureRule) -> np.ndarray:
    """Quadrature averages of per-cell profiles over cells described by nodes (n, M)."""
    return _weighted_avg(quad.weights, profiles.evaluate(nodes))
