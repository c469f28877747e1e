"""Parametrized surface charts.

A surface is a single chart sigma: [0,1]^2 -> R^3 given by expressions in
(u, v), with periodicity flags, a declared topology, and an explicit list
of chart-degenerate points (e.g. the poles of a longitude/latitude sphere
chart).  The orientation is the ordered frame (sigma_u, sigma_v).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import expressions as ex
from .errors import SurfaceError

TOPOLOGIES = ("disk", "sphere", "torus", "annulus")

# Euler characteristic of the closed topologies; open ones return None so
# Poincare-Hopf style consistency flags are reported as not applicable.
EULER_CHARACTERISTIC = {"sphere": 2, "torus": 0, "disk": None, "annulus": None}


@dataclass(frozen=True)
class Surface:
    sigma: tuple  # three Exprs in (u, v)
    periodic: tuple = (False, False)
    topology: str = "disk"
    degenerate_points: tuple = ()
    name: str = ""
    # translation periods of the ambient (y, z)-quotient, when the surface
    # lives in R^3 / (y -> y + Py, z -> z + Pz); None means honest R^3
    ambient_periods: tuple = (None, None)

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise SurfaceError(f"unknown topology {self.topology!r}", rule="topology")
        if len(self.sigma) != 3:
            raise SurfaceError("sigma needs three coordinate expressions")
        bad = set()
        for c in self.sigma:
            bad |= c.variables() - {"u", "v"}
        if bad:
            raise SurfaceError(f"chart expressions may only use u, v (got {sorted(bad)})")
        object.__setattr__(self, "sigma", tuple(self.sigma))
        object.__setattr__(self, "periodic", tuple(bool(b) for b in self.periodic))
        object.__setattr__(
            self, "degenerate_points", tuple((float(a), float(b)) for a, b in self.degenerate_points)
        )

    # -- symbolic frame ----------------------------------------------------

    def partials(self):
        """((dσx/du, dσy/du, dσz/du), (dσx/dv, ...)) as Expr tuples."""
        du = tuple(c.partial("u") for c in self.sigma)
        dv = tuple(c.partial("v") for c in self.sigma)
        return du, dv

    # -- numeric evaluation -------------------------------------------------

    def position(self, u, v) -> np.ndarray:
        env = {"u": float(u), "v": float(v)}
        return np.array([c.evaluate(env) for c in self.sigma])

    def frame_at(self, u, v):
        du, dv = self.partials()
        env = {"u": float(u), "v": float(v)}
        su = np.array([c.evaluate(env) for c in du])
        sv = np.array([c.evaluate(env) for c in dv])
        return su, sv

    def normal_at(self, u, v) -> np.ndarray:
        su, sv = self.frame_at(u, v)
        return np.cross(su, sv)

    def is_degenerate_point(self, u, v, tol=1e-9) -> bool:
        return any(
            abs(u - a) <= tol and abs(v - b) <= tol for a, b in self.degenerate_points
        )

    def wrap(self, u, v):
        if self.periodic[0]:
            u = u % 1.0
        if self.periodic[1]:
            v = v % 1.0
        return u, v

    def in_chart(self, u, v, grace=0.0) -> bool:
        ok_u = self.periodic[0] or (-grace <= u <= 1.0 + grace)
        ok_v = self.periodic[1] or (-grace <= v <= 1.0 + grace)
        return ok_u and ok_v

    def declared_chi(self):
        return EULER_CHARACTERISTIC[self.topology]

    def is_closed(self) -> bool:
        return self.topology in ("sphere", "torus")

    # -- validation ---------------------------------------------------------

    def check_immersion(self, grid: int = 24, tol: float = 1e-9):
        """Require ||sigma_u x sigma_v|| > tol on the interior grid,
        away from declared degenerate points."""
        du, dv = self.partials()
        fns_u = [c.compile(("u", "v")) for c in du]
        fns_v = [c.compile(("u", "v")) for c in dv]
        us = np.linspace(0.02, 0.98, grid)
        vs = np.linspace(0.02, 0.98, grid)
        uu, vv = np.meshgrid(us, vs, indexing="ij")
        su = np.stack([np.asarray(f(uu, vv), dtype=float) for f in fns_u], axis=-1)
        sv = np.stack([np.asarray(f(uu, vv), dtype=float) for f in fns_v], axis=-1)
        cross = np.cross(su, sv)
        norm = np.linalg.norm(cross, axis=-1)
        near_degenerate = np.zeros_like(norm, dtype=bool)
        for a, b in self.degenerate_points:
            du = np.abs(uu - a)
            dv = np.abs(vv - b)
            if self.periodic[0]:
                du = np.minimum(du, 1 - du)
            if self.periodic[1]:
                dv = np.minimum(dv, 1 - dv)
            near_degenerate |= np.hypot(du, dv) < 0.1
        masked = np.where(near_degenerate, np.inf, norm)
        worst = float(np.nanmin(masked))
        if not worst > tol:
            bad = np.unravel_index(int(np.nanargmin(masked)), norm.shape)
            raise SurfaceError(
                f"chart fails the immersion check near (u, v) = "
                f"({us[bad[0]]:.3f}, {vs[bad[1]]:.3f}); declare the degeneracy "
                "or fix the chart",
                rule="immersion",
            )
        # a fold between grid nodes reverses the normal; a steep regular
        # feature merely rotates it quickly, so refine before flagging
        unit = cross / np.where(norm[..., None] > 1e-300, norm[..., None], 1.0)
        for axis in (0, 1):
            a = unit if axis == 0 else np.swapaxes(unit, 0, 1)
            m = near_degenerate if axis == 0 else near_degenerate.T
            dots = np.sum(a[:-1] * a[1:], axis=-1)
            suspect = np.argwhere((dots < 0.0) & ~m[:-1] & ~m[1:])
            for i, j in suspect:
                if axis == 0:
                    p0 = (us[i], vs[j])
                    p1 = (us[i + 1], vs[j])
                else:
                    p0 = (us[j], vs[i])
                    p1 = (us[j], vs[i + 1])
                if self._segment_normal_flips(p0, p1):
                    raise SurfaceError(
                        "chart normal reverses between grid nodes: undeclared "
                        "fold or degeneracy",
                        rule="immersion",
                    )
        return worst

    def _segment_normal_flips(self, p0, p1, samples: int = 65) -> bool:
        """True if the unit normal jumps (rather than rotates) along the
        chart segment: the signature of an undeclared fold line."""
        ts = np.linspace(0.0, 1.0, samples)
        prev = None
        for t in ts:
            u = p0[0] + t * (p1[0] - p0[0])
            v = p0[1] + t * (p1[1] - p0[1])
            n = self.normal_at(u, v)
            norm = np.linalg.norm(n)
            if norm < 1e-300:
                return True
            n = n / norm
            if prev is not None and float(np.dot(prev, n)) < 0.5:
                return True
            prev = n
        return False

    def _quotient_gap(self, diff: np.ndarray) -> float:
        """Distance of a displacement from the ambient identification lattice."""
        gx = abs(diff[0])
        py, pz = self.ambient_periods
        gy = abs(diff[1]) if py is None else abs((diff[1] + py / 2) % py - py / 2)
        gz = abs(diff[2]) if pz is None else abs((diff[2] + pz / 2) % pz - pz / 2)
        return float(max(gx, gy, gz))

    def check_periodicity(self, samples: int = 33, tol: float = 1e-9):
        """Periodic flags must agree with sigma on identified edges (up to
        the ambient quotient lattice when one is declared)."""
        ts = np.linspace(0.0, 1.0, samples)
        if self.periodic[0]:
            for t in ts:
                if self._quotient_gap(self.position(0.0, t) - self.position(1.0, t)) > tol:
                    raise SurfaceError(
                        "u-periodic flag inconsistent with chart values", rule="periodicity"
                    )
        if self.periodic[1]:
            for t in ts:
                if self._quotient_gap(self.position(t, 0.0) - self.position(t, 1.0)) > tol:
                    raise SurfaceError(
                        "v-periodic flag inconsistent with chart values", rule="periodicity"
                    )

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "sigma": [str(c) for c in self.sigma],
            "periodic": list(self.periodic),
            "topology": self.topology,
            "degenerate_points": [list(p) for p in self.degenerate_points],
        }
        if self.ambient_periods != (None, None):
            out["ambient_periods"] = list(self.ambient_periods)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Surface":
        try:
            sigma = tuple(ex.parse_expression(t) for t in data["sigma"])
        except KeyError:
            raise SurfaceError("surface JSON needs a 'sigma' entry") from None
        ambient = data.get("ambient_periods", (None, None))
        return cls(
            sigma=sigma,
            periodic=tuple(data.get("periodic", (False, False))),
            topology=data.get("topology", "disk"),
            degenerate_points=tuple(tuple(p) for p in data.get("degenerate_points", ())),
            name=data.get("name", ""),
            ambient_periods=tuple(ambient),
        )

    @classmethod
    def load(cls, path) -> "Surface":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


# ---------------------------------------------------------------------------
# stock charts used across the examples and tests


def _e(text: str) -> ex.Expr:
    return ex.parse_expression(text)


def plane_chart(axis: str = "yz", extent: float = 1.0, offset: float = 0.0) -> Surface:
    """A flat coordinate-plane patch, e.g. the yz-plane chart (0, u, v)."""
    s = repr(float(extent))
    o = repr(float(offset))
    if axis == "yz":
        sigma = (_e(o), _e(f"{s}*(2*u - 1)"), _e(f"{s}*(2*v - 1)"))
    elif axis == "xy":
        sigma = (_e(f"{s}*(2*u - 1)"), _e(f"{s}*(2*v - 1)"), _e(o))
    else:
        raise SurfaceError(f"unsupported plane axis {axis!r}")
    return Surface(sigma, (False, False), "disk", name=f"{axis}-plane")


def unit_sphere() -> Surface:
    """Longitude/latitude chart of the unit sphere, poles declared.

    u is the polar angle from the north pole (u = 0 north, u = 1 south),
    v the longitude; the frame (sigma_u, sigma_v) gives the outward
    normal.
    """
    sigma = (
        _e("sin(pi*u)*cos(2*pi*v)"),
        _e("sin(pi*u)*sin(2*pi*v)"),
        _e("cos(pi*u)"),
    )
    degenerate = tuple((u0, v0) for u0 in (0.0, 1.0) for v0 in (0.0,))
    return Surface(sigma, (False, True), "sphere", degenerate, name="unit-sphere")


def perturbed_sphere(coeffs) -> Surface:
    """Radially perturbed sphere; the perturbation vanishes like sin^2 at
    the poles so the chart degeneracies stay at (0,0,+-1)."""
    terms = []
    for k, (a, b) in enumerate(coeffs, start=1):
        terms.append(f"({a!r})*cos({2 * k}*pi*v)*sin(pi*u)^2")
        terms.append(f"({b!r})*sin({2 * k}*pi*v)*sin(pi*u)^2*cos(pi*u)")
    rho = "1 + " + " + ".join(terms) if terms else "1"
    sigma = (
        _e(f"({rho})*sin(pi*u)*cos(2*pi*v)"),
        _e(f"({rho})*sin(pi*u)*sin(2*pi*v)"),
        _e(f"({rho})*cos(pi*u)"),
    )
    degenerate = ((0.0, 0.0), (1.0, 0.0))
    return Surface(sigma, (False, True), "sphere", degenerate, name="perturbed-sphere")


def graph_torus(x_of_yz: str = "sin(2*pi*v)") -> Surface:
    """Torus {x = f(y, z)} in the (y, z)-quotient, chart (f(u,v), u, v)."""
    return Surface(
        (ex.parse_expression(x_of_yz), _e("u"), _e("v")),
        (True, True),
        "torus",
        name="graph-torus",
        ambient_periods=(1.0, 1.0),
    )


def polar_disk(radius: float = np.pi, height: str = "0") -> Surface:
    """Polar chart of a disk of the given radius in the xy-plane, with an
    optional height profile z = height(u); u is the radial fraction."""
    r = repr(float(radius))
    sigma = (
        _e(f"{r}*u*cos(2*pi*v)"),
        _e(f"{r}*u*sin(2*pi*v)"),
        ex.parse_expression(height),
    )
    return Surface(sigma, (False, True), "disk", ((0.0, 0.0),), name="polar-disk")


def pushed_up_disk(radius: float = np.pi, bump: float = 0.1) -> Surface:
    """Disk of the given radius with its interior pushed up: z = bump*(1 - u^2).

    The boundary circle stays in the plane z = 0 but the surface meets it
    at a nonzero angle, so for the twisted form the boundary becomes a
    closed leaf instead of a circle of singularities.
    """
    return polar_disk(radius, height=f"({bump!r})*(1 - u^2)")


def paraboloid_cap(curvature: float = 0.05) -> Surface:
    """Graph z = c((u-1/2)^2 + (v-1/2)^2), a perturbed flat disk chart."""
    c = repr(float(curvature))
    sigma = (
        _e("u - 1/2"),
        _e("v - 1/2"),
        _e(f"{c}*((u - 1/2)^2 + (v - 1/2)^2)"),
    )
    return Surface(sigma, (False, False), "disk", name="paraboloid-cap")
