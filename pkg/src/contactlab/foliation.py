"""Characteristic foliations of surfaces in a contact R^3.

The pullback beta = sigma^* alpha is computed by the exact symbolic chain
rule; its kernel directs the foliation, and the chart vector field
W = (beta_2, -beta_1) traces the leaves.  W's global sign is fixed by the
orientation rule that (leaf direction, positive frame of the contact
plane, positive frame of the surface) must orient R^3; the sign is probed
numerically at regular points, which is cheap and unambiguous.

Singularities are located by a grid scan plus Newton refinement,
classified by the Jacobian of W (det > 0 elliptic, det < 0 hyperbolic),
and signed by the pairing of alpha with the oriented surface normal.
Chart-degenerate points (sphere poles) are handled separately through a
local orthographic fit, so a single longitude/latitude chart suffices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expressions as ex
from . import forms
from .contact import ContactForm, contact_volume
from .errors import DomainError, NumericalError, SurfaceError
from .surfaces import Surface

DEFAULT_TOLERANCES = {
    "singularity_residual": 1e-10,
    "degenerate_det": 1e-8,
    "degenerate_trace": 1e-8,
    "sign_pairing": 1e-9,
    "leaf_field_floor": 1e-8,
    "closed_leaf_spatial": 1e-6,
    "closed_leaf_direction": 0.99,
    "boundary_tangency": 1e-6,
}


def _alpha_form(alpha):
    return alpha.alpha if isinstance(alpha, ContactForm) else alpha


@dataclass(frozen=True)
class PulledBackForm:
    """sigma^* alpha together with the oriented directing field W."""

    surface: Surface
    alpha: forms.DifferentialForm
    beta1: ex.Expr
    beta2: ex.Expr
    w1: ex.Expr
    w2: ex.Expr
    flipped: bool
    _fns: dict = field(default_factory=dict, repr=False, compare=False)

    def _fn(self, name, expr):
        if name not in self._fns:
            self._fns[name] = expr.compile(("u", "v"))
        return self._fns[name]

    def beta_at(self, u, v):
        b1 = self._fn("b1", self.beta1)(u, v)
        b2 = self._fn("b2", self.beta2)(u, v)
        return np.asarray(b1, dtype=float), np.asarray(b2, dtype=float)

    def field_at(self, u, v):
        w1 = self._fn("w1", self.w1)(u, v)
        w2 = self._fn("w2", self.w2)(u, v)
        return np.asarray(w1, dtype=float), np.asarray(w2, dtype=float)

    def jacobian_at(self, u, v) -> np.ndarray:
        j = np.empty((2, 2))
        j[0, 0] = self._fn("w1u", self.w1.partial("u"))(u, v)
        j[0, 1] = self._fn("w1v", self.w1.partial("v"))(u, v)
        j[1, 0] = self._fn("w2u", self.w2.partial("u"))(u, v)
        j[1, 1] = self._fn("w2v", self.w2.partial("v"))(u, v)
        return j

    def beta_jacobian_at(self, u, v) -> np.ndarray:
        j = np.empty((2, 2))
        j[0, 0] = self._fn("b1u", self.beta1.partial("u"))(u, v)
        j[0, 1] = self._fn("b1v", self.beta1.partial("v"))(u, v)
        j[1, 0] = self._fn("b2u", self.beta2.partial("u"))(u, v)
        j[1, 1] = self._fn("b2v", self.beta2.partial("v"))(u, v)
        return j

    def field_scale(self, grid: int = 24) -> float:
        us = np.linspace(0.03, 0.97, grid)
        vs = np.linspace(0.03, 0.97, grid)
        uu, vv = np.meshgrid(us, vs, indexing="ij")
        w1, w2 = self.field_at(uu, vv)
        mags = np.hypot(w1, w2)
        mags = mags[np.isfinite(mags)]
        return float(np.max(mags)) if mags.size else 1.0

    def push_forward(self, u, v) -> np.ndarray:
        """3D leaf direction W1 sigma_u + W2 sigma_v at a chart point."""
        su, sv = self.surface.frame_at(u, v)
        w1, w2 = self.field_at(float(u), float(v))
        return float(w1) * su + float(w2) * sv


def _orientation_flip_needed(surface: Surface, alpha_form, beta1, beta2) -> bool:
    """Probe whether W = (beta2, -beta1) needs a global sign flip.

    At a regular point take v = push-forward of W, pick v_xi in the contact
    plane with d(alpha)(v, v_xi) > 0 and v_S tangent with (v, v_S) positive
    on the surface; the triple (v, v_xi, v_S) must orient R^3.
    """
    dalpha = forms.exterior_derivative(alpha_form)
    du, dv = surface.partials()
    f1 = beta1.compile(("u", "v"))
    f2 = beta2.compile(("u", "v"))
    probes = []
    for uu in np.linspace(0.13, 0.87, 7):
        for vv in np.linspace(0.11, 0.89, 7):
            probes.append((float(uu), float(vv)))
    checked = []
    for u, v in probes:
        try:
            b1 = float(f1(u, v))
            b2 = float(f2(u, v))
        except (ValueError, ZeroDivisionError, OverflowError):
            continue
        if not (np.isfinite(b1) and np.isfinite(b2)):
            continue
        w = np.array([b2, -b1])
        if np.linalg.norm(w) < 1e-6:
            continue
        env = {"u": u, "v": v}
        su = np.array([c.evaluate(env) for c in du])
        sv = np.array([c.evaluate(env) for c in dv])
        vdir = w[0] * su + w[1] * sv
        p = surface.position(u, v)
        point = {"x": p[0], "y": p[1], "z": p[2]}
        # v_xi: rotate vdir by +90 degrees inside the d(alpha)-oriented plane
        avals = alpha_form.evaluate(point)
        a = np.array([avals[(0,)], avals[(1,)], avals[(2,)]])
        if np.linalg.norm(a) < 1e-9:
            continue
        n = a / np.linalg.norm(a)
        seed = np.array([1.0, 0, 0]) if abs(n[0]) < 0.9 else np.array([0, 1.0, 0])
        e1 = seed - np.dot(seed, n) * n
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(n, e1)
        if dalpha.apply(point, e1, e2) < 0:
            e1, e2 = e2, e1
        c1, c2 = np.dot(vdir, e1), np.dot(vdir, e2)
        if math.hypot(c1, c2) < 1e-9:
            continue
        v_xi = -c2 * e1 + c1 * e2
        e_chart = np.array([-w[1], w[0]])
        v_s = e_chart[0] * su + e_chart[1] * sv
        det = np.linalg.det(np.column_stack([vdir, v_xi, v_s]))
        if abs(det) < 1e-12:
            continue
        checked.append(det < 0)
        if len(checked) >= 3:
            break
    if not checked:
        raise NumericalError("could not orient the directing field: no regular probe point")
    if len(set(checked)) != 1:
        raise NumericalError("inconsistent orientation probes on the chart")
    return checked[0]


def pullback(alpha, surface: Surface, check_immersion: bool = True) -> PulledBackForm:
    """Compute beta = sigma^* alpha and its oriented directing field."""
    alpha_form = _alpha_form(alpha)
    if alpha_form.degree != 1:
        raise DomainError("pullback expects a 1-form")
    bad = set()
    for idx in ((0,), (1,), (2,)):
        bad |= alpha_form.coefficient(idx).variables() - {"x", "y", "z"}
    if bad:
        raise DomainError(f"ambient form coefficients may only use x, y, z (got {sorted(bad)})")
    if check_immersion:
        surface.check_immersion()
        surface.check_periodicity()
    mapping = {"x": surface.sigma[0], "y": surface.sigma[1], "z": surface.sigma[2]}
    subbed = [alpha_form.coefficient((i,)).subst(mapping) for i in range(3)]
    du, dv = surface.partials()
    beta1 = ex.ZERO
    beta2 = ex.ZERO
    for a_i, du_i, dv_i in zip(subbed, du, dv):
        beta1 = ex.add(beta1, ex.mul(a_i, du_i))
        beta2 = ex.add(beta2, ex.mul(a_i, dv_i))
    flip = _orientation_flip_needed(surface, alpha_form, beta1, beta2)
    sign = ex.Num(-1) if flip else ex.ONE
    return PulledBackForm(
        surface=surface,
        alpha=alpha_form,
        beta1=beta1,
        beta2=beta2,
        w1=ex.mul(sign, beta2),
        w2=ex.mul(sign, ex.neg(beta1)),
        flipped=flip,
    )


# ---------------------------------------------------------------------------
# singularities


@dataclass(frozen=True)
class Singularity:
    uv: tuple
    xyz: tuple
    kind: str  # elliptic | hyperbolic | degenerate
    sign: int  # +1 | -1 | 0 (undetermined)
    is_source: bool | None
    eigenvalues: tuple
    det: float
    trace: float
    residual: float
    note: str = ""

    def to_json(self) -> dict:
        return {
            "uv": list(self.uv),
            "xyz": list(self.xyz),
            "kind": self.kind,
            "sign": self.sign,
            "is_source": self.is_source,
            "eigenvalues": [[c.real, c.imag] for c in self.eigenvalues],
            "det": self.det,
            "trace": self.trace,
            "residual": self.residual,
            "note": self.note,
        }


@dataclass(frozen=True)
class DegenerateLocus:
    points: tuple  # chart polyline of near-zero cells

    def to_json(self) -> dict:
        return {"points": [list(p) for p in self.points]}


def _alpha_vector(alpha_form, p):
    vals = alpha_form.evaluate({"x": p[0], "y": p[1], "z": p[2]})
    return np.array([vals[(0,)], vals[(1,)], vals[(2,)]])


def _classify(pb: PulledBackForm, u, v, tol) -> Singularity:
    jac = pb.jacobian_at(u, v)
    det = float(np.linalg.det(jac))
    trace = float(np.trace(jac))
    eig = tuple(np.linalg.eigvals(jac))
    scale = max(1.0, float(np.max(np.abs(jac))) ** 2)
    b1, b2 = pb.beta_at(u, v)
    residual = float(np.hypot(b1, b2))
    p = pb.surface.position(u, v)
    nu = pb.surface.normal_at(u, v)
    a = _alpha_vector(pb.alpha, p)
    pairing = float(np.dot(a, nu))
    if abs(pairing) > tol["sign_pairing"]:
        sign = 1 if pairing > 0 else -1
    else:
        sign = 0
    if det > tol["degenerate_det"] * scale:
        if abs(trace) <= tol["degenerate_trace"] * math.sqrt(scale):
            kind, src, note = "degenerate", None, "center (trace ~ 0)"
        else:
            kind, src, note = "elliptic", trace > 0, ""
    elif det < -tol["degenerate_det"] * scale:
        kind, src, note = "hyperbolic", None, ""
    else:
        kind, src, note = "degenerate", None, "det(DW) ~ 0"
    return Singularity(
        uv=(float(u), float(v)),
        xyz=tuple(float(c) for c in p),
        kind=kind,
        sign=sign,
        is_source=src,
        eigenvalues=eig,
        det=det,
        trace=trace,
        residual=residual,
        note=note,
    )


def _newton_zero(pb: PulledBackForm, u0, v0, tol_res, max_iter=60):
    u, v = float(u0), float(v0)
    for _ in range(max_iter):
        b1, b2 = pb.beta_at(u, v)
        res = math.hypot(float(b1), float(b2))
        if not np.isfinite(res):
            return None
        if res < tol_res:
            return (u, v, res)
        jac = pb.beta_jacobian_at(u, v)
        if not np.all(np.isfinite(jac)):
            return None
        try:
            step = np.linalg.lstsq(jac, -np.array([float(b1), float(b2)]), rcond=None)[0]
        except np.linalg.LinAlgError:
            return None
        norm = np.linalg.norm(step)
        if norm > 0.25:
            step *= 0.25 / norm
        u += float(step[0])
        v += float(step[1])
        if not pb.surface.in_chart(u, v, grace=0.2):
            return None
    b1, b2 = pb.beta_at(u, v)
    res = math.hypot(float(b1), float(b2))
    return (u, v, res) if res < tol_res else None


def _pole_singularity(pb: PulledBackForm, u0, v0, tol) -> Singularity | None:
    """Handle a declared chart-degenerate point (e.g. a sphere pole).

    Tangency is decided chart-independently: the point is singular iff
    alpha at the point is parallel to the limiting surface normal.  The
    local flow is then classified by fitting a linear field to the
    push-forward of W in an orthographic tangent frame.
    """
    surface = pb.surface
    p = surface.position(u0, v0)

    def ring_normal(delta):
        ring = []
        for theta in np.linspace(0, 1, 12, endpoint=False):
            if surface.periodic[1] and (u0 in (0.0, 1.0)):
                uu = delta if u0 == 0.0 else 1.0 - delta
                vv = theta
            else:
                uu = min(max(u0 + delta * math.cos(2 * math.pi * theta), 1e-5), 1 - 1e-5)
                vv = min(max(v0 + delta * math.sin(2 * math.pi * theta), 1e-5), 1 - 1e-5)
            n = surface.normal_at(uu, vv)
            norm = np.linalg.norm(n)
            if norm > 1e-14:
                ring.append(n / norm)
        if not ring:
            return None
        n_hat = np.mean(ring, axis=0)
        return n_hat / np.linalg.norm(n_hat)

    a = _alpha_vector(pb.alpha, p)
    a_norm = np.linalg.norm(a)
    if a_norm < 1e-13:
        return None
    # tangency test: ker(alpha) contains the tangent plane iff a || lim n.
    # The misalignment must vanish as the probe radius shrinks; comparing
    # two radii separates an O(delta) chart effect from a true angle.
    miss = {}
    for delta in (2e-3, 2e-4):
        n_hat = ring_normal(delta)
        if n_hat is None:
            return None
        miss[delta] = float(np.linalg.norm(np.cross(a / a_norm, n_hat)))
    if not (miss[2e-4] < max(1e-6, 0.5 * miss[2e-3])):
        return None
    n_hat = ring_normal(2e-4)
    # orthographic frame
    seed = np.array([1.0, 0, 0]) if abs(n_hat[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = seed - np.dot(seed, n_hat) * n_hat
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n_hat, e1)
    samples_s = []
    samples_w = []
    for r in (0.006, 0.012, 0.02):
        for theta in np.linspace(0, 1, 16, endpoint=False):
            if surface.periodic[1] and (u0 in (0.0, 1.0)):
                uu = r if u0 == 0.0 else 1.0 - r
                vv = theta
            else:
                uu = u0 + r * math.cos(2 * math.pi * theta)
                vv = v0 + r * math.sin(2 * math.pi * theta)
                if not (0 < uu < 1 and 0 < vv < 1):
                    continue
            q = surface.position(uu, vv)
            d = pb.push_forward(uu, vv)
            if not np.all(np.isfinite(d)):
                continue
            s = np.array([np.dot(q - p, e1), np.dot(q - p, e2)])
            w = np.array([np.dot(d, e1), np.dot(d, e2)])
            samples_s.append(s)
            samples_w.append(w)
    if len(samples_s) < 8:
        return None
    S = np.array(samples_s)
    Wm = np.array(samples_w)
    # least-squares linear field w ~ A s (field vanishes at the point)
    A, *_ = np.linalg.lstsq(S, Wm, rcond=None)
    A = A.T
    det = float(np.linalg.det(A))
    trace = float(np.trace(A))
    eig = tuple(np.linalg.eigvals(A))
    pairing = float(np.dot(a, n_hat))
    scale = max(1e-12, float(np.max(np.abs(A))) ** 2)
    sign = 1 if pairing > 0 else (-1 if pairing < 0 else 0)
    if det > 1e-4 * scale:
        kind = "elliptic"
        src = trace > 0
    elif det < -1e-4 * scale:
        kind, src = "hyperbolic", None
    else:
        kind, src = "degenerate", None
    return Singularity(
        uv=(float(u0), float(v0)),
        xyz=tuple(float(c) for c in p),
        kind=kind,
        sign=sign,
        is_source=src,
        eigenvalues=eig,
        det=det,
        trace=trace,
        residual=0.0,
        note="chart-degenerate point",
    )


def find_singularities(
    pb: PulledBackForm,
    grid: int = 64,
    tolerances: dict | None = None,
):
    """Locate and classify the zeros of beta on the chart.

    Returns (singularities, degenerate_loci).  Isolated zeros are refined
    by Newton to a field residual below the configured tolerance;
    one-dimensional zero sets are reported as degenerate loci rather than
    being forced through the point classifier.
    """
    if grid < 32:
        raise DomainError("singularity grid must be at least 32x32")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    surface = pb.surface

    un = np.linspace(0.0, 1.0, grid, endpoint=False) if surface.periodic[0] else np.linspace(
        1.0 / grid, 1.0 - 1.0 / grid, grid - 1
    )
    vn = np.linspace(0.0, 1.0, grid, endpoint=False) if surface.periodic[1] else np.linspace(
        1.0 / grid, 1.0 - 1.0 / grid, grid - 1
    )
    uu, vv = np.meshgrid(un, vn, indexing="ij")
    b1, b2 = pb.beta_at(uu, vv)
    mag = np.hypot(b1, b2)
    finite = np.isfinite(mag)
    scale = float(np.max(mag[finite])) if np.any(finite) else 1.0
    scale = max(scale, 1e-12)

    nu, nv = len(un), len(vn)
    iu_max = nu if surface.periodic[0] else nu - 1
    iv_max = nv if surface.periodic[1] else nv - 1

    def corner(i, j, arr):
        return arr[i % nu, j % nv]

    zeros = []
    degenerate_cells = []
    tiny = 2e-7 * scale
    for i in range(iu_max):
        for j in range(iv_max):
            c1 = [corner(i, j, b1), corner(i + 1, j, b1), corner(i, j + 1, b1), corner(i + 1, j + 1, b1)]
            c2 = [corner(i, j, b2), corner(i + 1, j, b2), corner(i, j + 1, b2), corner(i + 1, j + 1, b2)]
            if not all(np.isfinite(c1)) or not all(np.isfinite(c2)):
                continue
            spread1 = min(c1) <= tiny and max(c1) >= -tiny
            spread2 = min(c2) <= tiny and max(c2) >= -tiny
            if not (spread1 and spread2):
                continue
            tiny1 = all(abs(c) <= tiny for c in c1)
            tiny2 = all(abs(c) <= tiny for c in c2)
            uc = un[i] + (un[1] - un[0]) / 2 if nu > 1 else 0.5
            vc = vn[j] + (vn[1] - vn[0]) / 2 if nv > 1 else 0.5
            if tiny1 and tiny2:
                degenerate_cells.append((uc, vc))
                continue
            if tiny1 or tiny2:
                # one component vanishes identically on the cell: a zero
                # line unless Newton finds a transverse isolated zero
                jac = pb.beta_jacobian_at(uc, vc)
                if abs(np.linalg.det(jac)) < tol["degenerate_det"] * max(
                    1.0, float(np.max(np.abs(jac))) ** 2
                ):
                    degenerate_cells.append((uc, vc))
                    continue
            hit = _newton_zero(pb, uc, vc, tol["singularity_residual"] * max(1.0, scale))
            if hit is not None:
                zeros.append(hit)

    # dedupe isolated zeros (wrap-aware)
    def close(a, b):
        du = abs(a[0] - b[0])
        dv = abs(a[1] - b[1])
        if surface.periodic[0]:
            du = min(du, 1 - du)
        if surface.periodic[1]:
            dv = min(dv, 1 - dv)
        return math.hypot(du, dv) < 1e-6

    unique = []
    for zc in sorted(zeros, key=lambda t: (round(t[0], 8), round(t[1], 8))):
        if not any(close(zc, w) for w in unique):
            unique.append(zc)

    sings = []
    for u, v, _res in unique:
        if surface.is_degenerate_point(u, v, tol=0.02):
            continue
        sings.append(_classify(pb, u, v, tol))

    for u0, v0 in surface.degenerate_points:
        s = _pole_singularity(pb, u0, v0, tol)
        if s is not None:
            sings.append(s)

    loci = _chain_degenerate_cells(degenerate_cells, surface, cell=1.0 / grid)
    return sings, loci


def _chain_degenerate_cells(cells, surface, cell):
    if not cells:
        return []
    pts = sorted(cells)
    used = [False] * len(pts)
    loci = []
    for i in range(len(pts)):
        if used[i]:
            continue
        stack = [i]
        used[i] = True
        comp = []
        while stack:
            k = stack.pop()
            comp.append(pts[k])
            for j in range(len(pts)):
                if used[j]:
                    continue
                du = abs(pts[k][0] - pts[j][0])
                dv = abs(pts[k][1] - pts[j][1])
                if surface.periodic[0]:
                    du = min(du, 1 - du)
                if surface.periodic[1]:
                    dv = min(dv, 1 - dv)
                if du <= 1.6 * cell and dv <= 1.6 * cell:
                    used[j] = True
                    stack.append(j)
        comp.sort()
        loci.append(DegenerateLocus(points=tuple(comp)))
    return loci


# ---------------------------------------------------------------------------
# leaf integration


@dataclass(frozen=True)
class Leaf:
    seed: tuple
    points: tuple  # chart polyline
    stop_reason: str  # boundary | singularity | length | closed
    arc_length: float

    def to_json(self) -> dict:
        return {
            "seed": list(self.seed),
            "points": [list(p) for p in self.points],
            "stop_reason": self.stop_reason,
            "arc_length": self.arc_length,
        }


@dataclass(frozen=True)
class ClosedLeaf:
    seed: tuple
    period: float
    points: tuple

    def to_json(self) -> dict:
        return {
            "seed": list(self.seed),
            "period": self.period,
            "points": [list(p) for p in self.points],
        }


class _BatchIntegrator:
    """Fixed-step RK4 on the normalized directing field, batched over seeds."""

    def __init__(self, pb: PulledBackForm, step: float, field_floor: float):
        self.pb = pb
        self.h = step
        self.floor = field_floor
        self.surface = pb.surface

    def _rhs(self, u, v):
        w1, w2 = self.pb.field_at(u, v)
        mag = np.hypot(w1, w2)
        safe = np.where(mag > 1e-300, mag, 1.0)
        return w1 / safe, w2 / safe, mag

    def run(self, seeds, max_length, record=False, callback=None):
        """Advance all seeds; returns (states, active, reasons, traces).

        callback(k, u, v, active) may deactivate trajectories by returning
        a boolean mask of newly finished ones (reason 'closed').
        """
        u = np.array([s[0] for s in seeds], dtype=float)
        v = np.array([s[1] for s in seeds], dtype=float)
        n = len(seeds)
        active = np.ones(n, dtype=bool)
        reasons = np.array(["length"] * n, dtype=object)
        traces = [[(float(u[i]), float(v[i]))] for i in range(n)] if record else None
        steps = int(max_length / self.h)
        h = self.h
        grace = 2 * h
        for k in range(steps):
            if not np.any(active):
                break
            k1u, k1v, mag = self._rhs(u, v)
            stop = active & ((mag < self.floor) | ~np.isfinite(mag))
            reasons[stop] = "singularity"
            active &= ~stop
            if not np.any(active):
                break
            k2u, k2v, _ = self._rhs(u + 0.5 * h * k1u, v + 0.5 * h * k1v)
            k3u, k3v, _ = self._rhs(u + 0.5 * h * k2u, v + 0.5 * h * k2v)
            k4u, k4v, _ = self._rhs(u + h * k3u, v + h * k3v)
            du = (h / 6) * (k1u + 2 * k2u + 2 * k3u + k4u)
            dv = (h / 6) * (k1v + 2 * k2v + 2 * k3v + k4v)
            u = np.where(active, u + du, u)
            v = np.where(active, v + dv, v)
            if self.surface.periodic[0]:
                u = np.where(active, u % 1.0, u)
            if self.surface.periodic[1]:
                v = np.where(active, v % 1.0, v)
            out = np.zeros_like(active)
            if not self.surface.periodic[0]:
                out |= (u < -grace) | (u > 1 + grace)
            if not self.surface.periodic[1]:
                out |= (v < -grace) | (v > 1 + grace)
            newly_out = active & out
            reasons[newly_out] = "boundary"
            active &= ~newly_out
            if record:
                for i in range(n):
                    if active[i]:
                        traces[i].append((float(u[i]), float(v[i])))
            if callback is not None:
                closed = callback(k, u, v, active)
                if closed is not None and np.any(closed):
                    reasons[closed & active] = "closed"
                    active &= ~closed
        return (u, v), active, reasons, traces


def integrate_leaf(
    pb: PulledBackForm,
    seed,
    step: float = 0.004,
    max_length: float = 8.0,
    tolerances: dict | None = None,
) -> Leaf:
    """Integrate one leaf of the characteristic foliation from a seed."""
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    u0, v0 = float(seed[0]), float(seed[1])
    w1, w2 = pb.field_at(u0, v0)
    floor = tol["leaf_field_floor"] * max(1.0, pb.field_scale())
    if math.hypot(float(w1), float(w2)) < floor:
        raise NumericalError(
            f"seed ({u0}, {v0}) is within tolerance of a singularity", rule="leaf-seed"
        )
    integ = _BatchIntegrator(pb, step, floor)
    (_, _), _active, reasons, traces = integ.run([(u0, v0)], max_length, record=True)
    points = traces[0]
    return Leaf(
        seed=(u0, v0),
        points=tuple(points),
        stop_reason=str(reasons[0]),
        arc_length=step * (len(points) - 1),
    )


def default_seed_lattice(surface: Surface, n: int = 16):
    us = np.linspace(0, 1, n, endpoint=False) if surface.periodic[0] else np.linspace(
        0.5 / n, 1 - 0.5 / n, n
    )
    vs = np.linspace(0, 1, n, endpoint=False) if surface.periodic[1] else np.linspace(
        0.5 / n, 1 - 0.5 / n, n
    )
    return [(float(a), float(b)) for a in us for b in vs]


def detect_closed_leaves(
    pb: PulledBackForm,
    seeds=None,
    step: float = 0.004,
    transient_length: float = 6.0,
    loop_length: float = 4.0,
    tolerances: dict | None = None,
):
    """Seed-based closed-leaf search.

    Each seed is integrated through a transient, then tested for
    recurrence: a later state within the spatial tolerance of the
    post-transient state, moving in the same direction.  Absence of a
    detection is reported as none found, never as none existing.
    """
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    surface = pb.surface
    if seeds is None:
        seeds = default_seed_lattice(surface)
    floor = tol["leaf_field_floor"] * max(1.0, pb.field_scale())
    w1, w2 = pb.field_at(
        np.array([s[0] for s in seeds]), np.array([s[1] for s in seeds])
    )
    ok = np.hypot(w1, w2) > 10 * floor
    seeds = [s for s, good in zip(seeds, ok) if good]
    if not seeds:
        return []
    integ = _BatchIntegrator(pb, step, floor)
    (u_end, v_end), active, _, _ = integ.run(seeds, transient_length)
    anchors = []
    anchor_seed = []
    for i in range(len(seeds)):
        if active[i]:
            anchors.append((float(u_end[i]), float(v_end[i])))
            anchor_seed.append(seeds[i])
    if not anchors:
        return []

    au = np.array([a[0] for a in anchors])
    av = np.array([a[1] for a in anchors])
    d1, d2, _ = integ._rhs(au, av)
    found: dict = {}
    min_steps = 12
    spatial = tol["closed_leaf_spatial"]
    direction = tol["closed_leaf_direction"]

    state = {"hit_step": np.full(len(anchors), -1, dtype=int)}

    def callback(k, u, v, act):
        if k < min_steps:
            return None
        du = u - au
        dv = v - av
        if surface.periodic[0]:
            du = (du + 0.5) % 1.0 - 0.5
        if surface.periodic[1]:
            dv = (dv + 0.5) % 1.0 - 0.5
        dist = np.hypot(du, dv)
        c1, c2, _ = integ._rhs(u, v)
        dot = c1 * d1 + c2 * d2
        hit = act & (dist < spatial) & (dot > direction) & (state["hit_step"] < 0)
        state["hit_step"][hit] = k
        return hit

    _, _, reasons, traces = integ.run(anchors, loop_length, record=True, callback=callback)

    leaves = []
    for i, anchor in enumerate(anchors):
        if state["hit_step"][i] < 0:
            continue
        period = step * (state["hit_step"][i] + 1)
        pts = tuple(traces[i][: state["hit_step"][i] + 2])
        leaves.append(ClosedLeaf(seed=tuple(anchor_seed[i]), period=float(period), points=pts))

    return _dedupe_closed_leaves(leaves, surface)


def _dedupe_closed_leaves(leaves, surface, tol=5e-3):
    unique = []
    for leaf in leaves:
        dup = False
        for other in unique:
            if abs(leaf.period - other.period) > max(0.05, 0.1 * other.period):
                continue
            probe = np.array(leaf.points[:: max(1, len(leaf.points) // 8)])
            cloud = np.array(other.points)
            dmax = 0.0
            for p in probe:
                du = np.abs(cloud[:, 0] - p[0])
                dv = np.abs(cloud[:, 1] - p[1])
                if surface.periodic[0]:
                    du = np.minimum(du, 1 - du)
                if surface.periodic[1]:
                    dv = np.minimum(dv, 1 - dv)
                dmax = max(dmax, float(np.min(np.hypot(du, dv))))
            if dmax < tol:
                dup = True
                break
        if not dup:
            unique.append(leaf)
    return unique


# ---------------------------------------------------------------------------
# census, counting formulas, genus bound


@dataclass(frozen=True)
class FoliationReport:
    census: dict  # e_plus, e_minus, h_plus, h_minus
    singularities: tuple
    degenerate_loci: tuple
    closed_leaves: tuple
    leaves: tuple
    chi_computed: int | None
    euler_class_computed: int | None
    declared_chi: int | None
    consistency: str  # CONSISTENT | INCONSISTENT | NOT_APPLICABLE | DEGENERATE
    tolerances: dict

    def to_json(self) -> dict:
        return {
            "census": self.census,
            "singularities": [s.to_json() for s in self.singularities],
            "degenerate_loci": [l.to_json() for l in self.degenerate_loci],
            "closed_leaves": [c.to_json() for c in self.closed_leaves],
            "leaves": [l.to_json() for l in self.leaves],
            "chi_computed": self.chi_computed,
            "euler_class_computed": self.euler_class_computed,
            "declared_chi": self.declared_chi,
            "consistency": self.consistency,
            "tolerances": self.tolerances,
        }


def census_and_counts(
    singularities,
    surface: Surface,
    degenerate_loci=(),
    closed_leaves=(),
    leaves=(),
    tolerances: dict | None = None,
) -> FoliationReport:
    """Fill in the signed census and the two counting formulas.

    chi = (e+ + e-) - (h+ + h-) and e(xi)[S] = (e+ - h+) - (e- - h-);
    the chi count is compared against the declared topology whenever the
    surface is closed.  Degenerate singularities void the counts.
    """
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    degenerate = [s for s in singularities if s.kind == "degenerate" or s.sign == 0]
    if degenerate or degenerate_loci:
        return FoliationReport(
            census={"e_plus": None, "e_minus": None, "h_plus": None, "h_minus": None},
            singularities=tuple(singularities),
            degenerate_loci=tuple(degenerate_loci),
            closed_leaves=tuple(closed_leaves),
            leaves=tuple(leaves),
            chi_computed=None,
            euler_class_computed=None,
            declared_chi=surface.declared_chi(),
            consistency="DEGENERATE",
            tolerances=tol,
        )
    e_plus = sum(1 for s in singularities if s.kind == "elliptic" and s.sign > 0)
    e_minus = sum(1 for s in singularities if s.kind == "elliptic" and s.sign < 0)
    h_plus = sum(1 for s in singularities if s.kind == "hyperbolic" and s.sign > 0)
    h_minus = sum(1 for s in singularities if s.kind == "hyperbolic" and s.sign < 0)
    chi = (e_plus + e_minus) - (h_plus + h_minus)
    euler = (e_plus - h_plus) - (e_minus - h_minus)
    declared = surface.declared_chi()
    if declared is None:
        consistency = "NOT_APPLICABLE"
    elif chi == declared:
        consistency = "CONSISTENT"
    else:
        consistency = "INCONSISTENT"
    return FoliationReport(
        census={"e_plus": e_plus, "e_minus": e_minus, "h_plus": h_plus, "h_minus": h_minus},
        singularities=tuple(singularities),
        degenerate_loci=tuple(degenerate_loci),
        closed_leaves=tuple(closed_leaves),
        leaves=tuple(leaves),
        chi_computed=chi,
        euler_class_computed=euler,
        declared_chi=declared,
        consistency=consistency,
        tolerances=tol,
    )


def check_genus_bound(report: FoliationReport, surface: Surface) -> dict:
    """|e(xi)[S]| <= -chi(S) (0 for the sphere) on closed surfaces.

    A violation contradicts tightness, so it is flagged as an
    overtwistedness witness candidate.
    """
    if not surface.is_closed():
        raise SurfaceError("genus bound applies to closed surfaces only", rule="genus-bound")
    if report.euler_class_computed is None:
        raise NumericalError("census is degenerate: no Euler class count available")
    lhs = abs(report.euler_class_computed)
    rhs = 0 if surface.topology == "sphere" else -surface.declared_chi()
    satisfied = lhs <= rhs
    return {
        "lhs": lhs,
        "rhs": rhs,
        "satisfied": satisfied,
        "overtwisted_witness_candidate": not satisfied,
    }


# ---------------------------------------------------------------------------
# overtwisted-disk witnesses


def _edge_is_collapsed(surface: Surface, fixed_axis: int, value: float) -> bool:
    """True when a chart edge maps to a single point (e.g. a polar center)."""
    pts = []
    for t in np.linspace(0, 1, 9):
        uv = (value, t) if fixed_axis == 0 else (t, value)
        pts.append(surface.position(*uv))
    pts = np.array(pts)
    return float(np.max(np.linalg.norm(pts - pts[0], axis=1))) < 1e-9


def _boundary_samples(surface: Surface, n=96):
    """Chart-boundary sample points with outward edge normals (chart coords).

    Edges that collapse to a point (declared chart degeneracies like a
    polar-disk center) are not geometric boundary and are skipped.
    """
    out = []
    if not surface.periodic[0]:
        for value, normal in ((1.0, (1.0, 0.0)), (0.0, (-1.0, 0.0))):
            if _edge_is_collapsed(surface, 0, value):
                continue
            for t in np.linspace(0, 1, n, endpoint=not surface.periodic[1]):
                out.append(((value, float(t)), normal))
    if not surface.periodic[1]:
        for value, normal in ((1.0, (0.0, 1.0)), (0.0, (0.0, -1.0))):
            if _edge_is_collapsed(surface, 1, value):
                continue
            for t in np.linspace(0, 1, n, endpoint=not surface.periodic[0]):
                out.append(((float(t), value), normal))
    return out


def overtwisted_witness(surface: Surface, alpha, tolerances: dict | None = None) -> dict:
    """Search a disk for overtwisted-disk behavior.

    found is True iff the boundary is entirely singular, or the boundary
    is itself a closed leaf, or a closed leaf is detected in the interior.
    """
    if surface.topology != "disk":
        raise SurfaceError("overtwisted witness check expects a disk", rule="disk-only")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    pb = pullback(alpha, surface)
    scale = max(pb.field_scale(), 1e-12)
    samples = _boundary_samples(surface)
    mags = []
    tangency = []
    for (u, v), normal in samples:
        w1, w2 = pb.field_at(u, v)
        w1, w2 = float(w1), float(w2)
        m = math.hypot(w1, w2)
        mags.append(m)
        if m > 1e-300:
            tangency.append(abs(w1 * normal[0] + w2 * normal[1]) / m)
        else:
            tangency.append(0.0)
    all_singular = all(m < 1e-6 * scale for m in mags)
    if all_singular:
        return {
            "found": True,
            "evidence": {
                "kind": "singular-boundary",
                "max_boundary_field": max(mags),
                "field_scale": scale,
            },
            "tolerances": tol,
        }
    boundary_leaf = all(m > 1e-9 * scale for m in mags) and all(
        t < tol["boundary_tangency"] for t in tangency
    )
    closed = detect_closed_leaves(pb, tolerances=tol)
    if boundary_leaf:
        return {
            "found": True,
            "evidence": {
                "kind": "closed-boundary-leaf",
                "max_normal_component": max(tangency),
                "closed_leaves": [c.to_json() for c in closed],
            },
            "tolerances": tol,
        }
    if closed:
        return {
            "found": True,
            "evidence": {
                "kind": "interior-closed-leaf",
                "closed_leaves": [c.to_json() for c in closed],
            },
            "tolerances": tol,
        }
    return {"found": False, "evidence": {"kind": "none"}, "tolerances": tol}


# ---------------------------------------------------------------------------
# full pipeline


def foliate(
    alpha,
    surface: Surface,
    grid: int = 64,
    leaf_seeds=None,
    search_closed: bool = True,
    tolerances: dict | None = None,
) -> FoliationReport:
    """Compute the whole characteristic-foliation report for a surface."""
    pb = pullback(alpha, surface)
    sings, loci = find_singularities(pb, grid=grid, tolerances=tolerances)
    closed = detect_closed_leaves(pb, tolerances=tolerances) if search_closed else []
    leaves = []
    if leaf_seeds is None:
        leaf_seeds = [(0.5 + 0.3 * math.cos(a), 0.5 + 0.3 * math.sin(a)) for a in np.linspace(0, 2 * math.pi, 8, endpoint=False)]
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    floor = tol["leaf_field_floor"] * max(1.0, pb.field_scale())
    for seed in leaf_seeds:
        w1, w2 = pb.field_at(float(seed[0]), float(seed[1]))
        if math.hypot(float(w1), float(w2)) < 10 * floor:
            continue
        leaves.append(integrate_leaf(pb, seed, tolerances=tolerances))
    return census_and_counts(
        sings,
        surface,
        degenerate_loci=loci,
        closed_leaves=closed,
        leaves=leaves,
        tolerances=tolerances,
    )
