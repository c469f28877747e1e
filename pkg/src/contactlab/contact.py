"""Contact forms on R^3 and its (y, z)-quotients.

A candidate 1-form alpha is promoted to a ContactForm by verifying that
the dx^dy^dz coefficient of alpha ^ d(alpha) stays bounded away from zero
(with one fixed sign) on a grid over the declared domain.  Symbolic
positivity is out of reach in general, so the certificate is grid-based
and the resolution/tolerance are part of the returned object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expressions as ex
from . import forms
from .errors import DegreeError, DomainError, NumericalError

VOLUME_INDEX = (0, 1, 2)


@dataclass(frozen=True)
class Domain:
    """A box in R^3, optionally quotiented by translations in y and z.

    For a quotient direction the range is one fundamental domain
    [0, period) and grid sampling excludes the identified right edge.
    """

    x_range: tuple = (-1.0, 1.0)
    y_range: tuple = (-1.0, 1.0)
    z_range: tuple = (-1.0, 1.0)
    y_period: float | None = None
    z_period: float | None = None

    def __post_init__(self):
        for lo, hi in (self.x_range, self.y_range, self.z_range):
            if not (hi > lo):
                raise DomainError(f"empty domain range ({lo}, {hi})")

    @classmethod
    def box(cls, lo: float, hi: float) -> "Domain":
        return cls((lo, hi), (lo, hi), (lo, hi))

    @classmethod
    def quotient_torus(cls, x_range=(-2.0, 2.0), y_period=1.0, z_period=1.0) -> "Domain":
        return cls(
            x_range,
            (0.0, y_period),
            (0.0, z_period),
            y_period=y_period,
            z_period=z_period,
        )

    def axis_nodes(self, resolution: int):
        def nodes(rng, period):
            lo, hi = rng
            if period is not None:
                return np.linspace(0.0, period, resolution, endpoint=False)
            return np.linspace(lo, hi, resolution)

        return (
            nodes(self.x_range, None),
            nodes(self.y_range, self.y_period),
            nodes(self.z_range, self.z_period),
        )

    def grid(self, resolution: int):
        xs, ys, zs = self.axis_nodes(resolution)
        return np.meshgrid(xs, ys, zs, indexing="ij")

    def contains(self, p: dict) -> bool:
        def inside(val, rng, period):
            if period is not None:
                return True
            lo, hi = rng
            return lo - 1e-12 <= val <= hi + 1e-12

        return (
            inside(p["x"], self.x_range, None)
            and inside(p["y"], self.y_range, self.y_period)
            and inside(p["z"], self.z_range, self.z_period)
        )

    def to_json(self) -> dict:
        return {
            "x_range": list(self.x_range),
            "y_range": list(self.y_range),
            "z_range": list(self.z_range),
            "y_period": self.y_period,
            "z_period": self.z_period,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Domain":
        return cls(
            tuple(data.get("x_range", (-1, 1))),
            tuple(data.get("y_range", (-1, 1))),
            tuple(data.get("z_range", (-1, 1))),
            data.get("y_period"),
            data.get("z_period"),
        )


@dataclass(frozen=True)
class ContactCheckFailure:
    """Details of a failed contact verification."""

    ok: bool
    min_abs_coefficient: float
    sign_changes: bool
    bad_nodes: tuple
    grid_resolution: int
    tolerance: float

    def to_json(self) -> dict:
        return {
            "contact": False,
            "min_abs_coefficient": self.min_abs_coefficient,
            "sign_changes": self.sign_changes,
            "bad_nodes": [list(n) for n in self.bad_nodes],
            "grid_resolution": self.grid_resolution,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class ContactForm:
    """A verified contact form alpha with its cached volume 3-form."""

    alpha: forms.DifferentialForm
    domain: Domain
    volume: forms.DifferentialForm = field(repr=False)
    min_abs_coefficient: float = 0.0
    grid_resolution: int = 32
    tolerance: float = 1e-9

    @property
    def volume_coefficient(self) -> ex.Expr:
        return self.volume.coefficient(VOLUME_INDEX)

    def alpha_at(self, p: dict) -> np.ndarray:
        vals = self.alpha.evaluate(p)
        return np.array([vals[(0,)], vals[(1,)], vals[(2,)]], dtype=float)

    def to_json(self) -> dict:
        return {
            "contact": True,
            "form": forms.one_form_to_text(self.alpha),
            "min_abs_coefficient": self.min_abs_coefficient,
            "grid_resolution": self.grid_resolution,
            "tolerance": self.tolerance,
            "domain": self.domain.to_json(),
        }


def contact_volume(alpha: forms.DifferentialForm) -> forms.DifferentialForm:
    if alpha.degree != 1:
        raise DegreeError("contact condition applies to 1-forms")
    return forms.wedge(alpha, forms.exterior_derivative(alpha))


def check_contact(
    alpha: forms.DifferentialForm,
    domain: Domain | None = None,
    grid_resolution: int = 32,
    tolerance: float = 1e-9,
):
    """Verify alpha ^ d(alpha) != 0 on a grid over the domain.

    Returns a ContactForm on success, a ContactCheckFailure otherwise.
    Resolution below 8 nodes per axis is rejected as meaningless.
    """
    if grid_resolution < 8:
        raise DomainError("grid resolution must be at least 8 per axis")
    domain = domain or Domain.box(-1.0, 1.0)
    vol = contact_volume(alpha)
    coeff = vol.coefficient(VOLUME_INDEX)
    fn = coeff.compile(("x", "y", "z"))
    gx, gy, gz = domain.grid(grid_resolution)
    vals = np.asarray(fn(gx, gy, gz), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NumericalError(
            "contact coefficient is not finite on the verification grid",
            rule="evaluation-domain",
        )
    min_abs = float(np.min(np.abs(vals)))
    sign_changes = bool(np.any(vals > tolerance) and np.any(vals < -tolerance))
    if min_abs > tolerance and not sign_changes:
        return ContactForm(
            alpha=alpha,
            domain=domain,
            volume=vol,
            min_abs_coefficient=min_abs,
            grid_resolution=grid_resolution,
            tolerance=tolerance,
        )
    bad = np.argwhere(np.abs(vals) <= tolerance)
    xs, ys, zs = domain.axis_nodes(grid_resolution)
    bad_nodes = tuple(
        (float(xs[i]), float(ys[j]), float(zs[k])) for i, j, k in bad[:64]
    )
    return ContactCheckFailure(
        ok=False,
        min_abs_coefficient=min_abs,
        sign_changes=sign_changes,
        bad_nodes=bad_nodes,
        grid_resolution=grid_resolution,
        tolerance=tolerance,
    )


def kernel_basis(cf: ContactForm, p: dict):
    """Two vectors spanning ker(alpha_p), positively oriented.

    The pair (b1, b2) satisfies alpha(b_i) = 0 and det(b1, b2, n) > 0 for
    the covector-positive normal n; for a positive contact form this also
    orients the plane positively with respect to d(alpha).
    """
    if not cf.domain.contains(p):
        raise DomainError(f"point {p} outside the declared domain")
    a = cf.alpha_at(p)
    norm = np.linalg.norm(a)
    if norm < 1e-13:
        raise NumericalError(
            "alpha vanishes at the point: inconsistent with contact verification"
        )
    n = a / norm
    seed = np.array([1.0, 0.0, 0.0])
    if abs(np.dot(seed, n)) > 0.9:
        seed = np.array([0.0, 1.0, 0.0])
    b1 = seed - np.dot(seed, n) * n
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(n, b1)
    return b1, b2


def lie_derivative_check(cf: ContactForm, vector_field, grid_resolution: int = 16) -> dict:
    """Decide whether a vector field's flow preserves the contact structure.

    Computes L_v alpha = iota_v d(alpha) + d(alpha(v)) symbolically and
    tests (L_v alpha) ^ alpha == 0 on the verification grid, i.e. whether
    L_v alpha is pointwise a multiple of alpha.
    """
    vec = tuple(ex.as_expr(c) for c in vector_field)
    lie = forms.lie_derivative(vec, cf.alpha)
    residual_form = forms.wedge(lie, cf.alpha)
    gx, gy, gz = cf.domain.grid(grid_resolution)
    worst = 0.0
    for idx in ((0, 1), (0, 2), (1, 2)):
        c = residual_form.coefficient(idx)
        fn = c.compile(("x", "y", "z"))
        vals = np.asarray(fn(gx, gy, gz), dtype=float)
        finite = vals[np.isfinite(vals)]
        if finite.size:
            worst = max(worst, float(np.max(np.abs(finite))))
    return {"is_contact_field": worst <= 1e-9, "residual": worst}


def contact_hamiltonian_field(h) -> tuple:
    """Contact vector field of a Hamiltonian for the standard form dz + x dy.

    v_H = (x H_z - H_y) d/dx + H_x d/dy + (H - x H_x) d/dz, which satisfies
    alpha(v_H) = H and L_{v_H} alpha = H_z alpha.
    """
    h = ex.as_expr(h)
    hx, hy, hz = h.partial("x"), h.partial("y"), h.partial("z")
    return (
        ex.sub(ex.mul(ex.X, hz), hy),
        hx,
        ex.sub(h, ex.mul(ex.X, hx)),
    )


# ---------------------------------------------------------------------------
# the three model contact forms, in Cartesian coordinates throughout


def standard_contact_form() -> forms.DifferentialForm:
    """dz + x dy."""
    return forms.one_form(0, ex.X, 1)


def rotational_contact_form() -> forms.DifferentialForm:
    """dz + x dy - y dx, the rotationally symmetric model."""
    return forms.one_form(ex.neg(ex.Y), ex.X, 1)


def twisted_contact_form() -> forms.DifferentialForm:
    """cos(r) dz + sinc(r) (x dy - y dx) with r = sqrt(x^2 + y^2).

    The planes twist by a quarter turn at r = pi/2 and keep twisting as r
    grows; restricted to any disk of radius >= pi it contains an
    overtwisted disk.
    """
    r = ex.Call("sqrt", (ex.add(ex.power(ex.X, 2), ex.power(ex.Y, 2)),))
    g = ex.Call("sinc", (r,))
    return forms.one_form(
        ex.neg(ex.mul(g, ex.Y)),
        ex.mul(g, ex.X),
        ex.Call("cos", (r,)),
    )


NAMED_FORMS = {
    "standard": standard_contact_form,
    "rotational": rotational_contact_form,
    "twisted": twisted_contact_form,
}


def resolve_form(text: str) -> forms.DifferentialForm:
    """Accept a named model form or 1-form text."""
    if text in NAMED_FORMS:
        return NAMED_FORMS[text]()
    return forms.parse_one_form(text)
