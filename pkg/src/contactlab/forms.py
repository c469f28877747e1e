"""Exterior calculus on R^3.

A k-form is stored as a map from strictly increasing multi-indices over
(dx, dy, dz) = (0, 1, 2) to coefficient expressions, so antisymmetry is
canonical by construction.  Wedge products, exterior derivatives and
contractions are exact symbolic operations; equality of forms is decided
numerically on sampled points (there is no simplifier).
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from . import expressions as ex
from .errors import DegreeError, ParseError

DIFFERENTIALS = ("dx", "dy", "dz")

_ALL_INDICES = {
    0: (tuple(),),
    1: tuple((i,) for i in range(3)),
    2: tuple(combinations(range(3), 2)),
    3: ((0, 1, 2),),
}


def _merge_sign(i: tuple, j: tuple):
    """Wedge two increasing multi-indices: (sign, merged) or (0, None)."""
    merged = i + j
    if len(set(merged)) != len(merged):
        return 0, None
    order = sorted(merged)
    # parity of the permutation sorting `merged`
    perm = [merged.index(k) for k in order]
    sign = 1
    seen = [False] * len(perm)
    for s in range(len(perm)):
        if seen[s]:
            continue
        length = 0
        c = s
        while not seen[c]:
            seen[c] = True
            c = perm[c]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign, tuple(order)


class DifferentialForm:
    """A differential k-form on R^3 with Expr coefficients."""

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs: dict | None = None):
        if degree not in (0, 1, 2, 3):
            raise DegreeError(f"invalid form degree {degree} on R^3")
        clean = {}
        for idx, c in (coeffs or {}).items():
            idx = tuple(idx)
            if idx not in _ALL_INDICES[degree]:
                raise DegreeError(f"multi-index {idx} invalid for degree {degree}")
            c = ex.as_expr(c)
            if isinstance(c, ex.Num) and c.value == 0:
                continue
            clean[idx] = c
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def coefficient(self, idx) -> ex.Expr:
        return self.coeffs.get(tuple(idx), ex.ZERO)

    def is_zero_syntactically(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        if self.degree != other.degree:
            raise DegreeError("cannot add forms of different degree")
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            out[idx] = ex.add(out.get(idx, ex.ZERO), c)
        return DifferentialForm(self.degree, out)

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return self + other.scale(ex.Num(-1))

    def scale(self, factor) -> "DifferentialForm":
        factor = ex.as_expr(factor)
        return DifferentialForm(
            self.degree, {idx: ex.mul(factor, c) for idx, c in self.coeffs.items()}
        )

    def __neg__(self):
        return self.scale(-1)

    def evaluate(self, point: dict) -> dict:
        """Numeric coefficients at a point, over all indices of the degree."""
        return {idx: self.coefficient(idx).evaluate(point) for idx in _ALL_INDICES[self.degree]}

    def apply(self, point: dict, *vectors) -> float:
        """Evaluate the k-form at a point on k tangent vectors."""
        if len(vectors) != self.degree:
            raise DegreeError(f"degree-{self.degree} form needs {self.degree} vectors")
        total = 0.0
        vals = self.evaluate(point)
        if self.degree == 0:
            return vals[()]
        for idx, c in vals.items():
            mat = np.array([[vec[i] for i in idx] for vec in vectors], dtype=float)
            total += c * np.linalg.det(mat)
        return total

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for idx in sorted(self.coeffs):
            base = "^".join(DIFFERENTIALS[i] for i in idx)
            c = self.coeffs[idx]
            if self.degree == 0:
                parts.append(str(c))
            else:
                parts.append(f"({c}) {base}")
        return " + ".join(parts)

    def __repr__(self):
        return f"DifferentialForm({self.degree}, {self})"


def zero_form(degree: int) -> DifferentialForm:
    return DifferentialForm(degree, {})


def function_form(e) -> DifferentialForm:
    return DifferentialForm(0, {(): ex.as_expr(e)})


def one_form(cx=0, cy=0, cz=0) -> DifferentialForm:
    return DifferentialForm(1, {(0,): ex.as_expr(cx), (1,): ex.as_expr(cy), (2,): ex.as_expr(cz)})


def volume_form(c=1) -> DifferentialForm:
    return DifferentialForm(3, {(0, 1, 2): ex.as_expr(c)})


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    """Graded-antisymmetric product a ^ b."""
    deg = a.degree + b.degree
    if deg > 3:
        raise DegreeError(f"wedge degree overflow: {a.degree} + {b.degree} > 3")
    out: dict = {}
    for ia, ca in a.coeffs.items():
        for ib, cb in b.coeffs.items():
            sign, idx = _merge_sign(ia, ib)
            if sign == 0:
                continue
            term = ex.mul(ca, cb)
            if sign < 0:
                term = ex.neg(term)
            out[idx] = ex.add(out.get(idx, ex.ZERO), term)
    return DifferentialForm(deg, out)


def exterior_derivative(f: DifferentialForm) -> DifferentialForm:
    """d of a k-form, k <= 2.

    On R^3 the derivative of a 3-form is identically zero but has no home
    degree, so degree-3 input is an error rather than a fake 4-form.
    """
    if f.degree == 3:
        raise DegreeError("exterior derivative of a 3-form on R^3 has no valid degree")
    out: dict = {}
    for idx, c in f.coeffs.items():
        for j, var in enumerate(("x", "y", "z")):
            dc = c.partial(var)
            if isinstance(dc, ex.Num) and dc.value == 0:
                continue
            sign, merged = _merge_sign((j,), idx)
            if sign == 0:
                continue
            term = dc if sign > 0 else ex.neg(dc)
            out[merged] = ex.add(out.get(merged, ex.ZERO), term)
    return DifferentialForm(f.degree + 1, out)


def contract(vec, f: DifferentialForm) -> DifferentialForm:
    """Interior product iota_v f for a vector field of three Exprs."""
    vec = tuple(ex.as_expr(c) for c in vec)
    if f.degree == 0:
        raise DegreeError("cannot contract a 0-form")
    out: dict = {}
    for idx, c in f.coeffs.items():
        for slot, i in enumerate(idx):
            rest = idx[:slot] + idx[slot + 1 :]
            term = ex.mul(vec[i], c)
            if slot % 2 == 1:
                term = ex.neg(term)
            out[rest] = ex.add(out.get(rest, ex.ZERO), term)
    return DifferentialForm(f.degree - 1, out)


def lie_derivative(vec, f: DifferentialForm) -> DifferentialForm:
    """Cartan formula L_v f = iota_v df + d(iota_v f)."""
    term1 = contract(vec, exterior_derivative(f))
    if f.degree == 0:
        # L_v f = v(f)
        return DifferentialForm(
            0,
            {
                (): ex.add(
                    ex.add(
                        ex.mul(ex.as_expr(vec[0]), f.coefficient(()).partial("x")),
                        ex.mul(ex.as_expr(vec[1]), f.coefficient(()).partial("y")),
                    ),
                    ex.mul(ex.as_expr(vec[2]), f.coefficient(()).partial("z")),
                )
            },
        )
    return term1 + exterior_derivative(contract(vec, f))


# ---------------------------------------------------------------------------
# parsing and printing of 1-form text


def parse_one_form(text: str) -> DifferentialForm:
    """Parse "E1*dx + E2*dy + E3*dz" (any subset of terms) into a 1-form.

    The text is parsed with dx, dy, dz as formal symbols; coefficients are
    extracted by symbolic differentiation with respect to those symbols,
    and linearity in the differentials is verified both syntactically and
    numerically.
    """
    markers = tuple(ex.Sym.marker(d) for d in DIFFERENTIALS)
    tree = ex.parse_with_extra(text, {d: m for d, m in zip(DIFFERENTIALS, markers)})
    coeffs = {(i,): tree.partial(d) for i, d in enumerate(DIFFERENTIALS)}
    for c in coeffs.values():
        if c.variables() & set(DIFFERENTIALS):
            raise ParseError(
                "text is not linear in dx, dy, dz: not a 1-form", rule="one-form-linearity"
            )
    # residual check: tree == sum coeff_i * marker_i with no dx-free part
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(120):
        if checked >= 40:
            break
        env = {n: float(rng.uniform(-1.5, 1.5)) for n in ("x", "y", "z", "u", "v", "t")}
        d = {m: float(rng.uniform(-2, 2)) for m in DIFFERENTIALS}
        envd = dict(env)
        envd.update(d)
        try:
            full = tree.evaluate(envd)
            linear = sum(coeffs[(i,)].evaluate(envd) * d[m] for i, m in enumerate(DIFFERENTIALS))
        except (ValueError, ZeroDivisionError, OverflowError):
            continue
        if not np.isfinite(full):
            continue
        checked += 1
        if abs(full - linear) > 1e-9 * (1 + abs(full)):
            raise ParseError(
                "text is not linear in dx, dy, dz: not a 1-form", rule="one-form-linearity"
            )
    return DifferentialForm(1, coeffs)


def one_form_to_text(f: DifferentialForm) -> str:
    if f.degree != 1:
        raise DegreeError("not a 1-form")
    parts = []
    for i, d in enumerate(DIFFERENTIALS):
        c = f.coefficient((i,))
        if isinstance(c, ex.Num) and c.value == 0:
            continue
        if isinstance(c, ex.Num) and c.value == 1:
            parts.append(d)
        else:
            parts.append(f"({c})*{d}")
    return " + ".join(parts) if parts else "0"


def forms_equal(a: DifferentialForm, b: DifferentialForm, points=200, tol=1e-9, seed=11) -> bool:
    """Numeric equality test on sampled points (forms have no simplifier)."""
    if a.degree != b.degree:
        return False
    rng = np.random.default_rng(seed)
    diff = a - b
    checked = 0
    for _ in range(points * 3):
        if checked >= points:
            break
        env = {n: float(rng.uniform(-1.2, 1.2)) for n in ("x", "y", "z")}
        try:
            vals = diff.evaluate(env)
        except (ValueError, ZeroDivisionError, OverflowError):
            continue
        if any(not np.isfinite(c) for c in vals.values()):
            continue
        checked += 1
        if any(abs(c) > tol for c in vals.values()):
            return False
    return checked > 0
