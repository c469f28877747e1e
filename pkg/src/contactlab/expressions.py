"""Symbolic scalar expressions on R^3 charts.

Expressions are immutable trees over the variables x, y, z, u, v, t with
rational/decimal literals, +, -, *, /, integer powers, and the builtin
functions sin, cos, exp, sqrt, atan2, sinc.  ``sinc`` is sin(t)/t with the
removable singularity filled in (sinc(0) = 1); its derivatives are kept
exact through the internal ``sincd(k, .)`` family so that differentiating
through the axis never manufactures a 0/0 tree.

There is deliberately no general simplifier.  The constructors fold only
trivial identities (0 + e, 1 * e, constant arithmetic) so that pullback
trees stay a manageable size; semantic equality of expressions is always
decided numerically by sampling, never syntactically.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

import numpy as np

from .errors import ParseError

VARIABLES = ("x", "y", "z", "u", "v", "t")

# name -> arity of the user-visible builtins
FUNCTIONS = {"sin": 1, "cos": 1, "exp": 1, "sqrt": 1, "atan2": 2, "sinc": 1}

_NUMBER = (int, float, Fraction)


def _as_number(value):
    if isinstance(value, bool):
        raise TypeError("booleans are not expression literals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (Fraction, float)):
        return value
    raise TypeError(f"not a numeric literal: {value!r}")


def sinc_derivative(order: int, arg):
    """Numerically evaluate the order-th derivative of sinc at ``arg``.

    Works on scalars and numpy arrays.  Near 0 the power series of
    sin(t)/t is differentiated termwise; away from 0 the recurrence
    t*f_{k+1} = sin^{(k+1)}(t) - (k+1)*f_k is used.
    """
    t = np.asarray(arg, dtype=float)
    small = np.abs(t) < 0.5
    out = np.zeros_like(t)

    if np.any(small):
        ts = np.where(small, t, 0.0)
        acc = np.zeros_like(ts)
        # sinc(t) = sum_m (-1)^m t^(2m) / (2m+1)!; differentiate k times
        for m in range(order // 2, 20):
            p = 2 * m - order
            if p < 0:
                continue
            coeff = (-1.0) ** m / math.factorial(2 * m + 1)
            for j in range(order):
                coeff *= 2 * m - j
            acc = acc + coeff * ts**p
            if 2 * m > order + 24:
                break
        out = np.where(small, acc, out)

    if np.any(~small):
        tl = np.where(~small, t, 1.0)
        f = np.sin(tl) / tl
        for k in range(order):
            # d^{k+1} sin = sin(t + (k+1) pi/2)
            f = (np.sin(tl + (k + 1) * math.pi / 2) - (k + 1) * f) / tl
        out = np.where(~small, f, out)

    if np.isscalar(arg) or getattr(arg, "ndim", 1) == 0:
        return float(out)
    return out


class Expr:
    """Immutable expression node.  Subclasses define kind-specific slots."""

    __slots__ = ()

    def key(self):
        raise NotImplementedError

    def evaluate(self, env: dict) -> float:
        raise NotImplementedError

    def partial(self, var: str) -> "Expr":
        raise NotImplementedError

    def subst(self, mapping: dict) -> "Expr":
        raise NotImplementedError

    def variables(self) -> set:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Expr) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Expr({self})"

    # arithmetic sugar so tests and internal code can write e1 + e2
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        return power(self, n)

    def compile(self, varnames=VARIABLES):
        return compile_expr(self, varnames)


class Num(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", _as_number(value))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def key(self):
        return ("num", self.value)

    def evaluate(self, env):
        return float(self.value)

    def partial(self, var):
        return ZERO

    def subst(self, mapping):
        return self

    def variables(self):
        return set()

    def __str__(self):
        val = self.value
        if isinstance(val, Fraction):
            if val.denominator == 1:
                return str(val.numerator)
            if val < 0:
                return f"(0 - {-val.numerator}/{val.denominator})"
            return f"{val.numerator}/{val.denominator}"
        return repr(val)


class Sym(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if name not in VARIABLES:
            raise ParseError(f"unknown identifier: {name}", rule="identifier")
        object.__setattr__(self, "name", name)

    @classmethod
    def marker(cls, name: str) -> "Sym":
        """Internal formal symbol outside the user variable set (dx, dy, dz)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "name", name)
        return obj

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def key(self):
        return ("sym", self.name)

    def evaluate(self, env):
        try:
            return env[self.name]
        except KeyError:
            raise ParseError(f"unbound variable: {self.name}") from None

    def partial(self, var):
        return ONE if var == self.name else ZERO

    def subst(self, mapping):
        return mapping.get(self.name, self)

    def variables(self):
        return {self.name}

    def __str__(self):
        return self.name


class _Binary(Expr):
    __slots__ = ("a", "b")
    op = "?"

    def __init__(self, a, b):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def key(self):
        return (self.op, self.a.key(), self.b.key())

    def variables(self):
        return self.a.variables() | self.b.variables()


class Add(_Binary):
    __slots__ = ()
    op = "+"

    def evaluate(self, env):
        return self.a.evaluate(env) + self.b.evaluate(env)

    def partial(self, var):
        return add(self.a.partial(var), self.b.partial(var))

    def subst(self, mapping):
        return add(self.a.subst(mapping), self.b.subst(mapping))

    def __str__(self):
        return f"{self.a} + {self.b}"


class Sub(_Binary):
    __slots__ = ()
    op = "-"

    def evaluate(self, env):
        return self.a.evaluate(env) - self.b.evaluate(env)

    def partial(self, var):
        return sub(self.a.partial(var), self.b.partial(var))

    def subst(self, mapping):
        return sub(self.a.subst(mapping), self.b.subst(mapping))

    def __str__(self):
        return f"{self.a} - {_wrap_term(self.b)}"


class Mul(_Binary):
    __slots__ = ()
    op = "*"

    def evaluate(self, env):
        return self.a.evaluate(env) * self.b.evaluate(env)

    def partial(self, var):
        return add(
            mul(self.a.partial(var), self.b),
            mul(self.a, self.b.partial(var)),
        )

    def subst(self, mapping):
        return mul(self.a.subst(mapping), self.b.subst(mapping))

    def __str__(self):
        return f"{_wrap_term(self.a)}*{_wrap_factor(self.b)}"


class Div(_Binary):
    __slots__ = ()
    op = "/"

    def evaluate(self, env):
        return self.a.evaluate(env) / self.b.evaluate(env)

    def partial(self, var):
        # (a/b)' = (a' b - a b') / b^2
        num = sub(mul(self.a.partial(var), self.b), mul(self.a, self.b.partial(var)))
        return div(num, power(self.b, 2))

    def subst(self, mapping):
        return div(self.a.subst(mapping), self.b.subst(mapping))

    def __str__(self):
        return f"{_wrap_term(self.a)}/{_wrap_factor(self.b)}"


class Pow(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent: int):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", int(exponent))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def key(self):
        return ("^", self.base.key(), self.exponent)

    def evaluate(self, env):
        return self.base.evaluate(env) ** self.exponent

    def partial(self, var):
        n = self.exponent
        return mul(mul(Num(n), power(self.base, n - 1)), self.base.partial(var))

    def subst(self, mapping):
        return power(self.base.subst(mapping), self.exponent)

    def variables(self):
        return self.base.variables()

    def __str__(self):
        return f"{_wrap_factor(self.base)}^{self.exponent}"


class Call(Expr):
    __slots__ = ("fn", "args", "order")

    def __init__(self, fn: str, args, order: int = 0):
        # `order` is only meaningful for fn == "sinc": the derivative order.
        object.__setattr__(self, "fn", fn)
        object.__setattr__(self, "args", tuple(args))
        object.__setattr__(self, "order", order)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def key(self):
        return ("call", self.fn, self.order, tuple(a.key() for a in self.args))

    def variables(self):
        out = set()
        for a in self.args:
            out |= a.variables()
        return out

    def evaluate(self, env):
        vals = [a.evaluate(env) for a in self.args]
        fn = self.fn
        if fn == "sin":
            return math.sin(vals[0])
        if fn == "cos":
            return math.cos(vals[0])
        if fn == "exp":
            return math.exp(vals[0])
        if fn == "sqrt":
            return math.sqrt(vals[0])
        if fn == "atan2":
            return math.atan2(vals[0], vals[1])
        if fn == "sinc":
            return sinc_derivative(self.order, vals[0])
        raise ParseError(f"unknown function: {fn}")

    def partial(self, var):
        a = self.args[0]
        da = a.partial(var)
        fn = self.fn
        if fn == "sin":
            return mul(Call("cos", (a,)), da)
        if fn == "cos":
            return mul(Num(-1), mul(Call("sin", (a,)), da))
        if fn == "exp":
            return mul(self, da)
        if fn == "sqrt":
            return div(da, mul(Num(2), self))
        if fn == "sinc":
            return mul(Call("sinc", (a,), order=self.order + 1), da)
        if fn == "atan2":
            yy, xx = self.args
            dy, dx = yy.partial(var), xx.partial(var)
            denom = add(power(xx, 2), power(yy, 2))
            return div(sub(mul(xx, dy), mul(yy, dx)), denom)
        raise ParseError(f"unknown function: {fn}")

    def subst(self, mapping):
        return Call(self.fn, tuple(a.subst(mapping) for a in self.args), order=self.order)

    def __str__(self):
        inner = ", ".join(str(a) for a in self.args)
        if self.fn == "sinc" and self.order > 0:
            return f"sincd({self.order}, {inner})"
        return f"{self.fn}({inner})"


# named constant; stored as a float literal on parse
PI = Num(math.pi)
ZERO = Num(0)
ONE = Num(1)


def _wrap_term(e):
    return f"({e})" if isinstance(e, (Add, Sub)) else str(e)


def _wrap_factor(e):
    return f"({e})" if isinstance(e, (Add, Sub, Mul, Div, Pow)) else str(e)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Num(value)


def _both_exact(a, b):
    return (
        isinstance(a, Num)
        and isinstance(b, Num)
        and isinstance(a.value, Fraction)
        and isinstance(b.value, Fraction)
    )


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and a.value == 0:
        return b
    if isinstance(b, Num) and b.value == 0:
        return a
    if _both_exact(a, b):
        return Num(a.value + b.value)
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Num) and b.value == 0:
        return a
    if _both_exact(a, b):
        return Num(a.value - b.value)
    return Sub(a, b)


def neg(a: Expr) -> Expr:
    return sub(ZERO, a)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num):
        if a.value == 0:
            return ZERO
        if a.value == 1:
            return b
    if isinstance(b, Num):
        if b.value == 0:
            return ZERO
        if b.value == 1:
            return a
    if _both_exact(a, b):
        return Num(a.value * b.value)
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and a.value == 0:
        return ZERO
    if isinstance(b, Num) and b.value == 1:
        return a
    if _both_exact(a, b) and b.value != 0:
        return Num(a.value / b.value)
    return Div(a, b)


def power(base: Expr, n: int) -> Expr:
    n = int(n)
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Num) and isinstance(base.value, Fraction) and n > 0:
        return Num(base.value**n)
    return Pow(base, n)


X, Y, Z, U, V, T = (Sym(n) for n in VARIABLES)


# ---------------------------------------------------------------------------
# parsing


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens = []
        while self.pos < len(text):
            m = _TOKEN_RE.match(text, self.pos)
            if not m or m.end() == self.pos:
                stripped = text[self.pos :].lstrip()
                if not stripped:
                    break
                offset = len(text) - len(stripped)
                raise ParseError(
                    f"syntax error at byte {offset}: unexpected character {stripped[0]!r}",
                    location=offset,
                    rule="token",
                )
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            self.pos = m.end()
        self.index = 0

    def peek(self):
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return ("end", "", len(self.text))

    def next(self):
        tok = self.peek()
        self.index += 1
        return tok


class _Parser:
    """Recursive-descent parser for the expression grammar.

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' int)?
    base   := number | ident | func '(' expr (',' expr)* ')' | '(' expr ')'
    """

    def __init__(self, text: str, extra_idents: dict | None = None):
        self.toks = _Tokenizer(text)
        self.extra_idents = extra_idents or {}

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, off = self.toks.peek()
        if kind != "end":
            raise ParseError(
                f"syntax error at byte {off}: unexpected {val!r}", location=off, rule="trailing"
            )
        return e

    def expr(self) -> Expr:
        kind, val, _ = self.toks.peek()
        if kind == "op" and val == "-":
            self.toks.next()
            e = neg(self.term())
        else:
            e = self.term()
        while True:
            kind, val, _ = self.toks.peek()
            if kind == "op" and val in "+-":
                self.toks.next()
                rhs = self.term()
                e = add(e, rhs) if val == "+" else sub(e, rhs)
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            kind, val, _ = self.toks.peek()
            if kind == "op" and val in "*/":
                self.toks.next()
                rhs = self.factor()
                e = mul(e, rhs) if val == "*" else div(e, rhs)
            else:
                return e

    def factor(self) -> Expr:
        e = self.base()
        kind, val, off = self.toks.peek()
        if kind == "op" and val == "^":
            self.toks.next()
            sign = 1
            kind, val, off = self.toks.next()
            if kind == "op" and val == "-":
                sign = -1
                kind, val, off = self.toks.next()
            if kind != "num" or "." in val:
                raise ParseError(
                    f"syntax error at byte {off}: exponent must be an integer",
                    location=off,
                    rule="power",
                )
            e = power(e, sign * int(val))
        return e

    def base(self) -> Expr:
        kind, val, off = self.toks.next()
        if kind == "num":
            if "." in val:
                return Num(Fraction(val))
            return Num(int(val))
        if kind == "ident":
            nkind, nval, _ = self.toks.peek()
            if nkind == "op" and nval == "(":
                return self.call(val, off)
            if val == "pi":
                return PI
            if val in self.extra_idents:
                return self.extra_idents[val]
            if val in VARIABLES:
                return Sym(val)
            raise ParseError(
                f"unknown identifier at byte {off}: {val!r}", location=off, rule="identifier"
            )
        if kind == "op" and val == "(":
            e = self.expr()
            kind, val, off = self.toks.next()
            if not (kind == "op" and val == ")"):
                raise ParseError(
                    f"syntax error at byte {off}: expected ')'", location=off, rule="paren"
                )
            return e
        raise ParseError(
            f"syntax error at byte {off}: unexpected {val!r}", location=off, rule="base"
        )

    def call(self, name: str, off: int) -> Expr:
        self.toks.next()  # consume '('
        args = [self.expr()]
        while True:
            kind, val, o2 = self.toks.next()
            if kind == "op" and val == ",":
                args.append(self.expr())
            elif kind == "op" and val == ")":
                break
            else:
                raise ParseError(
                    f"syntax error at byte {o2}: expected ',' or ')'", location=o2, rule="call"
                )
        if name == "sincd":
            # internal: k-th derivative of sinc, emitted when printing
            # differentiated trees; kept parseable for round-tripping
            if len(args) != 2 or not isinstance(args[0], Num):
                raise ParseError(
                    f"arity mismatch at byte {off}: sincd(k, t) expects a literal order",
                    location=off,
                    rule="arity",
                )
            return Call("sinc", (args[1],), order=int(args[0].value))
        if name not in FUNCTIONS:
            raise ParseError(
                f"unknown identifier at byte {off}: {name!r}", location=off, rule="identifier"
            )
        if len(args) != FUNCTIONS[name]:
            raise ParseError(
                f"arity mismatch at byte {off}: {name} expects {FUNCTIONS[name]} argument(s)",
                location=off,
                rule="arity",
            )
        return Call(name, tuple(args))


def parse_expression(text: str) -> Expr:
    """Parse expression text into an Expr tree."""
    return _Parser(text).parse()


def parse_with_extra(text: str, extra: dict) -> Expr:
    """Parse allowing additional identifiers bound to given Expr values.

    Used by the one-form parser, which treats dx, dy, dz as formal symbols.
    """
    return _Parser(text, extra_idents=dict(extra)).parse()


# ---------------------------------------------------------------------------
# vectorized compilation


_NP_FUNCS = {
    "sin": "np.sin",
    "cos": "np.cos",
    "exp": "np.exp",
    "sqrt": "np.sqrt",
    "atan2": "np.arctan2",
}


def _emit(e: Expr, lines, cache, counter):
    k = e.key()
    if k in cache:
        return cache[k]

    def fresh(src):
        name = f"t{counter[0]}"
        counter[0] += 1
        lines.append(f"    {name} = {src}")
        cache[k] = name
        return name

    if isinstance(e, Num):
        return fresh(repr(float(e.value)))
    if isinstance(e, Sym):
        cache[k] = e.name
        return e.name
    if isinstance(e, (Add, Sub, Mul, Div)):
        a = _emit(e.a, lines, cache, counter)
        b = _emit(e.b, lines, cache, counter)
        return fresh(f"({a} {e.op} {b})")
    if isinstance(e, Pow):
        a = _emit(e.base, lines, cache, counter)
        return fresh(f"({a} ** {e.exponent})")
    if isinstance(e, Call):
        args = [_emit(a, lines, cache, counter) for a in e.args]
        if e.fn == "sinc":
            return fresh(f"_sincd({e.order}, {args[0]})")
        return fresh(f"{_NP_FUNCS[e.fn]}({args[0]}" + (f", {args[1]})" if len(args) > 1 else ")"))
    raise TypeError(f"cannot compile {e!r}")


def compile_expr(e: Expr, varnames=VARIABLES):
    """Compile an Expr into a function of numpy arrays (or floats)."""
    lines: list = []
    cache: dict = {}
    counter = [0]
    result = _emit(e, lines, cache, counter)
    src = "def _f({}):\n{}\n    return {} + _z".format(
        ", ".join(varnames), "\n".join(lines) or "    pass", result
    )
    namespace = {"np": np, "_sincd": sinc_derivative}
    exec(src, namespace)
    raw = namespace["_f"]

    def fn(*args):
        # `+ _z` broadcasting trick: constants become full-size arrays
        zero = np.zeros(np.broadcast(*args).shape) if args else 0.0
        namespace["_z"] = zero
        with np.errstate(all="ignore"):
            return raw(*args)

    fn.expression = e
    return fn


def finite_difference(e: Expr, var: str, env: dict, h: float = 1e-5) -> float:
    """Central finite difference of e with respect to var at env."""
    hi = dict(env)
    lo = dict(env)
    hi[var] = env[var] + h
    lo[var] = env[var] - h
    return (e.evaluate(hi) - e.evaluate(lo)) / (2 * h)
