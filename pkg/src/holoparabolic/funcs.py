"""
Scalar functions of one real variable with exact first and second derivatives.

Every one-variable function the package consumes (warping functions, model
profiles, entropy distributions, integrands) is a :class:`ScalarFunction`: an
expression tree evaluated in forward mode on second-order jets, so that
``(log f)''`` sign tests and Hubble functions carry no differencing noise.

Expressions are written in ordinary infix notation::

    exp(t)        sinh(r)        t^(2/3)        pi*R^2        r*(1 + r)^0.1

Grammar
-------
* numbers (``2``, ``0.5``, ``1e-3``) and the constants ``pi`` and ``e``;
* a single free variable, any identifier that is not a function or constant;
* binary ``+ - * /``, power written ``^`` or ``**``, unary ``-``;
* calls ``exp log sinh cosh tanh sin cos sqrt`` with one argument.

Sampled functions are given as ``{"table": [[x0, y0], [x1, y1], ...]}`` and are
interpolated by a natural cubic spline.  The spline is C2 at the knots, but
its second derivative is only piecewise linear, so sign tests on a tabulated
function are flagged through :attr:`ScalarFunction.interpolated`.
"""

import ast
import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, ExpressionError, NonFiniteError

__all__ = [
    "Interval",
    "Jet2",
    "ScalarFunction",
    "eval_jet2",
    "log_second_derivative",
    "hubble",
]


def _scalarize(a):
    if isinstance(a, np.ndarray) and a.ndim == 0:
        return float(a)
    return a


@dataclass(frozen=True)
class Jet2:
    """Value, first and second derivative of a function at a point.

    Components are floats, or numpy arrays of equal shape when the function
    was evaluated on an array of points.
    """

    value: object
    d1: object
    d2: object

    def __iter__(self):
        return iter((self.value, self.d1, self.d2))

    def __add__(self, other):
        return Jet2(self.value + other.value, self.d1 + other.d1, self.d2 + other.d2)

    def __sub__(self, other):
        return Jet2(self.value - other.value, self.d1 - other.d1, self.d2 - other.d2)

    def __neg__(self):
        return Jet2(-self.value, -self.d1, -self.d2)

    def __mul__(self, other):
        u, du, ddu = self
        v, dv, ddv = other
        return Jet2(u * v, du * v + u * dv, ddu * v + 2.0 * du * dv + u * ddv)

    def compose(self, f0, f1, f2):
        """Chain rule: jet of ``phi(u)`` given ``phi``, ``phi'`` and ``phi''`` at ``u``."""
        return Jet2(f0, f1 * self.d1, f2 * self.d1**2 + f1 * self.d2)


@dataclass(frozen=True)
class Interval:
    """A real interval with open, closed or infinite endpoints."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval: lo={self.lo}, hi={self.hi}")
        if math.isinf(self.lo) and self.lo_closed or math.isinf(self.hi) and self.hi_closed:
            raise ValueError("an infinite endpoint cannot be closed")

    @classmethod
    def parse(cls, spec):
        """Build an interval from ``"(0, inf)"``-style text or a ``[lo, hi]`` pair.

        In the pair form finite endpoints are closed and ``None`` means infinite.
        """
        if spec is None:
            return cls()
        if isinstance(spec, Interval):
            return spec
        if isinstance(spec, str):
            m = re.fullmatch(r"\s*([\[\(])\s*([^,]+?)\s*,\s*([^,]+?)\s*([\]\)])\s*", spec)
            if not m:
                raise ValueError(f"cannot parse interval {spec!r}")
            lo, hi = float(m.group(2)), float(m.group(3))
            return cls(lo, hi, m.group(1) == "[", m.group(4) == "]")
        lo, hi = spec
        lo = -math.inf if lo is None else float(lo)
        hi = math.inf if hi is None else float(hi)
        return cls(lo, hi, math.isfinite(lo), math.isfinite(hi))

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above & below

    def __str__(self):
        def fmt(v):
            return repr(v) if math.isfinite(v) else ("-inf" if v < 0 else "inf")

        return (
            ("[" if self.lo_closed else "(")
            + f"{fmt(self.lo)}, {fmt(self.hi)}"
            + ("]" if self.hi_closed else ")")
        )


def _fail_domain(mask, what):
    if np.any(mask):
        raise DomainError(what)


# Elementary functions: name -> (jet builder, value source, derivative source).
# The source templates see the argument's value {v}, its derivative {d} and the
# function's own value {o}; they feed the numba simulator kernel.
def _exp(u):
    e = np.exp(u.value)
    return u.compose(e, e, e)


def _log(u):
    _fail_domain(np.asarray(u.value) <= 0, "log of a non-positive number")
    v = u.value
    return u.compose(np.log(v), 1.0 / v, -1.0 / v**2)


def _sinh(u):
    s, c = np.sinh(u.value), np.cosh(u.value)
    return u.compose(s, c, s)


def _cosh(u):
    s, c = np.sinh(u.value), np.cosh(u.value)
    return u.compose(c, s, c)


def _tanh(u):
    t = np.tanh(u.value)
    sech2 = 1.0 - t * t
    return u.compose(t, sech2, -2.0 * t * sech2)


def _sin(u):
    s, c = np.sin(u.value), np.cos(u.value)
    return u.compose(s, c, -s)


def _cos(u):
    s, c = np.sin(u.value), np.cos(u.value)
    return u.compose(c, -s, -c)


def _sqrt(u):
    _fail_domain(np.asarray(u.value) < 0, "sqrt of a negative number")
    r = np.sqrt(u.value)
    return u.compose(r, 0.5 / r, -0.25 / (r * u.value))


_FUNCTIONS = {
    "exp": (_exp, "math.exp({v})", "{o}*{d}"),
    "log": (_log, "math.log({v})", "{d}/{v}"),
    "sinh": (_sinh, "math.sinh({v})", "math.cosh({v})*{d}"),
    "cosh": (_cosh, "math.cosh({v})", "math.sinh({v})*{d}"),
    "tanh": (_tanh, "math.tanh({v})", "(1.0-{o}*{o})*{d}"),
    "sin": (_sin, "math.sin({v})", "math.cos({v})*{d}"),
    "cos": (_cos, "math.cos({v})", "-math.sin({v})*{d}"),
    "sqrt": (_sqrt, "math.sqrt({v})", "0.5*{d}/{o}"),
}
_CONSTANTS = {"pi": math.pi, "e": math.e}


class _Emitter:
    """Collects straight-line source for value/derivative evaluation."""

    def __init__(self):
        self.lines = []
        self.globals = {}
        self._count = 0

    def fresh(self):
        self._count += 1
        return f"v{self._count}", f"d{self._count}"

    def assign(self, value_src, deriv_src):
        v, d = self.fresh()
        self.lines.append(f"{v} = {value_src}")
        self.lines.append(f"{d} = {deriv_src}")
        return v, d

    def constant_array(self, arr):
        name = f"_arr{len(self.globals)}"
        self.globals[name] = np.ascontiguousarray(arr, dtype=np.float64)
        return name


class _Node:
    precedence = 100

    def jet(self, x):
        out = self._jet(x)
        for part in out:
            if not np.all(np.isfinite(part)):
                raise NonFiniteError(f"non-finite value while evaluating {self}")
        return out

    def has_table(self):
        return any(c.has_table() for c in self.children())

    def children(self):
        return ()

    def _wrap(self, child):
        s = str(child)
        return f"({s})" if child.precedence < self.precedence else s


class _Var(_Node):
    def __init__(self, name):
        self.name = name

    def _jet(self, x):
        return x

    def emit(self, em):
        return "x", "1.0"

    def __str__(self):
        return self.name


class _Const(_Node):
    def __init__(self, c):
        self.c = float(c)

    def _jet(self, x):
        zero = np.zeros_like(x.value) if isinstance(x.value, np.ndarray) else 0.0
        return Jet2(zero + self.c, zero, zero)

    def emit(self, em):
        return repr(self.c), "0.0"

    def __str__(self):
        if self.c == math.pi:
            return "pi"
        return repr(self.c) if self.c != int(self.c) or abs(self.c) > 1e15 else str(int(self.c))


class _Binary(_Node):
    symbol = "?"

    def __init__(self, a, b):
        self.a, self.b = a, b

    def children(self):
        return (self.a, self.b)

    def __str__(self):
        right = str(self.b)
        if self.b.precedence <= self.precedence:
            right = f"({right})"
        return f"{self._wrap(self.a)}{self.symbol}{right}"


class _Add(_Binary):
    symbol, precedence = "+", 1

    def _jet(self, x):
        return self.a.jet(x) + self.b.jet(x)

    def emit(self, em):
        (va, da), (vb, db) = self.a.emit(em), self.b.emit(em)
        return em.assign(f"{va}+{vb}", f"{da}+{db}")


class _Sub(_Binary):
    symbol, precedence = "-", 1

    def _jet(self, x):
        return self.a.jet(x) - self.b.jet(x)

    def emit(self, em):
        (va, da), (vb, db) = self.a.emit(em), self.b.emit(em)
        return em.assign(f"{va}-({vb})", f"{da}-({db})")


class _Mul(_Binary):
    symbol, precedence = "*", 2

    def _jet(self, x):
        return self.a.jet(x) * self.b.jet(x)

    def emit(self, em):
        (va, da), (vb, db) = self.a.emit(em), self.b.emit(em)
        return em.assign(f"{va}*{vb}", f"{da}*{vb}+{va}*{db}")


class _Div(_Binary):
    symbol, precedence = "/", 2

    def _jet(self, x):
        num, den = self.a.jet(x), self.b.jet(x)
        _fail_domain(np.asarray(den.value) == 0, f"division by zero in {self}")
        v = den.value
        return num * den.compose(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def emit(self, em):
        (va, da), (vb, db) = self.a.emit(em), self.b.emit(em)
        return em.assign(f"{va}/{vb}", f"({da}*{vb}-{va}*{db})/({vb}*{vb})")


class _Neg(_Node):
    precedence = 3

    def __init__(self, a):
        self.a = a

    def children(self):
        return (self.a,)

    def _jet(self, x):
        return -self.a.jet(x)

    def emit(self, em):
        va, da = self.a.emit(em)
        return em.assign(f"-({va})", f"-({da})")

    def __str__(self):
        return f"-{self._wrap(self.a)}"


class _Pow(_Binary):
    symbol, precedence = "^", 4

    def _jet(self, x):
        base = self.a.jet(x)
        if isinstance(self.b, _Const):
            return self._const_power(base, self.b.c)
        expo = self.b.jet(x)
        _fail_domain(np.asarray(base.value) <= 0, f"non-positive base with variable exponent in {self}")
        return _exp(expo * _log(base))

    @staticmethod
    def _const_power(u, c):
        v = np.asarray(u.value, dtype=float)
        integer = float(c).is_integer()
        if not integer:
            _fail_domain(v < 0, "negative base with non-integer exponent")
        if c < 0:
            _fail_domain(v == 0, "zero base with negative exponent")
        with np.errstate(divide="ignore", invalid="ignore"):
            f0 = v**c
            f1 = c * v ** (c - 1) if c != 0 else np.zeros_like(v)
            # polynomial terms vanish identically instead of producing 0*inf
            f2 = c * (c - 1) * v ** (c - 2) if c not in (0.0, 1.0) else np.zeros_like(v)
        return u.compose(_scalarize(f0), _scalarize(f1), _scalarize(f2))

    def emit(self, em):
        va, da = self.a.emit(em)
        if isinstance(self.b, _Const):
            c = self.b.c
            v, d = em.fresh()
            em.lines.append(f"{v} = {va}**{c!r}")
            em.lines.append(f"{d} = {c!r}*{va}**{c - 1.0!r}*{da}" if c != 0 else f"{d} = 0.0")
            return v, d
        vb, db = self.b.emit(em)
        v, d = em.fresh()
        em.lines.append(f"{v} = math.exp({vb}*math.log({va}))")
        em.lines.append(f"{d} = {v}*({db}*math.log({va})+{vb}*{da}/{va})")
        return v, d

    def __str__(self):
        # right-associative: only the base needs brackets at equal precedence
        left = str(self.a)
        if self.a.precedence <= self.precedence:
            left = f"({left})"
        return f"{left}^{self._wrap(self.b)}"


class _Call(_Node):
    def __init__(self, name, a):
        self.name, self.a = name, a

    def children(self):
        return (self.a,)

    def _jet(self, x):
        return _FUNCTIONS[self.name][0](self.a.jet(x))

    def emit(self, em):
        va, da = self.a.emit(em)
        _, vsrc, dsrc = _FUNCTIONS[self.name]
        v, d = em.fresh()
        em.lines.append(f"{v} = {vsrc.format(v=va)}")
        em.lines.append(f"{d} = {dsrc.format(v=va, d=da, o=v)}")
        return v, d

    def __str__(self):
        return f"{self.name}({self.a})"


class _Table(_Node):
    def __init__(self, points, a):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
            raise ExpressionError("a table needs at least three [x, y] pairs")
        if not np.all(np.diff(pts[:, 0]) > 0):
            raise ExpressionError("table abscissae must be strictly increasing")
        if not np.all(np.isfinite(pts)):
            raise ExpressionError("table entries must be finite")
        self.points = pts
        self.spline = CubicSpline(pts[:, 0], pts[:, 1], bc_type="natural")
        self.a = a

    def has_table(self):
        return True

    def children(self):
        return (self.a,)

    def _jet(self, x):
        u = self.a.jet(x)
        v = np.asarray(u.value, dtype=float)
        lo, hi = self.points[0, 0], self.points[-1, 0]
        _fail_domain((v < lo) | (v > hi), f"table evaluated outside [{lo}, {hi}]")
        sp = self.spline
        return u.compose(_scalarize(sp(v)), _scalarize(sp(v, 1)), _scalarize(sp(v, 2)))

    def emit(self, em):
        va, da = self.a.emit(em)
        xs = em.constant_array(self.spline.x)
        cs = em.constant_array(self.spline.c)
        v, d = em.fresh()
        em.lines.append(f"{v}, {d} = _pp_eval({va}, {xs}, {cs})")
        em.lines.append(f"{d} = {d}*{da}")
        return v, d

    def __str__(self):
        return f"table[{len(self.points)}]({self.a})"


_BINOPS = {ast.Add: _Add, ast.Sub: _Sub, ast.Mult: _Mul, ast.Div: _Div, ast.Pow: _Pow}


def _build(node, names):
    if isinstance(node, ast.Expression):
        return _build(node.body, names)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return _Const(node.value)
    if isinstance(node, ast.Name):
        if node.id in _CONSTANTS:
            return _Const(_CONSTANTS[node.id])
        if node.id in _FUNCTIONS:
            raise ExpressionError(f"function {node.id!r} used without an argument")
        names.add(node.id)
        return _Var(node.id)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_build(node.left, names), _build(node.right, names))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _build(node.operand, names)
        return _Neg(inner) if isinstance(node.op, ast.USub) else inner
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ExpressionError(f"unknown function in {ast.unparse(node)!r}")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"{node.func.id} takes exactly one argument")
        return _Call(node.func.id, _build(node.args[0], names))
    raise ExpressionError(f"unsupported syntax: {ast.unparse(node)!r}")


def _parse(text):
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("expression must be a non-empty string")
    try:
        # '^' is exponentiation here, with Python's '**' precedence
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg} at column {exc.offset}") from None
    names = set()
    node = _build(tree, names)
    if len(names) > 1:
        raise ExpressionError(f"expression {text!r} has more than one variable: {sorted(names)}")
    return node, (names.pop() if names else "x")


class ScalarFunction:
    """A function of one real variable with exact derivatives.

    Parameters
    ----------
    node : expression tree
        Normally produced by :meth:`parse`, :meth:`table` or :meth:`constant`.
    domain : Interval, optional
        Declared domain; evaluation outside it raises :class:`DomainError`.
    variable : str
        Name of the free variable, used for display only.

    Instances are immutable and may be shared between threads.  Arithmetic
    operators build new functions, e.g. ``pi * f**2``.
    """

    def __init__(self, node, domain=None, variable="x"):
        self._node = node
        self.domain = Interval.parse(domain)
        self.variable = variable

    @classmethod
    def parse(cls, text, domain=None):
        node, var = _parse(text)
        return cls(node, domain, var)

    @classmethod
    def table(cls, points):
        """Natural cubic interpolant through ``[[x, y], ...]`` on ``[x0, xN]``."""
        node = _Table(points, _Var("x"))
        pts = node.points
        return cls(node, Interval(pts[0, 0], pts[-1, 0], True, True), "x")

    @classmethod
    def constant(cls, c, domain=None):
        return cls(_Const(c), domain)

    @classmethod
    def from_config(cls, spec, domain=None):
        """Build from a config value: an expression string, ``{"table": ...}``,
        or ``{"expr": ..., "domain": ...}``."""
        if isinstance(spec, ScalarFunction):
            return spec
        if isinstance(spec, (int, float)) and not isinstance(spec, bool):
            return cls.constant(spec, domain)
        if isinstance(spec, str):
            return cls.parse(spec, domain)
        if isinstance(spec, dict):
            if "table" in spec:
                return cls.table(spec["table"])
            if "expr" in spec:
                return cls.parse(spec["expr"], spec.get("domain", domain))
        raise ExpressionError(f"cannot build a function from {spec!r}")

    def to_config(self):
        if isinstance(self._node, _Table) and isinstance(self._node.a, _Var):
            return {"table": self._node.points.tolist()}
        if self.domain == Interval():
            return str(self)
        return {"expr": str(self), "domain": str(self.domain)}

    @property
    def interpolated(self):
        """True when any part of the function comes from a sampled table."""
        return self._node.has_table()

    def _check_domain(self, x):
        if not np.all(self.domain.contains(x)):
            raise DomainError(f"{self} evaluated outside its domain {self.domain}")

    def jet(self, x):
        """Return the :class:`Jet2` at ``x`` (scalar or array)."""
        scalar = np.ndim(x) == 0
        xv = float(x) if scalar else np.asarray(x, dtype=float)
        self._check_domain(xv)
        one = 1.0 if scalar else np.ones_like(xv)
        with np.errstate(all="ignore"):
            out = self._node.jet(Jet2(xv, one, 0.0 * one))
        if scalar:
            return Jet2(*(float(np.asarray(p)) for p in out))
        return Jet2(*(np.broadcast_to(np.asarray(p, dtype=float), xv.shape).copy() for p in out))

    def __call__(self, x):
        return self.jet(x).value

    def derivative(self, x, order=1):
        if order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        return tuple(self.jet(x))[order]

    def emit_source(self, name="_fn"):
        """Straight-line Python source returning ``(value, derivative)`` at ``x``.

        Returns ``(source, globals)``; the globals hold table coefficient arrays
        and expect a ``_pp_eval`` piecewise-polynomial helper to be supplied.
        """
        em = _Emitter()
        v, d = self._node.emit(em)
        body = "\n".join("    " + line for line in em.lines) or "    pass"
        src = f"def {name}(x):\n{body}\n    return {v}, {d}\n"
        return src, em.globals

    # -- algebra ---------------------------------------------------------
    def _combine(self, other, cls, reverse=False):
        if isinstance(other, ScalarFunction):
            onode = other._node
            lo = max(self.domain.lo, other.domain.lo)
            hi = min(self.domain.hi, other.domain.hi)
            dom = Interval(
                lo,
                hi,
                self.domain.contains(lo) and other.domain.contains(lo) if math.isfinite(lo) else False,
                self.domain.contains(hi) and other.domain.contains(hi) if math.isfinite(hi) else False,
            )
        elif isinstance(other, (int, float)):
            onode, dom = _Const(other), self.domain
        else:
            return NotImplemented
        a, b = (onode, self._node) if reverse else (self._node, onode)
        return ScalarFunction(cls(a, b), dom, self.variable)

    def __add__(self, o):
        return self._combine(o, _Add)

    def __radd__(self, o):
        return self._combine(o, _Add, True)

    def __sub__(self, o):
        return self._combine(o, _Sub)

    def __rsub__(self, o):
        return self._combine(o, _Sub, True)

    def __mul__(self, o):
        return self._combine(o, _Mul)

    def __rmul__(self, o):
        return self._combine(o, _Mul, True)

    def __truediv__(self, o):
        return self._combine(o, _Div)

    def __rtruediv__(self, o):
        return self._combine(o, _Div, True)

    def __pow__(self, o):
        return self._combine(o, _Pow)

    def __neg__(self):
        return ScalarFunction(_Neg(self._node), self.domain, self.variable)

    def __str__(self):
        return str(self._node)

    def __repr__(self):
        return f"ScalarFunction({str(self)!r}, domain={self.domain})"


def eval_jet2(fn, x):
    """Value, first and second derivative of ``fn`` at ``x``."""
    return fn.jet(x)


def _positive_jet(fn, x):
    j = fn.jet(x)
    if np.any(np.asarray(j.value) <= 0):
        raise DomainError(f"{fn} must be positive at {x}")
    return j


def log_second_derivative(fn, x):
    r"""Second derivative of ``log fn``: :math:`f''/f - (f'/f)^2`."""
    f, f1, f2 = _positive_jet(fn, x)
    return f2 / f - (f1 / f) ** 2


def hubble(fn, x):
    """Logarithmic derivative ``fn'(x) / fn(x)``."""
    f, f1, _ = _positive_jet(fn, x)
    return f1 / f
