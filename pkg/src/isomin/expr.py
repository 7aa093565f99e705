"""Expression trees for holomorphic functions of one complex variable.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?    # right-associative; binds tighter than
                                    # unary minus, so -z^2 == -(z^2)
    atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

Predefined constants: i, pi, e.  Functions: exp, log, sin, cos, sinh,
cosh.  log and non-integer powers use the principal branch.  The same
grammar doubles as a real two-variable language for graph surfaces; pass
``variables=("u", "v")`` and the imaginary unit is not predefined.

Evaluation never lets non-finite values escape silently: log(0),
division by zero and overflow all raise :class:`EvalError`.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Union


class ExprError(Exception):
    """Base class for expression handling failures."""


class ParseError(ExprError):
    """Syntax error; carries the byte offset and the expected token set."""

    def __init__(self, offset: int, expected: tuple[str, ...], found: str = ""):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        self.found = found
        what = f", found {found!r}" if found else ""
        super().__init__(
            f"syntax error at offset {offset}: expected "
            f"{' or '.join(self.expected)}{what}"
        )


class UnknownIdentifierError(ParseError):
    def __init__(self, offset: int, name: str, known: tuple[str, ...]):
        self.offset = offset
        self.name = name
        self.expected = known
        ExprError.__init__(
            self,
            f"unknown identifier {name!r} at offset {offset} "
            f"(known: {', '.join(known)})",
        )


class EvalError(ExprError):
    """Domain error, division by zero or overflow during evaluation."""


@dataclass(frozen=True, slots=True)
class Lit:
    value: complex


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str  # one of + - * / ^
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True, slots=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Lit, Var, Neg, BinOp, Call]

FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh")

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            # only whitespace may remain unmatched
            rest = src[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ParseError(bad, ("number", "identifier", "operator"),
                             src[bad])
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str, variables: tuple[str, ...],
                 allow_imaginary: bool):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0
        self.variables = variables
        self.constants = {"pi": complex(cmath.pi), "e": complex(cmath.e)}
        if allow_imaginary:
            self.constants["i"] = 1j

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def match_op(self, *ops: str) -> str | None:
        kind, text, _ = self.peek()
        if kind == "op" and text in ops:
            self.advance()
            return text
        return None

    def expect_op(self, op: str) -> None:
        kind, text, off = self.peek()
        if kind != "op" or text != op:
            raise ParseError(off, (f"'{op}'",), text)
        self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        kind, text, off = self.peek()
        if kind != "eof":
            raise ParseError(off, ("operator", "end of input"), text)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            op = self.match_op("+", "-")
            if op is None:
                return node
            node = BinOp(op, node, self.term())

    def term(self) -> Expr:
        node = self.factor()
        while True:
            op = self.match_op("*", "/")
            if op is None:
                return node
            node = BinOp(op, node, self.factor())

    def factor(self) -> Expr:
        if self.match_op("-"):
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.match_op("^"):
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Expr:
        kind, text, off = self.advance()
        if kind == "num":
            return Lit(complex(float(text)))
        if kind == "ident":
            if self.match_op("("):
                if text not in FUNCTIONS:
                    raise UnknownIdentifierError(off, text, FUNCTIONS)
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if text in self.variables:
                return Var(text)
            if text in self.constants:
                return Lit(self.constants[text])
            known = self.variables + tuple(self.constants) + FUNCTIONS
            raise UnknownIdentifierError(off, text, known)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(off, ("number", "identifier", "'('", "'-'"), text)


def parse_expr(src: str, variables: tuple[str, ...] = ("z",), *,
               allow_imaginary: bool = True) -> Expr:
    """Parse ``src`` into an expression tree over the given variables."""
    return _Parser(src, variables, allow_imaginary).parse()


def parse_real_expr(src: str, variables: tuple[str, ...] = ("u", "v")) -> Expr:
    """Two real variables, no imaginary unit; used for graph surfaces."""
    return parse_expr(src, variables, allow_imaginary=False)


# evaluation ---------------------------------------------------------------

def _pow_value(a: complex, b: complex) -> complex:
    # integer exponents go through repeated multiplication, everything
    # else through the principal branch
    if b.imag == 0 and float(b.real).is_integer():
        return a ** int(b.real)
    if a == 0:
        raise EvalError("zero raised to a non-integer power")
    return cmath.exp(b * cmath.log(a))


_FUNC_IMPL: dict[str, Callable[[complex], complex]] = {
    "exp": cmath.exp,
    "log": cmath.log,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "sinh": cmath.sinh,
    "cosh": cmath.cosh,
}


def eval_expr(ast: Expr, env: complex | float | Mapping[str, complex]) -> complex:
    """Evaluate the tree.

    ``env`` is either a mapping of variable names to values or a single
    number bound to the variable ``z``.
    """
    if not isinstance(env, Mapping):
        env = {"z": complex(env)}

    def rec(node: Expr) -> complex:
        if isinstance(node, Lit):
            return node.value
        if isinstance(node, Var):
            try:
                return complex(env[node.name])
            except KeyError:
                raise EvalError(f"unbound variable {node.name!r}") from None
        if isinstance(node, Neg):
            return -rec(node.arg)
        if isinstance(node, BinOp):
            a = rec(node.lhs)
            b = rec(node.rhs)
            try:
                if node.op == "+":
                    return a + b
                if node.op == "-":
                    return a - b
                if node.op == "*":
                    return a * b
                if node.op == "/":
                    return a / b
                return _pow_value(a, b)
            except ZeroDivisionError:
                raise EvalError("division by zero") from None
            except OverflowError:
                raise EvalError("overflow") from None
            except ValueError as exc:
                raise EvalError(str(exc)) from None
        if isinstance(node, Call):
            a = rec(node.arg)
            try:
                return _FUNC_IMPL[node.fn](a)
            except ValueError:
                raise EvalError(f"{node.fn} domain error at {a}") from None
            except OverflowError:
                raise EvalError(f"overflow in {node.fn}") from None
        raise TypeError(f"not an expression node: {node!r}")

    val = rec(ast)
    if not cmath.isfinite(val):
        raise EvalError("overflow: result is not finite")
    return val


def _emit(node: Expr) -> str:
    if isinstance(node, Lit):
        return repr(node.value) if node.value.imag else repr(node.value.real)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_emit(node.arg)})"
    if isinstance(node, BinOp):
        l, r = _emit(node.lhs), _emit(node.rhs)
        if node.op == "^":
            return f"_pow({l}, {r})"
        return f"({l} {node.op} {r})"
    if isinstance(node, Call):
        return f"_{node.fn}({_emit(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


@lru_cache(maxsize=512)
def compile_expr(ast: Expr, variables: tuple[str, ...] = ("z",)
                 ) -> Callable[..., complex]:
    """Compile the tree to a python function of the given variables.

    Matches :func:`eval_expr` exactly (same power and branch semantics,
    same error contract); exists because the integrators evaluate
    expressions millions of times.
    """
    ns = {"_pow": _pow_value}
    for name, fn in _FUNC_IMPL.items():
        ns["_" + name] = fn
    code = f"def _f({', '.join(variables)}): return {_emit(ast)}"
    exec(code, ns)  # noqa: S102 - codegen from our own AST only
    raw = ns["_f"]

    def run(*args: complex) -> complex:
        try:
            val = complex(raw(*[complex(a) for a in args]))
        except ZeroDivisionError:
            raise EvalError("division by zero") from None
        except OverflowError:
            raise EvalError("overflow") from None
        except ValueError as exc:
            raise EvalError(str(exc)) from None
        if not cmath.isfinite(val):
            raise EvalError("overflow: result is not finite")
        return val

    return run


def compile_real(ast: Expr, variables: tuple[str, ...] = ("u", "v")
                 ) -> Callable[..., float]:
    """Compile a real-variable tree; rejects non-real values at runtime."""
    fn = compile_expr(ast, variables)

    def run(*args: float) -> float:
        val = fn(*args)
        if abs(val.imag) > 1e-9 * (1.0 + abs(val.real)):
            raise EvalError("expression does not evaluate to a real value")
        return val.real

    return run


# differentiation ----------------------------------------------------------

_ZERO = Lit(0j)
_ONE = Lit(1 + 0j)


def _is_lit(node: Expr, value: complex | None = None) -> bool:
    return isinstance(node, Lit) and (value is None or node.value == value)


def _fold(op: str, a: Expr, b: Expr) -> Expr | None:
    if isinstance(a, Lit) and isinstance(b, Lit):
        try:
            return Lit(eval_expr(BinOp(op, a, b), {}))
        except EvalError:
            return None
    return None


def _add(a: Expr, b: Expr) -> Expr:
    if _is_lit(a, 0):
        return b
    if _is_lit(b, 0):
        return a
    return _fold("+", a, b) or BinOp("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_lit(b, 0):
        return a
    if _is_lit(a, 0):
        return _neg(b)
    return _fold("-", a, b) or BinOp("-", a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_lit(a, 0) or _is_lit(b, 0):
        return _ZERO
    if _is_lit(a, 1):
        return b
    if _is_lit(b, 1):
        return a
    return _fold("*", a, b) or BinOp("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is_lit(a, 0) and not _is_lit(b, 0):
        return _ZERO
    if _is_lit(b, 1):
        return a
    return _fold("/", a, b) or BinOp("/", a, b)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Lit):
        return Lit(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _pow_node(a: Expr, b: Expr) -> Expr:
    if _is_lit(b, 1):
        return a
    if _is_lit(b, 0):
        return _ONE
    return BinOp("^", a, b)


@lru_cache(maxsize=512)
def differentiate(ast: Expr, var: str = "z") -> Expr:
    """Symbolic derivative with respect to ``var``, lightly simplified."""
    if isinstance(ast, Lit):
        return _ZERO
    if isinstance(ast, Var):
        return _ONE if ast.name == var else _ZERO
    if isinstance(ast, Neg):
        return _neg(differentiate(ast.arg, var))
    if isinstance(ast, BinOp):
        a, b = ast.lhs, ast.rhs
        da, db = differentiate(a, var), differentiate(b, var)
        if ast.op == "+":
            return _add(da, db)
        if ast.op == "-":
            return _sub(da, db)
        if ast.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if ast.op == "/":
            num = _sub(_mul(da, b), _mul(a, db))
            return _div(num, _pow_node(b, Lit(2 + 0j)))
        # power rule; constant exponent stays polynomial-friendly
        if _is_lit(db, 0):
            if isinstance(b, Lit):
                expo = Lit(b.value - 1)
            else:
                expo = _sub(b, _ONE)
            return _mul(_mul(b, _pow_node(a, expo)), da)
        log_term = _mul(db, Call("log", a))
        frac = _div(_mul(b, da), a)
        return _mul(ast, _add(log_term, frac))
    if isinstance(ast, Call):
        da = differentiate(ast.arg, var)
        a = ast.arg
        if ast.fn == "exp":
            outer: Expr = Call("exp", a)
        elif ast.fn == "log":
            return _div(da, a)
        elif ast.fn == "sin":
            outer = Call("cos", a)
        elif ast.fn == "cos":
            outer = _neg(Call("sin", a))
        elif ast.fn == "sinh":
            outer = Call("cosh", a)
        else:  # cosh
            outer = Call("sinh", a)
        return _mul(outer, da)
    raise TypeError(f"not an expression node: {ast!r}")


# printing -----------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        if node.op in "+-":
            return _PREC_ADD
        if node.op in "*/":
            return _PREC_MUL
        return _PREC_POW
    if isinstance(node, Neg):
        return _PREC_NEG
    if isinstance(node, Lit):
        v = node.value
        if v.imag != 0 and v.real != 0:
            return _PREC_ATOM  # printed with its own parens
        if v.imag < 0 or (v.imag == 0 and v.real < 0):
            return _PREC_NEG
        if v.imag != 0 and v.imag != 1:
            return _PREC_MUL  # printed as b*i
        return _PREC_ATOM
    return _PREC_ATOM


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _fmt_lit(v: complex) -> str:
    if v.imag == 0:
        return _fmt_real(v.real)
    if v.real == 0:
        if v.imag == 1:
            return "i"
        if v.imag == -1:
            return "-i"
        return f"{_fmt_real(v.imag)}*i"
    return f"({_fmt_real(v.real)} + {_fmt_real(v.imag)}*i)"


def to_source(ast: Expr) -> str:
    """Render the tree in the input grammar with minimal parentheses."""

    def wrap(node: Expr, minimum: int) -> str:
        text = rec(node)
        if _prec(node) < minimum:
            return f"({text})"
        return text

    def rec(node: Expr) -> str:
        if isinstance(node, Lit):
            return _fmt_lit(node.value)
        if isinstance(node, Var):
            return node.name
        if isinstance(node, Neg):
            return "-" + wrap(node.arg, _PREC_NEG)
        if isinstance(node, BinOp):
            if node.op in "+-":
                return (wrap(node.lhs, _PREC_ADD)
                        + f" {node.op} "
                        + wrap(node.rhs, _PREC_ADD + 1))
            if node.op in "*/":
                return (wrap(node.lhs, _PREC_MUL)
                        + node.op
                        + wrap(node.rhs, _PREC_MUL + 1))
            # '^' is right-associative and the base must be atomic
            return (wrap(node.lhs, _PREC_POW + 1)
                    + "^"
                    + wrap(node.rhs, _PREC_POW))
        if isinstance(node, Call):
            return f"{node.fn}({rec(node.arg)})"
        raise TypeError(f"not an expression node: {node!r}")

    return rec(ast)


def cauchy_riemann_residual(ast: Expr, w: complex, step: float = 1e-5) -> float:
    """Central-difference check that the tree behaves holomorphically at w.

    Writes f = x + i*y and returns |x_u - y_v| + |x_v + y_u| from the
    four-point stencil.  Near a branch cut the stencil straddles the jump
    and the residual blows up, which is exactly the intended signal.
    """
    fn = compile_expr(ast)
    fe = fn(w + step)
    fw = fn(w - step)
    fn_ = fn(w + 1j * step)
    fs = fn(w - 1j * step)
    xu = (fe.real - fw.real) / (2 * step)
    yu = (fe.imag - fw.imag) / (2 * step)
    xv = (fn_.real - fs.real) / (2 * step)
    yv = (fn_.imag - fs.imag) / (2 * step)
    return abs(xu - yv) + abs(xv + yu)
