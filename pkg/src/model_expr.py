"""
A small arithmetic language for model functions such as ``p + q*t`` or ``a*sin(w*t + phi)``.

Grammar, loosest binding first::

    expression := term (("+" | "-") term)*
    term       := unary (("*" | "/") unary)*
    unary      := "-" unary | power
    power      := primary ("^" exponent)?          # right associative, "**" is accepted too
    exponent   := "-" exponent | power
    primary    := NUMBER | NAME | FUNCTION "(" expression ")" | "(" expression ")"

so ``-p^2`` is ``-(p^2)``. Identifiers are case-sensitive; whether a name is a parameter
or a covariate is decided when the expression is evaluated. Evaluation accepts numpy
arrays for any binding and broadcasts, which is how a whole parameter grid is evaluated
in one pass.
"""
import math
import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from src.errors import (DuplicateBindingError, ExpressionDomainError, ExpressionSyntaxError,
                        InvalidParameterSpaceError, UnboundNameError, UnknownAxisError, UnknownFunctionError)

FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log}


# Expression tree.
@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    function: str
    argument: object


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _precedence(node) -> int:
    if isinstance(node, BinOp):
        return _PRECEDENCE[node.op]
    if isinstance(node, Neg):
        return _PRECEDENCE["neg"]
    if isinstance(node, Number) and math.copysign(1.0, node.value) < 0:
        return _PRECEDENCE["neg"]
    return _PRECEDENCE["atom"]


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def to_source(node) -> str:
    """Canonical text with only the parentheses the grammar needs."""
    match node:
        case Number(value):
            return _format_number(value)
        case Name(name):
            return name
        case Call(function, argument):
            return f"{function}({to_source(argument)})"
        case Neg(operand):
            inner = to_source(operand)
            return f"-({inner})" if _precedence(operand) < _PRECEDENCE["neg"] else f"-{inner}"
        case BinOp("^", left, right):
            base = to_source(left)
            if _precedence(left) <= _PRECEDENCE["^"]:
                base = f"({base})"
            exponent = to_source(right)
            if _precedence(right) < _PRECEDENCE["neg"]:
                exponent = f"({exponent})"
            return f"{base}^{exponent}"
        case BinOp(op, left, right):
            own = _PRECEDENCE[op]
            lhs, rhs = to_source(left), to_source(right)
            if _precedence(left) < own:
                lhs = f"({lhs})"
            if _precedence(right) <= own:
                rhs = f"({rhs})"
            return f"{lhs} {op} {rhs}"
    raise TypeError(f"Not an expression node: {node!r}")


def _free_names(node, names: set):
    match node:
        case Name(name):
            names.add(name)
        case Neg(operand) | Call(_, operand):
            _free_names(operand, names)
        case BinOp(_, left, right):
            _free_names(left, names)
            _free_names(right, names)


# Tokenizer.
_TOKEN_RE = re.compile(r"""
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize(source: str) -> list:
    tokens = []
    position = 0
    while position < len(source):
        match = _TOKEN_RE.match(source, position)
        if not match:
            raise ExpressionSyntaxError(f"Unexpected character {source[position]!r}", position)
        kind = match.lastgroup
        if kind != "space":
            text = "^" if match.group() == "**" else match.group()
            tokens.append(_Token(text if kind == "op" else kind, text, position))
        position = match.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    _OPERAND_START = frozenset({"number", "name", "(", "-"})

    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.current = 0

    def next(self) -> _Token:
        return self.tokens[self.current]

    def advance(self) -> _Token:
        token = self.tokens[self.current]
        self.current += 1
        return token

    def check(self, *kinds) -> bool:
        return self.next().kind in kinds

    def expect(self, kind: str) -> _Token:
        if not self.check(kind):
            self.fail({kind})
        return self.advance()

    def fail(self, expected):
        token = self.next()
        found = "end of input" if token.kind == "end" else repr(token.text)
        raise ExpressionSyntaxError(f"Unexpected {found}", token.position, frozenset(expected))

    def parse(self):
        tree = self.expression()
        if not self.check("end"):
            self.fail({"+", "-", "*", "/", "^", "end"})
        return tree

    def expression(self):
        left = self.term()
        while self.check("+", "-"):
            op = self.advance().kind
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.unary()
        while self.check("*", "/"):
            op = self.advance().kind
            left = BinOp(op, left, self.unary())
        return left

    def unary(self):
        if self.check("-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.check("^"):
            self.advance()
            return BinOp("^", base, self.exponent())
        return base

    def exponent(self):
        if self.check("-"):
            self.advance()
            return Neg(self.exponent())
        return self.power()

    def primary(self):
        token = self.next()
        if token.kind == "number":
            self.advance()
            value = float(token.text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError(f"Number {token.text} is out of range", token.position)
            return Number(value)
        if token.kind == "name":
            self.advance()
            if token.text in FUNCTIONS:
                self.expect("(")
                argument = self.expression()
                self.expect(")")
                return Call(token.text, argument)
            # A parenthesis right after a name is a call; with a space between it is a missing operator.
            if self.check("(") and self.next().position == token.position + len(token.text):
                raise UnknownFunctionError(token.text, token.position)
            return Name(token.text)
        if token.kind == "(":
            self.advance()
            inner = self.expression()
            self.expect(")")
            return inner
        self.fail(self._OPERAND_START)


@dataclass(frozen=True)
class ModelExpression:
    source: str
    ast: object

    @property
    def free_names(self) -> frozenset:
        names = set()
        _free_names(self.ast, names)
        return frozenset(names)

    def parameter_names(self, covariates) -> frozenset:
        return self.free_names - frozenset(covariates)

    def covariate_names(self, parameters) -> frozenset:
        return self.free_names - frozenset(parameters)

    def __str__(self):
        return to_source(self.ast)


def parse(source: str) -> ModelExpression:
    if not source or not source.strip():
        raise ExpressionSyntaxError("Empty expression", 0, frozenset(_Parser._OPERAND_START))
    return ModelExpression(source=source, ast=_Parser(source).parse())


# Evaluation.
def _first_bad(mask) -> int | None:
    mask = np.asarray(mask)
    return int(np.argmax(mask.ravel())) if mask.ndim else None


def _domain_error(message: str, node, mask) -> ExpressionDomainError:
    return ExpressionDomainError(message, to_source(node), _first_bad(mask))


def _evaluate(node, bindings: Mapping):
    match node:
        case Number(value):
            return value
        case Name(name):
            return bindings[name]
        case Neg(operand):
            return -_evaluate(operand, bindings)
        case Call(function, argument):
            value = _evaluate(argument, bindings)
            if function == "log" and np.any(np.asarray(value) <= 0):
                raise _domain_error("log of a non-positive number", node, np.asarray(value) <= 0)
            result = FUNCTIONS[function](value)
        case BinOp(op, left, right):
            lhs, rhs = _evaluate(left, bindings), _evaluate(right, bindings)
            if op == "+":
                result = lhs + rhs
            elif op == "-":
                result = lhs - rhs
            elif op == "*":
                result = lhs * rhs
            elif op == "/":
                zero = np.asarray(rhs) == 0
                if np.any(zero):
                    raise _domain_error("division by zero", node, np.broadcast_to(zero, np.broadcast(lhs, rhs).shape))
                result = lhs / rhs
            else:
                base = np.asarray(lhs, dtype=float)
                zero_to_negative = (base == 0) & (np.asarray(rhs) < 0)
                if np.any(zero_to_negative):
                    raise _domain_error("zero raised to a negative power", node, zero_to_negative)
                result = np.power(base, rhs)
        case _:
            raise TypeError(f"Not an expression node: {node!r}")

    nan = np.isnan(result)
    if np.any(nan):
        raise _domain_error("undefined result", node, nan)
    return result


def _bindings(expr: ModelExpression, params: Mapping, covariates: Mapping) -> dict:
    both = set(params) & set(covariates) & expr.free_names
    if both:
        raise DuplicateBindingError(f"Names bound both as parameter and covariate: {sorted(both)}")
    bindings = {**covariates, **params}
    unbound = expr.free_names - set(bindings)
    if unbound:
        raise UnboundNameError(f"Unbound name(s) in '{expr}': {sorted(unbound)}")
    return bindings


def evaluate(expr: ModelExpression, params: Mapping, covariates: Mapping | None = None):
    """Value of the model; floats in give a float out, arrays in give a broadcast array."""
    bindings = _bindings(expr, params, covariates or {})
    with np.errstate(all="ignore"):
        result = _evaluate(expr.ast, bindings)
    if isinstance(result, np.ndarray) and result.ndim:
        return result
    return float(result)


def predictions(expr: ModelExpression, params: Mapping, obs) -> list:
    """Model value for every record of an :class:`~src.error_model.ObservationSet`, in record order."""
    values = []
    for index, record in enumerate(obs.records):
        try:
            values.append(evaluate(expr, params, record.covariates))
        except (ExpressionDomainError, UnboundNameError, DuplicateBindingError) as e:
            e.args = (f"observation {index}: {e}",)
            e.index = index
            raise
    return values


@dataclass(frozen=True)
class Axis:
    name: str
    lower: float
    upper: float
    points: int

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)) or self.lower >= self.upper:
            raise InvalidParameterSpaceError(f"Axis '{self.name}' needs finite bounds with lower < upper")
        if isinstance(self.points, bool) or not isinstance(self.points, int) or self.points < 2:
            raise InvalidParameterSpaceError(f"Axis '{self.name}' needs an integer point count >= 2")

    @property
    def spacing(self) -> float:
        return (self.upper - self.lower) / self.points

    @property
    def values(self) -> np.ndarray:
        # Cell midpoints: the box [lower, upper] is cut into `points` equal cells.
        return self.lower + (np.arange(self.points) + 0.5) * self.spacing


@dataclass(frozen=True)
class ParameterSpace:
    axes: tuple

    def __post_init__(self):
        axes = tuple(self.axes)
        if not axes:
            raise InvalidParameterSpaceError("A parameter space needs at least one axis")
        names = [axis.name for axis in axes]
        if len(set(names)) != len(names):
            raise InvalidParameterSpaceError(f"Axis names must be unique: {names}")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def from_dicts(cls, parameters: list) -> "ParameterSpace":
        return cls(tuple(Axis(p["name"], float(p["min"]), float(p["max"]), p["points"]) for p in parameters))

    @property
    def names(self) -> tuple:
        return tuple(axis.name for axis in self.axes)

    @property
    def dimension(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(axis.points for axis in self.axes)

    @property
    def size(self) -> int:
        """Number of grid nodes."""
        return math.prod(self.shape)

    @property
    def cell_volume(self) -> float:
        return math.prod(axis.spacing for axis in self.axes)

    def axis(self, name: str) -> Axis:
        for axis in self.axes:
            if axis.name == name:
                return axis
        raise UnknownAxisError(f"Unknown axis '{name}'; axes are {list(self.names)}")

    def axis_values(self, name: str) -> np.ndarray:
        return self.axis(name).values

    def node(self, index: tuple) -> dict:
        return {axis.name: float(axis.values[i]) for axis, i in zip(self.axes, index)}

    def mesh(self) -> dict:
        """Coordinate arrays of every node, shaped like the grid (first axis slowest)."""
        grids = np.meshgrid(*(axis.values for axis in self.axes), indexing="ij")
        return dict(zip(self.names, grids))
