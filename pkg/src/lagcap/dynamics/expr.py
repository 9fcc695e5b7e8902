"""Small arithmetic grammar for user Hamiltonians, compiled through sympy.

Allowed: numbers, variables x1..xn / y1..yn, ``pi``, unary +/-, binary + - * /,
``**`` (or ``pow(a, b)``) and ``exp(...)``.  Anything else is a FormatError.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np
import sympy as sp

from ..errors import FormatError

_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b, ast.Mult: lambda a, b: a * b,
           ast.Div: lambda a, b: a / b, ast.Pow: lambda a, b: a ** b}
_VAR = re.compile(r"^([xy])([1-9][0-9]*)$")


def coordinate_symbols(n: int) -> list[sp.Symbol]:
    return [sp.Symbol(f"x{i}", real=True) for i in range(1, n + 1)] + \
           [sp.Symbol(f"y{i}", real=True) for i in range(1, n + 1)]


def parse_expression(text: str, n: int) -> sp.Expr:
    syms = {s.name: s for s in coordinate_symbols(n)}
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise FormatError(f"cannot parse expression {text!r}: {exc.msg}") from exc

    def conv(node):
        if isinstance(node, ast.Expression):
            return conv(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return sp.nsimplify(node.value) if isinstance(node.value, int) else sp.Float(node.value)
        if isinstance(node, ast.Name):
            if node.id == "pi":
                return sp.pi
            if node.id in syms:
                return syms[node.id]
            m = _VAR.match(node.id)
            if m:
                raise FormatError(f"variable {node.id} out of range for n = {n}")
            raise FormatError(f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
            v = conv(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](conv(node.left), conv(node.right))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            args = [conv(a) for a in node.args]
            if node.func.id == "exp" and len(args) == 1:
                return sp.exp(args[0])
            if node.func.id == "pow" and len(args) == 2:
                return args[0] ** args[1]
        raise FormatError(f"unsupported syntax in expression: {ast.dump(node)[:60]}")

    return conv(tree)


@dataclass
class CompiledField:
    """H and its gradient as numpy callables on arrays of shape (N, 2n)."""

    expr: sp.Expr
    n: int
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]


def compile_expression(text: str, n: int) -> CompiledField:
    syms = coordinate_symbols(n)
    expr = parse_expression(text, n)
    f = sp.lambdify(syms, expr, "numpy")
    grads = [sp.lambdify(syms, sp.diff(expr, s), "numpy") for s in syms]

    def value(z):
        z = np.atleast_2d(z)
        return np.broadcast_to(np.asarray(f(*z.T), dtype=float), (z.shape[0],)).copy()

    def gradient(z):
        z = np.atleast_2d(z)
        cols = [np.broadcast_to(np.asarray(g(*z.T), dtype=float), (z.shape[0],)) for g in grads]
        return np.stack(cols, axis=-1)

    return CompiledField(expr, n, value, gradient)
