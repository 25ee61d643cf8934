"""Tiny expression grammar for user-declared densities.

Grammar (EBNF, also documented in the README):

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = [ "+" | "-" ] , power ;
    power   = atom , [ "^" , unary ] ;
    atom    = NUMBER | VAR | call | "(" , expr , ")" ;
    call    = ( "exp" | "log" | "pow" ) , "(" , expr , { "," , expr } , ")" ;
    VAR     = "x" | "x1" | "x2" | "theta" | "theta1" ... | "z" | "z1" ... ;

``^`` and ``pow(a, b)`` both denote exponentiation.  Expressions are
parsed with :mod:`ast` and evaluated against numpy arrays; any construct
outside the grammar is rejected.
"""

from __future__ import annotations

import ast
from typing import Callable

import numpy as np

from .errors import ConfigurationError

_ALLOWED_CALLS = {"exp": np.exp, "log": np.log, "pow": np.power}

_ALLOWED_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}

_ALLOWED_UNARY = {ast.UAdd: np.positive, ast.USub: np.negative}


def _validate(node: ast.AST) -> None:
    if isinstance(node, ast.Expression):
        _validate(node.body)
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _ALLOWED_BINOPS:
            raise ConfigurationError(f"operator not in grammar: {ast.dump(node.op)}")
        _validate(node.left)
        _validate(node.right)
    elif isinstance(node, ast.UnaryOp):
        if type(node.op) not in _ALLOWED_UNARY:
            raise ConfigurationError(f"operator not in grammar: {ast.dump(node.op)}")
        _validate(node.operand)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_CALLS:
            raise ConfigurationError("only exp(), log() and pow() may be called")
        if node.keywords:
            raise ConfigurationError("keyword arguments are not in the grammar")
        for arg in node.args:
            _validate(arg)
    elif isinstance(node, ast.Name):
        name = node.id
        ok = name in ("x", "x1", "x2", "theta", "z") or (
            (name.startswith("theta") or name.startswith("z"))
            and name.lstrip("thetaz").isdigit()
        )
        if not ok:
            raise ConfigurationError(f"unknown variable {name!r}")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ConfigurationError("only numeric constants are allowed")
    else:
        raise ConfigurationError(f"construct not in grammar: {type(node).__name__}")


def compile_density(
    expression: str,
) -> Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]:
    """Compile a density expression into ``f(x, theta, z) -> values``.

    ``x`` is (N,) or (N, 2) (then ``x1``/``x2`` address the columns);
    ``theta`` and ``z`` are 1-d parameter vectors addressed either bare
    (first component) or as ``theta1``, ``z2``, ...
    """
    source = expression.replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ConfigurationError(f"cannot parse expression: {exc}") from exc
    _validate(tree)
    code = compile(tree, "<density>", "eval")

    def evaluate(x: np.ndarray, theta: np.ndarray, z: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        z = np.atleast_1d(np.asarray(z, dtype=float))
        env: dict[str, object] = {
            "exp": np.exp,
            "log": np.log,
            "pow": np.power,
            "theta": theta[0],
            "z": z[0],
        }
        if x.ndim == 2:
            env["x1"] = x[:, 0]
            env["x2"] = x[:, 1]
        else:
            env["x"] = x
            env["x1"] = x
        for i, value in enumerate(theta, start=1):
            env[f"theta{i}"] = value
        for i, value in enumerate(z, start=1):
            env[f"z{i}"] = value
        out = eval(code, {"__builtins__": {}}, env)  # noqa: S307 - grammar-validated
        return np.broadcast_to(np.asarray(out, dtype=float), (len(x),)).copy()

    return evaluate
