# app/utils/expression.py
"""Arithmetic intensity expressions: x1..xn, numbers, + - * / ^, exp, sin, cos and pi.

Expressions are parsed with the ast module and only a whitelist of nodes is
accepted; evaluation walks the tree with numpy so every expression is
vectorised over an (N, n) array of points.
"""
import ast
import re

import numpy as np

from app.utils.errors import ConfigError

FUNCTIONS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}
CONSTANTS = {"pi": np.pi}
_VARIABLE = re.compile(r"^x([1-9][0-9]*)$")
_BINARY = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


class Expression:
    def __init__(self, text, n):
        if not isinstance(text, str) or not text.strip():
            raise ConfigError("an expression must be a non-empty string")
        self.text = text
        self.n = n
        try:
            tree = ast.parse(text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ConfigError(f"cannot parse expression '{text}': {exc.msg}") from exc
        self._tree = tree.body
        self._check(self._tree)

    def _check(self, node):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise ConfigError(f"unsupported literal {node.value!r} in '{self.text}'")
        elif isinstance(node, ast.Name):
            match = _VARIABLE.match(node.id)
            if match:
                if int(match.group(1)) > self.n:
                    raise ConfigError(f"variable {node.id} exceeds dimension {self.n}")
            elif node.id not in CONSTANTS:
                raise ConfigError(f"unknown identifier '{node.id}' in '{self.text}'")
        elif isinstance(node, ast.BinOp):
            if type(node.op) not in _BINARY:
                raise ConfigError(f"operator {type(node.op).__name__} is not allowed")
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, (ast.USub, ast.UAdd)):
                raise ConfigError(f"operator {type(node.op).__name__} is not allowed")
            self._check(node.operand)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
                raise ConfigError(f"only {sorted(FUNCTIONS)} may be called")
            if len(node.args) != 1 or node.keywords:
                raise ConfigError(f"{node.func.id} takes exactly one argument")
            self._check(node.args[0])
        else:
            raise ConfigError(f"'{ast.unparse(node)}' is not allowed in an expression")

    def _eval(self, node, x):
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id in CONSTANTS:
                return CONSTANTS[node.id]
            return x[:, int(node.id[1:]) - 1]
        if isinstance(node, ast.BinOp):
            return _BINARY[type(node.op)](self._eval(node.left, x), self._eval(node.right, x))
        if isinstance(node, ast.UnaryOp):
            value = self._eval(node.operand, x)
            return -value if isinstance(node.op, ast.USub) else value
        return FUNCTIONS[node.func.id](self._eval(node.args[0], x))

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n:
            raise ConfigError(f"expression expects points in R^{self.n}")
        with np.errstate(all="ignore"):
            value = self._eval(self._tree, x)
        return np.broadcast_to(np.asarray(value, dtype=float), (x.shape[0],)).copy()

    def __repr__(self):
        return f"Expression({self.text!r}, n={self.n})"


def parse_expression(text, n):
    return Expression(text, n)
