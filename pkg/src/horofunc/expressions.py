"""Parse max-affine function expressions such as ``"max(x - w, x + w, x + z)"``."""
from __future__ import annotations

import ast
import math
from fractions import Fraction

from ._rational import to_fraction
from .convexfn import MaxAffine

NAMED = {2: ("x", "y"), 3: ("x", "y", "z"), 4: ("x", "y", "w", "z")}


class ExpressionError(ValueError):
    pass


def variable_names(d: int) -> dict[str, int]:
    names = {f"x{i + 1}": i for i in range(d)}
    names.update({n: i for i, n in enumerate(NAMED.get(d, ()))})
    return names


class _Pieces:
    """Max of affine pieces ``(gradient, constant)``."""

    def __init__(self, pieces):
        self.pieces = list(pieces)

    @property
    def constant(self):
        if len(self.pieces) == 1 and not any(self.pieces[0][0]):
            return self.pieces[0][1]
        return None

    @property
    def affine(self) -> bool:
        return len(self.pieces) == 1

    def scale(self, t: Fraction) -> "_Pieces":
        if t < 0 and not self.affine:
            raise ExpressionError("negative multiple of a non-affine max is not max-affine")
        return _Pieces([(tuple(t * a for a in g), t * c) for g, c in self.pieces])

    def __add__(self, other: "_Pieces") -> "_Pieces":
        return _Pieces([(tuple(a + b for a, b in zip(g1, g2)), c1 + c2)
                        for g1, c1 in self.pieces for g2, c2 in other.pieces])


def parse_function(text: str, d: int) -> MaxAffine:
    """Parse ``text`` into a :class:`MaxAffine` in dimension ``d``.

    Allowed: numbers, the variables (``x, y`` / ``x, y, z`` / ``x, y, w, z``
    or ``x1..xd``), ``+``, ``-``, multiplication and division by constants,
    ``max(...)``, ``sqrt(c)`` of a constant and ``pi``.
    """
    names = variable_names(d)
    zero = tuple(Fraction(0) for _ in range(d))

    def const(c) -> _Pieces:
        return _Pieces([(zero, to_fraction(c))])

    def walk(node) -> _Pieces:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return const(node.value)
        if isinstance(node, ast.Name):
            if node.id in names:
                g = [Fraction(0)] * d
                g[names[node.id]] = Fraction(1)
                return _Pieces([(tuple(g), Fraction(0))])
            if node.id == "pi":
                return const(math.pi)
            raise ExpressionError(f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return v.scale(Fraction(-1)) if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a + b.scale(Fraction(-1))
            if isinstance(node.op, ast.Mult):
                if a.constant is not None:
                    return b.scale(a.constant)
                if b.constant is not None:
                    return a.scale(b.constant)
                raise ExpressionError("products of variables are not affine")
            if isinstance(node.op, ast.Div):
                if b.constant is None or b.constant == 0:
                    raise ExpressionError("division only by nonzero constants")
                return a.scale(1 / b.constant)
            raise ExpressionError(f"unsupported operator {type(node.op).__name__}")
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            args = [walk(a) for a in node.args]
            if node.func.id == "max" and args:
                return _Pieces([p for a in args for p in a.pieces])
            if node.func.id == "sqrt" and len(args) == 1 and args[0].constant is not None:
                return const(math.sqrt(float(args[0].constant)))
            raise ExpressionError(f"unsupported call {node.func.id}(...)")
        raise ExpressionError(f"unsupported syntax: {ast.dump(node)[:60]}")

    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}") from exc
    return MaxAffine(walk(tree).pieces)
