"""Parse text such as ``"theta*g^2*h - E2*Delta"`` into a GradedForm.

Names: g, h, E, Y, X, Delta (= −h^{q−1}), E2 (= E − Y), theta (or θ).
Operators: +, −, *, ^ (or **), integer literals read mod p.
"""

from __future__ import annotations

import ast

from .field import GF, Poly, RatF
from .forms import GradedForm


class FormSyntaxError(ValueError):
    pass


def _names(F: GF) -> dict:
    g, h, E, Y, X = (GradedForm.gen(F, v) for v in ("g", "h", "E", "Y", "X"))
    theta = GradedForm.const(F, RatF(Poly.theta(F)))
    return {"g": g, "h": h, "E": E, "Y": Y, "X": X, "Delta": -(h ** (F.q - 1)),
            "E2": E - Y, "theta": theta, "θ": theta}


def parse_form(F: GF, text: str) -> GradedForm:
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise FormSyntaxError(f"cannot parse form {text!r}: {exc.msg}") from None
    names = _names(F)

    def ev(node):
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = node.right
                if not (isinstance(exp, ast.Constant) and isinstance(exp.value, int) and exp.value >= 0):
                    raise FormSyntaxError("exponents must be nonnegative integer literals")
                return ev(node.left) ** exp.value
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            raise FormSyntaxError(f"unsupported operator {type(node.op).__name__}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = ev(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise FormSyntaxError(f"unknown name {node.id!r}")
            return names[node.id]
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return GradedForm.const(F, RatF.const(F, F.from_int(node.value)))
        raise FormSyntaxError(f"unsupported syntax {ast.dump(node)[:40]}")

    try:
        return ev(tree.body)
    except FormSyntaxError:
        raise
    except ValueError as exc:
        raise FormSyntaxError(str(exc)) from None
