"""Pretty printer producing re-parseable program text."""

from __future__ import annotations

import math

from arnlab.dsl.ast import (
    Activation,
    Apply,
    BinOp,
    Bias,
    Case,
    Cons,
    Expr,
    LetFun,
    LinCombApply,
    ListVar,
    NeuronProgram,
    RealConst,
    Tuple,
    Var,
)

WIDTH = 72
STEP = 2


def format_real(value: float) -> str:
    """Format a float in SML notation: ``~`` for minus, ``E~d`` exponents."""
    if not math.isfinite(value):
        raise ValueError(f"cannot print non-finite literal {value!r}")
    text = repr(float(value))
    negative = text.startswith("-")
    text = text.lstrip("-")
    mantissa, _, exponent = text.partition("e")
    if "." not in mantissa:
        mantissa += ".0"
    out = ("~" if negative else "") + mantissa
    if exponent:
        out += "E" + str(int(exponent)).replace("-", "~")
    return out


def _pattern(node: Case) -> str:
    if node.tuple_pattern:
        return "( " + ", ".join(node.pattern) + " )"
    return node.pattern[0]


def _callee(node: Expr) -> str:
    if isinstance(node, Activation):
        return node.fn
    if isinstance(node, LinCombApply):
        return f"lc{node.mapping}"
    return node.fn_name


def _operand(node: Expr) -> bool:
    """Whether a case must be parenthesised in this operand position."""
    return isinstance(node, Case)


def flat(node: Expr) -> str:
    """Single-line rendering."""
    match node:
        case RealConst(value=value):
            return format_real(value)
        case Var(name=name) | ListVar(name=name):
            return name
        case Bias():
            return "bias"
        case BinOp(op=op, lhs=lhs, rhs=rhs):
            left = f"( {flat(lhs)} )" if _operand(lhs) else flat(lhs)
            right = f"( {flat(rhs)} )" if _operand(rhs) else flat(rhs)
            return f"( {left} {op} {right} )"
        case Activation() | LinCombApply() | Apply():
            return f"{_callee(node)}( {flat(node.arg)} )"
        case Cons(head=head, tail=tail):
            return f"cons( {flat(head)}, {flat(tail)} )"
        case Tuple(elements=elements):
            return "( " + ", ".join(flat(e) for e in elements) + " )"
        case Case(scrutinee=scrutinee, body=body):
            scrut = f"( {flat(scrutinee)} )" if isinstance(scrutinee, Case) else flat(scrutinee)
            return f"case {scrut} of {_pattern(node)} => {flat(body)}"
        case LetFun(fn_name=fn_name, param=param, fn_body=fn_body, in_body=in_body):
            return f"let fun {fn_name} {param} = {flat(fn_body)} in {flat(in_body)} end"
    raise TypeError(f"not an expression: {node!r}")


def render(node: Expr, indent: int = 0) -> str:
    """Render ``node`` at ``indent`` columns, breaking lines when it does not fit."""
    single = flat(node)
    if indent + len(single) <= WIDTH or isinstance(node, (RealConst, Var, ListVar, Bias)):
        return single
    pad = " " * (indent + STEP)
    here = " " * indent
    match node:
        case BinOp(op=op, lhs=lhs, rhs=rhs):
            left = render(lhs, indent + STEP + (2 if _operand(lhs) else 0))
            right = render(rhs, indent + STEP + (2 if _operand(rhs) else 0))
            if _operand(lhs):
                left = f"( {left} )"
            if _operand(rhs):
                right = f"( {right} )"
            return f"(\n{pad}{left} {op}\n{pad}{right}\n{pad})"
        case Activation() | LinCombApply() | Apply():
            return f"{_callee(node)}(\n{pad}{render(node.arg, indent + STEP)}\n{pad})"
        case Cons(head=head, tail=tail):
            return (
                f"cons(\n{pad}{render(head, indent + STEP)},\n"
                f"{pad}{render(tail, indent + STEP)}\n{pad})"
            )
        case Tuple(elements=elements):
            inner = f",\n{pad}".join(render(e, indent + STEP) for e in elements)
            return f"(\n{pad}{inner}\n{pad})"
        case Case(scrutinee=scrutinee, body=body):
            if isinstance(scrutinee, Case):
                scrut = "( " + render(scrutinee, indent + STEP + 2) + " )"
            else:
                scrut = render(scrutinee, indent + STEP)
            return (
                f"case\n{pad}{scrut}\n{here}of\n{pad}{_pattern(node)} =>\n"
                f"{here}{render(body, indent)}"
            )
        case LetFun(fn_name=fn_name, param=param, fn_body=fn_body, in_body=in_body):
            inner = " " * (indent + 2 * STEP)
            return (
                f"let\n{pad}fun {fn_name} {param} =\n{inner}{render(fn_body, indent + 2 * STEP)}\n"
                f"{here}in\n{pad}{render(in_body, indent + STEP)}\n{here}end"
            )
    raise TypeError(f"not an expression: {node!r}")


def pretty_print(program: NeuronProgram) -> str:
    """Print a program as ``fun f (...) =`` followed by its indented body."""
    header = f"fun {program.name} ( {', '.join(program.params)} ) ="
    return f"{header}\n  {render(program.body, STEP)}\n"
