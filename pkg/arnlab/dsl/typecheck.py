"""Type checking of neuron programs.

Three kinds of values exist: scalars (``real``), linear-combination lists
(``linComb``) and tuples of scalars.  A well-typed program body evaluates
to a 5-tuple ``(s0', s1', s2', s3', y')``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from arnlab.dsl.ast import (
    LIST_PARAMS,
    N_MAPPINGS,
    SCALAR_PARAMS,
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
from arnlab.errors import TypeCheckError


@dataclass(frozen=True)
class Type:
    kind: str  # scalar | list | tuple
    arity: int = 0

    def __str__(self) -> str:
        return f"tuple({self.arity})" if self.kind == "tuple" else self.kind


SCALAR = Type("scalar")
LIST = Type("list")
TUPLE_ARITIES = (2, 5)


def tuple_of(n: int) -> Type:
    return Type("tuple", n)


@dataclass
class FunctionInfo:
    """A local function; its parameter type is fixed by the first call."""

    node: LetFun
    env: dict[str, Type]
    param_type: Type | None = None
    result_type: Type | None = None


@dataclass
class TypedProgram:
    """A program together with the type of every subexpression."""

    program: NeuronProgram
    types: dict[int, Type] = field(default_factory=dict)
    functions: dict[int, FunctionInfo] = field(default_factory=dict)

    def type_of(self, node: Expr) -> Type:
        return self.types[id(node)]

    def param_type(self, node: LetFun) -> Type:
        info = self.functions[id(node)]
        return info.param_type or SCALAR


class _Checker:
    def __init__(self, typed: TypedProgram):
        self.typed = typed

    def note(self, node: Expr, t: Type) -> Type:
        self.typed.types[id(node)] = t
        return t

    def expect(self, node: Expr, t: Type, env: dict, funs: dict, what: str) -> Type:
        got = self.check(node, env, funs)
        if got != t:
            raise TypeCheckError(f"{what}: expected {t}, got {got}")
        return got

    def check(self, node: Expr, env: dict[str, Type], funs: dict[str, FunctionInfo]) -> Type:
        match node:
            case RealConst():
                return self.note(node, SCALAR)
            case Var(name=name):
                if name not in env:
                    raise TypeCheckError(f"free variable {name!r}")
                return self.note(node, env[name])
            case ListVar(name=name):
                if name not in LIST_PARAMS:
                    raise TypeCheckError(f"{name!r} is not a list parameter")
                return self.note(node, LIST)
            case Bias():
                return self.note(node, LIST)
            case Cons(head=head, tail=tail):
                self.expect(head, SCALAR, env, funs, "cons head")
                self.expect(tail, LIST, env, funs, "cons tail")
                return self.note(node, LIST)
            case LinCombApply(mapping=mapping, arg=arg):
                if not 0 <= mapping < N_MAPPINGS:
                    raise TypeCheckError(f"weight mapping lc{mapping} out of range")
                self.expect(arg, LIST, env, funs, f"lc{mapping} argument")
                return self.note(node, SCALAR)
            case BinOp(op=op, lhs=lhs, rhs=rhs):
                self.expect(lhs, SCALAR, env, funs, f"left operand of {op}")
                self.expect(rhs, SCALAR, env, funs, f"right operand of {op}")
                return self.note(node, SCALAR)
            case Activation(fn=fn, arg=arg):
                self.expect(arg, SCALAR, env, funs, f"{fn} argument")
                return self.note(node, SCALAR)
            case Tuple(elements=elements):
                if len(elements) not in TUPLE_ARITIES:
                    raise TypeCheckError(f"tuples must have 2 or 5 fields, got {len(elements)}")
                for i, element in enumerate(elements):
                    self.expect(element, SCALAR, env, funs, f"tuple field {i}")
                return self.note(node, tuple_of(len(elements)))
            case Case(scrutinee=scrutinee, pattern=pattern, body=body, tuple_pattern=is_tuple):
                t = self.check(scrutinee, env, funs)
                if is_tuple:
                    if t.kind != "tuple" or t.arity != len(pattern):
                        raise TypeCheckError(
                            f"pattern of {len(pattern)} variables cannot match {t}"
                        )
                    bound = {name: SCALAR for name in pattern}
                else:
                    if t.kind == "tuple":
                        raise TypeCheckError(f"a {t} must be matched by a tuple pattern")
                    bound = {pattern[0]: t}
                return self.note(node, self.check(body, {**env, **bound}, funs))
            case LetFun(fn_name=fn_name, in_body=in_body):
                info = FunctionInfo(node=node, env=dict(env))
                self.typed.functions[id(node)] = info
                result = self.check(in_body, env, {**funs, fn_name: info})
                if info.param_type is None:
                    # never called: the body must still be well-typed
                    self.apply(info, SCALAR, funs)
                return self.note(node, result)
            case Apply(fn_name=fn_name, arg=arg):
                if fn_name not in funs:
                    raise TypeCheckError(f"unknown function {fn_name!r}")
                arg_type = self.check(arg, env, funs)
                if arg_type.kind == "tuple":
                    raise TypeCheckError(f"{fn_name} takes a scalar or list, got {arg_type}")
                return self.note(node, self.apply(funs[fn_name], arg_type, funs))
        raise TypeCheckError(f"not an expression: {node!r}")

    def apply(self, info: FunctionInfo, arg_type: Type, funs: dict[str, FunctionInfo]) -> Type:
        if info.param_type is not None:
            if info.param_type != arg_type:
                raise TypeCheckError(
                    f"{info.node.fn_name} called with {arg_type}, earlier with {info.param_type}"
                )
            return info.result_type
        info.param_type = arg_type
        # functions are not recursive: the body sees only the enclosing functions
        outer = {k: v for k, v in funs.items() if v is not info}
        env = {**info.env, info.node.param: arg_type}
        info.result_type = self.check(info.node.fn_body, env, outer)
        return info.result_type


def typecheck(program: NeuronProgram) -> TypedProgram:
    """Annotate every subexpression with its type.

    Raises:
        TypeCheckError: on a type mismatch, a free variable, a tuple-pattern
            arity mismatch or a result that is not a 5-tuple of scalars.
    """
    typed = TypedProgram(program)
    env = {name: SCALAR for name in SCALAR_PARAMS}
    result = _Checker(typed).check(program.body, env, {})
    if result != tuple_of(5):
        raise TypeCheckError(f"program must return a 5-tuple of scalars, got {result}")
    return typed
