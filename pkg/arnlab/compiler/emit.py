"""Text renderings of a compiled kernel: a C-like listing and a DOT graph."""

from __future__ import annotations

from collections import Counter

from arnlab.compiler.kernel import OUTPUT_NAMES, Instr, NeuronKernel

INFIX = {"add": ("+", 1), "sub": ("-", 1), "mul": ("*", 2), "div": ("/", 2)}
ATOM = 3
MATRIX = {"x": "U", "y": "W", "s0": "P"}


def _const(value: float) -> str:
    text = repr(float(value))
    return f"({text})" if text.startswith("-") else text


def _lc_terms(instr: Instr, operand: list[str]) -> str:
    terms = [f"a{k} * {arg}" for k, arg in zip(instr.aux, operand)]
    if instr.source in MATRIX:
        terms.append(f"dot({MATRIX[instr.source]}{instr.mapping}, {instr.source})")
    terms.append(f"b{instr.mapping}")
    return "(" + " + ".join(terms) + ")"


def _use_counts(kernel: NeuronKernel) -> Counter:
    uses: Counter = Counter()
    for instr in kernel.instructions:
        uses.update(instr.args)
    return uses


def emit_readable(kernel: NeuronKernel) -> str:
    """C-like listing with one assignment per materialized register.

    Parameters and constants are written inline, as are intermediates used
    exactly once.  Output registers are named ``s0_next`` .. ``y_next``
    (chained assignment when one register feeds several outputs); other
    shared intermediates become temporaries ``tN``.
    """
    uses = _use_counts(kernel)
    outputs: dict[int, list[str]] = {}
    for name, reg in zip(OUTPUT_NAMES, kernel.outputs):
        outputs.setdefault(reg, []).append(name)

    # rendered text and precedence of every register as seen by its users
    text: dict[int, tuple[str, int]] = {}
    lines: list[str] = []
    for instr in kernel.instructions:
        operand = [_operand(text[a], 0) for a in instr.args]
        match instr.op:
            case "param":
                expr, prec = instr.name, ATOM
            case "const":
                expr, prec = _const(instr.value), ATOM
            case "lc":
                expr, prec = _lc_terms(instr, [_operand(text[a], INFIX["mul"][1]) for a in instr.args]), ATOM
            case op if op in INFIX:
                symbol, prec = INFIX[op]
                lhs = _operand(text[instr.args[0]], prec)
                # right operands of - and / bind at equal precedence
                rhs = _operand(text[instr.args[1]], prec + (op in ("sub", "div")))
                expr = f"{lhs} {symbol} {rhs}"
            case _:
                expr, prec = f"{instr.op}({operand[0]})", ATOM

        reg = instr.dest
        if reg in outputs:
            names = outputs[reg]
            lines.append(" = ".join(names) + f" = {expr};")
            text[reg] = (names[0], ATOM)
        elif instr.op in ("param", "const") or uses[reg] <= 1:
            text[reg] = (expr, prec)
        else:
            lines.append(f"t{reg} = {expr};")
            text[reg] = (f"t{reg}", ATOM)
    return "\n".join(lines) + "\n"


def _operand(rendered: tuple[str, int], min_prec: int) -> str:
    expr, prec = rendered
    return f"({expr})" if prec < min_prec else expr


def _label(instr: Instr) -> str:
    match instr.op:
        case "param":
            return instr.name
        case "const":
            return repr(float(instr.value))
        case "lc":
            return f"lc{instr.mapping} {instr.source}"
        case op if op in INFIX:
            return INFIX[op][0]
    return instr.op


def emit_graph(kernel: NeuronKernel) -> str:
    """Graphviz DOT text: one node per register, one edge per operand reference.

    Output slots are box nodes fed by dashed edges, so operand edges can be
    counted as the lines of the form ``rA -> rB;``.
    """
    lines = ["digraph neuron {", "  rankdir=LR;"]
    for instr in kernel.instructions:
        lines.append(f'  r{instr.dest} [label="{_label(instr)}"];')
    for instr in kernel.instructions:
        for arg in instr.args:
            lines.append(f"  r{arg} -> r{instr.dest};")
    for name, reg in zip(OUTPUT_NAMES, kernel.outputs):
        lines.append(f"  {name} [shape=box];")
        lines.append(f"  r{reg} -> {name} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
