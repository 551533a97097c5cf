"""Tests for lowering neuron programs to register bytecode."""

import re

import numpy as np
import pytest

from arnlab.compiler.emit import emit_graph, emit_readable
from arnlab.compiler.kernel import OUTPUT_NAMES, compile_program
from arnlab.compiler.layout import AuxSite
from arnlab.dsl.parser import parse
from arnlab.dsl.typecheck import typecheck
from arnlab.dsl.zoo import ZOO, zoo_program
from arnlab.errors import CompileError
from arnlab.runtime.executor import LayerParams, LayerState, forward_kernel
from arnlab.runtime.init import init_weights
from arnlab.runtime.tape import Tape

OPERAND_EDGE = re.compile(r"^\s*r\d+ -> r\d+;$", re.MULTILINE)


def compile_source(source: str, nodes: int = 4, n_in: int = 2):
    return compile_program(typecheck(parse(source)), nodes, n_in)


def compile_zoo(name: str, nodes: int = 4, n_in: int = 2):
    return compile_program(typecheck(zoo_program(name)), nodes, n_in)


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def hollow(m):
    return m * (1.0 - np.eye(m.shape[-1]))


def lstm_oracle(weights, aux_index, xs):
    """Direct peephole-LSTM recurrence with the layer's bias and aux conventions."""
    U, W, b, a = weights["U"], weights["W"], weights["b"], weights["aux"]
    batch, n_t, _ = xs.shape
    l = W.shape[-1]
    s, y = np.zeros((batch, l)), np.zeros((batch, l))

    def lin(i, x):
        return b[i] + x @ U[i].T

    def rec(i, h):
        return b[i] + h @ hollow(W[i]).T

    def aux(i, site):
        return a[aux_index[AuxSite(i, site)]]

    ys, ss = [], []
    for t in range(n_t):
        x = xs[:, t, :]
        z = np.tanh(lin(0, x) + rec(0, y) + aux(0, 0) * y)
        i = sigmoid(lin(1, x) + rec(1, y) + aux(1, 1) * s + aux(1, 2) * y)
        f = sigmoid(1.0 + lin(2, x) + rec(2, y) + aux(2, 3) * s + aux(2, 4) * y)
        s_next = f * s + i * z
        o = sigmoid(lin(3, x) + rec(3, y) + aux(3, 5) * s_next + aux(3, 6) * y)
        y = o * np.tanh(s_next)
        s = s_next
        ys.append(y)
        ss.append(s)
    return np.stack(ss, axis=1), np.stack(ys, axis=1)


def run_kernel(kernel, weights, xs):
    tape = Tape(record=False)
    params = LayerParams.bind(weights, tape)
    state = LayerState.zeros(xs.shape[0], kernel.layout.nodes)
    states = []
    for t in range(xs.shape[1]):
        state = forward_kernel(kernel, params, state, tape.constant(xs[:, t, :]), tape)
        states.append(state)
    return states


class TestLowering:
    """Test the structure of compiled kernels."""

    @pytest.mark.parametrize("name", list(ZOO))
    def test_corpus_compiles(self, name):
        kernel = compile_zoo(name)
        assert len(kernel.outputs) == 5
        assert all(0 <= r < kernel.register_count for r in kernel.outputs)

    def test_registers_are_single_assignment(self):
        kernel = compile_zoo("a1-3w")
        assert [i.dest for i in kernel.instructions] == list(range(kernel.register_count))
        for instr in kernel.instructions:
            assert all(a < instr.dest for a in instr.args)

    def test_common_subexpressions_are_shared(self):
        kernel = compile_source("( tanh SelfPeep0, tanh SelfPeep0, 0.0, 0.0, 0.0 )")
        ops = [i.op for i in kernel.instructions]
        assert ops.count("tanh") == 1
        assert kernel.outputs[0] == kernel.outputs[1]
        assert kernel.register_count == 3

    def test_dead_code_is_pruned(self):
        kernel = compile_source("case tanh( lc0 InputsLC ) of Unused => ( 0.0, 0.0, 0.0, 0.0, SelfOutput )")
        assert [i.op for i in kernel.instructions] == ["const", "param"]
        assert kernel.layout.mappings == ()
        assert kernel.layout.n_aux == 0

    def test_lstm_layout(self):
        kernel = compile_zoo("lstm")
        assert kernel.layout.mappings == (0, 1, 2, 3)
        assert kernel.layout.n_aux == 7
        assert {s.mapping for s in kernel.layout.aux_sites} == {0, 1, 2, 3}
        assert kernel.state_usage == frozenset({"s0", "y"})

    def test_pendulum_small_layout(self):
        kernel = compile_zoo("pendulum-small")
        assert kernel.layout.mappings == (0, 1, 2)
        assert kernel.layout.aux_sites == (AuxSite(1, 0),)
        assert kernel.uses_source("s0") and kernel.uses_source("x")
        assert not kernel.uses_source("y")

    def test_local_function_is_inlined(self):
        kernel = compile_zoo("pendulum-small")
        assert all(i.op != "apply" for i in kernel.instructions)
        assert kernel.outputs[:4] == (kernel.outputs[0],) * 4

    def test_weight_shapes(self):
        kernel = compile_zoo("lstm", nodes=8, n_in=3)
        assert kernel.layout.shapes() == {
            "U": (5, 8, 3),
            "W": (5, 8, 8),
            "P": (5, 8, 8),
            "b": (5, 8),
            "aux": (7, 8),
        }

    @pytest.mark.parametrize("nodes, n_in", [(1, 2), (4, 0)])
    def test_bad_layer_size(self, nodes, n_in):
        with pytest.raises(CompileError):
            compile_zoo("lstm", nodes=nodes, n_in=n_in)


class TestKernelSemantics:
    """Test what the compiled kernels compute."""

    @pytest.mark.parametrize("seed", range(10))
    def test_lstm_matches_oracle(self, seed):
        """The compiled LSTM program equals a direct peephole-LSTM recurrence."""
        rng = np.random.default_rng(seed)
        kernel = compile_zoo("lstm", nodes=3, n_in=2)
        weights = init_weights(kernel.layout, seed)
        weights["W"] = rng.normal(size=weights["W"].shape)
        weights["b"] = rng.normal(size=weights["b"].shape)
        weights["aux"] = rng.normal(size=weights["aux"].shape)
        xs = rng.normal(size=(2, 4, 2))

        aux_index = {site: k for k, site in enumerate(kernel.layout.aux_sites)}
        ss, ys = lstm_oracle(weights, aux_index, xs)
        states = run_kernel(kernel, weights, xs)
        for t, state in enumerate(states):
            np.testing.assert_allclose(state.y.value, ys[:, t], rtol=0, atol=1e-12)
            np.testing.assert_allclose(state.s0.value, ss[:, t], rtol=0, atol=1e-12)
            assert not state.s1.value.any()

    def test_aux_fold_gives_weighted_sum(self):
        """lc0(cons(s0, cons(s1, bias))) with unit aux weights is s0 + s1 + b0."""
        kernel = compile_source("( 0.0, 0.0, 0.0, 0.0, lc0( cons( SelfPeep0, cons( SelfPeep1, bias ) ) ) )", nodes=2)
        weights = init_weights(kernel.layout, 0)
        weights["b"][0] = [0.5, -0.25]
        tape = Tape(record=False)
        state = LayerState(
            *(tape.constant(v) for v in ([[1.0, 2.0]], [[3.0, 4.0]], [[0.0, 0.0]], [[0.0, 0.0]], [[0.0, 0.0]]))
        )
        out = forward_kernel(kernel, LayerParams.bind(weights, tape), state, tape.constant([[0.0, 0.0]]), tape)
        np.testing.assert_allclose(out.y.value, [[4.5, 5.75]])

    def test_pendulum_small_output_is_quadratic(self, rng):
        kernel = compile_zoo("pendulum-small", nodes=4, n_in=4)
        weights = init_weights(kernel.layout, 5)
        states = run_kernel(kernel, weights, rng.normal(size=(3, 2, 4)))
        for state in states:
            s = state.s0.value
            np.testing.assert_allclose(state.y.value, s - s * s, atol=1e-15)
            np.testing.assert_array_equal(state.s3.value, s)


class TestEmitReadable:
    """Test the C-like listing."""

    def test_pendulum_small_quadratic_line(self):
        listing = emit_readable(compile_zoo("pendulum-small"))
        assert re.search(r"(\w+) - \1 \* \1", listing)

    def test_pendulum_small_chains_state_outputs(self):
        listing = emit_readable(compile_zoo("pendulum-small"))
        assert "s0_next = s1_next = s2_next = s3_next = tanh(" in listing

    def test_single_register_gives_one_line(self):
        listing = emit_readable(compile_source("( 0.0, 0.0, 0.0, 0.0, 0.0 )"))
        assert listing.splitlines() == ["s0_next = s1_next = s2_next = s3_next = y_next = 0.0;"]

    def test_linear_combination_terms(self):
        listing = emit_readable(compile_source("( 0.0, 0.0, 0.0, 0.0, lc2( cons( SelfPeep0, InputsLC ) ) )"))
        assert "y_next = (a0 * s0 + dot(U2, x) + b2);" in listing

    def test_sum_head_is_parenthesised(self):
        listing = emit_readable(compile_source("( 0.0, 0.0, 0.0, 0.0, lc0( cons( SelfPeep0 + SelfPeep1, bias ) ) )"))
        assert "y_next = (a0 * (s0 + s1) + b0);" in listing

    def test_precedence_parentheses(self):
        listing = emit_readable(compile_source("( 0.0, 0.0, 0.0, 0.0, ( SelfPeep0 - SelfPeep1 ) * SelfPeep2 )"))
        assert "y_next = (s0 - s1) * s2;" in listing

    @pytest.mark.parametrize("name", list(ZOO))
    def test_deterministic(self, name):
        assert emit_readable(compile_zoo(name)) == emit_readable(compile_zoo(name))

    @pytest.mark.parametrize("name", list(ZOO))
    def test_every_output_is_assigned(self, name):
        listing = emit_readable(compile_zoo(name))
        for output in OUTPUT_NAMES:
            assert f"{output} =" in listing


class TestEmitGraph:
    """Test the DOT rendering."""

    @pytest.mark.parametrize("name", list(ZOO))
    def test_edge_count_equals_operand_references(self, name):
        kernel = compile_zoo(name)
        graph = emit_graph(kernel)
        assert len(OPERAND_EDGE.findall(graph)) == sum(len(i.args) for i in kernel.instructions)

    def test_tanh_feeds_states_and_output(self):
        kernel = compile_zoo("pendulum-small")
        graph = emit_graph(kernel)
        tanh = next(i.dest for i in kernel.instructions if i.op == "tanh")
        for name in ("s0_next", "s1_next", "s2_next", "s3_next"):
            assert f"r{tanh} -> {name} [style=dashed];" in graph
        consumers = {i.op for i in kernel.instructions if tanh in i.args}
        assert consumers == {"mul", "sub"}

    def test_stateless_program_has_no_state_inputs(self):
        graph = emit_graph(compile_zoo("rnn-min"))
        for state in ("s1", "s2", "s3"):
            assert f'label="{state}"' not in graph

    def test_graph_is_well_formed(self):
        graph = emit_graph(compile_zoo("lstm"))
        assert graph.startswith("digraph neuron {")
        assert graph.rstrip().endswith("}")
