"""Tests for the Pareto front, mutations, stage plans and evolution runs."""

import json
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from arnlab.dsl.ast import EVOLVED_ACTIVATIONS, Activation, RealConst, Var, node_at, walk
from arnlab.dsl.parser import parse
from arnlab.dsl.printer import pretty_print
from arnlab.dsl.typecheck import typecheck
from arnlab.dsl.zoo import ZOO, zoo_program
from arnlab.errors import ArtifactFormatError
from arnlab.evolve.audit import AUDIT_FILE, FRONT_CSV, AuditLog, FrontSnapshot, snapshot_name
from arnlab.evolve.candidate import Candidate, candidate_id
from arnlab.evolve.mutate import mutate, perturb_constant, result_tuple_path, rewire_state, swap_activation
from arnlab.evolve.pareto import FrontMember, ParetoFront, front_of, pareto_update
from arnlab.evolve.plan import StagePlan, StageSpec, stage_cost_multiplier, total_speedup
from arnlab.evolve.run import evolve_run
from arnlab.evolve.staged import candidate_seed, evaluate_staged
from arnlab.stages.screening import survivors
from arnlab.trainer.config import TrainConfig


def member(bits, loss, name="m"):
    return FrontMember(float(bits), float(loss), name, "")


def tiny_plan(population_size=3):
    return StagePlan(
        nodes=4,
        stages=[StageSpec(nodes=2, examples=8, last_timesteps=2, pass_fraction=0.34), StageSpec(examples=16)],
        population_size=population_size,
        train=TrainConfig(batch_size=4, total_examples=16, checkpoint_every=16, nodes=4),
    )


class TestParetoFront:
    """Test insertion into the complexity/loss front."""

    def test_dominated_point_is_rejected(self):
        front = front_of([member(10, 1.0, "a"), member(12, 1.5, "b")])
        assert [m.candidate_id for m in front] == ["a"]

    def test_dominating_point_evicts(self):
        front = front_of([member(10, 1.0, "a"), member(20, 0.5, "b"), member(5, 0.4, "c")])
        assert [m.candidate_id for m in front] == ["c"]

    def test_trade_offs_are_kept_in_order(self):
        front = front_of([member(30, 0.2, "c"), member(10, 1.0, "a"), member(20, 0.5, "b")])
        assert [m.candidate_id for m in front] == ["a", "b", "c"]
        assert front.is_valid()
        assert front.best().candidate_id == "c"

    def test_equal_point_keeps_the_first(self):
        front = front_of([member(10, 1.0, "a"), member(10, 1.0, "b")])
        assert [m.candidate_id for m in front] == ["a"]

    def test_non_finite_points_are_ignored(self):
        front = front_of([member(10, math.inf), member(10, math.nan)])
        assert len(front) == 0 and front.best() is None

    def test_pareto_update_returns_a_new_front(self):
        front = front_of([member(10, 1.0, "a"), member(20, 0.5, "b")])
        grown = pareto_update(front, member(15, 0.6, "c"))
        assert [m.candidate_id for m in grown] == ["a", "c", "b"]
        assert [m.candidate_id for m in front] == ["a", "b"]
        assert pareto_update(grown, member(16, 0.7, "d")) is grown

    @given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), max_size=30))
    @settings(max_examples=200)
    def test_matches_brute_force(self, points):
        members = [member(b, l, f"p{i}") for i, (b, l) in enumerate(points)]
        front = front_of(members)
        assert front.is_valid()

        def survives(i):
            b, l = points[i]
            for j, (b2, l2) in enumerate(points):
                if b2 <= b and l2 <= l and ((b2, l2) != (b, l) or j < i):
                    return False
            return True

        expected = {f"p{i}" for i in range(len(points)) if survives(i)}
        assert {m.candidate_id for m in front} == expected


class TestStagePlan:
    """Test stage budgets and their cost arithmetic."""

    @pytest.mark.parametrize("l, n_t, expected", [(16, 5, 8.0), (64, 100, 2560.0), (128, 500, 51200.0)])
    def test_cost_multiplier(self, l, n_t, expected):
        assert stage_cost_multiplier(l, n_t) == pytest.approx(expected)

    def test_total_speedup(self):
        assert total_speedup(16, 5) == pytest.approx(8.0 * 128 / 3)

    def test_default_plan(self):
        plan = StagePlan()
        assert [s.resolve_nodes(plan.nodes) for s in plan.stages] == [4, 4, 16]
        assert [s.examples for s in plan.stages] == [5_000, 40_000, 320_000]
        config = plan.stage_config(0, seed=7)
        assert (config.nodes, config.total_examples, config.checkpoint_every, config.seed) == (4, 5_000, 5_000, 7)

    def test_max_stage_limits_active_stages(self):
        assert len(StagePlan(max_stage=1).active_stages) == 1

    @pytest.mark.parametrize(
        "stages",
        [[], [StageSpec(examples=400), StageSpec(examples=200)], [StageSpec(examples=10)]],
    )
    def test_invalid_stages(self, stages):
        with pytest.raises(ValidationError):
            StagePlan(stages=stages)

    def test_stage_nodes_must_be_powers_of_two(self):
        with pytest.raises(ValidationError):
            StageSpec(nodes=6, examples=100)


class TestMutation:
    """Test type-preserving program edits."""

    @pytest.mark.parametrize("name", list(ZOO))
    def test_mutants_typecheck_and_print(self, name):
        rng = np.random.default_rng(0)
        program = zoo_program(name)
        for _ in range(30):
            mutation = mutate(program, rng)
            typecheck(mutation.program)
            assert parse(pretty_print(mutation.program)) == mutation.program
            program = mutation.program

    @pytest.mark.slow
    def test_long_mutation_sweep(self):
        rng = np.random.default_rng(1)
        program = zoo_program("lstm")
        transformations = set()
        for _ in range(10_000):
            mutation = mutate(program, rng)
            typecheck(mutation.program)
            transformations.add(mutation.transformation)
            program = mutation.program if rng.random() < 0.5 else zoo_program("lstm")
        assert {"grow", "perturb-constant", "swap-activation", "rewire-state"} <= transformations

    def test_perturb_changes_one_constant(self, rng):
        program = zoo_program("lstm")
        body = perturb_constant(program, rng)
        before = [n.value for _, n in walk(program.body) if isinstance(n, RealConst)]
        after = [n.value for _, n in walk(body) if isinstance(n, RealConst)]
        assert len(before) == len(after)
        assert sum(a != b for a, b in zip(before, after)) == 1

    def test_swap_activation_avoids_sigmoid(self, rng):
        program = zoo_program("lstm")
        body = swap_activation(program, rng)
        before = [n.fn for _, n in walk(program.body) if isinstance(n, Activation)]
        after = [n.fn for _, n in walk(body) if isinstance(n, Activation)]
        changed = [b for a, b in zip(before, after) if a != b]
        assert len(changed) == 1 and changed[0] in EVOLVED_ACTIVATIONS

    def test_rewire_touches_only_a_state_slot(self):
        program = zoo_program("lstm")
        path = result_tuple_path(program.body)
        original = node_at(program.body, path).elements
        for seed in range(20):
            body = rewire_state(program, np.random.default_rng(seed))
            elements = node_at(body, path).elements
            assert elements[4] == original[4]
            assert sum(a != b for a, b in zip(elements[:4], original[:4])) <= 1

    def test_rewire_can_add_a_skip_connection(self):
        program = zoo_program("rnn-min")
        path = result_tuple_path(program.body)
        skips = 0
        for seed in range(200):
            body = rewire_state(program, np.random.default_rng(seed))
            typecheck(replace(program, body=body))
            if Var("SelfOutput") in node_at(body, path).elements[:4]:
                skips += 1
        assert skips > 0

    def test_result_tuple_through_local_function(self):
        path = result_tuple_path(zoo_program("pendulum-small").body)
        assert path is not None and path[0][0] == "fn_body"

    def test_same_seed_same_mutant(self):
        a = mutate(zoo_program("lstm"), np.random.default_rng(5))
        b = mutate(zoo_program("lstm"), np.random.default_rng(5))
        assert a == b


class TestScreening:
    """Test candidates, survivor selection and staged evaluation."""

    @staticmethod
    def candidates(losses):
        out = []
        for i, loss in enumerate(losses):
            c = Candidate.create(zoo_program("rnn-min"), 1, i)
            c.record(loss)
            out.append(c)
        return out

    def test_candidate_ids(self):
        assert candidate_id(3, 12) == "g0003-c0012"

    def test_survivors_take_the_best_fraction(self):
        chosen = survivors(self.candidates([0.5, 0.1, math.nan, 0.3, 0.1]), 0.4)
        assert [c.index for c in chosen] == [1, 4]

    def test_non_finite_never_survive(self):
        assert survivors(self.candidates([math.inf, math.nan]), 1.0) == []

    def test_at_least_one_survives(self):
        assert len(survivors(self.candidates([0.2, 0.1, 0.3]), 0.01)) == 1

    def test_candidate_seed_is_stable(self):
        assert candidate_seed(0, 1, 2) == candidate_seed(0, 1, 2)
        assert candidate_seed(0, 1, 2) != candidate_seed(0, 2, 1)

    def test_evaluate_staged(self, pendulum_split):
        candidate = evaluate_staged(Candidate.create(zoo_program("lstm"), 0, 0), tiny_plan(), pendulum_split, 0)
        assert candidate.stages_reached == 2
        assert math.isfinite(candidate.evaluation_value)
        assert candidate.audit_record().stage_losses == candidate.stage_results

    def test_division_by_zero_is_culled(self, pendulum_split):
        program = parse("( 0.0, 0.0, 0.0, 0.0, 1.0 / 0.0 )")
        candidate = evaluate_staged(Candidate.create(program, 1, 0), tiny_plan(), pendulum_split, 0)
        assert candidate.stages_reached == 1
        assert candidate.evaluation_value == math.inf
        assert survivors([candidate], 1.0) == []


class TestEvolutionRun:
    """Test whole (tiny) evolution runs."""

    def test_zero_generations_evaluates_the_seed(self, pendulum_split, tmp_path):
        result = evolve_run(zoo_program("lstm"), tiny_plan(), pendulum_split, generations=0, out_dir=tmp_path)
        assert result.last_generation == 0
        assert [m.candidate_id for m in result.front] == ["g0000-c0000"]
        assert (tmp_path / snapshot_name(0)).exists()
        assert (tmp_path / FRONT_CSV).exists()

    def test_audit_log_covers_every_candidate(self, pendulum_split, tmp_path):
        result = evolve_run(zoo_program("lstm"), tiny_plan(), pendulum_split, generations=2, seed=4, out_dir=tmp_path)
        records = AuditLog(tmp_path / AUDIT_FILE).read()
        assert len(records) == 1 + 2 * 3 == len(result.candidates)
        assert records[0].transformation == "seed" and records[0].parent_id is None
        assert all(r.parent_id for r in records[1:])
        assert result.front.is_valid()
        front_ids = {m.candidate_id for m in result.front}
        finished = {r.candidate_id for r in records if len(r.stage_losses) == 2 and math.isfinite(r.evaluation_value)}
        assert front_ids <= finished

    def test_audit_log_starts_with_a_version_header(self, tmp_path):
        log = AuditLog(tmp_path / AUDIT_FILE)
        record = Candidate.create(zoo_program("rnn-min"), 0, 0).audit_record()
        log.write(record)
        log.write(record)
        lines = (tmp_path / AUDIT_FILE).read_text().splitlines()
        assert json.loads(lines[0]) == {"format_version": 1, "kind": "audit"}
        assert log.read() == [record, record]

    @pytest.mark.parametrize(
        "header",
        ['{"format_version": 99, "kind": "audit"}', '{"kind": "audit"}', '{"format_version": 1, "kind": "front"}'],
    )
    def test_audit_log_rejects_bad_headers(self, tmp_path, header):
        record = Candidate.create(zoo_program("rnn-min"), 0, 0).audit_record()
        (tmp_path / AUDIT_FILE).write_text(header + "\n" + record.model_dump_json() + "\n")
        with pytest.raises(ArtifactFormatError):
            AuditLog(tmp_path / AUDIT_FILE).read()

    def test_audit_log_without_header_is_rejected(self, tmp_path):
        record = Candidate.create(zoo_program("rnn-min"), 0, 0).audit_record()
        (tmp_path / AUDIT_FILE).write_text(record.model_dump_json() + "\n")
        with pytest.raises(ArtifactFormatError):
            AuditLog(tmp_path / AUDIT_FILE).read()

    def test_same_seed_same_front(self, pendulum_split):
        a = evolve_run(zoo_program("lstm"), tiny_plan(), pendulum_split, generations=2, seed=9)
        b = evolve_run(zoo_program("lstm"), tiny_plan(), pendulum_split, generations=2, seed=9)
        assert a.front == b.front

    def test_resume_continues_the_run(self, pendulum_split, tmp_path):
        full = evolve_run(zoo_program("lstm"), tiny_plan(), pendulum_split, generations=2, seed=2, out_dir=tmp_path)
        snapshot = FrontSnapshot.load(tmp_path / snapshot_name(1))
        assert snapshot.generation == 1 and snapshot.run_seed == 2
        resumed = evolve_run(None, tiny_plan(), pendulum_split, generations=1, resume=snapshot)
        assert resumed.last_generation == 2
        assert resumed.front == full.front

    def test_needs_a_seed_or_snapshot(self, pendulum_split):
        with pytest.raises(ValueError):
            evolve_run(None, tiny_plan(), pendulum_split, generations=1)

    @pytest.mark.slow
    def test_front_does_not_depend_on_workers(self, pendulum_split):
        serial = evolve_run(zoo_program("lstm"), tiny_plan(4), pendulum_split, generations=2, seed=1)
        parallel = evolve_run(zoo_program("lstm"), tiny_plan(4), pendulum_split, generations=2, seed=1, workers=2)
        assert serial.front == parallel.front
