"""Desk-scale runs; enable with ``pytest --runslow``."""

import math

import numpy as np
import pytest

from arnlab.compiler.kernel import compile_program
from arnlab.data.pendulum import gen_double_pendulum
from arnlab.data.preprocess import inputs_in_target_units, preprocess
from arnlab.data.split import split
from arnlab.dsl.typecheck import typecheck
from arnlab.dsl.zoo import ZOO, zoo_program
from arnlab.evolve.plan import StagePlan, StageSpec
from arnlab.evolve.run import evolve_run
from arnlab.network.losses import persistence_mse
from arnlab.network.net import Network, NetworkConfig
from arnlab.trainer.config import AdamConfig, TrainConfig
from arnlab.trainer.session import train

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def pendulum():
    return preprocess(split(gen_double_pendulum(128, 32, seed=0), seed=0))


class TestDeskRuns:
    """Longer runs exercising the full stack."""

    @pytest.mark.parametrize("name", list(ZOO))
    def test_largest_layer_compiles(self, name):
        kernel = compile_program(typecheck(zoo_program(name)), 128, 4)
        assert kernel.layout.nodes == 128

    @pytest.mark.parametrize("name", list(ZOO))
    def test_corpus_trains_hundred_steps(self, name, pendulum):
        train_set = pendulum.train
        network = Network.from_program(
            zoo_program(name),
            NetworkConfig(nodes=8, n_in=train_set.n_in, n_out=train_set.n_out, task="regression"),
        )
        config = TrainConfig(total_examples=400, batch_size=4, checkpoint_every=100, nodes=8)
        result = train(network, pendulum, config)
        assert result.updates == 100
        assert not result.diverged
        assert all(math.isfinite(row.train_loss) for row in result.history)

    def test_lstm_beats_the_mean(self, pendulum):
        train_set = pendulum.train
        network = Network.from_program(
            zoo_program("lstm"),
            NetworkConfig(nodes=16, n_in=train_set.n_in, n_out=train_set.n_out, task="regression"),
        )
        config = TrainConfig(
            total_examples=8_000, checkpoint_every=2_000, nodes=16, adam=AdamConfig(lr0=3e-3)
        )
        result = train(network, pendulum, config)
        assert not result.failed
        # standardized targets: predicting the mean scores about 1
        assert result.checkpoint.validation_loss < 0.5
        baseline = persistence_mse(inputs_in_target_units(pendulum.validation), pendulum.validation.targets)
        assert math.isfinite(baseline)

    def test_short_evolution(self, pendulum):
        plan = StagePlan(
            nodes=8,
            population_size=8,
            stages=[StageSpec(nodes=4, examples=400, last_timesteps=5, pass_fraction=0.25), StageSpec(examples=1_600)],
            train=TrainConfig(nodes=8),
        )
        result = evolve_run(zoo_program("lstm"), plan, pendulum, generations=3, seed=0)
        assert len(result.front) >= 1
        assert result.front.is_valid()
        assert len(result.candidates) == 1 + 3 * 8
        assert np.all(np.isfinite([m.loss for m in result.front]))
        seed = result.candidates[0]
        assert seed.parent_id is None
        assert min(m.loss for m in result.front) <= seed.evaluation_value


class TestPendulumComparison:
    """Both reference neurons against the persistence baseline at desk scale."""

    @pytest.fixture(scope="class")
    def full_pendulum(self):
        return preprocess(split(gen_double_pendulum(2000, 64, seed=0), seed=0))

    @pytest.mark.parametrize("name", ["lstm", "pendulum-small"])
    def test_beats_persistence(self, name, full_pendulum):
        validation = full_pendulum.validation
        network = Network.from_program(
            zoo_program(name),
            NetworkConfig(nodes=16, n_in=validation.n_in, n_out=validation.n_out, task="regression"),
        )
        result = train(network, full_pendulum, TrainConfig(total_examples=40_000, nodes=16))
        baseline = persistence_mse(inputs_in_target_units(validation), validation.targets)
        assert result.checkpoint.validation_loss <= 0.8 * baseline
