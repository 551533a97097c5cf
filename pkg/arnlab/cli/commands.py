"""CLI commands for arnlab."""

import sys
from functools import wraps
from pathlib import Path
from typing import Optional

import click
import numpy as np
import pandas as pd
import yaml
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from arnlab import __version__
from arnlab.compiler.emit import emit_graph, emit_readable
from arnlab.compiler.kernel import compile_program
from arnlab.config.config_manager import ConfigManager
from arnlab.config.settings import Settings, get_settings
from arnlab.data.csv_io import save_csv
from arnlab.data.dataset import Dataset, SplitDataset
from arnlab.data.pendulum import gen_double_pendulum
from arnlab.data.preprocess import apply_scaling, inputs_in_target_units, one_hot, preprocess
from arnlab.data.snapshot import load_dataset
from arnlab.data.split import split
from arnlab.dsl.ast import NeuronProgram
from arnlab.dsl.complexity import complexity
from arnlab.dsl.parser import parse
from arnlab.dsl.printer import pretty_print
from arnlab.dsl.typecheck import typecheck
from arnlab.dsl.zoo import load_neuron_source, zoo_names
from arnlab.errors import ArtifactFormatError, CompileError, DataError, DslError, NumericError
from arnlab.evolve.audit import FrontSnapshot
from arnlab.evolve.pareto import ParetoFront
from arnlab.evolve.run import evolve_run
from arnlab.models.artifact import write_csv
from arnlab.models.bundle import ModelBundle, summary_values
from arnlab.models.predictions import align, read_predictions, write_predictions
from arnlab.network.losses import metrics, persistence_mse
from arnlab.network.net import Network, NetworkConfig, forward_net
from arnlab.stats.compare import compare as compare_predictions
from arnlab.trainer.config import TrainConfig
from arnlab.trainer.search import TrainObjective, random_search
from arnlab.trainer.session import HistoryRow, train as train_session
from arnlab.utils.logging import setup_logging

console = Console()

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

DATA_ERRORS = (
    DataError,
    ArtifactFormatError,
    DslError,
    CompileError,
    ValidationError,
    FileNotFoundError,
    yaml.YAMLError,
)
TASKS = {"cls": "classification", "reg": "regression"}


class ArnGroup(click.Group):
    """Click group whose usage errors exit with status 1."""

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            return super().main(*args, **kwargs)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.Abort:
            console.print("[yellow]⚠ Aborted[/yellow]")
            sys.exit(EXIT_USAGE)


def handle_errors(f):
    """Decorator mapping library errors to exit codes."""

    @wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except click.ClickException:
            raise
        except NumericError as e:
            console.print(f"[red]✗ Numeric failure: {e}[/red]")
            sys.exit(EXIT_NUMERIC)
        except DATA_ERRORS as e:
            console.print(f"[red]✗ {type(e).__name__}: {e}[/red]")
            sys.exit(EXIT_DATA)
        except KeyboardInterrupt:
            console.print("\n[yellow]⚠ Interrupted by user[/yellow]")
            sys.exit(EXIT_USAGE)

    return wrapper


def load_program(ref: str) -> tuple[str, NeuronProgram]:
    """Source and parsed program for ``zoo:NAME`` or a file path; type errors surface here."""
    try:
        source = load_neuron_source(ref)
    except KeyError as e:
        raise click.BadParameter(str(e.args[0]), param_hint="--neuron") from None
    program = parse(source)
    typecheck(program)
    return source, program


def load_split(settings: Settings, data_path: Path, split_seed: int) -> SplitDataset:
    dataset = load_dataset(data_path, cache_dir=settings.cache_dir)
    return preprocess(split(dataset, split_seed))


def network_config(nodes: int, dataset: Dataset) -> NetworkConfig:
    return NetworkConfig(nodes=nodes, n_in=dataset.n_in, n_out=dataset.n_out, task=dataset.task)


def config_manager(settings: Settings) -> ConfigManager:
    return ConfigManager(base_path=settings.config_dir)


def front_table(front: ParetoFront, title: str) -> Table:
    table = Table(title=title)
    table.add_column("Candidate", style="cyan", no_wrap=True)
    table.add_column("Complexity (bits)", justify="right", style="magenta")
    table.add_column("Validation loss", justify="right", style="green")
    for member in front:
        table.add_row(member.candidate_id, f"{member.complexity_bits:.2f}", f"{member.loss:.6g}")
    return table


def metrics_table(values: dict, title: str) -> Table:
    table = Table(title=title)
    table.add_column("Metric", style="cyan", no_wrap=True)
    table.add_column("Value", justify="right", style="green")
    for key, value in values.items():
        table.add_row(key, f"{value:.6g}" if isinstance(value, float) else str(value))
    return table


@click.group(cls=ArnGroup)
@click.version_option(version=__version__, prog_name="arnlab")
@click.option("--log-level", default=None, help="Override ARN_LOG_LEVEL (DEBUG, INFO, WARNING, ...)")
@click.option("--log-file", type=click.Path(dir_okay=False, path_type=Path), help="Also log to this file")
@click.pass_context
def cli(ctx, log_level: Optional[str], log_file: Optional[Path]):
    """arnlab - evolved recurrent neurons.

    Parses and compiles neuron programs, trains networks built from them,
    and evolves new neurons under a staged screening budget.
    """
    try:
        settings = get_settings()
        if log_level:
            settings = Settings(log_level=log_level)
    except ValidationError as e:
        raise click.BadParameter(str(e), param_hint="--log-level") from None
    setup_logging(settings.log_level, log_file)
    ctx.obj = settings


@cli.command("gen-pendulum")
@click.option("--series", type=click.IntRange(min=1), help="Number of series [default: from app.yaml]")
@click.option("--steps", type=click.IntRange(min=2), help="Timesteps per series [default: from app.yaml]")
@click.option("--dt", "dt_sample", type=click.FloatRange(min=0, min_open=True), help="Sampling interval [default: from app.yaml]")
@click.option("--seed", default=0, type=int, help="Seed for the initial angles and velocities")
@click.option("--out", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Output CSV")
@click.pass_obj
@handle_errors
def gen_pendulum(
    settings: Settings,
    series: Optional[int],
    steps: Optional[int],
    dt_sample: Optional[float],
    seed: int,
    out: Path,
):
    """Generate a double-pendulum next-step prediction dataset.

    Example:
        arnlab gen-pendulum --series 2000 --steps 64 --seed 0 --out pendulum.csv
    """
    defaults = config_manager(settings).pendulum_config()
    series = series or defaults.series
    steps = steps or defaults.steps
    dt_sample = dt_sample or defaults.dt_sample
    dataset = gen_double_pendulum(series, steps, dt_sample=dt_sample, seed=seed)
    save_csv(dataset, out)
    console.print(f"[green]✓ Wrote {series} series of {steps} steps to {out}[/green]")


@cli.command()
@click.option("--neuron", required=True, help="Program file or zoo:NAME")
@click.option("--data", "data_path", required=True, type=click.Path(path_type=Path), help="Dataset CSV")
@click.option("--config", "config_path", type=click.Path(path_type=Path), help="TrainConfig YAML")
@click.option("--out", required=True, type=click.Path(file_okay=False, path_type=Path), help="Model directory")
@click.option("--split-seed", default=0, type=int, help="Seed of the train/validation/test partition")
@click.option("--seed", type=int, help="Override the config seed")
@click.option("--nodes", type=int, help="Override the config node count")
@click.option("--examples", type=int, help="Override total_examples")
@click.pass_obj
@handle_errors
def train(
    settings: Settings,
    neuron: str,
    data_path: Path,
    config_path: Optional[Path],
    out: Path,
    split_seed: int,
    seed: Optional[int],
    nodes: Optional[int],
    examples: Optional[int],
):
    """Train a network around one neuron and save the best checkpoint.

    Example:
        arnlab train --neuron zoo:lstm --data pendulum.csv --out runs/lstm
    """
    source, program = load_program(neuron)
    config = config_manager(settings).train_config(config_path)
    overrides = {"seed": seed, "nodes": nodes, "total_examples": examples}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        config = TrainConfig.model_validate({**config.model_dump(), **overrides})

    data = load_split(settings, data_path, split_seed)
    net_config = network_config(config.nodes, data.train)
    network = Network.from_program(program, net_config)

    console.print(
        Panel(
            f"[bold]Neuron:[/bold] {neuron}\n"
            f"[bold]Data:[/bold] {data_path} (train/validation/test {'/'.join(map(str, data.sizes()))})\n"
            f"[bold]Nodes:[/bold] {config.nodes}\n"
            f"[bold]Examples:[/bold] {config.total_examples} at batch {config.batch_size}",
            title="🧠 Train",
            border_style="blue",
        )
    )

    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console) as progress:
        task_id = progress.add_task("Training...", total=None)

        def on_checkpoint(row: HistoryRow) -> None:
            progress.update(
                task_id,
                description=f"Training... {row.examples_seen} examples, validation loss {row.validation_loss:.5g}",
            )

        result = train_session(network, data, config, on_checkpoint=on_checkpoint)

    if result.failed:
        raise NumericError("session diverged before its first checkpoint")

    weights = result.checkpoint.weights
    validation = data.validation
    summary = {
        "neuron": neuron,
        "nodes": config.nodes,
        "complexity_bits": complexity(program),
        "updates": result.updates,
        "diverged": result.diverged,
        "checkpoint_examples": result.checkpoint.examples_seen,
        "validation_loss": result.checkpoint.validation_loss,
        **{f"validation_{k}": v for k, v in metrics(network.predict(weights, validation.inputs), validation.targets, validation.task).items()},
    }
    if validation.task == "regression" and validation.n_in == validation.n_out:
        summary["persistence_mse"] = persistence_mse(inputs_in_target_units(validation), validation.targets)
    summary = summary_values(summary)

    ModelBundle(source, net_config, config, split_seed, data.train.scaling, weights, result.history, summary).save(out)
    console.print(metrics_table(summary, "\nTraining summary"))
    if result.diverged:
        console.print("[yellow]⚠ Session diverged after the saved checkpoint[/yellow]")
    console.print(f"[green bold]✓ Model saved to {out}[/green bold]")


@cli.command("eval")
@click.option("--model", "model_dir", required=True, type=click.Path(file_okay=False, path_type=Path), help="Model directory")
@click.option("--data", "data_path", required=True, type=click.Path(path_type=Path), help="Dataset CSV")
@click.option("--split", "split_name", default="test", type=click.Choice(["train", "validation", "test"]), help="Split to evaluate")
@click.option("--predictions", type=click.Path(dir_okay=False, path_type=Path), help="Also write predictions here")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write the metrics row as CSV")
@click.pass_obj
@handle_errors
def evaluate(
    settings: Settings,
    model_dir: Path,
    data_path: Path,
    split_name: str,
    predictions: Optional[Path],
    out: Optional[Path],
):
    """Evaluate a saved model on one split of its dataset.

    Example:
        arnlab eval --model runs/lstm --data pendulum.csv --split test
    """
    bundle = ModelBundle.load(model_dir)
    raw = getattr(split(load_dataset(data_path, cache_dir=settings.cache_dir), bundle.split_seed), split_name)
    dataset = apply_scaling(raw, bundle.scaling)
    if (dataset.n_in, dataset.n_out, dataset.task) != (bundle.network.n_in, bundle.network.n_out, bundle.network.task):
        raise DataError(f"{data_path}: dataset shape does not match the model in {model_dir}")

    network = bundle.build()
    values = forward_net(network.config, network.kernel, bundle.weights, dataset.inputs)
    row = {"split": split_name, "series": dataset.n_series, **metrics(values, dataset.targets, dataset.task)}
    console.print(metrics_table(row, f"\nEvaluation on {split_name}"))
    if predictions:
        write_predictions(predictions, dataset, values)
        console.print(f"[dim]Predictions: {predictions}[/dim]")
    if out:
        write_csv(out, pd.DataFrame([row]), "metrics")


@cli.command()
@click.option("--data", "data_path", required=True, type=click.Path(path_type=Path), help="Dataset CSV")
@click.option("--plan", "plan_path", type=click.Path(path_type=Path), help="StagePlan YAML")
@click.option("--generations", default=30, type=click.IntRange(min=0), help="Generations to run")
@click.option("--seed", default=0, type=int, help="Run seed")
@click.option("--out", required=True, type=click.Path(file_okay=False, path_type=Path), help="Run directory")
@click.option("--neuron", default="zoo:lstm", help="Seed program file or zoo:NAME")
@click.option("--workers", type=click.IntRange(min=1), help="Worker processes (default ARN_WORKERS)")
@click.option("--resume", type=click.Path(dir_okay=False, path_type=Path), help="Front snapshot to continue from")
@click.option("--split-seed", default=0, type=int, help="Seed of the train/validation/test partition")
@click.pass_obj
@handle_errors
def evolve(
    settings: Settings,
    data_path: Path,
    plan_path: Optional[Path],
    generations: int,
    seed: int,
    out: Path,
    neuron: str,
    workers: Optional[int],
    resume: Optional[Path],
    split_seed: int,
):
    """Evolve neurons and keep the complexity/loss Pareto front.

    Writes audit.jsonl, one front snapshot per generation and front.csv.

    Example:
        arnlab evolve --data pendulum.csv --generations 30 --seed 0 --out runs/evo --workers 8
    """
    plan = config_manager(settings).stage_plan(plan_path)
    snapshot = FrontSnapshot.load(resume) if resume else None
    program = None if snapshot else load_program(neuron)[1]
    data = load_split(settings, data_path, split_seed)
    workers = workers or settings.workers

    console.print(
        Panel(
            f"[bold]Seed:[/bold] {f'resume {resume}' if snapshot else neuron}\n"
            f"[bold]Generations:[/bold] {generations} x {plan.population_size} candidates\n"
            f"[bold]Stages:[/bold] {len(plan.active_stages)} of {len(plan.stages)}\n"
            f"[bold]Workers:[/bold] {workers}",
            title="🧬 Evolve",
            border_style="blue",
        )
    )

    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console) as progress:
        task_id = progress.add_task("Evolving...", total=None)

        def on_generation(generation: int, front: ParetoFront) -> None:
            best = front.best()
            progress.update(
                task_id,
                description=f"Generation {generation}: front {len(front)}, best {best.loss:.5g}" if best else f"Generation {generation}: front empty",
            )

        result = evolve_run(program, plan, data, generations, seed, workers, out, snapshot, on_generation)

    if not len(result.front):
        raise NumericError("no candidate finished screening with a finite loss")
    console.print(front_table(result.front, f"\nPareto front after generation {result.last_generation}"))
    console.print(f"[green bold]✓ Evaluated {len(result.candidates)} candidates; run directory {out}[/green bold]")


@cli.command("compile")
@click.option("--neuron", required=True, help="Program file or zoo:NAME")
@click.option("--emit", "emit", default="c", type=click.Choice(["c", "graph"]), help="Readable listing or DOT graph")
@click.option("--nodes", default=16, type=int, help="Layer size the kernel is compiled for")
@click.option("--n-in", default=1, type=click.IntRange(min=1), help="Input features")
@handle_errors
def compile_neuron(neuron: str, emit: str, nodes: int, n_in: int):
    """Print the compiled kernel of a neuron.

    Example:
        arnlab compile --neuron zoo:pendulum-small --emit c
    """
    _, program = load_program(neuron)
    kernel = compile_program(typecheck(program), nodes, n_in)
    click.echo(emit_readable(kernel) if emit == "c" else emit_graph(kernel))


@cli.group()
def zoo():
    """Built-in neuron programs."""


@zoo.command("list")
def zoo_list():
    """List the built-in neuron names."""
    for name in zoo_names():
        click.echo(name)


@zoo.command("show")
@click.argument("name")
@handle_errors
def zoo_show(name: str):
    """Pretty-print one built-in neuron."""
    _, program = load_program(f"zoo:{name}")
    click.echo(pretty_print(program))


@cli.command()
@click.option("--a", "pred_a", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Predictions of model A")
@click.option("--b", "pred_b", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Predictions of model B")
@click.option("--targets", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Dataset CSV with the true values")
@click.option("--task", required=True, type=click.Choice(list(TASKS)), help="cls or reg")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write the row as CSV")
@handle_errors
def compare(pred_a: Path, pred_b: Path, targets: Path, task: str, out: Optional[Path]):
    """Compare two models' predictions with a paired significance test.

    Example:
        arnlab compare --a lstm.csv --b arn.csv --targets pendulum.csv --task reg
    """
    task = TASKS[task]
    task_a, ids, values_a = read_predictions(pred_a)
    task_b, ids_b, values_b = read_predictions(pred_b)
    for path, found in ((pred_a, task_a), (pred_b, task_b)):
        if found != task:
            raise DataError(f"{path}: predictions are for {found}, not {task}")
    values_b = align(ids_b, values_b, ids, pred_b)

    dataset = load_dataset(targets)
    if dataset.task != task:
        raise DataError(f"{targets}: dataset task is {dataset.task}, not {task}")
    index = {sid: i for i, sid in enumerate(dataset.series_ids)}
    missing = [sid for sid in ids if sid not in index]
    if missing:
        raise DataError(f"{targets}: series {missing[0]!r} not found")
    subset = dataset.subset([index[sid] for sid in ids])
    truth = one_hot(subset.labels(), int(subset.n_classes)) if task == "classification" else subset.targets
    if truth.shape != values_a.shape:
        raise DataError(f"{pred_a}: prediction shape {values_a.shape} does not match targets {truth.shape}")

    row = compare_predictions(values_a, values_b, truth, task)
    console.print(metrics_table({k: v for k, v in row.to_dict().items() if v is not None}, "\nComparison"))
    if out:
        write_csv(out, pd.DataFrame([row.to_dict()]), "comparison")


@cli.command()
@click.option("--data", "data_path", required=True, type=click.Path(path_type=Path), help="Dataset CSV")
@click.option("--budget", default=512, type=click.IntRange(min=1), help="Sampled configurations")
@click.option("--seed", default=0, type=int, help="Sampling seed")
@click.option("--out", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Best TrainConfig YAML")
@click.option("--neuron", default="zoo:lstm", help="Program file or zoo:NAME")
@click.option("--space", "space_path", type=click.Path(path_type=Path), help="SearchSpace YAML")
@click.option("--config", "config_path", type=click.Path(path_type=Path), help="Base TrainConfig YAML")
@click.option("--workers", type=click.IntRange(min=1), help="Worker processes (default ARN_WORKERS)")
@click.option("--split-seed", default=0, type=int, help="Seed of the train/validation/test partition")
@click.pass_obj
@handle_errors
def search(
    settings: Settings,
    data_path: Path,
    budget: int,
    seed: int,
    out: Path,
    neuron: str,
    space_path: Optional[Path],
    config_path: Optional[Path],
    workers: Optional[int],
    split_seed: int,
):
    """Random search for the TrainConfig with least validation loss.

    Example:
        arnlab search --data pendulum.csv --budget 512 --seed 0 --out best.yaml
    """
    manager = config_manager(settings)
    space = manager.search_space(space_path)
    base = manager.train_config(config_path)
    source, _ = load_program(neuron)
    data = load_split(settings, data_path, split_seed)

    with console.status(f"Sampling {budget} configurations..."):
        result = random_search(space, TrainObjective(source, data), budget, seed, base, workers or settings.workers)

    if not np.isfinite(result.best_value):
        raise NumericError("every sampled configuration diverged")
    ConfigManager.save_config(out, result.best, "train-config")
    console.print(
        metrics_table(
            {"best sample": result.best_index, "validation loss": result.best_value, "lr0": result.best.adam.lr0},
            "\nSearch result",
        )
    )
    console.print(f"[green bold]✓ Best TrainConfig written to {out}[/green bold]")


if __name__ == "__main__":
    cli()
