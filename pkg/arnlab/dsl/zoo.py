"""Built-in neuron corpus, addressable as ``zoo:NAME``."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from arnlab.dsl.ast import NeuronProgram
from arnlab.dsl.parser import parse

ZOO: dict[str, str] = {
    "lstm": "lstm.arn",
    "pendulum-small": "pendulum-small.arn",
    "rnn-min": "rnn-min.arn",
    "a1-3w": "a1-3w.arn",
    "a2-crop": "a2-crop.arn",
    "a3-pendulum": "a3-pendulum.arn",
    "a4-fordb": "a4-fordb.arn",
    "a5-wingbeat": "a5-wingbeat.arn",
    "a6-lsst": "a6-lsst.arn",
    "a7-wisdm": "a7-wisdm.arn",
}

ZOO_PREFIX = "zoo:"


def zoo_names() -> list[str]:
    return list(ZOO)


def zoo_source(name: str) -> str:
    if name not in ZOO:
        raise KeyError(f"unknown zoo neuron {name!r}; choose from {', '.join(ZOO)}")
    return resources.files("arnlab.dsl").joinpath("corpus", ZOO[name]).read_text(encoding="utf-8")


def zoo_program(name: str) -> NeuronProgram:
    return parse(zoo_source(name))


def load_neuron_source(ref: str) -> str:
    """Program text for ``zoo:NAME`` or a path to a ``.arn`` file."""
    if ref.startswith(ZOO_PREFIX):
        return zoo_source(ref[len(ZOO_PREFIX) :])
    return Path(ref).read_text(encoding="utf-8")


def load_neuron(ref: str) -> NeuronProgram:
    return parse(load_neuron_source(ref))
