"""JSON experiment configuration: schema, validation and conversion."""

from __future__ import annotations

import json
import os
from pathlib import Path

import jsonschema

from .corpus import KINDS as CORPUS_KINDS
from .corpus import CorpusSpec
from .filters import KINDS as FILTER_KINDS
from .loss import BatchReduction, Distance, LossConfig, Transform
from .trainer import TrainConfig

SEED_ENV = "FFL_SEED"


class ConfigError(ValueError):
    """Invalid experiment configuration; ``pointer`` names the offending key."""

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer}: {message}" if pointer else message)
        self.pointer = pointer


_INT = {"type": "integer"}
_NUM = {"type": "number"}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "corpus": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": list(CORPUS_KINDS)},
                "count": {**_INT, "minimum": 2},
                "size": {**_INT, "minimum": 1},
                "channels": {**_INT, "minimum": 1},
                "seed": _INT,
            },
        },
        "train": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "epochs": {**_INT, "minimum": 0},
                "batch_size": {**_INT, "minimum": 1},
                "seed": _INT,
                "ffl_weight": {**_NUM, "minimum": 0},
                "lr": {**_NUM, "exclusiveMinimum": 0},
                "beta1": {**_NUM, "minimum": 0, "exclusiveMaximum": 1},
                "beta2": {**_NUM, "minimum": 0, "exclusiveMaximum": 1},
                "hidden": {**_INT, "minimum": 1},
                "init_std": {**_NUM, "minimum": 0},
            },
        },
        "loss": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "alpha": {**_NUM, "minimum": 0},
                "patch_factor": {**_INT, "minimum": 1},
                "transform": {"enum": [t.value for t in Transform]},
                "distance": {"enum": [d.value for d in Distance] + ["amplitude", "phase"]},
                "focal": {"type": "boolean"},
                "batch_reduction": {"enum": [b.value for b in BatchReduction]},
                "epsilon": {**_NUM, "exclusiveMinimum": 0},
            },
        },
        "filter": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": list(FILTER_KINDS)},
                "radius": {**_NUM, "minimum": 0},
                "inner": {**_NUM, "minimum": 0},
                "outer": {**_NUM, "minimum": 0},
            },
        },
    },
}


def _pointer(path):
    return "/" + "/".join(str(p) for p in path)


def validate(doc: dict) -> dict:
    """Raise :class:`ConfigError` for the first schema violation."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = list(err.absolute_path)
        if err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            path = path + extra[:1]
            raise ConfigError(f"unknown key {extra[0]!r}", _pointer(path))
        raise ConfigError(err.message, _pointer(path))
    return doc


def load(path) -> dict:
    """Parse and validate a JSON config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return validate(doc)


def seed_override():
    raw = os.environ.get(SEED_ENV)
    if raw in (None, ""):
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def build(doc: dict):
    """Turn a validated document into ``(CorpusSpec, TrainConfig)``.

    ``FFL_SEED`` in the environment replaces both seeds.
    """
    seed = seed_override()
    corpus = dict(doc.get("corpus", {}))
    train = dict(doc.get("train", {}))
    if seed is not None:
        corpus["seed"] = seed
        train["seed"] = seed
    try:
        loss = LossConfig(**doc.get("loss", {}))
        spec = CorpusSpec(**corpus)
        config = TrainConfig(loss=loss, **train)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if spec.count < 2 * config.batch_size:
        raise ConfigError(
            f"corpus count {spec.count} must be at least twice batch_size {config.batch_size}", "/train/batch_size"
        )
    return spec, config
