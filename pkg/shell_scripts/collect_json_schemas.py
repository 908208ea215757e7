#!/usr/bin/env python3

import json
from pathlib import Path

from inavfiter._conf import Settings
from inavfiter.dto import ExperimentConfig, SensorSpec
from pydantic.json_schema import model_json_schema


def execute(output_dir: str):
    target = Path(output_dir)
    target.mkdir(parents=True, exist_ok=True)
    for filename, builder in {
        target / "experiment.json": ExperimentConfig,
        target / "sensors.json": SensorSpec,
        target / "configuration.json": Settings,
    }.items():
        filename.write_text(
            json.dumps(model_json_schema(builder, by_alias=True), indent=2)
        )
        print("generated", filename)


if __name__ == "__main__":
    from argparse import ArgumentParser

    parser = ArgumentParser(
        prog="collect_json_schemas",
        description="Writes the JSON schemas of the settings and experiment "
        "manifests to a given folder.",
    )
    parser.add_argument("output_dir")
    args = parser.parse_args()

    execute(output_dir=args.output_dir)
