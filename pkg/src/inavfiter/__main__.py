#!/usr/bin/env python3

import functools
import logging
import pathlib

import click
import lazy_object_proxy

from inavfiter import __version__
from inavfiter._cli.commands import export_dataset, simulate
from inavfiter._cli.manifest import load_settings


@click.group(context_settings={"auto_envvar_prefix": "INAVFITER"})
@click.version_option(version=__version__)
@click.option("-D", "--debug/--no-debug", default=False, help="Enable debug mode.")
@click.option(
    "-c",
    "--config",
    type=click.Path(
        dir_okay=False,
        exists=True,
        readable=True,
        path_type=pathlib.Path,
    ),
    help="Path to a YAML settings file.",
)
@click.pass_context
def cli(ctx: click.Context, debug: bool, config: pathlib.Path | None) -> None:
    """Strapdown inertial navigation experiments."""
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    # parsed on first use, so commands without settings never read the file
    ctx.obj = lazy_object_proxy.Proxy(functools.partial(load_settings, config))


cli.add_command(simulate)
cli.add_command(export_dataset)

if __name__ == "__main__":
    cli()
