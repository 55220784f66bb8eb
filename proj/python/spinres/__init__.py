"""Python bindings for the spinres toolkit.

The compiled core exposes the spin-system, resonator, ensemble, memory and
sensitivity operations directly; this package adds small conveniences for
working with scenario documents as dictionaries.
"""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import (
    __version__,
    run_scenario_json,
    validate_scenario_text,
    preset_library_json,
)


def presets():
    """The bundled preset library as a dictionary."""
    return _json.loads(preset_library_json())


def validate(scenario):
    """Diagnostics for a scenario (dict or JSON string); empty list means valid."""
    text = scenario if isinstance(scenario, str) else _json.dumps(scenario)
    return validate_scenario_text(text)


def run(subcommand, scenario, out_dir=None, seed=None, threads=0):
    """Run a subcommand on a scenario (dict or JSON string).

    Returns the report as a dictionary. Artifacts are only written to disk
    when out_dir is given; pass out_dir="." for the current directory.
    """
    text = scenario if isinstance(scenario, str) else _json.dumps(scenario)
    write = out_dir is not None
    report = run_scenario_json(
        subcommand,
        text,
        out_dir=out_dir or "",
        seed=seed,
        write_json=write,
        write_csv=write,
        threads=threads,
    )
    return _json.loads(report)
