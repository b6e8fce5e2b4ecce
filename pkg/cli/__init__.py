"""Command-line front end: run configuration, subcommands and plots."""

from .models import BootstrapMode, CellWeighting, RunConfig, Subcommand
from .commands import COMMANDS, cmd_decompose, cmd_estimate, cmd_event_study, cmd_simulate, run_command
from .plots import adoption_grid, plot_adoption, plot_event_study

__all__ = [
    "BootstrapMode",
    "CellWeighting",
    "RunConfig",
    "Subcommand",
    "COMMANDS",
    "cmd_decompose",
    "cmd_estimate",
    "cmd_event_study",
    "cmd_simulate",
    "run_command",
    "adoption_grid",
    "plot_adoption",
    "plot_event_study",
]
