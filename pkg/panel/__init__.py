"""Panel module: ingest, validate and aggregate (s, r, t) cell data."""

from .models import IndividualRow, PanelDataset, StaggerPolicy, TreatmentSchedule
from .loader import (
    aggregate_cells,
    load_panel,
    panel_to_frame,
    read_panel_csv,
    save_panel_csv,
)
from .schedule import derive_schedule, filter_to_staggered, materialize

__all__ = [
    "IndividualRow",
    "PanelDataset",
    "StaggerPolicy",
    "TreatmentSchedule",
    "aggregate_cells",
    "load_panel",
    "panel_to_frame",
    "read_panel_csv",
    "save_panel_csv",
    "derive_schedule",
    "filter_to_staggered",
    "materialize",
]
