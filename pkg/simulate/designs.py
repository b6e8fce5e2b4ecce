"""Named adoption designs.

Each returns an (S, R) array of internal initiation periods with the never
sentinel T + 1.
"""

import math
from typing import Union

import numpy as np

from utils.errors import InvalidConfig, UnknownDesign
from .models import AdoptionDesign


def _pure_placebo_stratum(S: int, R: int, T: int, first: int, step: int) -> np.ndarray:
    g = np.full((S, R), T + 1)
    g[: math.ceil(S / 2), 0] = first
    return g


def _cross_stratum_staggered(S: int, R: int, T: int, first: int, step: int) -> np.ndarray:
    g = np.full((S, R), T + 1)
    for k in range(R - 1):
        cohort = first + k * step
        if cohort > T:
            raise InvalidConfig(f"stratum {k + 1} would adopt at {cohort}, after the last period {T}")
        g[[(k + j) % S for j in range(S // 2)], k] = cohort
    return g


def _within_stratum_staggered(S: int, R: int, T: int, first: int, step: int) -> np.ndarray:
    g = np.full((S, R), T + 1)
    span = T - first + 1
    for s in range(S - 1):
        g[s, : R - 1] = first + (s % span)
    return g


_DESIGNS = {
    AdoptionDesign.PURE_PLACEBO_STRATUM: _pure_placebo_stratum,
    AdoptionDesign.CROSS_STRATUM_STAGGERED: _cross_stratum_staggered,
    AdoptionDesign.WITHIN_STRATUM_STAGGERED: _within_stratum_staggered,
}


def named_design(
    name: Union[str, AdoptionDesign],
    S: int,
    R: int,
    T: int,
    first_adoption: int = 2,
    step: int = 1,
) -> np.ndarray:
    """Adoption map for a named design.

    pure-placebo-stratum: the first half of the units in stratum 1 adopt at
        ``first_adoption``; every other series is never treated.
    cross-stratum-staggered: each stratum but the last has a single cohort of
        S // 2 units, shifted by one unit and ``step`` periods per stratum;
        the last stratum is never treated.
    within-stratum-staggered: unit s adopts at the same period in every
        stratum but the last, periods cycling from ``first_adoption``; the
        last unit and the last stratum are never treated.

    Raises:
        UnknownDesign: ``name`` is not a design.
        InvalidConfig: The design does not fit in T periods.
    """
    try:
        design = AdoptionDesign(name)
    except ValueError:
        raise UnknownDesign(f"unknown adoption design '{name}'") from None
    if not 2 <= first_adoption <= T:
        raise InvalidConfig(f"first adoption {first_adoption} must lie in 2..{T}")
    return _DESIGNS[design](S, R, T, first_adoption, step)
