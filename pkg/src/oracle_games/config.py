"""Size caps for the exponential-time routines, in one place.

Set ``ORACLE_GAMES_CAP_OVERRIDE`` to an integer to raise every size cap to at
least that value (iteration caps are raised the same way).
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

CAP_OVERRIDE_ENV = "ORACLE_GAMES_CAP_OVERRIDE"


class CapExceeded(ValueError):
    """An instance is larger than an exact-mode cap."""


@dataclass(frozen=True)
class Caps:
    vc_max_points: int = 24
    littlestone_max_restrictions: int = 2**14
    threshold_max_rows: int = 16
    threshold_max_cols: int = 16
    fat_max_points: int = 12
    sfat_max_depth: int = 4
    agnostic_max_horizon: int = 16
    agnostic_max_flips: int = 3
    iteration_cap: int = 10_000

    def raised(self, floor: int) -> "Caps":
        return Caps(**{f.name: max(getattr(self, f.name), floor) for f in dataclasses.fields(self)})


def default_caps() -> Caps:
    caps = Caps()
    raw = os.environ.get(CAP_OVERRIDE_ENV)
    if raw:
        try:
            floor = int(raw)
        except ValueError as exc:
            raise ValueError(f"{CAP_OVERRIDE_ENV} must be an integer, got {raw!r}") from exc
        caps = caps.raised(floor)
    return caps
