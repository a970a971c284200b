"""Episode log files (JSON lines, one record per tick) and the suspension
stability metric derived from them."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from ..core import RoverGymError


class EmptyLog(RoverGymError):
    """Stability metric requested for an episode with no records."""


@dataclass
class StabilityReport:
    """Per-tick attitude-rate magnitudes and their RMS summaries.

    Longitudinal stability is the fluctuation about the longitudinal (roll)
    axis, lateral about the lateral (pitch) axis."""

    longitudinal: list[float]   # |roll_rate| per tick
    lateral: list[float]        # |pitch_rate| per tick
    rms_longitudinal: float
    rms_lateral: float

    @property
    def rms_combined(self) -> float:
        return math.hypot(self.rms_longitudinal, self.rms_lateral)


def stability_series(records: list[dict]) -> StabilityReport:
    if not records:
        raise EmptyLog("episode log has no records")
    longitudinal = [abs(r["state"]["roll_rate"]) for r in records]
    lateral = [abs(r["state"]["pitch_rate"]) for r in records]
    return StabilityReport(
        longitudinal=longitudinal,
        lateral=lateral,
        rms_longitudinal=_rms(longitudinal),
        rms_lateral=_rms(lateral),
    )


def _rms(series: list[float]) -> float:
    return math.sqrt(sum(v * v for v in series) / len(series))


def write_episode_log(path: str | Path, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def read_episode_log(path: str | Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    return records
