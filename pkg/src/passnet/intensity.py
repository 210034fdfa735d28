"""Network intensity: completed passes per second of own possession.

For a team's network over some window, intensity is the total arc weight
divided by the cumulative time the team possessed the ball in that window,
a passing-rate reading of how hard the team dictates tempo.
"""

from __future__ import annotations

from dataclasses import dataclass

from .passmap import Passmap


@dataclass(frozen=True)
class IntensityRecord:
    team_id: int | None
    window_label: str
    possession_seconds: float
    total_weight: int

    @property
    def intensity(self) -> float | None:
        """Passes per possession-second; None when the team never had the ball."""
        if self.possession_seconds <= 0:
            return None
        return self.total_weight / self.possession_seconds


def intensity(g: Passmap, possession_seconds: float) -> IntensityRecord:
    """Intensity of one network given the matching possession time.

    ``possession_seconds`` must come from the same window the graph was
    built on.  A zero possession time yields an undefined marker, not an
    infinity, even with nonzero weight.
    """
    if possession_seconds < 0:
        raise ValueError("possession time cannot be negative")
    return IntensityRecord(
        team_id=g.team_id,
        window_label=g.label,
        possession_seconds=possession_seconds,
        total_weight=g.total_weight,
    )
