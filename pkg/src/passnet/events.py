"""Parse provider event files into typed streams and derive key match facts.

The input format is the StatsBomb open-data event file: one JSON array per
match, each element an event object.  Only the fields relevant to pass
networks are read (period, minute, second, type, team, player, possession,
possession_team, pass, shot, foul_committed, bad_behaviour); everything else
is mapped to the ``OTHER`` kind and ignored downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, NamedTuple

# Kickoff offsets of the match clock, in seconds, per period.  The provider's
# minute field runs cumulatively (second half starts at 45' regardless of
# first-half stoppage), so subtracting the offset yields seconds since the
# period started.
_PERIOD_OFFSET = {1: 0, 2: 45 * 60, 3: 90 * 60, 4: 105 * 60, 5: 120 * 60}

#: Penalty shootouts are not open play; events there never feed networks,
#: possession sums, or key-event detection.
SHOOTOUT_PERIOD = 5


class ParseError(ValueError):
    """Raised when the input is not a well-formed provider event file."""

    def __init__(self, message: str, byte_offset: int | None = None):
        self.byte_offset = byte_offset
        if byte_offset is not None:
            message = f"{message} (byte offset {byte_offset})"
        super().__init__(message)


class ValidationError(ValueError):
    """Raised when an event lacks a mandatory field."""

    def __init__(self, event_index: int, field_name: str):
        self.event_index = event_index
        self.field_name = field_name
        super().__init__(
            f"event {event_index}: missing mandatory field {field_name!r}"
        )


class EventKind(str, Enum):
    PASS = "Pass"
    SHOT = "Shot"
    FOUL_COMMITTED = "FoulCommitted"
    BAD_BEHAVIOUR = "BadBehaviour"
    OWN_GOAL_AGAINST = "OwnGoalAgainst"
    HALF_START = "HalfStart"
    HALF_END = "HalfEnd"
    OTHER = "Other"


class PassOutcome(str, Enum):
    COMPLETE = "Complete"
    INCOMPLETE = "Incomplete"
    OUT = "Out"
    OFFSIDE = "Offside"
    UNKNOWN = "Unknown"


class ShotOutcome(str, Enum):
    GOAL = "Goal"
    ON_TARGET_SAVED = "OnTargetSaved"
    OFF_TARGET = "OffTarget"
    BLOCKED = "Blocked"
    OTHER = "Other"


class Card(str, Enum):
    YELLOW = "Yellow"
    SECOND_YELLOW = "SecondYellow"
    RED = "Red"


class KeyEventKind(str, Enum):
    HALF_TIME = "halftime"
    FIRST_GOAL = "first_goal"
    FIRST_DISMISSAL = "first_dismissal"


_KIND_BY_TYPE_NAME = {
    "Pass": EventKind.PASS,
    "Shot": EventKind.SHOT,
    "Foul Committed": EventKind.FOUL_COMMITTED,
    "Bad Behaviour": EventKind.BAD_BEHAVIOUR,
    "Own Goal Against": EventKind.OWN_GOAL_AGAINST,
    "Half Start": EventKind.HALF_START,
    "Half End": EventKind.HALF_END,
}

# A pass with no outcome object is complete; that is the provider convention.
_PASS_OUTCOME_BY_NAME = {
    "Incomplete": PassOutcome.INCOMPLETE,
    "Out": PassOutcome.OUT,
    "Pass Offside": PassOutcome.OFFSIDE,
    "Offside": PassOutcome.OFFSIDE,
}

_SHOT_OUTCOME_BY_NAME = {
    "Goal": ShotOutcome.GOAL,
    "Saved": ShotOutcome.ON_TARGET_SAVED,
    "Saved To Post": ShotOutcome.ON_TARGET_SAVED,
    "Blocked": ShotOutcome.BLOCKED,
    "Off T": ShotOutcome.OFF_TARGET,
    "Post": ShotOutcome.OFF_TARGET,
    "Wayward": ShotOutcome.OFF_TARGET,
}

_CARD_BY_NAME = {
    "Yellow Card": Card.YELLOW,
    "Second Yellow": Card.SECOND_YELLOW,
    "Red Card": Card.RED,
}


@dataclass(frozen=True)
class PassDetail:
    recipient_id: int | None
    outcome: PassOutcome


@dataclass(frozen=True)
class ShotDetail:
    outcome: ShotOutcome


@dataclass(frozen=True)
class RawEvent:
    event_id: str
    index: int  # position in the source file, breaks timestamp ties
    period: int
    clock: float  # seconds since period start
    kind: EventKind
    team_id: int | None
    player_id: int | None
    possession_index: int | None
    possession_team_id: int | None
    pass_detail: PassDetail | None = None
    shot_detail: ShotDetail | None = None
    card_detail: Card | None = None

    @property
    def time(self) -> tuple[int, float]:
        return (self.period, self.clock)


@dataclass(frozen=True)
class MatchEventStream:
    match_id: int | str
    home_team_id: int
    away_team_id: int
    events: tuple[RawEvent, ...]
    player_names: dict[int, str] = field(default_factory=dict, compare=False)

    def opponent_of(self, team_id: int) -> int:
        return self.away_team_id if team_id == self.home_team_id else self.home_team_id

    @property
    def team_ids(self) -> tuple[int, int]:
        return (self.home_team_id, self.away_team_id)


@dataclass(frozen=True)
class KeyEvent:
    kind: KeyEventKind
    occurred: bool
    period: int | None = None
    clock: float | None = None
    acting_team_id: int | None = None

    @property
    def time(self) -> tuple[int, float] | None:
        if not self.occurred:
            return None
        return (self.period, self.clock)

    def split_time(self) -> tuple[int, float] | None:
        """Timestamp separating `before` from `after` for this event.

        Half time is a period boundary, not an instant inside period 1, so
        its split point is the start of period 2; otherwise the event's own
        timestamp is used (passes at exactly that time belong to `after`).
        """
        if not self.occurred:
            return None
        if self.kind is KeyEventKind.HALF_TIME:
            return (2, 0.0)
        return (self.period, self.clock)


@dataclass(frozen=True)
class PossessionStint:
    team_id: int
    possession_index: int
    start: tuple[int, float]
    end: tuple[int, float]

    @property
    def duration(self) -> float:
        return self.end[1] - self.start[1]


@dataclass(frozen=True)
class Window:
    """Half-open match-time interval [start, end) in (period, clock) order.

    ``None`` bounds extend to the match start/end respectively.
    """

    start: tuple[int, float] | None = None
    end: tuple[int, float] | None = None
    label: str = "match"

    def contains(self, period: int, clock: float) -> bool:
        t = (period, clock)
        if self.start is not None and t < self.start:
            return False
        if self.end is not None and t >= self.end:
            return False
        return True


WHOLE_MATCH = Window(None, None, "match")


class CompletedPass(NamedTuple):
    passer_id: int
    recipient_id: int
    period: int
    clock: float


@dataclass
class PassDiagnostics:
    """Tally of completed passes dropped for lacking an endpoint."""

    missing_recipient: int = 0
    missing_passer: int = 0


def parse_match(data: bytes, match_id: int | str = 0) -> MatchEventStream:
    """Parse a provider event file into an ordered, typed event stream.

    Events are stably sorted by (period, clock) so the stream ordering
    invariant holds even if the file interleaves timestamps; file order
    breaks ties.  The home team is taken to be the team of the first event
    in the file (the provider lists the home Starting XI first).
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError("event file is not valid UTF-8", exc.start) from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise ParseError(f"malformed JSON: {exc.msg}", offset) from exc
    if not isinstance(raw, list):
        raise ParseError("top-level JSON value must be an array of events")

    events: list[RawEvent] = []
    player_names: dict[int, str] = {}
    prev_period = 1
    prev_clock = 0.0
    prev_possession: int | None = None
    prev_possession_team: int | None = None

    for i, obj in enumerate(raw):
        if not isinstance(obj, dict):
            raise ParseError(f"event {i} is not a JSON object")
        type_name = (obj.get("type") or {}).get("name")
        kind = _KIND_BY_TYPE_NAME.get(type_name, EventKind.OTHER)

        period = obj.get("period")
        team_id = (obj.get("team") or {}).get("id")
        if kind is not EventKind.OTHER:
            if period is None:
                raise ValidationError(i, "period")
            if team_id is None:
                raise ValidationError(i, "team")
        if period is None:
            period = prev_period

        minute = obj.get("minute")
        second = obj.get("second")
        if minute is None and second is None:
            clock = prev_clock
        else:
            total = (minute or 0) * 60 + (second or 0)
            clock = float(max(0, total - _PERIOD_OFFSET.get(period, 0)))

        player = obj.get("player") or {}
        player_id = player.get("id")
        if player_id is not None and player.get("name"):
            player_names.setdefault(player_id, player["name"])
        recipient = ((obj.get("pass") or {}).get("recipient")) or {}
        if recipient.get("id") is not None and recipient.get("name"):
            player_names.setdefault(recipient["id"], recipient["name"])

        possession = obj.get("possession")
        possession_team = (obj.get("possession_team") or {}).get("id")
        if possession is None:
            possession = prev_possession
            possession_team = possession_team or prev_possession_team

        pass_detail = None
        if kind is EventKind.PASS:
            pass_obj = obj.get("pass") or {}
            outcome_name = (pass_obj.get("outcome") or {}).get("name")
            if outcome_name is None:
                outcome = PassOutcome.COMPLETE
            else:
                outcome = _PASS_OUTCOME_BY_NAME.get(outcome_name, PassOutcome.UNKNOWN)
            pass_detail = PassDetail(recipient.get("id"), outcome)

        shot_detail = None
        if kind is EventKind.SHOT:
            outcome_name = ((obj.get("shot") or {}).get("outcome") or {}).get("name")
            shot_detail = ShotDetail(
                _SHOT_OUTCOME_BY_NAME.get(outcome_name, ShotOutcome.OTHER)
            )

        card_detail = None
        if kind is EventKind.FOUL_COMMITTED:
            card_name = ((obj.get("foul_committed") or {}).get("card") or {}).get("name")
            card_detail = _CARD_BY_NAME.get(card_name)
        elif kind is EventKind.BAD_BEHAVIOUR:
            card_name = ((obj.get("bad_behaviour") or {}).get("card") or {}).get("name")
            card_detail = _CARD_BY_NAME.get(card_name)

        events.append(
            RawEvent(
                event_id=str(obj.get("id", i)),
                index=i,
                period=period,
                clock=clock,
                kind=kind,
                team_id=team_id,
                player_id=player_id,
                possession_index=possession,
                possession_team_id=possession_team,
                pass_detail=pass_detail,
                shot_detail=shot_detail,
                card_detail=card_detail,
            )
        )
        prev_period, prev_clock = period, clock
        prev_possession, prev_possession_team = possession, possession_team

    events.sort(key=lambda e: (e.period, e.clock))  # stable: file order kept on ties

    team_ids: list[int] = []
    for ev in events:
        if ev.team_id is not None and ev.team_id not in team_ids:
            team_ids.append(ev.team_id)
    if len(team_ids) < 2:
        raise ParseError("event file does not mention two distinct teams")

    return MatchEventStream(
        match_id=match_id,
        home_team_id=team_ids[0],
        away_team_id=team_ids[1],
        events=tuple(events),
        player_names=player_names,
    )


def _open_play(stream: MatchEventStream) -> Iterator[RawEvent]:
    for ev in stream.events:
        if ev.period < SHOOTOUT_PERIOD:
            yield ev


def detect_key_events(stream: MatchEventStream) -> list[KeyEvent]:
    """Locate half time, the first goal, and the first dismissal.

    Half time always occurs, positioned at the end of period 1.  The first
    goal is the earliest of a goal-outcome shot (credited to the shooter's
    team) or an own goal (credited to the benefiting team).  The first
    dismissal is the earliest red or second-yellow card.  Absence is encoded
    with ``occurred=False``, never an error.
    """
    half_end_clock = 0.0
    for ev in stream.events:
        if ev.period == 1:
            half_end_clock = max(half_end_clock, ev.clock)
            if ev.kind is EventKind.HALF_END:
                half_end_clock = ev.clock
                break
        elif ev.period > 1:
            break
    halftime = KeyEvent(KeyEventKind.HALF_TIME, True, 1, half_end_clock, None)

    first_goal = KeyEvent(KeyEventKind.FIRST_GOAL, False)
    for ev in _open_play(stream):
        if (
            ev.kind is EventKind.SHOT
            and ev.shot_detail is not None
            and ev.shot_detail.outcome is ShotOutcome.GOAL
        ):
            acting = ev.team_id
        elif ev.kind is EventKind.OWN_GOAL_AGAINST:
            acting = stream.opponent_of(ev.team_id)
        else:
            continue
        first_goal = KeyEvent(KeyEventKind.FIRST_GOAL, True, ev.period, ev.clock, acting)
        break

    first_dismissal = KeyEvent(KeyEventKind.FIRST_DISMISSAL, False)
    for ev in _open_play(stream):
        if ev.kind in (EventKind.FOUL_COMMITTED, EventKind.BAD_BEHAVIOUR) and (
            ev.card_detail in (Card.RED, Card.SECOND_YELLOW)
        ):
            first_dismissal = KeyEvent(
                KeyEventKind.FIRST_DISMISSAL, True, ev.period, ev.clock, ev.team_id
            )
            break

    return [halftime, first_goal, first_dismissal]


def possession_stints(stream: MatchEventStream, team_id: int) -> list[PossessionStint]:
    """Maximal runs of consecutive events in one team's possession.

    A stint groups consecutive events sharing a possession index; it breaks
    at period changes so durations never span the interval between periods.
    Shootout events are excluded.
    """
    stints: list[PossessionStint] = []
    run: list[RawEvent] = []

    def flush() -> None:
        if run and run[0].possession_team_id == team_id:
            stints.append(
                PossessionStint(
                    team_id=team_id,
                    possession_index=run[0].possession_index,
                    start=run[0].time,
                    end=run[-1].time,
                )
            )
        run.clear()

    for ev in _open_play(stream):
        if ev.possession_index is None:
            flush()
            continue
        if run and (
            ev.possession_index != run[0].possession_index
            or ev.possession_team_id != run[0].possession_team_id
            or ev.period != run[0].period
        ):
            flush()
        run.append(ev)
    flush()
    return stints


def possession_time(stream: MatchEventStream, team_id: int, window: Window) -> float:
    """Seconds the team held the ball inside the window.

    Sum of per-stint timestamp spans, with stints truncated at the window
    boundaries.  A team with no possession in the window yields 0.
    """
    total = 0.0
    for stint in possession_stints(stream, team_id):
        lo = stint.start if window.start is None else max(stint.start, window.start)
        hi = stint.end if window.end is None else min(stint.end, window.end)
        if lo <= hi:
            total += hi[1] - lo[1]
    return total


def successful_passes(
    stream: MatchEventStream,
    team_id: int,
    window: Window = WHOLE_MATCH,
    diagnostics: PassDiagnostics | None = None,
) -> list[CompletedPass]:
    """Complete passes by the team inside the window, in match order.

    Completed passes with no logged recipient (or passer) cannot form an
    edge; they are dropped and tallied in ``diagnostics`` when given.
    """
    out: list[CompletedPass] = []
    for ev in _open_play(stream):
        if ev.kind is not EventKind.PASS or ev.team_id != team_id:
            continue
        if ev.pass_detail is None or ev.pass_detail.outcome is not PassOutcome.COMPLETE:
            continue
        if not window.contains(ev.period, ev.clock):
            continue
        if ev.player_id is None:
            if diagnostics is not None:
                diagnostics.missing_passer += 1
            continue
        if ev.pass_detail.recipient_id is None:
            if diagnostics is not None:
                diagnostics.missing_recipient += 1
            continue
        out.append(
            CompletedPass(ev.player_id, ev.pass_detail.recipient_id, ev.period, ev.clock)
        )
    return out
