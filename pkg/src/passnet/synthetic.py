"""Seeded generator of football-like event files in the provider schema.

Produces matches with line-structured passing, possession stints, shots,
cards, and the behavioural shifts around key events that the analyses
measure (tempo drops after the opening goal, play concentrating through
pivots after a dismissal).  Useful for demos and for exercising the full
pipeline when no real event data is on disk; the emitted JSON is shaped
exactly like the provider's open-data event files.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

_CLUBS = [
    "Aurora", "Borealis", "Cobalt", "Drava", "Ember", "Falcon", "Granite",
    "Harbor", "Istra", "Juno", "Kestrel", "Larkspur", "Meridian", "Nimbus",
    "Orion", "Pelican", "Quartz", "Ravenna", "Sable", "Tempest", "Umbra",
    "Vela", "Wren", "Zephyr",
]

_SURNAMES = [
    "Adler", "Bakker", "Costa", "Dvorak", "Egger", "Farkas", "Gruber",
    "Horvat", "Ibanez", "Jansen", "Kovac", "Lindt", "Moreau", "Novak",
    "Olsen", "Petric", "Quist", "Rossi", "Santos", "Tanaka", "Urban",
    "Vidmar", "Weber", "Xavier", "Yilmaz", "Zupan", "Arnold", "Bianchi",
    "Cruz", "Duran", "Elia", "Fontan", "Garcia", "Hansen", "Iversen",
    "Jonas", "Keller", "Lopez", "Marek", "Nilsen", "Otten", "Pavic",
    "Romero", "Silva", "Torres", "Ullmann",
]

_FORMATION = ("GK", "DEF", "DEF", "DEF", "DEF", "MID", "MID", "MID", "ATT", "ATT", "ATT")

_LINE_ORDER = {"GK": 0, "DEF": 1, "MID": 2, "ATT": 3}

_SHOT_OUTCOMES = ["Saved", "Blocked", "Off T", "Wayward", "Post"]


@dataclass
class _Player:
    player_id: int
    name: str
    line: str


@dataclass
class _Team:
    team_id: int
    name: str
    players: list

    def ref(self) -> dict:
        return {"id": self.team_id, "name": self.name}


class _MatchSim:
    def __init__(self, match_id: int, seed: int):
        self.match_id = match_id
        self.rng = random.Random((seed * 1_000_003 + match_id) % (2**62))
        self.events: list[dict] = []
        self.possession = 0
        self.event_index = 0

        clubs = self.rng.sample(_CLUBS, 2)
        surnames = self.rng.sample(_SURNAMES, 22)
        self.teams = []
        for t in range(2):
            team_id = 100 + match_id * 2 + t
            players = [
                _Player(team_id * 100 + j + 1, surnames[t * 11 + j], _FORMATION[j])
                for j in range(11)
            ]
            self.teams.append(_Team(team_id, f"{clubs[t]} FC", players))

        self.active = {team.team_id: list(team.players) for team in self.teams}
        self.playmaker: dict[int, _Player] = {}
        self.pref = {team.team_id: self._preferences(team) for team in self.teams}
        self.tempo = {team.team_id: self.rng.uniform(0.9, 1.15) for team in self.teams}
        self.hub_boost = {team.team_id: {} for team in self.teams}
        # stable tactical pivots: concentration events always funnel here
        self.pivot_ids = {
            team.team_id: {self.playmaker[team.team_id].player_id}
            | {self.rng.choice([p for p in team.players if p.line == "DEF"]).player_id}
            for team in self.teams
        }

        self.goal_scored = False
        self.dismissal_done = False
        # planted script: does this match have a goal / dismissal, and when
        self.goal_at = self.rng.uniform(500, 3000) if self.rng.random() < 0.85 else None
        self.own_goal = self.goal_at is not None and self.rng.random() < 0.05
        self.dismissal_at = (
            self.rng.uniform(1800, 4200) if self.rng.random() < 0.45 else None
        )
        self.facts: dict = {"first_goal": None, "first_dismissal": None}

    def _preferences(self, team: _Team) -> dict:
        """Habitual lane weights: each line drills a tight passing triangle,
        the blocks link through bridge pairs (keeper to left back, right back
        to the deep mid, advanced mid to the first striker), and a few
        one-way habits (back-passes, lay-offs, the keeper's short restart)
        close corners of those units."""
        gk = next(p for p in team.players if p.line == "GK")
        d1, d2, d3, d4 = self.rng.sample([p for p in team.players if p.line == "DEF"], 4)
        m1, m2, m3 = self.rng.sample([p for p in team.players if p.line == "MID"], 3)
        a1, a2, a3 = self.rng.sample([p for p in team.players if p.line == "ATT"], 3)
        self.playmaker[team.team_id] = m1

        pref: dict = {}
        for a in team.players:
            row = {}
            for b in team.players:
                if a.player_id == b.player_id:
                    continue
                gap = abs(_LINE_ORDER[a.line] - _LINE_ORDER[b.line])
                w = {0: 0.8, 1: 0.5, 2: 0.2, 3: 0.1}[gap]
                if a.line == "GK" and b.line != "DEF":
                    w *= 0.4
                row[b.player_id] = w
            pref[a.player_id] = row

        def mutual(a: _Player, b: _Player, weight: float = 12.0) -> None:
            pref[a.player_id][b.player_id] = weight
            pref[b.player_id][a.player_id] = weight

        # drilled triangles, one per line
        for x, y, z in ((d1, d2, d3), (m1, m2, m3), (a1, a2, a3)):
            mutual(x, y)
            mutual(y, z)
            mutual(x, z)
        # bridge pairs stitch the blocks together along the spine
        mutual(gk, d1)
        mutual(gk, d4)
        mutual(d4, m1)
        mutual(m3, a1)
        # one-way habits closing corners of the units
        for src, dst, w in (
            (d2, gk, 10.0),  # pressured centre-back plays back to the keeper
            (m2, d4, 10.0),  # pivot recycles through the right back
            (gk, m1, 10.0),  # keeper's quick short restart finds the deep mid
            (m3, a2, 10.0),  # advanced mid slips the second striker in
        ):
            pref[src.player_id][dst.player_id] = w
        return pref

    # -- event emission -------------------------------------------------

    def _stamp(self, period: int, clock: float) -> dict:
        total = int(clock) + {1: 0, 2: 2700}[period]
        return {"period": period, "minute": total // 60, "second": total % 60}

    def _emit(self, period: int, clock: float, type_name: str, team: _Team, **extra) -> dict:
        ev = {
            "id": f"{self.match_id}-{self.event_index}",
            "index": self.event_index,
            **self._stamp(period, clock),
            "type": {"name": type_name},
            "possession": self.possession,
            "possession_team": {"id": extra.pop("possession_team_id", team.team_id)},
            "team": team.ref(),
        }
        ev.update(extra)
        self.events.append(ev)
        self.event_index += 1
        return ev

    def _player_ref(self, p: _Player) -> dict:
        return {"id": p.player_id, "name": p.name}

    # -- behaviour ------------------------------------------------------

    def _choose(self, weights: dict) -> int:
        total = sum(weights.values())
        x = self.rng.uniform(0.0, total)
        acc = 0.0
        for key, w in weights.items():
            acc += w
            if x <= acc + 1e-12:
                return key
        return key  # pragma: no cover

    _USAGE_BY_LINE = {"GK": 0.5, "DEF": 1.3, "MID": 1.2, "ATT": 0.7}

    def _receiver(self, team: _Team, passer: _Player, last_passer: _Player | None) -> _Player:
        roster = {p.player_id: p for p in self.active[team.team_id]}
        weights = {}
        for pid, w in self.pref[team.team_id][passer.player_id].items():
            if pid in roster:
                weights[pid] = w * self.hub_boost[team.team_id].get(pid, 1.0)
        if last_passer is not None and last_passer.player_id in weights:
            weights[last_passer.player_id] *= 2.0  # one-two combinations
        return roster[self._choose(weights)]

    def _carrier(self, team: _Team) -> _Player:
        """Who picks the ball up after a carry, dribble, or loose spell."""
        weights = {
            p.player_id: self._USAGE_BY_LINE[p.line]
            * self.hub_boost[team.team_id].get(p.player_id, 1.0)
            for p in self.active[team.team_id]
        }
        roster = {p.player_id: p for p in self.active[team.team_id]}
        return roster[self._choose(weights)]

    def _abs_time(self, period: int, clock: float) -> float:
        return clock + {1: 0.0, 2: 2700.0}[period]

    def _maybe_key_events(self, period: int, clock: float, attacking: _Team) -> str | None:
        """Returns 'goal' or 'dismissal' when the script fires at this moment."""
        t = self._abs_time(period, clock)
        if self.goal_at is not None and not self.goal_scored and t >= self.goal_at:
            return "goal"
        if (
            self.dismissal_at is not None
            and not self.dismissal_done
            and t >= self.dismissal_at
        ):
            return "dismissal"
        return None

    def _concentrate(self, team: _Team, factor: float) -> None:
        """Funnel play through the team's standing pivots; damp everyone else."""
        boost = self.hub_boost[team.team_id]
        pivots = self.pivot_ids[team.team_id]
        for p in self.active[team.team_id]:
            if p.player_id in pivots:
                boost[p.player_id] = boost.get(p.player_id, 1.0) * factor

    def _apply_goal_shift(self):
        # tempo falls for both teams after the opener; play tightens through hubs
        for team in self.teams:
            self.tempo[team.team_id] *= self.rng.uniform(1.25, 1.45)
            self._concentrate(team, self.rng.uniform(1.9, 2.4))

    def _apply_halftime_shift(self):
        # second halves lean on the playmakers as legs tire
        for team in self.teams:
            self.tempo[team.team_id] *= self.rng.uniform(1.02, 1.10)
            self._concentrate(team, self.rng.uniform(2.0, 2.6))

    def _apply_dismissal(self, punished: _Team, period: int, clock: float):
        candidates = [
            p
            for p in self.active[punished.team_id]
            if p.line != "GK" and p.player_id not in self.pivot_ids[punished.team_id]
        ]
        victim = self.rng.choice(candidates)
        self._emit(
            period,
            clock,
            "Foul Committed",
            punished,
            player=self._player_ref(victim),
            foul_committed={"card": {"name": self.rng.choice(["Red Card", "Second Yellow"])}},
        )
        self.active[punished.team_id] = [
            p for p in self.active[punished.team_id] if p.player_id != victim.player_id
        ]
        self.facts["first_dismissal"] = {
            "period": period,
            "clock": int(clock),
            "team_id": punished.team_id,
            "player_id": victim.player_id,
        }
        self.dismissal_done = True
        # both sides concentrate play through their pivots afterwards
        for team in self.teams:
            factor = (
                self.rng.uniform(3.4, 4.4)
                if team.team_id == punished.team_id
                else self.rng.uniform(3.0, 3.8)
            )
            self._concentrate(team, factor)

    def _shot(self, period: int, clock: float, team: _Team, shooter: _Player, goal: bool):
        if goal:
            outcome = "Goal"
        else:
            outcome = self.rng.choice(_SHOT_OUTCOMES)
        self._emit(
            period,
            clock,
            "Shot",
            team,
            player=self._player_ref(shooter),
            shot={"outcome": {"name": outcome}},
        )

    # -- main loop ------------------------------------------------------

    def run(self) -> list[dict]:
        for team in self.teams:  # provider convention: home Starting XI first
            self.possession = 1
            self._emit(1, 0.0, "Starting XI", team, possession_team_id=self.teams[0].team_id)

        holder_team = 0
        for period in (1, 2):
            if period == 2:
                self._apply_halftime_shift()
            duration = 2700 + self.rng.uniform(30, 180)
            for team in self.teams:
                self.possession += 1
                self._emit(period, 0.0, "Half Start", team)
            clock = self.rng.uniform(2, 6)
            while clock < duration:
                team = self.teams[holder_team]
                clock = self._run_stint(period, clock, team)
                holder_team = 1 - holder_team
            for team in self.teams:
                self.possession += 1
                self._emit(period, duration, "Half End", team)
        return self.events

    def _run_stint(self, period: int, start_clock: float, team: _Team) -> float:
        self.possession += 1
        clock = start_clock
        roster = self.active[team.team_id]
        holder = self.rng.choice(roster)
        last_passer: _Player | None = None
        length = 0
        max_len = self.rng.randint(3, 17)
        if self.goal_scored:
            max_len = max(2, int(max_len * 0.85))
        while True:
            clock += self.rng.uniform(2.2, 6.5) * self.tempo[team.team_id]
            fired = self._maybe_key_events(period, clock, team)
            if fired == "goal":
                self._record_goal(period, clock, team)
                return clock + self.rng.uniform(8, 20)
            if fired == "dismissal":
                punished = self.teams[self.rng.randrange(2)]
                self._apply_dismissal(punished, period, clock)
                return clock + self.rng.uniform(5, 12)

            length += 1
            if length >= max_len:
                shooter = holder
                if self.rng.random() < 0.35 and shooter.line in ("MID", "ATT"):
                    self._shot(period, clock, team, shooter, goal=False)
                else:
                    receiver = self._receiver(team, holder, last_passer)
                    self._emit(
                        period,
                        clock,
                        "Pass",
                        team,
                        player=self._player_ref(holder),
                        **{
                            "pass": {
                                "recipient": self._player_ref(receiver),
                                "outcome": {"name": self.rng.choice(["Incomplete", "Out"])},
                            }
                        },
                    )
                return clock
            receiver = self._receiver(team, holder, last_passer)
            complete = self.rng.random() < 0.84
            pass_obj: dict = {"recipient": self._player_ref(receiver)}
            if not complete:
                pass_obj["outcome"] = {"name": "Incomplete"}
            self._emit(
                period, clock, "Pass", team, player=self._player_ref(holder), **{"pass": pass_obj}
            )
            if not complete:
                return clock
            if self.rng.random() < 0.55:
                last_passer = holder
                holder = receiver
            else:
                # ball moves on by a carry or dribble before the next pass
                last_passer = None
                holder = self._carrier(team)
            if self.rng.random() < 0.02:  # sporadic niggly foul, sometimes booked
                offender_team = self.teams[self.rng.randrange(2)]
                extra = {}
                if self.rng.random() < 0.25:
                    extra = {"foul_committed": {"card": {"name": "Yellow Card"}}}
                self._emit(
                    period,
                    clock + 0.5,
                    "Foul Committed",
                    offender_team,
                    player=self._player_ref(self.rng.choice(self.active[offender_team.team_id])),
                    possession_team_id=team.team_id,
                    **extra,
                )

    def _record_goal(self, period: int, clock: float, team: _Team):
        if self.own_goal:
            conceding = self.teams[0] if team is self.teams[1] else self.teams[1]
            defender = self.rng.choice(
                [p for p in self.active[conceding.team_id] if p.line == "DEF"]
            )
            self._emit(
                period,
                clock,
                "Own Goal Against",
                conceding,
                player=self._player_ref(defender),
                possession_team_id=team.team_id,
            )
            scoring_team_id = team.team_id
        else:
            shooter = self.rng.choice(
                [p for p in self.active[team.team_id] if p.line in ("MID", "ATT")]
            )
            self._shot(period, clock, team, shooter, goal=True)
            scoring_team_id = team.team_id
        self.facts["first_goal"] = {
            "period": period,
            "clock": int(clock),
            "team_id": scoring_team_id,
            "own_goal": self.own_goal,
        }
        self.goal_scored = True
        self._apply_goal_shift()


def generate_match(match_id: int, seed: int = 0):
    """One synthetic match: (event dicts, formation rows, planted facts)."""
    sim = _MatchSim(match_id, seed)
    events = sim.run()
    formation_rows = [
        (p.player_id, p.name, p.line) for team in sim.teams for p in team.players
    ]
    facts = dict(sim.facts)
    facts["teams"] = [t.team_id for t in sim.teams]
    return events, formation_rows, facts


def write_corpus(out_dir: str | Path, matches: int, seed: int = 0) -> Path:
    """Write event files, formation files, and a manifest; returns manifest path."""
    out = Path(out_dir)
    events_dir = out / "events"
    formations_dir = out / "formations"
    events_dir.mkdir(parents=True, exist_ok=True)
    formations_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for match_id in range(1, matches + 1):
        events, formation_rows, _facts = generate_match(match_id, seed)
        event_path = events_dir / f"{match_id}.json"
        with open(event_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(events, fh, indent=1, sort_keys=True)
            fh.write("\n")
        formation_path = formations_dir / f"{match_id}.csv"
        with open(formation_path, "w", encoding="utf-8", newline="\n") as fh:
            for pid, name, line in formation_rows:
                fh.write(f"{pid},{name},{line}\n")
        rows.append(
            {
                "match_id": match_id,
                "events": str(event_path.relative_to(out)),
                "formation": str(formation_path.relative_to(out)),
            }
        )

    manifest_path = out / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"seed": seed, "matches": rows}, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return manifest_path
