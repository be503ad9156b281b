"""Run a strategy profile from the initial product state and render the play."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .game import coalition_text
from .prefs import members
from .product import ProductGame
from .synthesis import AdmissibleSolution

BASE_COLUMNS = ("step", "game_state", "label", "coalition", "joint_action", "satisfied")


@dataclass(frozen=True)
class Step:
    product_state: str
    game_state: str
    label: frozenset[str]
    coalition: tuple[int, ...]
    joint_action: tuple[str, ...]
    satisfied: frozenset[str]
    ranks: tuple[int, ...]
    coalv: tuple[int, ...]


@dataclass(frozen=True)
class Trace:
    players: int
    steps: tuple[Step, ...]

    def __len__(self):
        return len(self.steps)


@dataclass
class Profile:
    """Leader choice and full joint action per product state, plus CoalV."""

    coalition: list[tuple[int, ...]]
    joint: list[tuple[int, ...]]
    coalv: np.ndarray            # (N-1, n)
    l_star: int

    @classmethod
    def from_solution(cls, sol: AdmissibleSolution) -> Profile:
        pairs = [sol.joint_action(v) for v in range(sol.H.n_states)]
        return cls([c for c, _ in pairs], [j for _, j in pairs], sol.coalv.copy(), sol.l_star)

    def to_json(self, H: ProductGame) -> str:
        g = H.spec.game
        states = {}
        for v in range(H.n_states):
            states[H.key(v)] = {
                "coalition": [p + 1 for p in self.coalition[v]],
                "actions": [g.actions[p][a] for p, a in enumerate(self.joint[v])],
                "coalv": [int(x) for x in self.coalv[:, v]],
            }
        doc = {"problem": H.spec.digest, "l_star": self.l_star, "states": states}
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, H: ProductGame, text: str) -> Profile:
        doc = json.loads(text)
        if doc.get("problem") != H.spec.digest:
            raise ValidationError(f"solution was computed for problem {doc.get('problem')}, "
                                  f"not {H.spec.digest}")
        g = H.spec.game
        coal, joint = [], []
        coalv = np.zeros((H.n_players - 1, H.n_states), dtype=np.int64)
        for v in range(H.n_states):
            entry = doc["states"].get(H.key(v))
            if entry is None:
                raise ValidationError(f"solution has no entry for state {H.key(v)}")
            coal.append(tuple(p - 1 for p in entry["coalition"]))
            joint.append(tuple(g.actions[p].index(a) for p, a in enumerate(entry["actions"])))
            coalv[:, v] = entry["coalv"]
        return cls(coal, joint, coalv, int(doc["l_star"]))


def _as_profile(obj) -> Profile:
    return Profile.from_solution(obj) if isinstance(obj, AdmissibleSolution) else obj


def run(H: ProductGame, profile, horizon: int, start: int | None = None) -> Trace:
    """Follow the profile for at most ``horizon`` rounds from ``start`` (default ``v0``).

    One row per visited product state, holding the action played there.  The
    run stops early once the next state was already visited: from then on
    the play repeats and the satisfied set is stable.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    prof = _as_profile(profile)
    g = H.spec.game
    steps = []
    seen = set()
    v = H.v0 if start is None else start
    while len(steps) < horizon:
        seen.add(v)
        ids = prof.joint[v]
        s = int(H.gstate[v])
        steps.append(Step(
            product_state=H.key(v),
            game_state=g.states[s],
            label=g.label_names(s),
            coalition=tuple(prof.coalition[v]),
            joint_action=tuple(g.actions[p][a] for p, a in enumerate(ids)),
            satisfied=frozenset(H.spec.goal_names[k] for k in members(int(H.satisfied[v]))),
            ranks=tuple(int(x) for x in H.rank[:, v]),
            coalv=tuple(int(x) for x in prof.coalv[:, v]),
        ))
        v = int(H.delta[v, g.joint_index(ids)])
        if v in seen:
            break
    return Trace(H.n_players, tuple(steps))


def _set_text(items) -> str:
    return "{" + ",".join(sorted(items)) + "}"


def _parse_set(text: str) -> frozenset[str]:
    inner = text.strip()[1:-1]
    return frozenset(x for x in inner.split(",") if x)


def columns(n_players: int) -> list[str]:
    return list(BASE_COLUMNS) + [f"rank_{i + 1}" for i in range(n_players)] + ["product_state", "coalv"]


def _row(k: int, st: Step) -> list[str]:
    return ([str(k), st.game_state, _set_text(st.label), coalition_text(st.coalition),
             "(" + ",".join(st.joint_action) + ")", _set_text(st.satisfied)]
            + [str(r) for r in st.ranks]
            + [st.product_state, "[" + ",".join(map(str, st.coalv)) + "]"])


def render_trace(t: Trace, fmt: str = "text") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns(t.players))
        for k, st in enumerate(t.steps):
            w.writerow(_row(k, st))
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown trace format {fmt!r}")
    rows = [columns(t.players)] + [_row(k, st) for k, st in enumerate(t.steps)]
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    return "".join("  ".join(x.ljust(wd) for x, wd in zip(r, widths)).rstrip() + "\n" for r in rows)


def parse_trace_csv(text: str) -> Trace:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(lines)
    head = next(reader)
    n = sum(1 for c in head if c.startswith("rank_"))
    if head != columns(n):
        raise ValidationError(f"unexpected trace columns {head}")
    steps = []
    for row in reader:
        coal = row[3].strip("{}")
        steps.append(Step(
            product_state=row[6 + n],
            game_state=row[1],
            label=_parse_set(row[2]),
            coalition=tuple(int(x) - 1 for x in coal.split(",")),
            joint_action=tuple(row[4][1:-1].split(",")),
            satisfied=_parse_set(row[5]),
            ranks=tuple(int(x) for x in row[6:6 + n]),
            coalv=tuple(int(x) for x in row[7 + n][1:-1].split(",") if x),
        ))
    return Trace(n, tuple(steps))
