"""Deterministic concurrent multiplayer arenas and problem files.

Players are indexed from 0 in code; player 0 is the leader.  Joint actions
are encoded as a single integer in row-major order over the per-player
action counts (player 0 most significant), so ``trans.reshape(n_states,
*dims)`` exposes one axis per player.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import scltl
from .errors import MissingTransitionError, ProblemFormatError, CoalsynthError
from .prefs import PreferenceModel, build_preference
from .scltl import Formula

_NAME = re.compile(r"^[^\s(),#:\[\]]+$")


@dataclass(eq=False)
class GameGraph:
    players: tuple[str, ...]
    actions: tuple[tuple[str, ...], ...]
    states: tuple[str, ...]
    init: int
    atoms: tuple[str, ...]
    labels: tuple[int, ...]          # bitmask over atoms per state
    trans: np.ndarray                # (n_states, n_joint) -> state index

    def __post_init__(self):
        self.trans = np.asarray(self.trans, dtype=np.int64)
        if self.trans.shape != (len(self.states), self.n_joint):
            raise ValueError(f"transition table must have shape "
                             f"{(len(self.states), self.n_joint)}, got {self.trans.shape}")
        if not 0 <= self.init < len(self.states):
            raise ValueError("initial state out of range")
        if self.trans.size and (self.trans.min() < 0 or self.trans.max() >= len(self.states)):
            raise ValueError("transition target out of range")
        full = (1 << len(self.atoms)) - 1
        if any(lab & ~full for lab in self.labels):
            raise ValueError("label uses undeclared atoms")

    @property
    def n_players(self) -> int:
        return len(self.players)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.actions)

    @property
    def n_joint(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def joint_index(self, action_ids: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(action_ids), self.dims))

    def joint_actions(self, j: int) -> tuple[int, ...]:
        return tuple(int(x) for x in np.unravel_index(j, self.dims))

    def label_names(self, s: int) -> frozenset[str]:
        lab = self.labels[s]
        return frozenset(a for k, a in enumerate(self.atoms) if lab >> k & 1)

    def step(self, s: int, action_ids: Sequence[int]) -> int:
        return int(self.trans[s, self.joint_index(action_ids)])

    def reachable(self) -> list[int]:
        seen = {self.init}
        queue = deque([self.init])
        while queue:
            s = queue.popleft()
            for t in np.unique(self.trans[s]):
                t = int(t)
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        return sorted(seen)

    def __eq__(self, other):
        if not isinstance(other, GameGraph):
            return NotImplemented
        return (self.players == other.players and self.actions == other.actions
                and self.states == other.states and self.init == other.init
                and self.atoms == other.atoms and tuple(self.labels) == tuple(other.labels)
                and np.array_equal(self.trans, other.trans))


def feasible_coalitions(n_players: int) -> list[tuple[int, ...]]:
    """The leader alone, or the leader paired with exactly one other player."""
    if n_players < 1:
        raise ValueError("need at least one player")
    return [(0,)] + [(0, i) for i in range(1, n_players)]


def coalition_text(c: Sequence[int]) -> str:
    return "{" + ",".join(str(i + 1) for i in c) + "}"


@dataclass(eq=False)
class ProblemSpec:
    game: GameGraph
    goal_names: tuple[str, ...]
    goals: tuple[Formula, ...]
    prefs: tuple[PreferenceModel, ...]
    leader: int = 0
    _digest: str | None = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.prefs) != self.game.n_players:
            raise ValueError("one preference model per player is required")
        for p in self.prefs:
            if p.m != len(self.goals):
                raise ValueError("preference model size differs from the goal count")
        atoms = set(self.game.atoms)
        for name, f in zip(self.goal_names, self.goals):
            if not f.atoms() <= atoms:
                raise ValueError(f"goal {name} uses undeclared atoms {sorted(f.atoms() - atoms)}")

    def __eq__(self, other):
        if not isinstance(other, ProblemSpec):
            return NotImplemented
        return (self.game == other.game and self.goal_names == other.goal_names
                and self.goals == other.goals and self.prefs == other.prefs)

    @property
    def digest(self) -> str:
        if self._digest is None:
            self._digest = hashlib.sha256(dump_problem(self).encode()).hexdigest()[:16]
        return self._digest


# --- text format -------------------------------------------------------------

SECTIONS = ("players", "atoms", "states", "init", "transitions", "goals", "prefs")


def dump_problem(spec: ProblemSpec, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(problem_to_dict(spec), indent=1) + "\n"
    g = spec.game
    out = ["[players]"]
    for name, acts in zip(g.players, g.actions):
        out.append(f"{name}: {' '.join(acts)}")
    out += ["", "[atoms]", " ".join(g.atoms), "", "[states]"]
    for s, name in enumerate(g.states):
        out.append(f"{name}: {' '.join(sorted(g.label_names(s), key=g.atoms.index))}".rstrip())
    out += ["", "[init]", g.states[g.init], "", "[transitions]"]
    joints = [",".join(a[k] for a, k in zip(g.actions, ids))
              for ids in itertools.product(*(range(d) for d in g.dims))]
    for s, name in enumerate(g.states):
        row = g.trans[s]
        for j, ja in enumerate(joints):
            out.append(f"{name} ({ja}) {g.states[row[j]]}")
    out += ["", "[goals]"]
    for name, f in zip(spec.goal_names, spec.goals):
        out.append(f"{name}: {scltl.to_text(f)}")
    out += ["", "[prefs]"]
    for player, model in zip(g.players, spec.prefs):
        edges = model.edges()
        if not edges:
            out.append(f"{player}:")
        for a, b in edges:
            out.append(f"{player}: {spec.goal_names[a]} > {spec.goal_names[b]}")
    return "\n".join(out) + "\n"


def problem_to_dict(spec: ProblemSpec) -> dict:
    g = spec.game
    transitions = []
    for s in range(len(g.states)):
        for j in range(g.n_joint):
            ids = g.joint_actions(j)
            transitions.append([g.states[s], [g.actions[i][a] for i, a in enumerate(ids)],
                                g.states[int(g.trans[s, j])]])
    return {
        "players": [{"name": p, "actions": list(a)} for p, a in zip(g.players, g.actions)],
        "atoms": list(g.atoms),
        "states": [{"name": n, "label": sorted(g.label_names(s), key=g.atoms.index)}
                   for s, n in enumerate(g.states)],
        "init": g.states[g.init],
        "transitions": transitions,
        "goals": [{"name": n, "formula": scltl.to_text(f)}
                  for n, f in zip(spec.goal_names, spec.goals)],
        "prefs": {p: [[spec.goal_names[a], spec.goal_names[b]] for a, b in m.edges()]
                  for p, m in zip(g.players, spec.prefs)},
    }


def load_problem(text: str) -> ProblemSpec:
    """Parse and validate a problem file (text or JSON rendering)."""
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProblemFormatError(f"invalid JSON: {exc.msg}", exc.lineno) from None
        return problem_from_dict(data)
    return problem_from_dict(_parse_text(text))


def _parse_text(text: str) -> dict:
    data = {"players": [], "atoms": [], "states": [], "init": None,
            "transitions": [], "goals": [], "prefs": {}, "_lines": {}}
    section = None
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"\[(\w+)\]", line)
        if m:
            section = m.group(1)
            if section not in SECTIONS:
                raise ProblemFormatError(f"unknown section [{section}]", lineno)
            if section in seen:
                raise ProblemFormatError(f"duplicate section [{section}]", lineno)
            seen.add(section)
            continue
        if section is None:
            raise ProblemFormatError("content before the first section header", lineno)
        if section == "players":
            name, acts = _split_colon(line, lineno)
            data["players"].append({"name": name, "actions": acts.split(), "_line": lineno})
        elif section == "atoms":
            data["atoms"] += line.split()
        elif section == "states":
            name, lab = _split_colon(line, lineno)
            data["states"].append({"name": name, "label": lab.split(), "_line": lineno})
        elif section == "init":
            if data["init"] is not None:
                raise ProblemFormatError("more than one initial state", lineno)
            data["init"] = line
        elif section == "transitions":
            m = re.fullmatch(r"(\S+)\s*\(([^)]*)\)\s*(\S+)", line)
            if not m:
                raise ProblemFormatError(f"malformed transition {line!r}", lineno)
            acts = [a.strip() for a in m.group(2).split(",")]
            data["transitions"].append([m.group(1), acts, m.group(3), lineno])
        elif section == "goals":
            name, formula = _split_colon(line, lineno)
            data["goals"].append({"name": name, "formula": formula, "_line": lineno})
        elif section == "prefs":
            player, chain = _split_colon(line, lineno)
            edges = data["prefs"].setdefault(player, [])
            names = [t.strip() for t in chain.split(">")] if chain.strip() else []
            if any(not t for t in names):
                raise ProblemFormatError(f"malformed preference chain {chain!r}", lineno)
            edges += [[a, b, lineno] for a, b in zip(names, names[1:])]
    return data


def _split_colon(line, lineno):
    if ":" not in line:
        raise ProblemFormatError(f"expected 'name: ...', found {line!r}", lineno)
    name, rest = line.split(":", 1)
    return name.strip(), rest.strip()


def _check_name(kind, name, lineno=None):
    if not isinstance(name, str) or not _NAME.match(name):
        raise ProblemFormatError(f"invalid {kind} name {name!r}", lineno)


def problem_from_dict(data: dict) -> ProblemSpec:
    try:
        return _from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ProblemFormatError(f"missing or malformed field: {exc}") from None


def _from_dict(data):
    players = data["players"]
    if not players:
        raise ProblemFormatError("no players declared")
    pnames = []
    actions = []
    for p in players:
        _check_name("player", p["name"], p.get("_line"))
        if not p["actions"]:
            raise ProblemFormatError(f"player {p['name']} has no actions", p.get("_line"))
        for a in p["actions"]:
            _check_name("action", a, p.get("_line"))
        if len(set(p["actions"])) != len(p["actions"]):
            raise ProblemFormatError(f"duplicate action for player {p['name']}", p.get("_line"))
        pnames.append(p["name"])
        actions.append(tuple(p["actions"]))
    if len(set(pnames)) != len(pnames):
        raise ProblemFormatError("duplicate player names")

    atoms = tuple(data["atoms"])
    for a in atoms:
        _check_name("atom", a)
        if a in scltl.KEYWORDS:
            raise ProblemFormatError(f"atom name {a!r} clashes with an operator")
    if len(set(atoms)) != len(atoms):
        raise ProblemFormatError("duplicate atoms")
    atom_idx = {a: k for k, a in enumerate(atoms)}

    snames = []
    labels = []
    for st in data["states"]:
        line = st.get("_line")
        _check_name("state", st["name"], line)
        mask = 0
        for p in st["label"]:
            if p not in atom_idx:
                raise ProblemFormatError(f"state {st['name']} uses undeclared atom {p!r}", line)
            mask |= 1 << atom_idx[p]
        snames.append(st["name"])
        labels.append(mask)
    if not snames:
        raise ProblemFormatError("no states declared")
    if len(set(snames)) != len(snames):
        raise ProblemFormatError("duplicate state names")
    sidx = {n: k for k, n in enumerate(snames)}
    if data["init"] not in sidx:
        raise ProblemFormatError(f"unknown initial state {data['init']!r}")

    dims = tuple(len(a) for a in actions)
    aidx = [{a: k for k, a in enumerate(acts)} for acts in actions]
    n_joint = int(np.prod(dims))
    trans = np.full((len(snames), n_joint), -1, dtype=np.int64)
    for tr in data["transitions"]:
        src, acts, dst = tr[0], tr[1], tr[2]
        line = tr[3] if len(tr) > 3 else None
        if src not in sidx:
            raise ProblemFormatError(f"unknown state {src!r}", line)
        if dst not in sidx:
            raise ProblemFormatError(f"unknown state {dst!r}", line)
        if len(acts) != len(actions):
            raise ProblemFormatError(f"joint action {acts} has {len(acts)} components, "
                                     f"expected {len(actions)}", line)
        ids = []
        for i, a in enumerate(acts):
            if a not in aidx[i]:
                raise ProblemFormatError(f"unknown action {a!r} for player {pnames[i]}", line)
            ids.append(aidx[i][a])
        j = int(np.ravel_multi_index(tuple(ids), dims))
        old = trans[sidx[src], j]
        if old >= 0 and old != sidx[dst]:
            raise ProblemFormatError(
                f"conflicting transitions for {src} ({','.join(acts)})", line)
        trans[sidx[src], j] = sidx[dst]
    missing = np.argwhere(trans < 0)
    if len(missing):
        s, j = (int(x) for x in missing[0])
        ids = np.unravel_index(j, dims)
        ja = ",".join(actions[i][int(a)] for i, a in enumerate(ids))
        raise MissingTransitionError(
            f"missing transition for state {snames[s]} under ({ja})"
            + (f" and {len(missing) - 1} more" if len(missing) > 1 else ""))

    game = GameGraph(tuple(pnames), tuple(actions), tuple(snames), sidx[data["init"]],
                     atoms, tuple(labels), trans)

    gnames = []
    goals = []
    for gd in data["goals"]:
        _check_name("goal", gd["name"], gd.get("_line"))
        if gd["name"].isdigit():
            raise ProblemFormatError("goal names must not be plain numbers", gd.get("_line"))
        try:
            goals.append(scltl.parse_formula(gd["formula"], atoms))
        except CoalsynthError as exc:
            raise ProblemFormatError(f"goal {gd['name']}: {exc}", gd.get("_line")) from None
        gnames.append(gd["name"])
    if len(set(gnames)) != len(gnames):
        raise ProblemFormatError("duplicate goal names")
    gidx = {n: k for k, n in enumerate(gnames)}

    def goal_ref(ref, line):
        if ref in gidx:
            return gidx[ref]
        if ref.isdigit() and 1 <= int(ref) <= len(gnames):
            return int(ref) - 1
        raise ProblemFormatError(f"unknown goal {ref!r} in preferences", line)

    def player_ref(ref):
        if ref in pnames:
            return pnames.index(ref)
        m = re.fullmatch(r"(?:player\s+)?(\d+)", ref)
        if m and 1 <= int(m.group(1)) <= len(pnames):
            return int(m.group(1)) - 1
        raise ProblemFormatError(f"unknown player {ref!r} in preferences")

    edges = [[] for _ in pnames]
    for pref, pairs in data["prefs"].items():
        i = player_ref(pref)
        for pair in pairs:
            line = pair[2] if len(pair) > 2 else None
            edges[i].append((goal_ref(pair[0], line), goal_ref(pair[1], line)))
    prefs = tuple(build_preference(len(goals), e) for e in edges)
    return ProblemSpec(game, tuple(gnames), tuple(goals), prefs)
