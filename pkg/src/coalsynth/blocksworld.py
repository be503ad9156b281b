"""The three-arm, four-block BlocksWorld domain.

Arm ``i`` owns a fixed set of blocks.  Each round every arm either does
nothing, picks up one of its blocks (from any position of a stack; blocks
above it drop down), or places the block it holds at one of the table
locations.  All picks are applied before all places, each in priority order
P1, P2, P3.  Simultaneous placements at one location stack up in priority
order, so the highest-priority block ends up lowest.  An action that is not
applicable (picking with a full hand, placing with an empty one) is a no-op.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import scltl
from .game import GameGraph, ProblemSpec
from .prefs import build_preference

GOALS = (
    ("phi1", "F(e1 & F e2)"),
    ("phi2", "!e2 U e3"),
    ("phi3", "F(e3 & F e2)"),
)

# (better, worse) goal index pairs per arm
PREFERENCES = (
    [(0, 1), (0, 2)],
    [(0, 2), (1, 2)],
    [(2, 0), (1, 0)],
)

OWNERSHIP = ((1,), (2,), (3, 4))
N_LOCATIONS = 3


@dataclass(frozen=True)
class BwState:
    stacks: tuple[tuple[int, ...], ...]   # bottom to top, one per location
    hands: tuple[int, ...]                # held block per arm, 0 when empty

    def name(self) -> str:
        cols = ["".join(map(str, s)) or "-" for s in self.stacks]
        return "|".join(cols) + "|" + "".join(map(str, self.hands))

    def validate(self, ownership=OWNERSHIP):
        placed = [b for s in self.stacks for b in s] + [h for h in self.hands if h]
        if len(placed) != len(set(placed)):
            raise ValueError(f"block appears twice in {self.name()}")
        for arm, h in enumerate(self.hands):
            if h and h not in ownership[arm]:
                raise ValueError(f"arm {arm + 1} holds block B{h} it does not own")


def label_of(s: BwState) -> frozenset[str]:
    """Atoms true in ``s``.

    e1: B1 directly on B3, or B1 at location 2 while B2 is at location 3.
    e2: exactly two blocks stacked at location 3.
    e3: B4 directly on B1.
    """
    out = set()

    def directly_on(top, below):
        return any(below in st and st.index(below) + 1 < len(st) and st[st.index(below) + 1] == top
                   for st in s.stacks)

    loc = {b: k + 1 for k, st in enumerate(s.stacks) for b in st}
    if directly_on(1, 3) or (loc.get(1) == 2 and loc.get(2) == 3):
        out.add("e1")
    if len(s.stacks) >= 3 and len(s.stacks[2]) == 2:
        out.add("e2")
    if directly_on(4, 1):
        out.add("e3")
    return frozenset(out)


def arm_actions(ownership=OWNERSHIP, n_locations=N_LOCATIONS) -> tuple[tuple[str, ...], ...]:
    return tuple(("noop",) + tuple(f"pick_B{b}" for b in blocks)
                 + tuple(f"place_L{k}" for k in range(1, n_locations + 1))
                 for blocks in ownership)


def resolve(s: BwState, actions: tuple[str, ...]) -> BwState:
    """Apply one joint action (action names, one per arm)."""
    stacks = [list(st) for st in s.stacks]
    hands = list(s.hands)
    for arm, act in enumerate(actions):
        if act.startswith("pick_B") and hands[arm] == 0:
            b = int(act[6:])
            for st in stacks:
                if b in st:
                    st.remove(b)
                    hands[arm] = b
                    break
    for arm, act in enumerate(actions):
        if act.startswith("place_L") and s.hands[arm] != 0 and hands[arm] == s.hands[arm]:
            stacks[int(act[7:]) - 1].append(hands[arm])
            hands[arm] = 0
    return BwState(tuple(tuple(st) for st in stacks), tuple(hands))


def initial_state(ownership=OWNERSHIP, n_locations=N_LOCATIONS) -> BwState:
    blocks = sorted(b for own in ownership for b in own)
    stacks = (tuple(blocks),) + ((),) * (n_locations - 1)
    return BwState(stacks, (0,) * len(ownership))


def build_blocksworld(ownership=OWNERSHIP, n_locations=N_LOCATIONS,
                      preferences=PREFERENCES) -> ProblemSpec:
    """Enumerate the reachable configurations and build the problem.

    The defaults reproduce the experiment; smaller ``ownership`` tuples give
    down-scaled variants (one preference list per arm).
    """
    actions = arm_actions(ownership, n_locations)
    dims = tuple(len(a) for a in actions)
    joints = [tuple(actions[i][a] for i, a in enumerate(np.unravel_index(j, dims)))
              for j in range(int(np.prod(dims)))]
    s0 = initial_state(ownership, n_locations)
    ids = {s0: 0}
    order = [s0]
    rows = []
    queue = deque([s0])
    while queue:
        s = queue.popleft()
        row = []
        for ja in joints:
            t = resolve(s, ja)
            if t not in ids:
                ids[t] = len(order)
                order.append(t)
                queue.append(t)
            row.append(ids[t])
        rows.append(row)
    atoms = ("e1", "e2", "e3")
    labels = []
    for s in order:
        lab = label_of(s)
        labels.append(sum(1 << k for k, a in enumerate(atoms) if a in lab))
    game = GameGraph(
        players=tuple(f"P{i + 1}" for i in range(len(ownership))),
        actions=actions,
        states=tuple(s.name() for s in order),
        init=0,
        atoms=atoms,
        labels=tuple(labels),
        trans=np.asarray(rows, dtype=np.int64),
    )
    goals = tuple(scltl.parse_formula(t, atoms) for _, t in GOALS)
    prefs = tuple(build_preference(len(goals), e) for e in preferences)
    return ProblemSpec(game, tuple(n for n, _ in GOALS), goals, prefs)


def parse_state(name: str) -> BwState:
    """Inverse of :meth:`BwState.name`."""
    *cols, hands = name.split("|")
    stacks = tuple(tuple(int(c) for c in col) if col != "-" else () for col in cols)
    return BwState(stacks, tuple(int(c) for c in hands))


# Configurations of the two plays shown for the experiment, with the coalition
# announced before each move and the joint action (P1, P2, P3).
FIRST_PLAY = (
    ("1234|-|-|000", (0, 1), ("pick_B1", "pick_B2", "noop")),
    ("34|-|-|120", (0, 1), ("place_L2", "place_L3", "noop")),
    ("34|1|2|000", (0, 2), ("pick_B1", "pick_B2", "noop")),
    ("34|-|-|120", (0, 1), ("place_L3", "place_L3", "noop")),
    ("34|-|12|000", None, None),
)
FIRST_LABELS = ((), (), ("e1",), (), ("e2",))

SECOND_PLAY = (
    ("1234|-|-|000", (0, 2), ("pick_B1", "noop", "pick_B4")),
    ("23|-|-|104", (0, 2), ("place_L1", "noop", "place_L3")),
    ("231|-|4|000", (0, 1), ("pick_B1", "noop", "pick_B4")),
    ("23|-|-|104", (0, 2), ("place_L3", "noop", "place_L3")),
    ("23|-|14|000", None, None),
)
SECOND_LABELS = ((), (), ("e1",), (), ("e1", "e3"))
