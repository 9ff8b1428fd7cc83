"""Hexagonal grid-world benchmarks.

Flat-top hexes in ``nx`` columns of ``ny`` cells, odd columns shifted half a
cell down (0-based), rows increasing southward.  Cell id is
``col * ny + row``; state id is ``cell * 4 + orientation`` with orientations
N, E, S, W.

Moving forward succeeds into the set of neighbors within 45 degrees of the
facing direction (two cells facing E/W, one facing N/S).  It fails into a
single drift cell on either side.  Nature picks the cell inside the success
set.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from .graphs import reachable
from .model import MdpstModel, ModelError, SetOutcome

ORIENT = ("N", "E", "S", "W")
ACTIONS = ("FR", "BK", "TR", "TL")

# neighbor directions clockwise from north, as compass angles
_DIRS = ("N", "NE", "SE", "S", "SW", "NW")
_ANGLE = {"N": 0, "NE": 60, "SE": 120, "S": 180, "SW": 240, "NW": 300}
_FACING = {"N": 0, "E": 90, "S": 180, "W": 270}


def _angdiff(a, b):
    d = abs(a - b) % 360
    return min(d, 360 - d)


def _moves(o: str):
    """(success directions, clockwise drift, counterclockwise drift)."""
    f = _FACING[o]
    succ = [d for d in _DIRS if _angdiff(_ANGLE[d], f) <= 45]
    cw = sorted((d for d in _DIRS if d not in succ), key=lambda d: (_ANGLE[d] - f) % 360)[0]
    ccw = sorted((d for d in _DIRS if d not in succ), key=lambda d: (f - _ANGLE[d]) % 360)[0]
    return succ, cw, ccw


_OPPOSITE = {"N": "S", "S": "N", "E": "W", "W": "E"}


def neighbor(col: int, row: int, d: str):
    odd = col % 2 == 1
    if d == "N":
        return col, row - 1
    if d == "S":
        return col, row + 1
    dc = 1 if d in ("NE", "SE") else -1
    if d in ("NE", "NW"):
        return col + dc, row if odd else row - 1
    return col + dc, row + 1 if odd else row


@dataclass
class HexLayout:
    nx: int
    ny: int
    obstacles: set = field(default_factory=set)
    bases: dict = field(default_factory=dict)  # label -> set of cell ids

    def cell(self, col: int, row: int) -> int:
        return col * self.ny + row

    def coords(self, cell: int):
        return divmod(cell, self.ny)

    def validate(self):
        if self.nx < 1 or self.ny < 1:
            raise ModelError("empty grid")
        n = self.nx * self.ny
        seen = {}
        for lab, cells in self.bases.items():
            for c in cells:
                if not 0 <= c < n:
                    raise ModelError(f"base {lab} cell {c} outside the grid")
                if c in seen:
                    raise ModelError(f"base label collision at cell {c}: {seen[c]} and {lab}")
                if c in self.obstacles:
                    raise ModelError(f"base {lab} cell {c} is an obstacle")
                seen[c] = lab
        if any(not 0 <= c < n for c in self.obstacles):
            raise ModelError("obstacle outside the grid")

    def to_dict(self):
        return {
            "nx": self.nx,
            "ny": self.ny,
            "obstacles": sorted(self.obstacles),
            "bases": {k: sorted(v) for k, v in sorted(self.bases.items())},
        }

    @classmethod
    def from_dict(cls, d):
        try:
            lay = cls(int(d["nx"]), int(d["ny"]), set(map(int, d.get("obstacles", []))),
                      {k: set(map(int, v)) for k, v in d.get("bases", {}).items()})
        except (KeyError, TypeError, ValueError) as e:
            raise ModelError(f"malformed layout: {e}") from None
        lay.validate()
        return lay


@dataclass
class HexConfig:
    layout: HexLayout
    probs: dict = field(default_factory=lambda: {"FR": 0.8, "BK": 0.7, "TR": 0.9, "TL": 0.9})


def state_id(cell: int, o: str) -> int:
    return cell * 4 + ORIENT.index(o)


def generate_hexworld(cfg: HexConfig | HexLayout) -> MdpstModel:
    if isinstance(cfg, HexLayout):
        cfg = HexConfig(cfg)
    lay = cfg.layout
    lay.validate()
    for a, p in cfg.probs.items():
        if not 0 < p <= 1:
            raise ModelError(f"success probability for {a} must lie in (0, 1]")
    nx, ny = lay.nx, lay.ny
    props = sorted(lay.bases) + ["obs"]
    cell_label = {}
    for lab, cells in lay.bases.items():
        for c in cells:
            cell_label.setdefault(c, set()).add(lab)
    for c in lay.obstacles:
        cell_label.setdefault(c, set()).add("obs")

    def target(col, row, d):
        c2, r2 = neighbor(col, row, d)
        if 0 <= c2 < nx and 0 <= r2 < ny:
            return lay.cell(c2, r2)
        return None

    labels, names, trans = [], [], {}
    for cell in range(nx * ny):
        col, row = lay.coords(cell)
        for o in ORIENT:
            s = state_id(cell, o)
            labels.append(cell_label.get(cell, set()))
            names.append(f"q{cell + 1},{o}")
            for ai, (act, facing) in enumerate((("FR", o), ("BK", _OPPOSITE[o]))):
                ps = cfg.probs[act]
                succ, cw, ccw = _moves(facing)
                cells = {t for t in (target(col, row, d) for d in succ) if t is not None}
                if not cells:
                    cells = {cell}
                outs = [SetOutcome(frozenset(state_id(t, o) for t in cells), ps)]
                if ps < 1:
                    for d in (cw, ccw):
                        t = target(col, row, d)
                        t = cell if t is None else t
                        outs.append(SetOutcome(frozenset({state_id(t, o)}), (1 - ps) / 2))
                trans[(s, ai)] = outs
            k = ORIENT.index(o)
            for ai, turn in ((2, 1), (3, -1)):
                ps = cfg.probs[ACTIONS[ai]]
                outs = [SetOutcome(frozenset({state_id(cell, ORIENT[(k + turn) % 4])}), ps)]
                if ps < 1:
                    outs.append(SetOutcome(frozenset({s}), 1 - ps))
                trans[(s, ai)] = outs
    return MdpstModel(props, labels, state_id(0, "N"), ACTIONS, trans, names)


def _bases_reachable(lay: HexLayout) -> bool:
    """Every base cell reachable from cell 0 (facing N) without entering obstacles."""
    m = generate_hexworld(HexConfig(lay))
    blocked = {state_id(c, o) for c in lay.obstacles for o in ORIENT}
    adj = [[] for _ in range(m.n_states)]
    for (s, _), outs in m.transitions.items():
        if s in blocked:
            continue
        for o in outs:
            adj[s].extend(t for t in o.targets if t not in blocked)
    seen = reachable(adj, [m.initial])
    return all(any(state_id(c, o) in seen for o in ORIENT) for cells in lay.bases.values() for c in cells)


def default_layout(nx: int, ny: int, seed: int = 7) -> HexLayout:
    if nx < 6 or ny < 3:
        raise ModelError("grid too small: need nx >= 6 and ny >= 3")
    lay = HexLayout(nx, ny)
    spots = [(1, 1), (nx, 1), (math.ceil(nx / 2), math.ceil(ny / 2)), (1, ny), (nx, ny)]
    for i, (c, r) in enumerate(spots, start=1):
        lay.bases[f"b{i}"] = {lay.cell(c - 1, r - 1)}
    used = set().union(*lay.bases.values())
    rest = [c for c in range(nx * ny) if c not in used]
    k = int(0.08 * len(rest))
    rng = random.Random(seed)
    for _ in range(1000):
        lay.obstacles = set(rng.sample(rest, k))
        if _bases_reachable(lay):
            return lay
    raise ModelError("could not place obstacles without cutting off a base")


def load_layout(path) -> HexLayout:
    with open(path) as f:
        try:
            return HexLayout.from_dict(json.load(f))
        except json.JSONDecodeError as e:
            raise ModelError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None


def persist_avoid_groups(layout: HexLayout):
    """Goal groups {b1,b2}, {b3}, {b4,b5} when all five bases exist."""
    if all(f"b{i}" in layout.bases for i in range(1, 6)):
        return [["b1", "b2"], ["b3"], ["b4", "b5"]]
    return [[b] for b in sorted(layout.bases)]
