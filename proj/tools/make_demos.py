#!/usr/bin/env python3
"""Writes the bundled demo manifests and traces into demos/.

Run from the repository root. Output is deterministic; commit the results.
"""
import json
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "demos"

CEREALS = [
    # name, sugar (g), protein (g), calories
    ("All-Bran", 5, 4, 70),
    ("Apple Jacks", 14, 2, 110),
    ("Cheerios", 1, 6, 110),
    ("Cocoa Puffs", 13, 1, 110),
    ("Corn Flakes", 2, 2, 100),
    ("Froot Loops", 13, 2, 110),
    ("Golden Grahams", 9, 1, 110),
    ("Raisin Bran", 12, 3, 120),
    ("Special K", 3, 6, 110),
    ("Wheaties", 3, 3, 100),
]

FLAT = [-math.sqrt(0.5), 0.0, 0.0, math.sqrt(0.5)]  # -90 deg about x: panel normal points up


def pose(pos, rot=None, scale=1.0):
    return {"pos": list(pos), "rot": rot or [0, 0, 0, 1], "scale": scale}


def add(a, b):
    return [round(x + y, 6) for x, y in zip(a, b)]


def grab(t, hand, view, part):
    return {"t": t, "event": "grab", "hand": hand, "target": {"view": view, "part": part}}


def move(t, hand, pos, rot=None):
    return {"t": t, "event": "move", "hand": hand, "pose": pose(pos, rot)}


def release(t, hand):
    return {"t": t, "event": "release", "hand": hand}


def tick(t):
    return {"t": t, "event": "tick"}


def glide(t0, hand, start, delta, steps, rot=None):
    """Evenly spaced moves from start to start + delta."""
    return [move(round(t0 + 0.05 * k, 3), hand, add(start, [d * k / steps for d in delta]), rot)
            for k in range(1, steps + 1)]


def write(name, manifest, events):
    OUT.mkdir(exist_ok=True)
    (OUT / f"{name}.manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    (OUT / f"{name}.trace.jsonl").write_text("".join(json.dumps(e) + "\n" for e in events))


def juxtaposed():
    table = {
        "name": "cereals", "key": "name",
        "columns": [{"name": "name", "kind": "categorical"}, {"name": "sugar", "kind": "quantitative"},
                    {"name": "protein", "kind": "quantitative"}, {"name": "calories", "kind": "quantitative"}],
        "rows": [{"name": n, "sugar": s, "protein": p, "calories": c} for n, s, p, c in CEREALS],
    }
    view = {"id": "scatter", "chart": "scatterplot", "table": "cereals",
            "encodings": {"x": "protein", "y": "sugar"},
            "halfExtents": [0.5, 0.4, 0.01], "pose": pose([0, 1.2, -0.5])}
    # y handle sits at local (-hx, hy); x handle at (hx, -hy).
    y_handle = [-0.5, 1.6, -0.5]
    x_handle = [0.5, 0.8, -0.5]
    events = [grab(0.0, "right", "scatter", "axis-y-handle")]
    events += glide(0.0, "right", y_handle, [0, 0.8, 0], 4)  # two bin steps: three rows of panels
    events += [release(0.25, "right"), grab(0.5, "left", "scatter", "axis-x-handle")]
    events += glide(0.5, "left", x_handle, [0.5, 0, 0], 4)  # one bin step: two columns
    events += [release(0.75, "left")]
    write("juxtaposed", {"tables": [table], "views": [view]}, events)


def integrated():
    sugar = {
        "name": "sugar", "key": "name",
        "columns": [{"name": "name", "kind": "categorical"}, {"name": "sugar", "kind": "quantitative"}],
        "rows": [{"name": n, "sugar": s} for n, s, _, _ in CEREALS],
    }
    energy = {
        "name": "energy", "key": "name",
        "columns": [{"name": "name", "kind": "categorical"}, {"name": "calories", "kind": "quantitative"}],
        "rows": [{"name": n, "calories": c} for n, _, _, c in CEREALS],
    }
    views = [
        {"id": "bars", "chart": "barchart", "table": "sugar", "encodings": {"y": "sugar", "label": "name"},
         "halfExtents": [0.4, 0.3, 0.01], "pose": pose([-0.6, 1.2, -0.5])},
        {"id": "line", "chart": "linechart", "table": "energy", "encodings": {"y": "calories"},
         "halfExtents": [0.4, 0.3, 0.01], "pose": pose([1.5, 1.2, -0.5])},
    ]
    start = [1.1, 1.2, -0.5]  # left edge of the line chart
    events = [grab(0.0, "left", "line", "body")]
    events += glide(0.0, "left", start, [-1.0, 0, 0], 10)  # ends with a 0.1 m gap
    events += [tick(0.55), release(0.6, "left")]
    write("integrated", {"tables": [sugar, energy], "views": views}, events)


STATES = [
    # key, density, cell (col, row) in a 3x2 grid
    ("AL", 99, (0, 0)), ("FL", 401, (1, 0)), ("GA", 185, (2, 0)),
    ("NC", 214, (0, 1)), ("SC", 170, (1, 1)), ("TN", 167, (2, 1)),
]


def superimposed():
    regions = []
    for key, _, (c, r) in STATES:
        x0, y0 = -0.6 + 0.4 * c, -0.5 + 0.5 * r
        # A notched quad so centroids differ from box centers.
        regions.append({"key": key, "polygon": [[x0 + 0.02, y0 + 0.02], [x0 + 0.38, y0 + 0.02],
                                                [x0 + 0.38, y0 + 0.48], [x0 + 0.12, y0 + 0.48]]})
    states = {
        "name": "states", "key": "state",
        "columns": [{"name": "state", "kind": "categorical"}, {"name": "area", "kind": "quantitative"}],
        "rows": [{"state": k, "area": a} for k, a in
                 [("AL", 52420), ("FL", 65758), ("GA", 59425), ("NC", 53819), ("SC", 32020), ("TN", 42144)]],
    }
    density = {
        "name": "density", "key": "state",
        "columns": [{"name": "state", "kind": "categorical"}, {"name": "density", "kind": "quantitative"}],
        "rows": [{"state": k, "density": d} for k, d, _ in STATES],
    }
    views = [
        {"id": "map", "chart": "map", "table": "states", "encodings": {"regions": regions},
         "halfExtents": [0.6, 0.5, 0.01], "pose": pose([0, 1.0, -0.6], FLAT)},
        {"id": "bars", "chart": "barchart", "table": "density", "encodings": {"y": "density"},
         "halfExtents": [0.3, 0.2, 0.01], "pose": pose([1.5, 1.4, -0.6])},
    ]
    start = [1.2, 1.4, -0.6]
    events = [grab(0.0, "left", "bars", "body")]
    events += glide(0.0, "left", start, [-1.5, -0.25, 0], 10)  # bar bottoms dip into the map plane
    events += [release(0.55, "left")]
    write("superimposed", {"tables": [states, density], "views": views}, events)


def overloaded():
    rng = random.Random(7)
    rows = []
    for i in range(30):
        weight = rng.uniform(1.6, 4.8)
        hp = 40 + 45 * weight + rng.uniform(-20, 20)
        mpg = 52 - 7.5 * weight + rng.uniform(-3, 3)
        accel = 24 - 0.04 * hp + rng.uniform(-1.5, 1.5)
        rows.append({"car": f"car{i:02d}", "mpg": round(mpg, 1), "hp": round(hp), "weight": round(weight, 2),
                     "accel": round(accel, 1)})
    cars = {
        "name": "cars", "key": "car",
        "columns": [{"name": "car", "kind": "categorical"}] +
                   [{"name": c, "kind": "quantitative"} for c in ("mpg", "hp", "weight", "accel")],
        "rows": rows,
    }
    views = [{"id": "pcp", "chart": "pcp", "table": "cars", "encodings": {"axes": ["mpg", "hp", "weight", "accel"]},
              "halfExtents": [0.6, 0.4, 0.01], "pose": pose([0, 1.2, -0.6])}]
    # Axes sit at local x = -0.6, -0.2, 0.2, 0.6; opening axes 1 and 2 by 0.15 m each spreads that pair.
    events = [grab(0.0, "left", "pcp", "pcp-axis:1"), grab(0.0, "right", "pcp", "pcp-axis:2")]
    for k in range(1, 4):
        t = round(0.05 * k, 3)
        events += [move(t, "left", [-0.2 - 0.05 * k, 1.2, -0.6]), move(t, "right", [0.2 + 0.05 * k, 1.2, -0.6])]
    events += [release(0.2, "left"), release(0.2, "right")]
    # The spawned scatterplot pcp.sppc1 appears below the region at (0, 0.59, -0.6) with half size 0.14.
    start = [-0.14, 0.59, -0.6]
    events += [grab(0.4, "left", "pcp.sppc1", "body")]
    events += glide(0.4, "left", start, [0, 0.61, 0], 6)
    events += [release(0.75, "left")]
    write("overloaded", {"tables": [cars], "views": views}, events)


def nested():
    players = {
        "name": "players", "key": "id",
        "columns": [{"name": "id", "kind": "categorical"}, {"name": "name", "kind": "categorical"}],
        "rows": [{"id": f"p{i}", "name": n} for i, n in
                 enumerate(["Kim", "Lee", "Park", "Choi", "Jung", "Kang"], start=1)],
    }
    stats = {
        "name": "stats", "key": "id",
        "columns": [{"name": "id", "kind": "categorical"}] +
                   [{"name": c, "kind": "quantitative"} for c in ("strength", "agility", "endurance", "intelligence")],
        "rows": [{"id": f"p{i}", "strength": s, "agility": a, "endurance": e, "intelligence": n}
                 for i, (s, a, e, n) in enumerate([(8, 6, 7, 5), (6, 9, 5, 7), (9, 7, 8, 6), (5, 8, 6, 9),
                                                   (7, 5, 9, 8)], start=1)],
    }
    nodes = [{"key": "p1", "pos": [-0.5, 0.3]}, {"key": "p2", "pos": [0.5, 0.3]}, {"key": "p3", "pos": [0.0, 0.0]},
             {"key": "p4", "pos": [-0.5, -0.3]}, {"key": "p5", "pos": [0.5, -0.3]}, {"key": "p6", "pos": [0.0, 0.45]}]
    edges = [["p1", "p3"], ["p2", "p3"], ["p3", "p4"], ["p3", "p5"], ["p1", "p6"], ["p2", "p6"]]
    views = [
        {"id": "graph", "chart": "graph", "table": "players",
         "encodings": {"nodes": nodes, "edges": edges, "nodeRadius": 0.12, "label": "name"},
         "halfExtents": [0.8, 0.6, 0.01], "pose": pose([0, 1.2, -0.6])},
        {"id": "stack", "chart": "stackedbar", "table": "stats",
         "encodings": {"stack": ["strength", "agility", "endurance", "intelligence"]},
         "halfExtents": [0.4, 0.3, 0.01], "pose": pose([2.0, 1.2, -0.6])},
    ]
    # p6 has no stats row, so the tables are not in bijection; the relationship is declared.
    relationships = [{"a": "players", "b": "stats", "kind": "item-group", "aKey": "id", "bKey": "id"}]
    # Bar p3 is the middle of five (local x = 0); its stack is 30 of 30 at most, so the box
    # center is at local y = 0 and the grab point at the view center.
    start = [2.0, 1.2, -0.6]
    events = [grab(0.0, "right", "stack", "element:p3")]
    events += glide(0.0, "right", start, [-2.0, 0, 0], 10)  # the mini chart detaches after 0.2 m
    events += [release(0.55, "right")]
    write("nested", {"tables": [players, stats], "relationships": relationships, "views": views}, events)


if __name__ == "__main__":
    juxtaposed()
    integrated()
    superimposed()
    overloaded()
    nested()
