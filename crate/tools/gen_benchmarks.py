#!/usr/bin/env python3
"""Generate the bundled benchmark problems (20 per domain).

Output is deterministic: every domain uses its own seeded RNG. Run from the
repository root:

    python3 tools/gen_benchmarks.py
"""

import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "data" / "benchmarks"
COUNT = 20


def problem(name, domain, objects, init, goal):
    lines = [f"(define (problem {name})", f"  (:domain {domain})"]
    lines.append("  (:objects")
    for names, ty in objects:
        lines.append(f"    {' '.join(names)} - {ty}")
    lines.append("  )")
    lines.append("  (:init")
    for fact in init:
        lines.append(f"    {fact}")
    lines.append("  )")
    if len(goal) == 1:
        lines.append(f"  (:goal {goal[0]})")
    else:
        lines.append("  (:goal (and")
        for g in goal:
            lines.append(f"    {g}")
        lines.append("  ))")
    lines.append(")")
    return "\n".join(lines) + "\n"


def random_towers(rng, blocks):
    order = blocks[:]
    rng.shuffle(order)
    towers = []
    for b in order:
        if towers and rng.random() < 0.5:
            rng.choice(towers).append(b)
        else:
            towers.append([b])
    return towers


def tower_facts(towers):
    facts = []
    for t in towers:
        facts.append(f"(ontable {t[0]})")
        for below, above in zip(t, t[1:]):
            facts.append(f"(on {above} {below})")
        facts.append(f"(clear {t[-1]})")
    return facts


def blocksworld(rng, i):
    n = 3 + (i * 4) // COUNT  # 3..6 blocks
    blocks = [f"b{k}" for k in range(1, n + 1)]
    init = tower_facts(random_towers(rng, blocks)) + ["(handempty)"]
    goal_towers = random_towers(rng, blocks)
    goal = [f for f in tower_facts(goal_towers) if f.startswith("(on ")]
    if not goal:
        goal = [f"(ontable {blocks[0]})"]
    return problem(f"blocksworld-p{i + 1:02d}", "blocksworld", [(blocks, "block")], sorted(init), goal)


def grippers(rng, i):
    balls = [f"ball{k}" for k in range(1, 1 + 1 + (i * 4) // COUNT)]  # 1..4 balls
    rooms = [f"room{c}" for c in "abc"[: 2 + (i % 2)]]
    robots = ["robot1"] if i < 14 else ["robot1", "robot2"]
    grippers_ = ["left", "right"]
    init = []
    for r in robots:
        init.append(f"(at-robby {r} {rng.choice(rooms)})")
        for g in grippers_:
            init.append(f"(free {r} {g})")
    for b in balls:
        init.append(f"(at {b} {rng.choice(rooms)})")
    goal = [f"(at {b} {rng.choice(rooms)})" for b in balls]
    objects = [(robots, "robot"), (rooms, "room"), (balls, "ball"), (grippers_, "gripper")]
    return problem(f"grippers-p{i + 1:02d}", "grippers", objects, sorted(init), goal)


def barman(rng, i):
    ingredients = ["ingredient1", "ingredient2", "ingredient3"]
    cocktails = ["cocktail1", "cocktail2"]
    shots = [f"shot{k}" for k in range(1, 3 + (i % 2))]
    levels = ["l0", "l1", "l2"]
    init = [
        "(ontable shaker1)",
        "(handempty left)",
        "(handempty right)",
        "(empty shaker1)",
        "(clean shaker1)",
        "(shaker-empty-level shaker1 l0)",
        "(shaker-level shaker1 l0)",
        "(next l0 l1)",
        "(next l1 l2)",
    ]
    for s in shots:
        init += [f"(ontable {s})", f"(empty {s})", f"(clean {s})"]
    for k, ing in enumerate(ingredients, 1):
        init.append(f"(dispenses dispenser{k} {ing})")
    parts = rng.sample(ingredients, 2)
    init += [f"(cocktail-part1 cocktail1 {parts[0]})", f"(cocktail-part2 cocktail1 {parts[1]})"]
    parts2 = rng.sample(ingredients, 2)
    init += [f"(cocktail-part1 cocktail2 {parts2[0]})", f"(cocktail-part2 cocktail2 {parts2[1]})"]
    if i < 10:
        goal = [f"(contains {s} {rng.choice(ingredients)})" for s in shots[: 1 + i % 2]]
    else:
        goal = [f"(contains shot1 {rng.choice(cocktails)})"]
    objects = [
        (["left", "right"], "hand"),
        (levels, "level"),
        (["dispenser1", "dispenser2", "dispenser3"], "dispenser"),
        (ingredients, "ingredient"),
        (cocktails, "cocktail"),
        (shots, "shot"),
        (["shaker1"], "shaker"),
    ]
    return problem(f"barman-p{i + 1:02d}", "barman", objects, sorted(init), goal)


def floortile(rng, i):
    rows = 2 + (i % 3 == 2)
    cols = 2 + (i >= 10)
    tiles = [[f"tile_{r}-{c}" for c in range(1, cols + 1)] for r in range(rows)]
    flat = [t for row in tiles for t in row]
    init = ["(available-color white)", "(available-color black)"]
    for r in range(rows):
        for c in range(cols):
            if r + 1 < rows:
                init.append(f"(up {tiles[r + 1][c]} {tiles[r][c]})")
                init.append(f"(down {tiles[r][c]} {tiles[r + 1][c]})")
            if c + 1 < cols:
                init.append(f"(right {tiles[r][c + 1]} {tiles[r][c]})")
                init.append(f"(left {tiles[r][c]} {tiles[r][c + 1]})")
    start = rng.choice(tiles[0])
    init.append(f"(robot-at robot1 {start})")
    init.append(f"(robot-has robot1 {rng.choice(['white', 'black'])})")
    for t in flat:
        if t != start:
            init.append(f"(clear {t})")
    # Paint some tiles of the top row; they are reachable from the row below.
    targets = rng.sample(tiles[-1], 1 + (i % 2))
    goal = [f"(painted {t} {rng.choice(['white', 'black'])})" for t in sorted(targets)]
    objects = [(["robot1"], "robot"), (flat, "tile"), (["white", "black"], "color")]
    return problem(f"floortile-p{i + 1:02d}", "floortile", objects, sorted(init), goal)


def storage(rng, i):
    n = 1 + (i * 3) // COUNT  # 1..3 crates
    depot_areas = [f"depot0-{k}" for k in range(1, n + 2)]
    container_areas = [f"container0-{k}" for k in range(1, n + 1)]
    crates = [f"crate{k}" for k in range(n)]
    init = ["(at hoist0 depot0-1)", "(available hoist0)"]
    for a in depot_areas:
        init.append(f"(in {a} depot0)")
        if a != "depot0-1":
            init.append(f"(clear {a})")
    for a, b in zip(depot_areas, depot_areas[1:]):
        init += [f"(connected {a} {b})", f"(connected {b} {a})"]
    init += ["(connected depot0-1 loadarea)", "(connected loadarea depot0-1)"]
    for a in container_areas:
        init += [f"(in {a} container0)", f"(connected {a} loadarea)", f"(connected loadarea {a})"]
    for c, a in zip(crates, container_areas):
        init += [f"(on {c} {a})", f"(in {c} container0)"]
    goal = [f"(in {c} depot0)" for c in crates]
    objects = [
        (["hoist0"], "hoist"),
        (["container0"], "container"),
        (["depot0"], "depot"),
        (depot_areas + container_areas, "storearea"),
        (["loadarea"], "transitarea"),
        (crates, "crate"),
    ]
    rng.random()
    return problem(f"storage-p{i + 1:02d}", "storage", objects, sorted(init), goal)


def termes(rng, i):
    cols = 2 + (i % 2)
    positions = [f"pos-{r}-{c}" for r in range(2) for c in range(cols)]
    numbs = ["n0", "n1", "n2"]
    init = ["(succ n1 n0)", "(succ n2 n1)", "(at pos-0-0)", "(is-depot pos-0-0)"]
    for p in positions:
        init.append(f"(height {p} n0)")
    for r in range(2):
        for c in range(cols):
            for dr, dc in ((0, 1), (1, 0)):
                r2, c2 = r + dr, c + dc
                if r2 < 2 and c2 < cols:
                    init.append(f"(neighbor pos-{r}-{c} pos-{r2}-{c2})")
                    init.append(f"(neighbor pos-{r2}-{c2} pos-{r}-{c})")
    target = rng.choice([p for p in positions if p != "pos-0-0"])
    height = "n1" if i < 12 else "n2"
    goal = [f"(height {target} {height})", "(at pos-0-0)", "(not (has-block))"]
    objects = [(numbs, "numb"), (positions, "position")]
    return problem(f"termes-p{i + 1:02d}", "termes", objects, sorted(init), goal)


def tyreworld(rng, i):
    init = [
        "(in jack1 boot)",
        "(in pump1 boot)",
        "(in wrench1 boot)",
        "(unlocked boot)",
        "(intact wheel2)",
        "(in wheel2 boot)",
        "(not-inflated wheel2)",
        "(on wheel1 hub1)",
        "(on-ground hub1)",
        "(tight nuts1 hub1)",
        "(fastened hub1)",
    ]
    init.append("(closed boot)" if rng.random() < 0.5 or i < 5 else "(open boot)")
    if i < 7:
        goal = ["(inflated wheel2)"]
    elif i < 14:
        goal = ["(have wheel1)"]
    else:
        goal = ["(on wheel2 hub1)", "(inflated wheel2)"]
    objects = [
        (["boot"], "container"),
        (["hub1"], "hub"),
        (["nuts1"], "nut"),
        (["wheel1", "wheel2"], "wheel"),
        (["wrench1"], "wrench"),
        (["jack1"], "jack"),
        (["pump1"], "pump"),
    ]
    return problem(f"tyreworld-p{i + 1:02d}", "tyreworld", objects, sorted(init), goal)


GENERATORS = {
    "barman": barman,
    "blocksworld": blocksworld,
    "floortile": floortile,
    "grippers": grippers,
    "storage": storage,
    "termes": termes,
    "tyreworld": tyreworld,
}


def main():
    for name, gen in GENERATORS.items():
        rng = random.Random(f"{name}-benchmarks")
        out = ROOT / name
        out.mkdir(parents=True, exist_ok=True)
        for i in range(COUNT):
            (out / f"p{i + 1:02d}.pddl").write_text(gen(rng, i))


if __name__ == "__main__":
    main()
