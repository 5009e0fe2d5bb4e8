"""Models shared by several test modules."""

import random

from gtnmc.dsl.parser import parse_model
from gtnmc.mission import build_mission_model, scaling_profile, verification_profile
from gtnmc.scenarios import REPORT_MODEL, REPORT_WITH_AVOIDANCE_MODEL

# three waypoints on a line, recovery point past the last one
WAYPOINTS = """\
var position[4][2] = [10, 0, 20, 0, 30, 0, 40, 0];
var currentPosition[2] = [0, 0];
var visited[3]:{0..1} = [0(3)];
var energyLevel:{0..1000} = 200;
var recovered:{0..1} = 0;
var Λ = 0;
#define energyRequiredByMeter 1;
#define finalPosition 3;

goto(i) = [visited[i] == 0 && energyLevel >= dist(currentPosition, position[i])] go.i{
    var energyConsumed = dist(currentPosition, position[i]) * energyRequiredByMeter;
    energyLevel -= energyConsumed;
    Λ -= energyConsumed;
    Λ += 50;
    currentPosition[0] = position[i][0];
    currentPosition[1] = position[i][1];
    visited[i] = 1;
} -> Skip;

survey() = (goto(0) <> goto(1) <> goto(2)); (survey() <> Skip);

rendezvous() = [energyLevel >= dist(currentPosition, position[finalPosition])] rend{
    var energyConsumed = dist(currentPosition, position[finalPosition]);
    energyLevel -= energyConsumed;
    Λ -= energyConsumed;
    Λ += 1000;
    currentPosition[0] = position[finalPosition][0];
    currentPosition[1] = position[finalPosition][1];
    recovered = 1;
} -> Skip;

main() = (survey() <> Skip); rendezvous();

#define goal recovered == 1;
#assert main() reaches goal with max(Λ);
#assert main() |= [] energyLevel >= 0;
#assert main() reaches (&& i:{0..2}@(visited[i] == 1)) && recovered == 1;
"""

COUNTER = """\
var x:{0..5} = 0;
P() = inc{x = x + 1;} -> P();
#assert P() |= [] x < 2;
#assert P() reaches x == 3;
"""

CHOICES = """\
var a:{0..3} = 0;
var b:{0..3} = 0;
P() = (left{a = a + 1;} -> Q()) [] (right{b = b + 1;} -> Q());
Q() = [a + b < 3] P() <> Skip;
#assert P() reaches a == 2 && b == 1;
#assert P() deadlockfree;
#assert P() |= [] a + b <= 3;
"""

INTERLEAVE = """\
var x:{0..2} = 0;
var y:{0..2} = 0;
A() = ax{x = x + 1;} -> ax{x = x + 1;} -> Skip;
B() = by{y = y + 1;} -> Skip;
P() = (A() || B()); done{} -> Skip;
#assert P() reaches x == 2 && y == 1;
#assert P() |= [] x + y <= 3;
#assert P() deadlockfree;
"""

CONDITIONALS = """\
var mode:{0..2} = 0;
var n:{0..4} = 0;
P() = if (mode == 0) { set1{mode = 1;} -> P() } else { case { mode == 1: bump{n = n + 1; if (n == 3) { mode = 2; }} -> P(); default: Skip } };
#assert P() reaches mode == 2;
#assert P() |= [] n <= 3;
#assert P() deadlockfree;
"""

CORPUS = {
    "waypoints": WAYPOINTS,
    "counter": COUNTER,
    "choices": CHOICES,
    "interleave": INTERLEAVE,
    "conditionals": CONDITIONALS,
    "report": REPORT_MODEL,
    "report_avoid": REPORT_WITH_AVOIDANCE_MODEL,
}


def corpus_models() -> dict:
    models = {name: parse_model(text, name) for name, text in CORPUS.items()}
    models["mission_verification"] = build_mission_model(verification_profile())
    models["mission_scaling_l2"] = build_mission_model(scaling_profile(2, level=2))
    return models


def random_toy_model(rng: random.Random):
    """Small nondeterministic model over three bounded variables; always terminates or loops finitely."""
    names = ["x", "y", "z"]
    events = []
    for i in range(rng.randint(2, 4)):
        v = rng.choice(names)
        w = rng.choice(names)
        kind = rng.randrange(3)
        if kind == 0:
            body = f"{v} = {rng.randint(0, 3)};"
        elif kind == 1:
            body = f"{v} = ({v} + {rng.randint(1, 2)}) % 4;"
        else:
            body = f"{v} = {w};"
        guard = f"{rng.choice(names)} {rng.choice(['<', '>=', '!=', '=='])} {rng.randint(0, 3)}"
        events.append(f"([{guard}] e{i}{{{body}}} -> P())")
    events.append("Skip" if rng.random() < 0.5 else "(stop{} -> Skip)")
    text = (
        "var x:{0..3} = 0;\nvar y:{0..3} = 0;\nvar z:{0..3} = 0;\n"
        f"P() = {' [] '.join(events)};\n"
    )
    return parse_model(text, "<random>")


_GTN_GUARDS = ["true", "x < 2", "y != 1", "x == y", "x + y <= 2", "y == 0"]
_GTN_TRANSITIONS = ["", "x = (x + 1) % 3;", "y = x;", "x = 2;", "y = (y + 2) % 3;", "x = y; y = 1;"]


def random_gtn_dict(rng: random.Random) -> dict:
    """A random GTN over two small variables; the hierarchy only points to later nodes."""
    n = rng.randint(1, 5)
    nodes = []
    for i in range(n):
        later = [f"n{j}" for j in range(i + 1, n)]
        subs = sorted(rng.sample(later, rng.randint(0, min(2, len(later)))))
        nodes.append({
            "id": f"n{i}",
            "subs": subs,
            "guard": rng.choice(_GTN_GUARDS),
            "transition": rng.choice(_GTN_TRANSITIONS),
        })
    return {
        "variables": ["var x:{0..2} = 0", "var y:{0..2} = 0"],
        "nodes": nodes,
        "root": "n0",
        "initial": {"x": rng.randint(0, 2), "y": rng.randint(0, 2)},
    }


def random_mission_config(rng: random.Random, level: int = 1, max_areas: int = 4):
    """Random survey layout; the battery is sometimes too small for every area."""
    from fractions import Fraction

    from gtnmc.mission import Area, MissionConfig

    waypoints, areas = [], []
    for a in range(rng.randint(1, max_areas)):
        cx, cy = rng.randint(-5000, 5000), rng.randint(-5000, 5000)
        spacing, length = rng.randint(50, 300), rng.randint(200, 1500)
        ids = []
        for k in range(rng.randint(1, 3)):
            x = cx + k * spacing
            ids += [len(waypoints), len(waypoints) + 1]
            waypoints += [(x, cy), (x, cy - length)]
        areas.append(Area(f"A{a}", tuple(ids), rng.randint(0, 20000), critical=rng.random() < 0.2))
    return MissionConfig(
        waypoints, areas,
        start=(rng.randint(-5000, 5000), rng.randint(-5000, 5000)),
        final=(rng.randint(-5000, 5000), rng.randint(-5000, 5000)),
        initial_energy=rng.randint(3000, 40000),
        energy_per_meter=rng.choice([Fraction(1), Fraction(1, 2), Fraction(3, 2), Fraction(2)]),
        level=level,
        seed=rng.randrange(1000),
    )
