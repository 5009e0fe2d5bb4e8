"""Survey-mission world, planning model and the monitor/interpret/evaluate/control loop.

Areas are covered by parallel lanes.  At level 1 the planner only orders the
areas (each abstracted to its centroid); at level 2 it also picks one of four
entry/exit options per area (which lane to start with, and from which end).
Energy costs in the model are scaled by a learned percentage that the loop
updates after every survey from expected versus actual consumption.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from gtnmc.builtins import dist
from gtnmc.dsl import ast as A
from gtnmc.dsl.parser import parse_expr, parse_model
from gtnmc.errors import EnergyExhausted, MissionFailed
from gtnmc.explorer import (
    Accepted,
    Optimal,
    SearchOptions,
    check_reaches_optimal,
    replay,
)
from gtnmc.goals import ConversionFn, CurrencyLedger, GoalSpec, ResourceSpec, wire_currency

ENTRY = A.Call("main")
CURRENCY = "Λ"
SURFACE_COST = 10
EVADE_DISTANCE = 10
HOSTILE_RADIUS_SQ = 9  # surfacing is unsafe within 3 units


# ---------------------------------------------------------------- configuration


@dataclass(frozen=True)
class Area:
    """Survey area: ``waypoints`` holds lane endpoints in order, two per lane."""

    name: str
    waypoints: tuple
    reward: int
    critical: bool = False
    shortcut: bool = False  # coverage completes one lane early

    def lanes(self, points) -> list:
        ids = self.waypoints
        return [(tuple(points[ids[i]]), tuple(points[ids[i + 1]])) for i in range(0, len(ids), 2)]

    def route(self, points, option: int) -> list:
        """Visit order of lane endpoints for an option: bit 0 reverses lane order, bit 1 flips the start end."""
        lanes = self.lanes(points)
        if option & 1:
            lanes = lanes[::-1]
        flip = bool(option & 2)
        out = []
        for i, (a, b) in enumerate(lanes):
            forward = (i % 2 == 0) != flip
            out.extend((a, b) if forward else (b, a))
        return out

    def entry_exit_candidates(self, points) -> list:
        return [(r[0], r[-1]) for r in (self.route(points, k) for k in range(4))]

    def centroid(self, points) -> tuple:
        pts = [points[i] for i in self.waypoints]
        n = len(pts)
        return (_round_div(sum(p[0] for p in pts), n), _round_div(sum(p[1] for p in pts), n))


def _round_div(a: int, b: int) -> int:
    return (2 * a + b) // (2 * b)


def path_length(route: list) -> int:
    return sum(dist(route[i][0], route[i][1], route[i + 1][0], route[i + 1][1]) for i in range(len(route) - 1))


@dataclass
class MissionConfig:
    waypoints: list
    areas: list
    start: tuple
    final: tuple
    initial_energy: int
    energy_per_meter: Fraction = Fraction(1)
    current_probability: Fraction = Fraction(1, 5)
    current_end_probability: Fraction = Fraction(1, 5)
    current_multiplier: Fraction = Fraction(2)
    seed: int = 0
    level: int = 2
    obstacles: list = field(default_factory=list)
    hostile: Optional[tuple] = None
    friendly_in_range: bool = False
    rendezvous_reward: Optional[int] = None
    obstacle_guard: bool = True

    def __post_init__(self):
        self.waypoints = [tuple(int(c) for c in p) for p in self.waypoints]
        self.areas = [a if isinstance(a, Area) else _area_from_dict(a) for a in self.areas]
        self.start = tuple(int(c) for c in self.start)
        self.final = tuple(int(c) for c in self.final)
        self.obstacles = [tuple(int(c) for c in p) for p in self.obstacles]
        if self.hostile is not None:
            self.hostile = tuple(int(c) for c in self.hostile)
        for name in ("energy_per_meter", "current_probability", "current_end_probability", "current_multiplier"):
            setattr(self, name, Fraction(str(getattr(self, name))))
        if not (0 <= self.current_probability <= 1 and 0 <= self.current_end_probability <= 1):
            raise ValueError("probabilities must lie in [0, 1]")
        if self.level not in (1, 2):
            raise ValueError("level must be 1 or 2")
        for a in self.areas:
            if a.reward < 0:
                raise ValueError(f"area {a.name}: negative reward")
            if not a.waypoints or len(a.waypoints) % 2:
                raise ValueError(f"area {a.name}: waypoints must come in lane pairs")
            if any(not 0 <= i < len(self.waypoints) for i in a.waypoints):
                raise ValueError(f"area {a.name}: unknown waypoint id")

    @property
    def rendezvous_bonus(self) -> int:
        if self.rendezvous_reward is not None:
            return self.rendezvous_reward
        return 10 * (sum(a.reward for a in self.areas) + 1)

    def area_index(self, name: str) -> int:
        for i, a in enumerate(self.areas):
            if a.name == name:
                return i
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "waypoints": [list(p) for p in self.waypoints],
            "areas": [
                {"name": a.name, "waypoints": list(a.waypoints), "reward": a.reward, "critical": a.critical,
                 "shortcut": a.shortcut}
                for a in self.areas
            ],
            "start": list(self.start),
            "final": list(self.final),
            "initial_energy": self.initial_energy,
            "energy_per_meter": str(self.energy_per_meter),
            "current_probability": str(self.current_probability),
            "current_end_probability": str(self.current_end_probability),
            "current_multiplier": str(self.current_multiplier),
            "seed": self.seed,
            "level": self.level,
            "obstacles": [list(p) for p in self.obstacles],
            "hostile": list(self.hostile) if self.hostile else None,
            "friendly_in_range": self.friendly_in_range,
            "rendezvous_reward": self.rendezvous_reward,
        }


def _area_from_dict(d: dict) -> Area:
    return Area(d["name"], tuple(d["waypoints"]), int(d["reward"]), bool(d.get("critical", False)),
                bool(d.get("shortcut", False)))


def config_from_dict(d: dict) -> MissionConfig:
    d = dict(d)
    d.pop("obstacle_guard", None)
    return MissionConfig(**d)


def load_config(path) -> MissionConfig:
    with open(path, encoding="utf-8") as f:
        return config_from_dict(json.load(f))


# ---------------------------------------------------------------- world state


@dataclass(frozen=True)
class WorldState:
    position: tuple
    energy: int
    coverage: tuple  # Fraction per area
    current: bool = False
    legs: int = 0
    scale: int = 100
    recovered: bool = False

    @property
    def visited(self) -> tuple:
        return tuple(int(c >= 1) for c in self.coverage)


def initial_world(config: MissionConfig) -> WorldState:
    return WorldState(config.start, config.initial_energy, tuple(Fraction(0) for _ in config.areas))


def step_environment(world: WorldState, distance: int, rng: random.Random,
                     config: MissionConfig) -> WorldState:
    """Advance one leg: update the current, then pay for the distance travelled."""
    if distance < 0:
        raise ValueError("leg distance must be non-negative")
    if distance == 0:
        return replace(world, legs=world.legs + 1)
    u = rng.random()
    if world.current:
        current = not u < config.current_end_probability
    else:
        current = u < config.current_probability
    factor = config.energy_per_meter * (config.current_multiplier if current else 1)
    used = (distance * factor).__floor__()
    if used > world.energy:
        raise EnergyExhausted(used, world.energy)
    return replace(world, energy=world.energy - used, current=current, legs=world.legs + 1)


def round_half_up(x: Fraction) -> int:
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def update_energy_scale(scale: int, expected: int, actual: int) -> int:
    """New consumption scale (percent) from one expected/actual pair, rounded half up."""
    if expected <= 0:
        raise ValueError("expected consumption must be positive")
    return round_half_up(Fraction(scale * actual, expected))


# ---------------------------------------------------------------- model


def cost_factor(config: MissionConfig, scale: int) -> Fraction:
    return config.energy_per_meter * scale / 100


def survey_options(config: MissionConfig, a: int) -> list:
    """``(target, exit, mowing length)`` per option of an area at the configured level."""
    area = config.areas[a]
    pts = config.waypoints
    if config.level == 1:
        c = area.centroid(pts)
        return [(c, c, path_length(area.route(pts, 0)))]
    return [(r[0], r[-1], path_length(r)) for r in (area.route(pts, k) for k in range(4))]


def survey_label(config: MissionConfig, a: int, k: int) -> str:
    return f"survey.{a}" if config.level == 1 else f"survey.{a}.{k}"


def parse_survey_label(label: str) -> tuple:
    parts = label.split(".")
    return int(parts[1]), int(parts[2]) if len(parts) > 2 else 0


def expected_cost(config: MissionConfig, scale: int, position: tuple, target: tuple, extra: int = 0) -> int:
    d = dist(position[0], position[1], target[0], target[1])
    f = cost_factor(config, scale)
    return (d + extra) * f.numerator // f.denominator


def _not_obstacle(config: MissionConfig, x: int, y: int) -> str:
    if not config.obstacles or not config.obstacle_guard:
        return "true"
    n = len(config.obstacles)
    return f"(&& index:{{0..{n - 1}}}@(obstacles[index][0] != {x} || obstacles[index][1] != {y}))"


def _cost_expr(x: int, y: int, extra: int, f: Fraction) -> str:
    return f"((dist(auvPosition[0], auvPosition[1], {x}, {y}) + {extra}) * {f.numerator}) / {f.denominator}"


def mission_goal(config: MissionConfig) -> str:
    parts = ["recovered == 1"]
    parts += [f"visited[{i}] == 1" for i, a in enumerate(config.areas) if a.critical]
    if config.hostile is not None:
        parts.append("auvCom == 1")
    return " && ".join(parts)


def mission_ledger(config: MissionConfig) -> CurrencyLedger:
    events = ("survey", "rendezvous", "comS", "evade")
    energy = ResourceSpec("energy", "energyLevel", ConversionFn.power(1, 1), events)
    goals = [
        GoalSpec(a.name, f"visited[{i}] == 1", a.reward, a.critical, f"survey.{i}")
        for i, a in enumerate(config.areas)
    ]
    goals.append(GoalSpec("rendezvous", "recovered == 1", config.rendezvous_bonus, True, "rendezvous"))
    return CurrencyLedger(CURRENCY, [energy], goals)


def mission_model_text(config: MissionConfig, world: Optional[WorldState] = None) -> str:
    """Source of the planning model for the given world state (before currency wiring)."""
    world = world or initial_world(config)
    f = cost_factor(config, world.scale)
    n = len(config.areas)
    bound = max(config.initial_energy, world.energy)
    px, py = world.position
    lines = [
        f"var auvPosition[2] = [{px}, {py}];",
        f"var visited[{n}]:{{0..1}} = [{', '.join(map(str, world.visited))}];",
        f"var energyLevel:{{{-bound}..{bound}}} = {world.energy};",
        "var recovered:{0..1} = 0;",
        f"var {CURRENCY} = 0;",
    ]
    if config.obstacles:
        flat = ", ".join(f"{x}, {y}" for x, y in config.obstacles)
        lines.append(f"var obstacles[{len(config.obstacles)}][2] = [{flat}];")
        lines.append(f"#define iNumberOfObstacles {len(config.obstacles)};")
        lines.append("#define dontRunIntoObstacle (&& index:{0..iNumberOfObstacles-1}@"
                     "(obstacles[index][0] != auvPosition[0] || obstacles[index][1] != auvPosition[1]));")
    if config.hostile is not None:
        hx, hy = config.hostile
        lines += [
            f"var hvPosition[2] = [{hx}, {hy}];",
            f"var fvInRange:{{0..1}} = {int(config.friendly_in_range)};",
            "var auvCom:{0..1} = 0;",
            "var hvContact:{0..1} = 0;",
            "var surfaced:{0..1} = 0;",
            "var surfacedAt[2] = [0, 0];",
            "#define hostileInRange ((auvPosition[0] - hvPosition[0]) ^ 2 + (auvPosition[1] - hvPosition[1]) ^ 2"
            f" <= {HOSTILE_RADIUS_SQ});",
            "#define safeSurfacing (surfaced == 0 || (surfacedAt[0] - hvPosition[0]) ^ 2 + "
            f"(surfacedAt[1] - hvPosition[1]) ^ 2 > {HOSTILE_RADIUS_SQ});",
        ]
    lines.append("#define energyNonNegative energyLevel >= 0;")

    survey_calls = []
    for a in range(n):
        option_calls = []
        for k, (target, exit_, mow) in enumerate(survey_options(config, a)):
            cost = _cost_expr(target[0], target[1], mow, f)
            name = f"survey_{a}_{k}"
            lines.append(
                f"{name}() = [visited[{a}] == 0 && energyLevel >= {cost} && {_not_obstacle(config, *exit_)}] "
                f"{survey_label(config, a, k)}{{ var energyConsumed = {cost}; energyLevel -= energyConsumed; "
                f"auvPosition[0] = {exit_[0]}; auvPosition[1] = {exit_[1]}; visited[{a}] = 1; }} -> Skip;"
            )
            option_calls.append(f"{name}()")
        lines.append(f"survey_{a}() = {' <> '.join(option_calls)};")
        survey_calls.append(f"survey_{a}()")
    lines.append(f"mission() = ({' <> '.join(survey_calls)}); (mission() <> Skip);")

    fx, fy = config.final
    cost = _cost_expr(fx, fy, 0, f)
    lines.append(
        f"rendezvous() = [energyLevel >= {cost} && {_not_obstacle(config, fx, fy)}] "
        f"rendezvous{{ var energyConsumed = {cost}; energyLevel -= energyConsumed; "
        f"auvPosition[0] = {fx}; auvPosition[1] = {fy}; recovered = 1; }} -> Skip;"
    )
    if config.hostile is not None:
        ev = _cost_expr(px, py, 0, f).replace(f"dist(auvPosition[0], auvPosition[1], {px}, {py})",
                                                str(EVADE_DISTANCE))
        sc = (SURFACE_COST * f.numerator) // f.denominator
        lines += [
            "auvAcousticCom() = [fvInRange == 1] comFV{auvCom = 1;} -> Skip;",
            f"auvSurfaceCom() = [fvInRange == 0 && !hostileInRange && energyLevel >= {sc}] "
            f"comS{{ energyLevel -= {sc}; surfaced = 1; surfacedAt[0] = auvPosition[0]; "
            "surfacedAt[1] = auvPosition[1]; auvCom = 1; if (hostileInRange) { hvContact = 1; } } -> Skip;",
            f"auvAvoidContact() = [hostileInRange && energyLevel >= {ev}] "
            f"evade{{ energyLevel -= {ev}; auvPosition[1] = auvPosition[1] + {EVADE_DISTANCE}; }} -> auvReport();",
            "auvReport() = auvAcousticCom() [] auvSurfaceCom() [] auvAvoidContact();",
            "main() = (mission() <> Skip); auvReport(); rendezvous();",
        ]
    else:
        lines.append("main() = (mission() <> Skip); rendezvous();")
    lines.append(f"#assert main() reaches {mission_goal(config)} with max({CURRENCY});")
    lines.append("#assert main() |= [] energyNonNegative;")
    if config.obstacles:
        lines.append("#assert main() |= [] dontRunIntoObstacle;")
    if config.hostile is not None:
        lines.append("#assert main() |= [] safeSurfacing;")
    return "\n".join(lines) + "\n"


def build_mission_model(config: MissionConfig, world: Optional[WorldState] = None) -> A.Model:
    """Planning model with energy guards, currency costs and survey rewards wired in."""
    model = parse_model(mission_model_text(config, world), "<mission>")
    return wire_currency(model, mission_ledger(config))


def plan_mission(config: MissionConfig, world: Optional[WorldState] = None,
                 options: Optional[SearchOptions] = None, model: Optional[A.Model] = None):
    model = model or build_mission_model(config, world)
    return check_reaches_optimal(model, ENTRY, parse_expr(mission_goal(config)), CURRENCY, "max", options)


# ---------------------------------------------------------------- simulation loop


@dataclass
class LogRecord:
    cycle: int
    phase: str
    fields: dict

    def line(self) -> str:
        body = " ".join(f"{k}={_fmt(v)}" for k, v in self.fields.items())
        return f"{self.cycle:03d} {self.phase} {body}".rstrip()


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v) or "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


@dataclass
class MissionLog:
    records: list = field(default_factory=list)
    scales: list = field(default_factory=lambda: [100])
    plans: list = field(default_factory=list)  # (cycle, reason, labels)
    outcome: str = ""
    world: Optional[WorldState] = None

    def add(self, cycle: int, phase: str, **fields):
        self.records.append(LogRecord(cycle, phase, fields))

    def replans(self) -> list:
        return [p for p in self.plans if p[1] != "initial"]

    def text(self) -> str:
        return "\n".join(r.line() for r in self.records) + "\n"


def _describe(config: MissionConfig, labels) -> list:
    out = []
    for label in labels:
        if label.startswith("survey."):
            a, k = parse_survey_label(label)
            out.append(f"{config.areas[a].name}" + (f"/{k}" if config.level == 2 else ""))
        else:
            out.append(label)
    return out


def _pick_option(config: MissionConfig, a: int, position) -> int:
    """Level-1 plans leave the entry open; take the nearest one."""
    area = config.areas[a]
    cands = area.entry_exit_candidates(config.waypoints)
    dists = [dist(position[0], position[1], e[0], e[1]) for e, _ in cands]
    return dists.index(min(dists))


def run_mission(config: MissionConfig, options: Optional[SearchOptions] = None) -> MissionLog:
    """Simulate the mission, re-planning after each survey when the plan no longer holds."""
    rng = random.Random(config.seed)
    log = MissionLog()
    world = initial_world(config)
    cycle = 1
    goal = mission_goal(config)

    def make_plan(reason: str):
        res = plan_mission(config, world, options)
        if not isinstance(res, Optimal):
            log.outcome = "no-plan"
            log.world = world
            log.add(cycle, "plan", reason=reason, result="unreachable")
            raise MissionFailed(f"no plan reaches the mission goal ({reason})", log)
        labels = res.witness.labels
        log.plans.append((cycle, reason, labels))
        log.add(cycle, "plan", reason=reason, plan=_describe(config, labels), value=res.objective_value,
                states=res.stats.states)
        return list(labels)

    plan = make_plan("initial")
    try:
        while plan:
            label = plan.pop(0)
            if label == "rendezvous":
                expected = expected_cost(config, world.scale, world.position, config.final)
                before = world.energy
                d = dist(world.position[0], world.position[1], config.final[0], config.final[1])
                world = step_environment(world, d, rng, config)
                world = replace(world, position=config.final, recovered=True)
                log.add(cycle, "execute", event="rendezvous", expected=expected, actual=before - world.energy,
                        energy=world.energy, current=world.current)
                break
            if not label.startswith("survey."):
                # reporting events only change flags in this simulator
                log.add(cycle, "execute", event=label, energy=world.energy)
                continue
            a, k = parse_survey_label(label)
            area = config.areas[a]
            if config.level == 1:
                target, _, mow = survey_options(config, a)[0]
                expected = expected_cost(config, world.scale, world.position, target, mow)
                k = _pick_option(config, a, world.position)
            else:
                target, _, mow = survey_options(config, a)[k]
                expected = expected_cost(config, world.scale, world.position, target, mow)
            route = area.route(config.waypoints, k)
            n_lanes = len(route) // 2
            stop = len(route) - 2 if area.shortcut and n_lanes > 1 else len(route)
            before = world.energy
            current_legs = 0
            pos = world.position
            for i in range(stop):
                p = route[i]
                world = step_environment(world, dist(pos[0], pos[1], p[0], p[1]), rng, config)
                current_legs += world.current
                pos = p
                if i % 2 == 1:
                    lanes_done = (i + 1) // 2
                    cov = list(world.coverage)
                    cov[a] = Fraction(lanes_done, n_lanes)
                    world = replace(world, coverage=tuple(cov))
            cov = list(world.coverage)
            cov[a] = Fraction(1)
            world = replace(world, position=pos, coverage=tuple(cov))
            actual = before - world.energy
            shortcut = stop < len(route)
            log.add(cycle, "execute", event=label, area=area.name, expected=expected, actual=actual,
                    energy=world.energy, current_legs=current_legs, shortcut=shortcut)
            # interpret: learn the consumption scale from this survey
            new_scale = update_energy_scale(world.scale, expected, actual)
            log.add(cycle, "interpret", scale=f"{world.scale}->{new_scale}")
            world = replace(world, scale=new_scale)
            log.scales.append(new_scale)
            cycle += 1
            # evaluate: does the rest of the plan still reach the goal under the refreshed model?
            model = build_mission_model(config, world)
            verdict = replay(model, ENTRY, plan, goal=parse_expr(goal))
            valid = isinstance(verdict, Accepted)
            reason = "" if valid else f"{verdict.reason}@{verdict.index}"
            log.add(cycle, "evaluate", remaining=_describe(config, plan), valid=valid, **({"why": reason} if reason else {}))
            if shortcut:
                plan = make_plan("coverage-shortcut")
            elif not valid:
                plan = make_plan("plan-invalid")
    except EnergyExhausted as e:
        log.outcome = "energy-exhausted"
        log.world = world
        log.add(cycle, "abort", reason=str(e), energy=world.energy)
        return log
    log.outcome = "recovered" if world.recovered else "incomplete"
    log.world = world
    log.add(cycle, "done", outcome=log.outcome, energy=world.energy, legs=world.legs,
            surveyed=[config.areas[i].name for i, v in enumerate(world.visited) if v],
            scales=log.scales)
    return log


# ---------------------------------------------------------------- untrusted planners


@dataclass
class Vetted:
    plan: tuple
    final: tuple
    vetted = True


@dataclass
class Disabled:
    disabled: frozenset
    reason: str = ""
    vetted = False


def vet_external_plan(model, entry, plan, disabled=frozenset(), goal=None):
    """Accept a proposed plan only if it replays on the verified model (and reaches ``goal``)."""
    plan = tuple(plan)
    if plan in disabled:
        raise ValueError("plan was already disabled")
    verdict = replay(model, entry, plan, goal=goal)
    if isinstance(verdict, Accepted):
        return Vetted(plan, verdict.final)
    return Disabled(frozenset(disabled) | {plan}, f"{verdict.reason}@{verdict.index}")


class GreedyPlanner:
    """Nearest-area-first heuristic; never proposes a disabled plan.

    Candidates are the greedy visiting order and its prefixes (longest first),
    each closed by the rendezvous event.
    """

    def __init__(self, config: MissionConfig, world: Optional[WorldState] = None):
        self.config = config
        self.world = world or initial_world(config)

    def order(self) -> list:
        cfg = self.config
        pos = self.world.position
        todo = [i for i, v in enumerate(self.world.visited) if not v]
        out = []
        while todo:
            best = min(todo, key=lambda i: (self._dist(pos, i), i))
            k = self._option(best, pos)
            out.append((best, k))
            pos = survey_options(cfg, best)[k][1]
            todo.remove(best)
        return out

    def _dist(self, pos, a):
        target = survey_options(self.config, a)[self._option(a, pos)][0]
        return dist(pos[0], pos[1], target[0], target[1])

    def _option(self, a, pos):
        opts = survey_options(self.config, a)
        d = [dist(pos[0], pos[1], t[0], t[1]) for t, _, _ in opts]
        return d.index(min(d))

    def candidates(self):
        order = self.order()
        for n in range(len(order), -1, -1):
            yield tuple(survey_label(self.config, a, k) for a, k in order[:n]) + ("rendezvous",)

    def propose(self, disabled=frozenset()):
        for plan in self.candidates():
            if plan not in disabled:
                return plan
        return None


def vet_greedy(config: MissionConfig, model: Optional[A.Model] = None, planner=None):
    """Propose greedy plans until one is vetted; returns ``(vetted or None, disabled, proposals)``."""
    model = model or build_mission_model(config)
    planner = planner or GreedyPlanner(config)
    goal = parse_expr(mission_goal(config))
    disabled: frozenset = frozenset()
    proposals = []
    while True:
        plan = planner.propose(disabled)
        if plan is None:
            return None, disabled, proposals
        proposals.append(plan)
        res = vet_external_plan(model, ENTRY, plan, disabled, goal)
        if isinstance(res, Vetted):
            return res, disabled, proposals
        disabled = res.disabled


# ---------------------------------------------------------------- shipped layouts


def _lanes(xs, y0, y1) -> list:
    return [((x, y0), (x, y1)) for x in xs]


def _layout(start, final, areas_spec, energy, **kw) -> MissionConfig:
    waypoints, areas = [], []
    for name, lanes, reward, extra in areas_spec:
        ids = []
        for a, b in lanes:
            ids += [len(waypoints), len(waypoints) + 1]
            waypoints += [a, b]
        areas.append(Area(name, tuple(ids), reward, **extra))
    return MissionConfig(waypoints, areas, start, final, energy, **kw)


def scenario_profile(**overrides) -> MissionConfig:
    """Three-area survey with a strong current during the first survey (illustrative coordinates).

    With the default seed the current doubles consumption on every leg inside
    UR, is gone for the transit to LR, returns for LR's first two lanes, and LR
    turns out covered one lane early.
    """
    areas = [
        ("LL", _lanes((2500, 2700, 2900), -2000, -3500), 22807, {}),
        ("UR", _lanes((10000, 10200, 10400), 8000, 5172), 51918, {}),
        ("LR", _lanes((10400, 10197, 9994), -9389, -10000), 31313, {"shortcut": True}),
    ]
    kw = dict(seed=78, level=2)
    kw.update(overrides)
    energy = kw.pop("initial_energy", 60000)
    return _layout((4484, 8000), (6000, -10000), areas, energy, **kw)


def verification_profile(**overrides) -> MissionConfig:
    """Scenario areas at level 1 with obstacles and a hostile vessel near the LR centroid."""
    cfg = scenario_profile(level=1, **overrides)
    lr = cfg.areas[2].centroid(cfg.waypoints)
    cfg.obstacles = [(6000, 0), cfg.areas[0].centroid(cfg.waypoints)]
    cfg.hostile = (lr[0] + 2, lr[1] - 1)
    return cfg


def scaling_profile(n_areas: int, level: int = 1, **overrides) -> MissionConfig:
    """``n_areas`` areas on a ring; used to measure how planning cost grows with area count."""
    if not 1 <= n_areas <= 8:
        raise ValueError("n_areas must be between 1 and 8")
    centres = [(0, 6000), (6000, 6000), (6000, 0), (6000, -6000), (0, -6000), (-6000, -6000), (-6000, 0),
               (-6000, 6000)]
    rewards = [30000, 26000, 24000, 28000, 22000, 25000, 27000, 23000]
    areas = []
    for i in range(n_areas):
        cx, cy = centres[i]
        areas.append((f"A{i}", _lanes((cx - 200, cx, cx + 200), cy + 1000, cy - 1000), rewards[i], {}))
    kw = dict(level=level, current_probability=Fraction(0))
    kw.update(overrides)
    energy = kw.pop("initial_energy", 200000)
    return _layout((0, 0), (0, -1000), areas, energy, **kw)
