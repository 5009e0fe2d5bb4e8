"""Solve a small goal task network and show the translated process model."""

from pathlib import Path

from gtnmc.dsl import format_model
from gtnmc.gtn import enumerate_executions, load_problem, solve_gtn, translate_gtn

problem = load_problem(Path(__file__).with_name("delivery.gtn.json"))
print(format_model(translate_gtn(problem)))

res = solve_gtn(problem, "parcels == 0", ("Λ", "max"))
print("plan:", " ".join(res.witness.labels), "value:", res.objective_value)

runs = enumerate_executions(problem, 7)
print(f"{len(runs)} complete executions of at most 7 firings")
