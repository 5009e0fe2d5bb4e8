"""Find which goals of a wish list cannot be achieved together."""

from gtnmc.goals import GoalSpec, find_muc
from gtnmc.scenarios import report_model

model = report_model(avoid_contact=True)
goals = [
    GoalSpec("reported", "successfulSurvey"),
    GoalSpec("full battery", "energyLevel == 100"),
    GoalSpec("deep", "auvDepth == 50"),
    GoalSpec("quiet", "hvContact == 0"),
]
core = find_muc(model, "auvReport()", goals, seed=1)
print("incompatible core:", ", ".join(g.name for g in core))
