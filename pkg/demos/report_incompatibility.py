"""Reporting near a hostile vessel: impossible until an avoidance manoeuvre is modelled."""

from gtnmc.explorer import check_reaches
from gtnmc.scenarios import report_model

for avoid in (False, True):
    res = check_reaches(report_model(avoid), "auvReport()", "successfulSurvey")
    verdict = "reachable via " + " ".join(res.witness.labels) if res.holds else "unreachable"
    print(f"avoidance={'on ' if avoid else 'off'} successfulSurvey {verdict} ({res.stats.wall_ms:.2f} ms)")
