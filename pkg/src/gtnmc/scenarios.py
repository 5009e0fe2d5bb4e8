"""Small hand-written models: reporting survey results near a hostile vessel."""

from gtnmc.dsl.parser import parse_model

_REPORT_COMMON = """\
var auvCom:{0..1} = 0;
var hvContact:{0..1} = 0;
var auvDepth:{0..100} = 50;
var energyLevel:{0..100} = 100;
var fvInRange:{0..1} = 0;
var hostileInRange:{0..1} = 1;

#define goalCompleteSurvey auvCom == 1;
#define successfulSurvey goalCompleteSurvey && hvContact == 0;

auvAcousticCom() = [fvInRange == 1] comFV{auvCom = 1;} -> auvReport();

// surfacing costs energy, so repeated reports stop when the battery is low
auvSurfaceCom() = [fvInRange == 0 && energyLevel >= 10] comS{
    auvDepth = 0;
    energyLevel -= 10;
    auvCom = 1;
    if (hostileInRange == 1) { hvContact = 1; }
} -> auvReport();
"""

REPORT_MODEL = _REPORT_COMMON + """
auvReport() = auvAcousticCom() [] auvSurfaceCom();

#assert auvReport() reaches successfulSurvey;
"""

REPORT_WITH_AVOIDANCE_MODEL = _REPORT_COMMON + """
auvMove() = [energyLevel >= 10] move{energyLevel -= 10; hostileInRange = 0;} -> Skip;

auvAvoidContact() = case {
    hostileInRange == 1: auvMove(); auvReport()
    default: auvReport()
};

auvReport() = auvAcousticCom() [] auvSurfaceCom() [] auvAvoidContact();

#assert auvReport() reaches successfulSurvey;
"""


def report_model(avoid_contact: bool = False):
    text = REPORT_WITH_AVOIDANCE_MODEL if avoid_contact else REPORT_MODEL
    return parse_model(text, "<report>")
