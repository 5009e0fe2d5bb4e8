"""Simulate the three-area survey and print the mission log.

The first survey runs into a strong current, the energy scale is raised, the
remaining plan no longer fits the battery and the vehicle re-plans.
"""

from gtnmc.mission import run_mission, scenario_profile


def main():
    log = run_mission(scenario_profile())
    print(log.text(), end="")
    for cycle, reason, labels in log.plans:
        print(f"plan at cycle {cycle} ({reason}): {' '.join(labels)}")
    print("scales:", " -> ".join(map(str, log.scales)))


if __name__ == "__main__":
    main()
