"""Replay the built-in prolonged-ambiguity case from start to resolution.

A ~90-step scripted stream: ambiguity accumulates around schedule
adherence, guarded communication about future plans, and an unclear IP
boundary. The engine suspends itself and asks; the first answer leaves the
ambiguity standing, the second (an explicit statement of intent) collapses
it. The timeline below shows both suspensions and the refusal discipline
in between.
"""
from ambigraph.scenario import case_study, replay


def main():
    scenario = case_study()
    report = replay(scenario)

    print(f"total steps: {scenario.total_steps}, scripted collapse at t={scenario.collapse_event}")

    print("\ndetections (accepted rogue segments):")
    for t, segment, reduction, persisted in report.detections:
        print(f"  t={t:2d}  {list(segment)}  reduction={reduction:.2f}")

    print("\nsuspension intervals and outcomes:")
    for (opened, closed), resolved, episode in zip(
        report.suspension_intervals, report.resolved_flags, report.episodes
    ):
        outcome = "resolved" if resolved else "left unresolved"
        print(f"  [{opened:2d}, {closed:2d}]  {episode}  {outcome}")

    refused = [t for t in report.refusals]
    print(f"\nprediction calls refused while suspended: {len(refused)} steps")
    print(f"final mode: {report.final_mode}")


if __name__ == "__main__":
    main()
