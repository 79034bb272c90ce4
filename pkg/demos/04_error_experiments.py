"""Monte-Carlo error studies: how localization error scales.

Three seeded protocols over the shipped double-gyre fixture:

  1. error vs observation length (5 lengths x 50 runs, deterministic prior)
  2. error by long-term region of the deployment cell (T = 40, 20 runs each)
  3. deterministic vs probabilistic prior (T = 50, 50 runs each)

Each run simulates the chain, decodes the compass history, and measures the
final-location and whole-trajectory errors in cell units.  Identical seeds
reproduce identical reports byte for byte.
"""

from pathlib import Path

from driftloc import ExperimentConfig, run_experiment

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "double_gyre_21x29.field"


def show(title, result):
    print(f"--- {title} ---")
    print(f"{'T':>5} {'mode':>14} {'region':>8} {'final':>8} {'trajectory':>11}")
    for row in result.summary:
        print(f"{row['T']:>5} {row['mode']:>14} {row['region'] or '-':>8} "
              f"{row['final_mean']:>8.2f} {row['traj_mean']:>11.2f}")
    print()


base = dict(field={"path": str(FIXTURE)}, r=0.9)

show("error vs observation length", run_experiment(ExperimentConfig(
    **base, modes=("deterministic",), T_list=(20, 40, 60, 80, 100),
    runs=50, base_seed=501,
)))

show("error by deployment region", run_experiment(ExperimentConfig(
    **base, modes=("deterministic",), T_list=(40,), runs=20, base_seed=601,
    group_by_region=True, regions=("B_1", "B_2", "B(1)", "B(2)", "B(1,2)"),
)))

show("deterministic vs probabilistic prior", run_experiment(ExperimentConfig(
    **base, modes=("deterministic", "probabilistic"), T_list=(50,),
    runs=50, base_seed=701,
)))

print("whole-trajectory deviation grows with the observation length, while")
print("the final-location error stays low: the flow structure pins down")
print("where the drifter ends up even when mid-path estimates wander.")
