"""
Does the bound track the actual generalization gap?
===================================================

One network per interior-point budget N_r: train, measure the gap
between training risk and a large fresh-sample estimate of population
risk, evaluate the bound at the trained weights, and correlate the two
columns across the sweep.  Desk-scale settings; expect a strongly
positive Pearson r and a monotonically shrinking bound.
"""

from pinnbound import SweepConfig, TrainConfig, sweep_experiment

cfg = SweepConfig(
    n_r_values=(27, 64, 125, 216),
    n_0=500,
    width=64,
    train=TrainConfig(epochs=2000, log_every=500),
    seed=0,
)

report = sweep_experiment(cfg)

print(f"{'N_r':>5} {'train':>10} {'population':>11} {'gap':>10} {'bound':>10}")
for row in report.rows:
    print(f"{row.N_r:5d} {row.train_risk:10.5f} {row.population_estimate:11.5f} "
          f"{row.gap:10.5f} {row.bound.total:10.1f}")

print(f"\npearson r (bound vs gap) = {report.pearson_r:.4f}")
if report.failed_rows:
    print("failed rows:", report.failed_rows)
