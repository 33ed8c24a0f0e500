# The headline experiment, desk sized: the same decomposition loop run twice
# on the treasure corridor. With a weighted sum the final archive holds only
# the two convex-hull extremes; switching to Tchebycheff scalarization with
# the accrued-reward Monte-Carlo learner fills in the concave interior too.

from paretoq import RunConfig, run

common = dict(env="dst-corridor", gamma=1.0, eval_episodes=1,
              buffer_capacity=100_000, seed=3)

linear = RunConfig(population_size=11, total_steps=5850, steps_per_iteration=450,
                   update_passes=10, batch_size=64, alpha=1.0,
                   epsilon_start=0.5, epsilon_min=0.5, checkpoint_stride=5,
                   **common)

concave = RunConfig(population_size=10, total_steps=30_000, steps_per_iteration=12,
                    update_passes=2, batch_size=32, alpha=0.2,
                    epsilon_start=1.0, epsilon_min=0.05,
                    scalarization="tchebycheff", learner="esr-mc",
                    psa_enabled=True, psa_period_steps=1000, tau=0.5,
                    checkpoint_stride=200, **common)

for label, config in [("weighted sum + scalarized Q", linear),
                      ("Tchebycheff + accrued-reward MC", concave)]:
    report = run(config)
    front = sorted(tuple(map(float, e.eval)) for e in report.archive)
    last = report.checkpoints[-1]
    print(f"{label}:")
    print(f"  steps {report.total_env_steps}, episodes {report.total_episodes}")
    print(f"  final archive: {front}")
    print(f"  hypervolume {last.hypervolume:.1f}, igd {last.igd:.3f}, "
          f"sparsity {last.sparsity:.2f}\n")

print("the weighted-sum archive stops at the hull extremes; the Tchebycheff")
print("run recovers interior treasures that no linear preference can prefer")
