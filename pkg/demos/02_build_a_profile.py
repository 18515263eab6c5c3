"""Building an energy profile from metered micro-benchmarks.

Every (implementation, operation) pair of a construct group runs N times on
a freshly populated structure; the first W warmup runs are dropped from the
averages, and per operation anything slower than 100x the fastest
alternative's mean time is discarded.  The result is a grid of
profile-relative scores: one number per cell.

This demo meters the set group for real (time-power estimator, so it runs
anywhere) at a small scale, then prints the grid and the dominance pairs.
"""

import sys
import tempfile
from pathlib import Path

from voltpick import (
    MeterConfig,
    RunPlan,
    Scenario,
    build_profile,
    builtin_groups,
    dominates,
    load_profile,
    open_meter,
    prune_dominated,
    save_profile,
)
from voltpick.render import render_profile

# A tiny scenario keeps the demo quick; the shipped presets are
# small/medium/big (1e3/1e5/1e6 elements).  The time-power estimator ranks
# implementations by how long their operations take at an assumed 5 W.
scenario = Scenario("small", 2_000, 500)
plan = RunPlan(total_runs=5, warmup_discard=2, rng_seed=42)
meter = open_meter(MeterConfig("time-power", assumed_power_watts=5.0))

print("benchmarking the set group "
      f"({scenario.element_count} elements, {scenario.op_repetitions} reps, "
      f"N={plan.total_runs}, W={plan.warmup_discard}) ...", file=sys.stderr)
profile = build_profile(builtin_groups(["set"]), scenario, meter, plan)

print(render_profile(profile, show_dominance=True))

# Dominance: A dominates B when A is strictly cheaper on every operation of
# the kind; a dominated implementation is never recommended, so the
# candidate pool shrinks to:
pool = prune_dominated(profile, "set")
print(f"candidate pool after pruning: {pool}")
for a in profile.impls_for_kind("set"):
    for b in profile.impls_for_kind("set"):
        if a != b and dominates(profile, a, b):
            print(f"  ({a} dominates {b})")

# Profiles are scenario-scoped JSON files; the round trip is lossless.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "set-profile.json"
    save_profile(profile, path)
    assert load_profile(path) == profile
    print(f"\nprofile round-trips through {path.name} "
          f"({path.stat().st_size} bytes)")
