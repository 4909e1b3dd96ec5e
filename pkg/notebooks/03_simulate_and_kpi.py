"""
Replay, simulate and measure
============================

Replay the recorded drive through the generated adapters, run the same
functions through the direct-call baseline, and compare the two. Timing
numbers come from a wall-clock run; the behavior comparison does not
depend on the clock.
"""

# %%
import sys

from fnkit import demo
from fnkit.integration import ComponentTopology, load_platform
from fnkit.kpi import compare_behavior, measure
from fnkit.replay import baseline_from_models, load_trace
from fnkit.signals import load_catalog
from fnkit.workflow import configure, load_function_models, run_adapters

# pass a duration in seconds on the command line for a longer run
seconds = float(sys.argv[1]) if len(sys.argv) > 1 else 5.0
duration_us = int(seconds * 1_000_000)

models = load_function_models(demo.function_files())
_, artifacts = configure(
    models,
    load_platform(demo.data_file("platform.json")),
    ComponentTopology.load(demo.data_file("topology.json")),
    demo.ADAPTED_COMPONENTS,
)
manifests = [a.manifest for a in artifacts.values()]
signals = load_trace(demo.data_file(demo.TRACE_FILE), load_catalog(demo.data_file("catalog.json")))
print(f"{len(signals)} recorded signal samples over {signals.duration_ms / 1000:.0f} s")

# %%
# Behavior: adapter-mediated run against direct calls, value for value.
adapter = run_adapters(manifests, demo.make_function, signals, duration_us, "virtual")
baseline = baseline_from_models(models, demo.make_function, signals, duration_us, demo.ADAPTED_COMPONENTS)
equivalence = compare_behavior(baseline, adapter, demo.ACC_EVENTS)
for e in equivalence.events:
    print(f"{e.event}: {e.matched}/{e.expected_count} identical")

# %%
# Timing: the same run against the wall clock.
wall = run_adapters(manifests, demo.make_function, signals, duration_us, "wall")
report = measure(wall, {"CoreAcc": 50_000, "Mpc": 500_000}, equivalence)
print(report.to_text())

# %%
acc = report.nodes["CoreAcc"]["t_adapter"]
print(f"CoreAcc adapter median {acc.median} us = {acc.median / 50_000:.2%} of its 50 ms cycle")
