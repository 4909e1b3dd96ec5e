"""
Function models and the signal catalog
======================================

A walk through the bundled cruise-control application: load the signal
catalog, parse the three function models and look at what the validator
has to say about them.
"""

# %%
from fnkit import demo
from fnkit.function_model import parse_function_model, validate_function_model
from fnkit.signals import check_catalog_conformance, classify_interface_name, load_catalog

catalog = load_catalog(demo.data_file("catalog.json"))
print(f"{len(catalog)} signals in the catalog")
for leaf in list(catalog.leaves())[:5]:
    print("  ", leaf.to_json())

# %%
# Every function is a JSON document. Parsing is strict: unknown members and
# string-typed numbers are rejected before any semantic check runs.
models = [parse_function_model(p.read_text()) for p in demo.function_files()]
for m in models:
    print(f"{m.name:8} cycle {m.scheduling.cycle_time:>4} ms, "
          f"{len(m.consumers())} consumed / {len(m.interface_data) - len(m.consumers())} provided interfaces")

# %%
# Semantic validation plus conformance against the catalog.
for m in models:
    report = validate_function_model(m)
    report.extend(check_catalog_conformance(m, catalog))
    print(m.name, "clean" if report.ok else [str(f) for f in report])

# %%
# Interface names follow fixed suffix conventions, which is how error and
# safety-reaction signals are told apart from ordinary ones.
for name in ("CoreAcc_Alive_ErrorSts", "CoreAcc_SftyCondSts", "Vehicle.Speed"):
    print(f"{name:28} -> {classify_interface_name(name)}")
