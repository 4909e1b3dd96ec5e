"""Rebuild the fixture corpus.

    python3 fixtures/regenerate.py

valid/              documents both validators accept
invalid/            structural violations: both the built-in parser and the
                    emitted JSON Schema reject them
semantic_invalid/   well-formed documents that only the built-in validator
                    rejects (ranges, references, cross-field rules)
"""

from __future__ import annotations

import copy
import json
import shutil
from pathlib import Path

from fnkit.function_model import parse_function_model
from fnkit.integration import ComponentTopology, PlatformDescriptor, serialize_integration_model, transform

ROOT = Path(__file__).resolve().parent


def num(base="float32", lo=0, hi=100, unit="", default=0):
    return {"Category": "Numerical", "Base": base, "Min": lo, "Max": hi, "Unit": unit, "Default": default}


def iface(name, role, datatype=None, **extra):
    d = {"Name": name, "Description": f"{name} signal", "Role": role, "Type": "Data",
         "Datatype": datatype or num(), "AsilInfo": "QM"}
    d.update(extra)
    return d


def sched(cycle=10, **extra):
    d = {"RunType": "cyclic", "CycleTime": cycle, "Description": "main runnable", "ImplementedAsil": "QM",
         "Supervision": {"SupervisionType": "None"}}
    d.update(extra)
    return d


def function(name, interfaces, **extra):
    d = {"Name": name, "Description": f"{name} function", "InterfaceData": interfaces, "SchedulingInfo": sched()}
    d.update(extra)
    return d


BOOL = {"Category": "Boolean", "Default": False}


def err(name, **extra):
    d = {"Name": name, "Datatype": BOOL, "MaturationTime": 20, "Severity": "Warning", "ResetTime": 40,
         "ResetCondition": "condition absent", "Description": "test error"}
    d.update(extra)
    return d


BASE = function(
    "WiperCtrl",
    [
        iface("Body.Windshield.Front.Wiping.Mode", "Provider", num("uint8", 0, 3)),
        iface("Body.Raindetection.Intensity", "Consumer", num("uint8", 0, 100, "percent"),
              RangeErrorAction="Default", TimeoutValue=100, TimeoutError="WiperCtrl_RainTimeout_ErrorSts"),
    ],
    ErrorList=[err("WiperCtrl_RainTimeout_ErrorSts")],
)


def variant(**changes):
    doc = copy.deepcopy(BASE)
    doc.update(changes)
    return doc


def valid_functions() -> dict[str, dict]:
    wd_full = {
        "SupervisionType": "Alive+Deadline+Logical",
        "AliveLimits": {"MinIndications": 9, "MaxIndications": 11, "ReferenceWindow": 100,
                        "ErrorName": "WiperCtrl_Alive_ErrorSts"},
        "DeadlineLimits": {"MinDuration": 0, "MaxDuration": 5, "ErrorName": "WiperCtrl_Deadline_ErrorSts"},
        "LogicalCheck": {"ExpectedOrder": ["a", "b"], "ErrorName": "WiperCtrl_Logical_ErrorSts"},
    }
    docs = {
        "minimal": function("Minimal", [iface("Vehicle.Speed", "Consumer")]),
        "base": copy.deepcopy(BASE),
        "no_interfaces": function("Idle", []),
        "boolean_io": function("Horn", [iface("Body.Horn.IsActive", "Provider", BOOL)]),
        "string_io": function("Display", [iface("Cabin.Infotainment.Message", "Consumer",
                                                {"Category": "String", "MaxLength": 64, "Default": ""})]),
        "struct_io": function("Imu", [iface("Vehicle.Acceleration.Vector", "Provider", {
            "Category": "Struct", "Fields": [
                {"Name": "X", "Datatype": num("float32", -50, 50, "m/s^2")},
                {"Name": "Y", "Datatype": num("float32", -50, 50, "m/s^2")},
            ]})]),
        "array_io": function("Tpms", [iface("Chassis.Axle.TirePressure", "Consumer", {
            "Category": "Array", "Element": num("uint16", 0, 500, "kPa", 220), "Length": 4})]),
        "enum_io": function("Gear", [iface("Powertrain.Transmission.Gear", "Provider", {
            "Category": "Enumeration", "Literals": [{"Name": "P", "Value": 0}, {"Name": "D", "Value": 1}],
            "Default": "P"})]),
        "type_reference": function(
            "Seat", [iface("Cabin.Seat.Row1.Position", "Provider", {"Category": "TypeReference", "Name": "Pos"})],
            DataTypes=[{"Name": "Pos", "Datatype": num("uint8", 0, 10)}]),
        "nested_reference": function(
            "Mirror", [iface("Body.Mirrors.Left.Tilt", "Provider", {"Category": "TypeReference", "Name": "Tilt"})],
            DataTypes=[{"Name": "Tilt", "Datatype": {"Category": "Array", "Element": {
                "Category": "TypeReference", "Name": "Angle"}, "Length": 2}},
                {"Name": "Angle", "Datatype": num("int8", -30, 30, "deg")}]),
        "watchdog_full": variant(SchedulingInfo=sched(10, Supervision=wd_full)),
        "watchdog_top_level": variant(Watchdog={"SupervisionType": "Deadline", "DeadlineLimits": {
            "MinDuration": 0, "MaxDuration": 2, "ErrorName": "WiperCtrl_Deadline_ErrorSts"}}),
        "offset_priority": variant(SchedulingInfo=sched(20, InitialOffset=5, Priority=3, DebounceTime=10,
                                                  FunctionScheduling="Pre-emptive", StackSize=4096)),
        "parameters": variant(ParameterList=[{"Name": "WiperCtrl.Delay", "Description": "interval delay",
                                        "AsilInfo": "QM", "Datatype": num("uint16", 0, 5000, "ms", 1000),
                                        "Attribute": "Normal"},
                                       {"Name": "WiperCtrl.Gain", "Description": "adaptive wipe gain",
                                        "AsilInfo": "QM", "Datatype": num("float32", 0, 2, "", 1),
                                        "Attribute": "LearningParameter"}]),
        "errors_dependencies": variant(ErrorList=[
            err("WiperCtrl_RainTimeout_ErrorSts"),
            err("WiperCtrl_Motor_ErrorSts", MaturationTime=0),
            err("WiperCtrl_Degraded_ErrorSts", Dependencies=["WiperCtrl_Motor_ErrorSts"]),
        ]),
        "safety_reactions": variant(SafetyReactionList=[{"Name": "WiperStop_SftyCondSts", "Datatype": BOOL,
                                                   "ErrorList": ["WiperCtrl_RainTimeout_ErrorSts"],
                                                   "Description": "park wipers"}]),
        "messages_methods": variant(MessageList=[{"Name": "WiperFrame", "Description": "bus frame"}],
                              MethodList=[{"Name": "Calibrate"}]),
        "allocation": variant(AllocationInfo={"RequiredMemory": 2048}),
        "asil_d": function("Brake", [iface("Chassis.Brake.PedalPosition", "Consumer", num("uint8", 0, 100, "percent"),
                                           AsilInfo="D")], SchedulingInfo=sched(5, ImplementedAsil="D")),
        "init_range_action": function("Climate", [iface("Cabin.HVAC.AmbientTemperature", "Consumer",
                                                        num("float32", -40, 85, "celsius", 20),
                                                        RangeErrorAction="Init")]),
        "float64_limits": function("Odo", [iface("Vehicle.TraveledDistance", "Provider",
                                                 num("float64", 0, 1e9, "km"))]),
        "alive_only": variant(SchedulingInfo=sched(50, Supervision={
            "SupervisionType": "Alive", "AliveLimits": {"MinIndications": 1, "MaxIndications": 3,
                                                        "ReferenceWindow": 100,
                                                        "ErrorName": "WiperCtrl_Alive_ErrorSts"}})),
        "unicode_description": variant(Description="Scheibenwischer-Steuerung für Regen"),
    }
    return docs


def invalid_functions() -> dict[str, dict]:
    """Every entry breaks the document structure."""
    def drop(key):
        d = copy.deepcopy(BASE)
        del d[key]
        return d

    def set_path(path, value):
        d = copy.deepcopy(BASE)
        target = d
        for key in path[:-1]:
            target = target[key]
        target[path[-1]] = value
        return d

    def del_path(path):
        d = copy.deepcopy(BASE)
        target = d
        for key in path[:-1]:
            target = target[key]
        del target[path[-1]]
        return d

    return {
        "missing_name": drop("Name"),
        "missing_description": drop("Description"),
        "missing_interface_data": drop("InterfaceData"),
        "missing_scheduling": drop("SchedulingInfo"),
        "name_not_string": set_path(["Name"], 7),
        "interfaces_not_list": set_path(["InterfaceData"], {}),
        "unknown_top_level_member": set_path(["Owner"], "someone"),
        "role_producer": set_path(["InterfaceData", 0, "Role"], "Producer"),
        "bad_asil": set_path(["InterfaceData", 0, "AsilInfo"], "E"),
        "missing_datatype": del_path(["InterfaceData", 0, "Datatype"]),
        "unknown_category": set_path(["InterfaceData", 0, "Datatype", "Category"], "Complex"),
        "missing_category": del_path(["InterfaceData", 0, "Datatype", "Category"]),
        "bad_numeric_base": set_path(["InterfaceData", 0, "Datatype", "Base"], "int128"),
        "min_as_string": set_path(["InterfaceData", 0, "Datatype", "Min"], "0"),
        "range_action_bad": set_path(["InterfaceData", 1, "RangeErrorAction"], "Clamp"),
        "negative_timeout": set_path(["InterfaceData", 1, "TimeoutValue"], -5),
        "negative_cycle_time": set_path(["SchedulingInfo", "CycleTime"], -10),
        "missing_supervision": del_path(["SchedulingInfo", "Supervision"]),
        "bad_supervision_type": set_path(["SchedulingInfo", "Supervision", "SupervisionType"], "Heartbeat"),
        "error_missing_maturation": del_path(["ErrorList", 0, "MaturationTime"]),
        "error_list_not_list": set_path(["ErrorList"], "WiperCtrl_RainTimeout_ErrorSts"),
        "empty_safety_error_list": set_path(["SafetyReactionList"], [
            {"Name": "X_SftyCondSts", "Datatype": BOOL, "ErrorList": [], "Description": "none"}]),
        "array_length_zero": function("Tpms", [iface("Chassis.Axle.TirePressure", "Consumer", {
            "Category": "Array", "Element": num("uint16", 0, 500), "Length": 0})]),
        "struct_without_fields": function("Imu", [iface("Vehicle.Acceleration.Vector", "Provider", {
            "Category": "Struct", "Fields": []})]),
        "enum_without_literals": function("Gear", [iface("Powertrain.Transmission.Gear", "Provider", {
            "Category": "Enumeration", "Literals": []})]),
        "parameter_bad_attribute": set_path(["ParameterList"], [{
            "Name": "WiperCtrl.Delay", "Description": "d", "AsilInfo": "QM",
            "Datatype": num("uint16", 0, 10), "Attribute": "Learned"}]),
        "negative_stack_size": set_path(["SchedulingInfo", "StackSize"], -1),
        "document_is_list": [copy.deepcopy(BASE)],
    }


def semantic_invalid_functions() -> dict[str, dict]:
    def with_iface(**changes):
        d = copy.deepcopy(BASE)
        d["InterfaceData"][1].update(changes)
        return d

    def without_timeout_error():
        d = copy.deepcopy(BASE)
        del d["InterfaceData"][1]["TimeoutError"]
        return d

    cyc = copy.deepcopy(BASE)
    cyc["ErrorList"] = [err("WiperCtrl_A_ErrorSts", Dependencies=["WiperCtrl_B_ErrorSts"]),
                        err("WiperCtrl_B_ErrorSts", Dependencies=["WiperCtrl_A_ErrorSts"])]
    return {
        "min_above_max": with_iface(Datatype=num("uint8", 50, 10)),
        "default_out_of_range": with_iface(Datatype=num("uint8", 0, 10, default=20)),
        "integer_base_fraction": with_iface(Datatype=num("uint8", 0, 10.5)),
        "not_representable": with_iface(Datatype=num("uint8", 0, 300)),
        "timeout_without_error": without_timeout_error(),
        "bad_signal_path": with_iface(Name="Body..Rain"),
        "duplicate_interface": variant(InterfaceData=[BASE["InterfaceData"][0]] * 2),
        "dangling_type_reference": function("Seat", [iface("Cabin.Seat.Pos", "Provider",
                                                           {"Category": "TypeReference", "Name": "Nope"})]),
        "dependency_cycle": cyc,
        "offset_not_below_cycle": variant(SchedulingInfo=sched(10, InitialOffset=10)),
        "debounce_above_cycle": variant(SchedulingInfo=sched(10, DebounceTime=20)),
        "alive_min_above_max": variant(SchedulingInfo=sched(10, Supervision={
            "SupervisionType": "Alive", "AliveLimits": {"MinIndications": 5, "MaxIndications": 2,
                                                        "ReferenceWindow": 100, "ErrorName": "E_X_ErrorSts"}})),
        "cyclic_zero_cycle": variant(SchedulingInfo=sched(0)),
    }


# --- integration ------------------------------------------------------------

PLATFORM = {"PlatformName": "sim", "Serialization": "json-lines", "ServiceGroupingDepth": 2, "IdBase": 100,
            "TransportLabel": "in-process"}


def integration_doc(functions: list[dict], topology: dict, **platform) -> dict:
    models = [parse_function_model(json.dumps(f)) for f in functions]
    desc = PlatformDescriptor.model_validate({**PLATFORM, **platform})
    model = transform(models, desc, ComponentTopology.from_json(topology))
    return json.loads(serialize_integration_model(model))


def _pair(depth=2, id_base=100, serialization="json-lines", consumer=None):
    producer = function("Rain", [iface("Body.Raindetection.Intensity", "Provider", num("uint8", 0, 100, "percent"))])
    return integration_doc(
        [producer, copy.deepcopy(consumer or BASE)],
        {"functions": {"Rain": "RainSensor", "WiperCtrl": "Wiper"},
         "executables": {"RainSensor": "rain_exe", "Wiper": "wiper_exe"}},
        ServiceGroupingDepth=depth, IdBase=id_base, Serialization=serialization,
    )


def valid_integrations() -> dict[str, dict]:
    docs: dict[str, dict] = {}
    for depth in (1, 2, 3, 4):
        for id_base in (0, 4096):
            docs[f"pair_depth{depth}_base{id_base}"] = _pair(depth, id_base)
    docs["pair_binary"] = _pair(serialization="binary-le")
    fns = valid_functions()
    fns["provider_only"] = function("Lamp", [iface("Body.Lights.Beam.Low.IsOn", "Provider", BOOL)])
    singles = ["provider_only", "no_interfaces", "boolean_io", "struct_io", "enum_io",
               "type_reference", "nested_reference", "float64_limits"]
    for key in singles:
        src = fns[key]
        docs[f"single_{key}"] = integration_doc(
            [src], {"functions": {src["Name"]: "Comp"}, "executables": {"Comp": "comp_exe"},
                    "application": {"name": "Single", "description": key}})
    for key in ("watchdog_full", "parameters", "errors_dependencies", "safety_reactions"):
        docs[f"pair_{key}"] = _pair(consumer=fns[key])
    docs["shared_executable"] = integration_doc(
        [function("Rain", [iface("Body.Raindetection.Intensity", "Provider", num("uint8", 0, 100, "percent"))]),
         copy.deepcopy(BASE)],
        {"functions": {"Rain": "Wiper", "WiperCtrl": "Wiper"}, "executables": {"Wiper": "body_exe"},
         "function_group_modes": {"Body": ["Off", "On"]}})
    return docs


def invalid_integrations(base: dict) -> dict[str, dict]:
    def mutate(fn):
        d = copy.deepcopy(base)
        fn(d)
        return d

    comp = lambda d: d["ComponentList"][0]  # noqa: E731
    svc = lambda d: comp(d)["ServiceInterfaceList"][0]  # noqa: E731
    ev = lambda d: svc(d)["Events"][0]  # noqa: E731
    return {
        "missing_meta": mutate(lambda d: d.pop("MetaInformation")),
        "missing_application": mutate(lambda d: d.pop("ApplicationInformation")),
        "missing_components": mutate(lambda d: d.pop("ComponentList")),
        "components_not_list": mutate(lambda d: d.update(ComponentList={})),
        "unknown_member": mutate(lambda d: d.update(Deployment={})),
        "meta_missing_version": mutate(lambda d: d["MetaInformation"].pop("ToolVersion")),
        "digests_not_list": mutate(lambda d: d["MetaInformation"].update(SourceFunctionModelDigests="x")),
        "bad_serialization": mutate(lambda d: d["MetaInformation"]["Platform"].update(Serialization="xml")),
        "application_name_empty": mutate(lambda d: d["ApplicationInformation"].update(Name="")),
        "component_missing_executable": mutate(lambda d: comp(d).pop("ExecutableName")),
        "component_empty_name": mutate(lambda d: comp(d).update(Name="")),
        "modes_not_list": mutate(lambda d: comp(d).update(FunctionGroupModes="On")),
        "function_list_missing": mutate(lambda d: comp(d).pop("FunctionList")),
        "embedded_function_broken": mutate(lambda d: comp(d)["FunctionList"][0].pop("SchedulingInfo")),
        "service_bad_direction": mutate(lambda d: svc(d).update(ProvidedOrRequired="Offered")),
        "service_negative_id": mutate(lambda d: svc(d).update(ServiceId=-1)),
        "service_id_string": mutate(lambda d: svc(d).update(ServiceId="100")),
        "service_missing_events": mutate(lambda d: svc(d).pop("Events")),
        "event_missing_source_path": mutate(lambda d: ev(d).pop("SourcePath")),
        "event_negative_id": mutate(lambda d: ev(d).update(EventId=-3)),
        "event_bad_datatype": mutate(lambda d: ev(d).update(Datatype={"Category": "Blob"})),
        "event_unknown_member": mutate(lambda d: ev(d).update(Qos="reliable")),
        "document_is_string": "integration",
    }


def semantic_invalid_integrations(base: dict) -> dict[str, dict]:
    def mutate(fn):
        d = copy.deepcopy(base)
        fn(d)
        return d

    def comp_named(d, name):
        return next(c for c in d["ComponentList"] if c["Name"] == name)

    def provided(d):
        return next(s for s in comp_named(d, "RainSensor")["ServiceInterfaceList"]
                    if s["ProvidedOrRequired"] == "Provided")

    def required(d):
        return next(s for s in comp_named(d, "Wiper")["ServiceInterfaceList"]
                    if s["ProvidedOrRequired"] == "Required")

    return {
        "event_id_mismatch": mutate(lambda d: required(d)["Events"][0].update(EventId=99)),
        "required_without_provider": mutate(lambda d: comp_named(d, "RainSensor").update(ServiceInterfaceList=[])),
        "conflicting_service_ids": mutate(lambda d: required(d).update(ServiceId=required(d)["ServiceId"] + 50)),
        "source_path_mismatch": mutate(lambda d: required(d)["Events"][0].update(SourcePath="Body.Other.Thing")),
        "duplicate_event_names": mutate(lambda d: provided(d)["Events"].append(copy.deepcopy(provided(d)["Events"][0]))),
        "dangling_type_reference": mutate(lambda d: provided(d)["Events"][0].update(
            Datatype={"Category": "TypeReference", "Name": "Missing"})),
        "blank_executable": mutate(lambda d: comp_named(d, "Wiper").update(ExecutableName=" ")),
    }


def write_set(directory: Path, docs: dict[str, object]) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for name, doc in sorted(docs.items()):
        (directory / f"{name}.json").write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def main() -> None:
    for kind in ("function", "integration"):
        shutil.rmtree(ROOT / kind, ignore_errors=True)
    write_set(ROOT / "function" / "valid", valid_functions())
    write_set(ROOT / "function" / "invalid", invalid_functions())
    write_set(ROOT / "function" / "semantic_invalid", semantic_invalid_functions())
    base = _pair()
    write_set(ROOT / "integration" / "valid", valid_integrations())
    write_set(ROOT / "integration" / "invalid", invalid_integrations(base))
    write_set(ROOT / "integration" / "semantic_invalid", semantic_invalid_integrations(base))


if __name__ == "__main__":
    main()
