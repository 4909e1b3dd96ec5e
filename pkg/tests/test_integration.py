import json
import re

import jsonschema
import pytest

from fnkit import demo
from fnkit.function_model import ModelError, parse_function_model
from fnkit.integration import (
    ComponentTopology,
    PlatformDescriptor,
    TopologyError,
    TransformError,
    count_entities,
    emit_integration_schema,
    parse_integration_model,
    serialize_integration_model,
    service_key,
    transform,
    validate_integration,
)



def platform(**changes):
    base = dict(
        platform_name="sim-middleware",
        serialization="json-lines",
        service_grouping_depth=3,
        id_base=0,
        transport_label="in-process",
    )
    base.update(changes)
    return PlatformDescriptor(**base)


def num(base="uint8", lo=0, hi=4):
    return {"Category": "Numerical", "Base": base, "Min": lo, "Max": hi, "Unit": "", "Default": lo}


def iface(path, role, datatype=None):
    return {
        "Name": path,
        "Description": "",
        "Role": role,
        "Type": "Data",
        "Datatype": datatype or num(),
        "AsilInfo": "QM",
    }


def function(name, *interfaces):
    doc = {
        "Name": name,
        "Description": "",
        "InterfaceData": list(interfaces),
        "SchedulingInfo": {
            "RunType": "cyclic",
            "CycleTime": 10,
            "Description": "",
            "ImplementedAsil": "QM",
            "Supervision": {"SupervisionType": "None"},
        },
    }
    return parse_function_model(json.dumps(doc))


def topology(**assign):
    return ComponentTopology(functions=dict(assign), executables={c: c.lower() for c in assign.values()})


class TestGrouping:
    def test_single_provider_depth_three(self):
        fn = function("Acc", iface("Vehicle.ADAS.ACC.Status", "Provider"))
        model = transform([fn], platform(), topology(Acc="Acc"))
        (svc,) = model.component("Acc").service_interfaces
        assert svc.name == "Vehicle_ADAS_ACC"
        assert svc.direction == "Provided"
        assert [e.name for e in svc.events] == ["Status"]
        assert svc.events[0].source_path == "Vehicle.ADAS.ACC.Status"

    @pytest.mark.parametrize(
        "depth,expected",
        [(1, ("Vehicle", "ADAS_ACC_Status")), (2, ("Vehicle_ADAS", "ACC_Status")), (9, ("Vehicle_ADAS_ACC", "Status"))],
    )
    def test_service_key(self, depth, expected):
        assert service_key("Vehicle.ADAS.ACC.Status", depth) == expected

    def test_empty_function_list(self):
        model = transform([], platform(), ComponentTopology({}, {}))
        assert model.components == []
        assert model.meta.source_function_model_digests == []
        assert model.meta.platform.name == "sim-middleware"
        assert count_entities(model).as_dict() == {"executables": 0, "services": 0, "events": 0}

    def test_one_component_one_service_two_events(self):
        fn = function("Acc", iface("A.B.C.X", "Provider"), iface("A.B.C.Y", "Provider"))
        model = transform([fn], platform(), topology(Acc="Acc"))
        assert count_entities(model).as_dict() == {"executables": 1, "services": 1, "events": 2}

    def test_provider_and_consumer_bindings(self):
        prod = function("P", iface("A.B.C.X", "Provider"))
        cons = function("Q", iface("A.B.C.X", "Consumer"))
        model = transform([prod, cons], platform(id_base=100), topology(P="P", Q="Q"))
        p = model.component("P").service_interfaces[0]
        q = model.component("Q").service_interfaces[0]
        assert (p.direction, q.direction) == ("Provided", "Required")
        assert p.service_id == q.service_id == 100
        assert p.events[0].event_id == q.events[0].event_id == 1
        assert validate_integration(model).ok

    def test_mixed_direction_group_is_split(self):
        a = function("A", iface("S.T.U.X", "Provider"))
        b = function("B", iface("S.T.U.Y", "Provider"), iface("S.T.U.X", "Consumer"))
        model = transform([a, b], platform(), topology(A="A", B="B"))
        names = {(c.name, s.name, s.direction) for c in model.components for s in c.service_interfaces}
        assert names == {("A", "S_T_U_A", "Provided"), ("B", "S_T_U_B", "Provided"), ("B", "S_T_U_A", "Required")}
        assert validate_integration(model).ok

    def test_ids_deterministic_and_unique(self):
        fns = [function(f"F{i}", iface(f"Root.Grp{i}.Sub.Sig", "Provider")) for i in range(5)]
        model = transform(fns, platform(id_base=4096), topology(**{f"F{i}": f"C{i}" for i in range(5)}))
        ids = [s.service_id for c in model.components for s in c.service_interfaces]
        assert sorted(ids) == list(range(4096, 4101))


class TestErrors:
    def test_unassigned_function(self):
        with pytest.raises(TransformError, match="unassigned"):
            transform([function("A")], platform(), ComponentTopology({}, {}))

    def test_two_providers(self):
        a = function("A", iface("X.Y", "Provider"))
        b = function("B", iface("X.Y", "Provider"))
        with pytest.raises(TransformError, match="two providers"):
            transform([a, b], platform(), topology(A="A", B="B"))

    def test_unknown_topology_member(self):
        with pytest.raises(TopologyError):
            ComponentTopology.from_json({"functions": {}, "executables": {}, "extra": 1})

    def test_grouping_depth_at_least_one(self):
        with pytest.raises(ValueError):
            platform(service_grouping_depth=0)


class TestValidation:
    def test_transform_output_is_clean(self, demo_integration):
        assert list(validate_integration(demo_integration)) == []

    def test_duplicate_service_id(self, demo_integration):
        doc = json.loads(serialize_integration_model(demo_integration))
        services = [s for c in doc["ComponentList"] for s in c["ServiceInterfaceList"]]
        names = sorted({s["Name"] for s in services})
        for s in services:
            if s["Name"] == names[1]:
                s["ServiceId"] = next(x["ServiceId"] for x in services if x["Name"] == names[0])
        report = validate_integration(parse_integration_model(json.dumps(doc)))
        assert any("duplicate service_id" in f.message for f in report.errors)

    def test_required_without_provider(self):
        cons = function("Q", iface("A.B.C.X", "Consumer"))
        model = transform([cons], platform(), topology(Q="Q"))
        report = validate_integration(model)
        assert any("has no provider" in f.message for f in report.errors)


class TestDemo:
    def test_counts_match_hand_count(self, demo_integration):
        # CoreAcc: 1 provided + 4 required, Mpc: 1 provided + 2 required,
        # Gateway: 4 provided. 13 interface leaves over the three functions.
        assert count_entities(demo_integration).as_dict() == {"executables": 3, "services": 12, "events": 13}

    def test_counts_match_text_oracle(self, demo_integration):
        text = serialize_integration_model(demo_integration)
        executables = set(re.findall(r'"ExecutableName":"([^"]+)"', text))
        services = len(re.findall(r'"ProvidedOrRequired":"(?:Provided|Required)"', text))
        events = len(re.findall(r'"SourcePath":"', text))
        counts = count_entities(demo_integration)
        assert (len(executables), services, events) == (counts.executables, counts.services, counts.events)

    def test_conservation(self, demo_models, demo_integration):
        leaves = sum(len(m.interface_data) for m in demo_models)
        assert count_entities(demo_integration).events == leaves

    def test_deterministic(self, demo_models, demo_integration):
        platform_ = PlatformDescriptor(
            platform_name="sim", serialization="json-lines", service_grouping_depth=3,
            id_base=4096, transport_label="in-process",
        )
        topo = ComponentTopology.load(demo.data_file("topology.json"))
        again = transform(demo_models, platform_, topo)
        assert serialize_integration_model(again) == serialize_integration_model(demo_integration)

    def test_platform_independence(self, demo_models):
        topo = ComponentTopology.load(demo.data_file("topology.json"))
        a = transform(demo_models, platform(), topo)
        b = transform(demo_models, platform(id_base=777, serialization="binary-le", transport_label="shm"), topo)

        def masked(model):
            doc = json.loads(serialize_integration_model(model))
            doc.pop("MetaInformation")
            for comp in doc["ComponentList"]:
                for svc in comp["ServiceInterfaceList"]:
                    svc.pop("ServiceId")
                    for ev in svc["Events"]:
                        ev.pop("EventId")
            return doc

        assert masked(a) == masked(b)
        assert a.meta.platform != b.meta.platform


@pytest.fixture(scope="module")
def validator():
    schema = json.loads(emit_integration_schema())
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


class TestSchema:
    def test_transform_output_passes(self, validator, demo_integration):
        validator.validate(json.loads(serialize_integration_model(demo_integration)))

    def test_empty_document_fails(self, validator):
        assert not validator.is_valid({})
        with pytest.raises(ModelError):
            parse_integration_model("{}")

    def test_round_trip(self, demo_integration):
        text = serialize_integration_model(demo_integration)
        assert serialize_integration_model(parse_integration_model(text)) == text
