"""Property-based checks of the library's invariants."""

import json

from hypothesis import HealthCheck, given, settings, strategies as st

from fnkit.canonical import canonical_dumps
from fnkit.function_model import ErrorSpec
from fnkit.kpi import lower_median, node_timings
from fnkit.replay import SignalRecord, SignalTrace, replay
from fnkit.runtime import Bus, IllegalTransition, LifecycleState as S, RunTrace, SimClock, evaluate_errors, initial_states
from fnkit.signals import SignalPathError, build_tree, parse_signal_path

from builders import Scripted, error, function_doc, iface, manifests, simulate
from oracles import error_status_oracle, sorted_median
from test_bus import F32
from test_lifecycle import LEGAL, TRANSITIONS

segment = st.from_regex(r"[A-Za-z][A-Za-z0-9]{0,7}", fullmatch=True)
path_text = st.lists(segment, min_size=2, max_size=6).map(".".join)
json_leaf = st.one_of(st.none(), st.booleans(), st.integers(-10**6, 10**6), st.text(max_size=5),
                      st.floats(allow_nan=False, allow_infinity=False))
json_value = st.recursive(json_leaf, lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=4), inner, max_size=4), max_leaves=20)


@given(path_text)
def test_signal_path_round_trip(text):
    assert str(parse_signal_path(text)) == text


@given(st.text(max_size=20))
def test_signal_path_parse_or_reject(text):
    try:
        p = parse_signal_path(text)
    except SignalPathError:
        return
    assert str(p) == text and len(p) >= 2


@given(st.lists(path_text, min_size=1, max_size=8, unique=True), st.randoms())
def test_tree_independent_of_insertion_order(paths, rnd):
    # drop paths that are prefixes of others; that conflict is tested elsewhere
    paths = [p for p in paths if not any(q != p and q.startswith(p + ".") for q in paths)]
    paths = [p for p in paths if not any(p != q and p.startswith(q + ".") for q in paths)]
    leaves = [(parse_signal_path(p), {"datatype": "float"}) for p in paths]
    shuffled = leaves[:]
    rnd.shuffle(shuffled)
    assert build_tree(leaves).dumps() == build_tree(shuffled).dumps()


@given(json_value)
def test_canonical_is_a_fixed_point(value):
    text = canonical_dumps(value)
    assert canonical_dumps(json.loads(text)) == text


@given(st.dictionaries(st.text(max_size=4), json_leaf, max_size=6), st.randoms())
def test_canonical_ignores_member_order(d, rnd):
    items = list(d.items())
    rnd.shuffle(items)
    assert canonical_dumps(dict(items)) == canonical_dumps(d)


@given(st.lists(st.integers(0, 10**6), min_size=1, max_size=80))
def test_median_matches_sort_oracle(xs):
    assert lower_median(xs) == sorted_median(xs)


@given(st.lists(st.tuples(st.sampled_from(["A.B", "A.C"]), st.floats(-100, 100, allow_nan=False)), max_size=30))
def test_bus_sequences_and_latest_value(pubs):
    bus = Bus()
    bus.register("A.B", F32)
    bus.register("A.C", F32)
    last_seq = {"A.B": 0, "A.C": 0}
    for i, (topic, value) in enumerate(pubs):
        seq = bus.publish(topic, value, i)
        assert seq == last_seq[topic] + 1
        last_seq[topic] = seq
        assert bus.retained(topic).value == value
    for topic, n in last_seq.items():
        assert bus.sequence(topic) == n


@settings(suppress_health_check=[HealthCheck.too_slow], max_examples=60)
@given(st.lists(st.sampled_from(TRANSITIONS), max_size=12))
def test_lifecycle_follows_table(sequence):
    sim = simulate(manifests(function_doc("N", [iface("A.Out", "Provider")])), {"N": Scripted(outputs={"A.Out": 0.0})})
    node = sim.nodes[0]
    model = S.UNCONFIGURED
    for transition in sequence:
        expected = LEGAL.get((model, transition))
        try:
            got = node.trigger(transition)
        except IllegalTransition:
            assert expected is None
        else:
            assert got is expected
            model = expected
        assert node.state is model
        assert node.state in (S.UNCONFIGURED, S.INACTIVE, S.ACTIVE, S.FINALIZED)


@given(
    st.integers(0, 200),
    st.integers(0, 200),
    st.lists(st.tuples(st.booleans(), st.integers(1, 120)), min_size=1, max_size=12),
)
def test_error_status_matches_oracle(m, r, segments):
    wave = [v for v, n in segments for _ in range(n)]
    states = initial_states([ErrorSpec.model_validate(error("E", m, r))])
    got = []
    for i, c in enumerate(wave):
        evaluate_errors(states, {"E": c}, i * 1000)
        got.append(states["E"].status.value)
    assert got == error_status_oracle(wave, m, r)


durations = st.integers(0, 500)


@given(st.lists(st.tuples(durations, durations, durations, durations, durations), min_size=1, max_size=20))
def test_exec_bounds_adapter_plus_logic(ticks):
    trace = RunTrace()
    kinds = ("adapter_in_begin", "adapter_in_end", "step_begin", "step_end", "adapter_out_begin", "adapter_out_end")
    t = 0
    for parts in ticks:
        marks = [t]
        for d in parts:
            t += d
            marks.append(t)
        for kind, at in zip(kinds, marks):
            trace.record(at, kind, "N")
        t += 1
    timing = node_timings(trace)["N"]
    assert len(timing.t_exec) == len(ticks)
    for e, a, l in zip(timing.t_exec, timing.t_adapter, timing.t_logic):
        assert e >= a + l


@given(st.lists(st.tuples(st.integers(0, 50), st.floats(-50, 50, allow_nan=False)), max_size=40))
def test_replay_conservation(steps):
    t, records = 0, []
    for dt, v in steps:
        t += dt
        records.append(SignalRecord(t, "A.B", v))
    trace = RunTrace()
    bus = Bus(trace=trace)
    bus.register("A.B", F32)
    n = replay(SignalTrace(tuple(records)), bus, SimClock())
    assert n == len(records) == len(trace.of_kind("publish"))
    if records:
        assert bus.retained("A.B").value == records[-1].value
