from fnkit.function_model import WatchdogSpec
from fnkit.runtime import RunTrace, run_scheduler, supervise
from fnkit.runtime.watchdog import AliveCounter, check_alive, check_deadline, check_logical

from builders import Scripted, error, function_doc, iface, manifests, simulate
from oracles import alive_counts

ALIVE = {"MinIndications": 9, "MaxIndications": 11, "ReferenceWindow": 500, "ErrorName": "N_Alive_ErrorSts"}
DEADLINE = {"MinDuration": 0, "MaxDuration": 10, "ErrorName": "N_Deadline_ErrorSts"}
LOGICAL = {"ExpectedOrder": ["A", "B"], "ErrorName": "N_Logical_ErrorSts"}
FULL = {"SupervisionType": "Alive+Deadline+Logical", "AliveLimits": ALIVE, "DeadlineLimits": DEADLINE, "LogicalCheck": LOGICAL}
WD = WatchdogSpec.model_validate(FULL)


def test_alive_within_limits():
    assert check_alive(WD, 10, 0) is None
    assert check_alive(WD, 8, 0).error_name == "N_Alive_ErrorSts"
    assert check_alive(WD, 12, 0).kind == "alive"


def test_deadline_bounds_inclusive():
    assert check_deadline(WD, 10_000, 0) is None
    v = check_deadline(WD, 10_001, 0)
    assert (v.kind, v.error_name) == ("deadline", "N_Deadline_ErrorSts")


def test_logical_order():
    assert check_logical(WD, ["A", "B"], 0) is None
    assert check_logical(WD, ["B", "A"], 0).kind == "logical"
    assert check_logical(WD, ["A"], 0) is not None


def test_unselected_kinds_ignored():
    only_alive = WatchdogSpec.model_validate({"SupervisionType": "Alive", "AliveLimits": ALIVE})
    assert check_deadline(only_alive, 10**9, 0) is None
    assert check_logical(only_alive, ["Z"], 0) is None


def test_alive_counter_windows():
    counter = AliveCounter(WD, 0)
    for t in range(0, 500_000, 50_000):
        assert counter.close_windows(t) == []
        counter.indicate()
    assert counter.close_windows(500_000) == []
    counter.indicate()
    (v,) = counter.close_windows(1_000_000)
    assert v.t_us == 1_000_000 and "1 indications" in v.detail


def synthetic_trace(step_times, duration_us=10, checkpoints=("A", "B")):
    trace = RunTrace()
    for t in step_times:
        trace.record(t, "step_begin", "N")
        trace.record(t + duration_us, "step_end", "N", checkpoints=list(checkpoints))
    return trace


def test_supervise_alive_matches_oracle():
    times = [t for t in range(0, 3_000_000, 50_000) if not 1_000_000 <= t < 1_200_000]
    trace = synthetic_trace(times)
    window = (0, 3_000_000)
    got = [(v.t_us, v.kind) for v in supervise(WD, trace, "N", window)]
    expected = [(end, "alive") for end, n in alive_counts(times, 0, 3_000_000, 500_000) if not 9 <= n <= 11]
    assert got == expected == [(1_500_000, "alive")]


def test_supervise_deadline_and_logical():
    trace = synthetic_trace([0, 50_000], duration_us=20_000, checkpoints=("B", "A"))
    kinds = sorted(v.kind for v in supervise(WD, trace, "N", (0, 100_000)))
    assert kinds == ["deadline", "deadline", "logical", "logical"]


def supervised_node(body):
    doc = function_doc(
        "N",
        [iface("A.Out", "Provider")],
        cycle=50,
        supervision=FULL,
        errors=[error("N_Alive_ErrorSts"), error("N_Deadline_ErrorSts"), error("N_Logical_ErrorSts")],
    )
    fn = Scripted(body, outputs={"A.Out": 0.0})
    sim = simulate(manifests(doc), {"N": fn})
    node = sim.nodes[0]
    node.trigger("Configuring")
    node.trigger("Activating")
    return sim, fn


def well_behaved(fn):
    fn.checkpoint("A")
    fn.checkpoint("B")


def test_online_clean_run():
    sim, _ = supervised_node(well_behaved)
    run_scheduler(sim.nodes, sim.bus, sim.clock, 2_000_000)
    assert sim.trace.of_kind("watchdog_violation") == []
    assert supervise(WD, sim.trace, "N") == []


def test_online_injected_delay():
    def body(fn):
        well_behaved(fn)
        if fn.step_count == 7:
            sim.clock.elapse(25_000)

    sim, fn = supervised_node(body)
    run_scheduler(sim.nodes, sim.bus, sim.clock, 1_000_000)
    online = [(r.payload["kind"], r.payload["error"]) for r in sim.trace.of_kind("watchdog_violation")]
    assert online == [("deadline", "N_Deadline_ErrorSts")]
    offline = [(v.kind, v.error_name) for v in supervise(WD, sim.trace, "N")]
    assert offline == online


def test_online_logical_violation():
    def body(fn):
        fn.checkpoint("B")
        fn.checkpoint("A")

    sim, _ = supervised_node(body)
    run_scheduler(sim.nodes, sim.bus, sim.clock, 100_000)
    assert [r.payload["kind"] for r in sim.trace.of_kind("watchdog_violation")] == ["logical", "logical"]
    assert sim.nodes[0].error_status("N_Logical_ErrorSts").value == "Set"
