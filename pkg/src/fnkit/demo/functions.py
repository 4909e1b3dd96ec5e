"""Platform functions of the bundled demo application.

The control laws are deliberately small saturated-arithmetic stand-ins. What
matters is that they are deterministic and keep all state in declared
attributes, so that adapter-mediated and direct execution can be compared
value for value.
"""

from __future__ import annotations

from ..runtime.function import PlatformFunction

SPEED = "Vehicle.Speed"
ALTITUDE = "Vehicle.CurrentLocation.Altitude"
SPEED_SET = "Vehicle.ADAS.CruiseControl.SpeedSet"
DISTANCE = "Vehicle.ADAS.ObstacleDetection.Distance"
MPC_REQUEST = "Vehicle.ADAS.Mpc.AccelerationRequest"
ACC_REQUEST = "Vehicle.ADAS.Acc.AccelerationRequest"
ACC_STATUS = "Vehicle.ADAS.Acc.Status"

STATUS_OFF, STATUS_STANDBY, STATUS_ACTIVE, STATUS_FOLLOWING = 0, 1, 2, 3


def clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


class CoreAcc(PlatformFunction):
    """50 ms arbitration of set speed, lead distance and the predictive request."""

    name = "CoreAcc"

    k_speed = 0.25  # (m/s^2) per (m/s) of speed error
    k_gap = 0.08  # (m/s^2) per m of gap error
    a_min, a_max = -3.5, 2.0
    jerk = 0.25  # max change per step, m/s^2
    min_gap = 5.0  # m
    engage_speed = 30.0  # km/h

    def __init__(self, time_gap: float = 1.8):
        super().__init__()
        self.time_gap = time_gap
        self.previous = 0.0

    def on_init(self) -> None:
        self.previous = 0.0
        self.outputs = {ACC_REQUEST: 0.0, ACC_STATUS: STATUS_OFF}

    def on_step(self) -> None:
        self.checkpoint("read")
        v_set = self.inputs.get(SPEED_SET, 0.0)
        v = self.inputs.get(SPEED, 0.0)
        d = self.inputs.get(DISTANCE, 250.0)
        a_mpc = self.inputs.get(MPC_REQUEST, 0.0)

        self.checkpoint("arbitrate")
        if v_set <= 0.0:
            status, a = STATUS_OFF, 0.0
        elif v < self.engage_speed:
            status, a = STATUS_STANDBY, 0.0
        else:
            a_speed = clamp(self.k_speed * (v_set - v) / 3.6 + a_mpc, self.a_min, self.a_max)
            gap = max(self.time_gap * v / 3.6, self.min_gap)
            a_gap = self.k_gap * (d - gap)
            status, a = (STATUS_FOLLOWING, a_gap) if a_gap < a_speed else (STATUS_ACTIVE, a_speed)
            a = clamp(a, self.a_min, self.a_max)
        a = clamp(a, self.previous - self.jerk, self.previous + self.jerk)
        a = round(a, 3)
        self.previous = a
        if d < self.min_gap:
            self.conditions["CoreAcc_DistanceLow_ErrorSts"] = True

        self.checkpoint("write")
        self.outputs = {ACC_REQUEST: a, ACC_STATUS: status}


class Mpc(PlatformFunction):
    """500 ms eco request from the road grade seen over the last cycle."""

    name = "Mpc"

    gain = 0.6
    limit = 1.5  # m/s^2
    g = 9.81
    period_s = 0.5

    def __init__(self):
        super().__init__()
        self.previous_altitude: float | None = None

    def on_init(self) -> None:
        self.previous_altitude = None
        self.outputs = {MPC_REQUEST: 0.0}

    def on_step(self) -> None:
        altitude = self.inputs.get(ALTITUDE, 0.0)
        v = self.inputs.get(SPEED, 0.0)
        travelled = v / 3.6 * self.period_s
        grade = 0.0
        if self.previous_altitude is not None and travelled > 1.0:
            grade = (altitude - self.previous_altitude) / travelled
        self.previous_altitude = altitude
        # ease off uphill ahead of the drag, coast into descents
        a = clamp(-self.gain * self.g * grade, -self.limit, self.limit)
        self.outputs = {MPC_REQUEST: round(a, 3)}


DEMO_FUNCTIONS: dict[str, type[PlatformFunction]] = {"CoreAcc": CoreAcc, "Mpc": Mpc}


def make_function(name: str) -> PlatformFunction:
    try:
        return DEMO_FUNCTIONS[name]()
    except KeyError:
        raise KeyError(f"no demo implementation for function {name!r}") from None
