"""Bundled demo application: a predictive adaptive cruise control on three executables."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .functions import DEMO_FUNCTIONS, CoreAcc, Mpc, make_function

FUNCTION_FILES = ("core_acc.json", "gateway.json", "mpc.json")
ADAPTED_COMPONENTS = ("CoreAcc", "Mpc")
ACC_EVENTS = ("Vehicle.ADAS.Acc.AccelerationRequest", "Vehicle.ADAS.Acc.Status")
TRACE_FILE = "drive_60s.jsonl"


def data_dir() -> Path:
    return Path(str(resources.files("fnkit") / "demo" / "data"))


def data_file(name: str) -> Path:
    return data_dir() / name


def function_files() -> list[Path]:
    return [data_file(n) for n in FUNCTION_FILES]


__all__ = [
    "ACC_EVENTS",
    "ADAPTED_COMPONENTS",
    "CoreAcc",
    "DEMO_FUNCTIONS",
    "FUNCTION_FILES",
    "Mpc",
    "TRACE_FILE",
    "data_dir",
    "data_file",
    "function_files",
    "make_function",
]
