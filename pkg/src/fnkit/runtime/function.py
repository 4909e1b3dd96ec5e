"""The platform-function contract: init/step/terminate plus buffer accessors."""

from __future__ import annotations

from typing import Any, Mapping


class PlatformFunction:
    """Base class for middleware-agnostic function logic.

    Inputs and outputs are keyed by signal path. ``step`` is a no-op until
    ``init`` has run, and ``terminate`` is always legal after ``init``.
    Subclasses implement :meth:`on_init`, :meth:`on_step` and optionally
    :meth:`on_terminate`; ``inputs``/``outputs`` play the role of the
    function's global variables.
    """

    name = "function"

    def __init__(self) -> None:
        self.initialized = False
        self.inputs: dict[str, Any] = {}
        self.outputs: dict[str, Any] = {}
        self.checkpoints: list[str] = []
        self.conditions: dict[str, bool] = {}

    def init(self) -> None:
        self.on_init()
        self.initialized = True

    def step(self) -> None:
        if not self.initialized:
            return
        self.checkpoints = []
        self.conditions = {}
        self.on_step()

    def terminate(self) -> None:
        self.on_terminate()
        self.initialized = False

    def set_external_inputs(self, inputs: Mapping[str, Any]) -> None:
        self.inputs.update(inputs)

    def get_external_outputs(self) -> dict[str, Any]:
        return dict(self.outputs)

    def checkpoint(self, name: str) -> None:
        self.checkpoints.append(name)

    def on_init(self) -> None:
        pass

    def on_step(self) -> None:
        raise NotImplementedError

    def on_terminate(self) -> None:
        pass
