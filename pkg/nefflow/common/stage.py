"""
A Stage transforms a state object and returns it; a Sequence fires
its stages in order.
"""
import abc
import time
from typing import List
import nefflow.common.exceptions as exp
import nefflow.common.printing as printing


class Stage(abc.ABC):
    def __init__(self, unique_name: str, monitor_message: str):
        self.unique_name = unique_name
        self.monitor_message = monitor_message

    @abc.abstractmethod
    def fire(self, state):
        """
        Mutates `state` and returns it
        """

    def fire_helper(self, state, monitor: bool = False):
        """
        Wraps .fire() with timing and monitor output. nefflow errors
        propagate untouched, anything else becomes a StageError.
        """
        if monitor:
            printing.log(f"    {self.monitor_message} ")

        start = time.perf_counter()
        try:
            state = self.fire(state)
        except Exception as e:
            if monitor:
                printing.logn("FAILED", c=printing.Colors.FAIL)
            if isinstance(e, exp.Error):
                raise
            msg = f"""
            Stage {self.unique_name} raised an unexpected {type(e).__name__}: {e}
            """
            raise exp.StageError(msg) from e

        state.info.stage_seconds[self.unique_name] = time.perf_counter() - start
        if monitor:
            printing.logn(
                f"done ({state.info.stage_seconds[self.unique_name]:.2f}s)",
                c=printing.Colors.OKGREEN,
            )
        return state


class Sequence:
    def __init__(self, unique_name: str, monitor_message: str, stages: List[Stage]):
        self.unique_name = unique_name
        self.monitor_message = monitor_message
        self.stages = stages

    def launch(self, state, monitor: bool = False):
        if monitor:
            printing.logn(self.monitor_message, c=printing.Colors.BOLD)
        for stage in self.stages:
            state = stage.fire_helper(state, monitor=monitor)
        return state
