"""
Run reports: what a command checked, on which inputs, and how it went.
"""
import dataclasses
import hashlib
import json
import time
from typing import Any, Dict, List, Optional, Sequence
import nefflow.common.build as build
from nefflow.version import __version__ as nefflow_version


@dataclasses.dataclass(frozen=True)
class CheckResult:
    name: str
    status: build.CheckStatus
    detail: str = ""

    def to_dict(self) -> Dict[str, str]:
        return {"name": self.name, "status": self.status.value, "detail": self.detail}


def input_digest(paths: Sequence[str] = (), extra: Optional[Dict[str, Any]] = None) -> str:
    """sha256 over the contents of the input files and the canonical JSON of `extra`"""
    digest = hashlib.sha256()
    for path in paths:
        with open(path, "rb") as stream:
            digest.update(stream.read())
    if extra:
        digest.update(json.dumps(extra, sort_keys=True, default=str).encode("utf8"))
    return digest.hexdigest()


@dataclasses.dataclass
class RunReport:
    """
    Results are kept sorted by check name, so two runs with the same
    inputs and seed produce the same report apart from the timing.
    """

    command: str
    inputs: str = ""
    results: List[CheckResult] = dataclasses.field(default_factory=list)
    wall_seconds: float = 0.0
    _start: float = dataclasses.field(default_factory=time.perf_counter, repr=False)

    def add(self, name: str, status: build.CheckStatus, detail: str = ""):
        self.results.append(CheckResult(name, status, detail))

    def finish(self) -> "RunReport":
        self.results.sort(key=lambda r: r.name)
        self.wall_seconds = time.perf_counter() - self._start
        return self

    @property
    def failed(self) -> List[CheckResult]:
        return [r for r in self.results if r.status == build.CheckStatus.FAIL]

    @property
    def passed(self) -> bool:
        return not self.failed

    def counts(self) -> Dict[str, int]:
        counts = {status.value: 0 for status in build.CheckStatus}
        for r in self.results:
            counts[r.status.value] += 1
        return counts

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nefflow_version": nefflow_version,
            "command": self.command,
            "inputs": self.inputs,
            "results": [r.to_dict() for r in sorted(self.results, key=lambda r: r.name)],
            "counts": self.counts(),
            "wall_seconds": round(self.wall_seconds, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def save(self, path: str):
        with open(path, "w", encoding="utf8") as stream:
            stream.write(self.to_json())
