"""Result records and their file formats (NDJSON trial streams, aggregate CSV)."""

import csv
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple, Union

from pydantic import BaseModel, Field, ValidationError

from ..algorithms.telemetry import RoundTelemetry
from ..core.exceptions import BestKValidationError, HarnessIOError

PathLike = Union[str, Path]


class TrialResult(BaseModel):
    """One seeded trial, answer ids already mapped back to the unpermuted instance."""

    type: str = "trial"
    trial: int
    permutation_seed: int
    stream_id: int
    algorithm: str
    answer: List[int]
    correct: bool
    total_samples: int
    capped: bool
    telemetry_ok: bool = True
    contract_failures: int = 0
    samples_by_tag: Dict[str, int] = Field(default_factory=dict)
    rounds: List[RoundTelemetry] = Field(default_factory=list)


class StreamHeader(BaseModel):
    """First line of a trial stream: everything needed to reproduce it."""

    type: str = "header"
    label: str
    algorithm: str
    delta: float
    trials: int
    master_seed: int
    instance: Dict[str, Any]
    config: Dict[str, Any]


def open_output(path: Optional[PathLike]) -> Tuple[TextIO, bool]:
    """Open ``path`` for writing, creating parent directories; ``None`` or ``-`` is stdout."""
    if path is None or str(path) == "-":
        return sys.stdout, False
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", encoding="utf-8", newline=""), True
    except OSError as e:
        raise HarnessIOError(f"Cannot write {path}: {e}", details={"field": "out", "path": str(path)}) from e


class TrialStreamWriter:
    """Writes a header and then trial records, one JSON object per line."""

    def __init__(self, path: Optional[PathLike], header: StreamHeader):
        self.path = path
        self._handle, self._owned = open_output(path)
        self.write_line(header.model_dump(mode="json"))

    def write_line(self, record: Dict[str, Any]) -> None:
        try:
            self._handle.write(json.dumps(record, separators=(",", ":")) + "\n")
        except OSError as e:
            raise HarnessIOError(f"Cannot write {self.path}: {e}", details={"field": "out"}) from e

    def write(self, result: TrialResult) -> None:
        self.write_line(result.model_dump(mode="json"))

    def close(self) -> None:
        if self._owned:
            self._handle.close()
        else:
            self._handle.flush()

    def __enter__(self) -> "TrialStreamWriter":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


def read_trial_stream(path: PathLike) -> Tuple[StreamHeader, List[TrialResult]]:
    """Read a stream written by :class:`TrialStreamWriter`.

    A truncated final line (an interrupted run) is skipped.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise HarnessIOError(f"Cannot read {path}: {e}", details={"field": "in", "path": str(path)}) from e

    header: Optional[StreamHeader] = None
    trials: List[TrialResult] = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            if number == len(lines):
                break
            raise BestKValidationError(
                f"{path}:{number} is not valid JSON: {e}", details={"field": "in", "line": number}
            ) from e
        try:
            if record.get("type") == "header":
                header = StreamHeader.model_validate(record)
            else:
                trials.append(TrialResult.model_validate(record))
        except ValidationError as e:
            raise BestKValidationError(
                f"{path}:{number} is not a valid record: {e.errors()[0].get('msg')}",
                details={"field": "in", "line": number},
            ) from e

    if header is None:
        raise BestKValidationError(f"{path} has no header record", details={"field": "in"})
    return header, trials


def write_csv(path: Optional[PathLike], rows: Sequence[Dict[str, Any]]) -> None:
    """Write dict rows as CSV; the header is the union of keys in first-seen order."""
    fieldnames: List[str] = []
    for row in rows:
        fieldnames.extend(k for k in row if k not in fieldnames)
    handle, owned = open_output(path)
    try:
        writer = csv.DictWriter(handle, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if v is None else v for k, v in row.items()})
    except OSError as e:
        raise HarnessIOError(f"Cannot write {path}: {e}", details={"field": "out"}) from e
    finally:
        if owned:
            handle.close()


def write_json(path: Optional[PathLike], payload: Any) -> None:
    handle, owned = open_output(path)
    try:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    except OSError as e:
        raise HarnessIOError(f"Cannot write {path}: {e}", details={"field": "out"}) from e
    finally:
        if owned:
            handle.close()
