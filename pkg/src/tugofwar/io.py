"""CSV/JSON emitters and run manifests."""
from __future__ import annotations

import csv
import dataclasses
import datetime as _dt
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from . import __version__
from .params import TugOfWarConfig, config_to_dict
from .solver import ScanResult, StationaryState

STATE_COLUMNS = ["theta", "y", "z", "velocity", "force", "h_prime", "stability", "h_prime_left", "h_prime_right"]


def fmt(value: Any) -> str:
    """CSV cell: floats with 17 significant digits, None as empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float) or hasattr(value, "dtype"):
        return format(float(value), ".17g")
    return str(value)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _plain(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _plain(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def json_text(obj: Any) -> str:
    return json.dumps(_plain(obj), indent=2) + "\n"


def state_rows(states: Sequence[StationaryState], param_value: Optional[float] = None):
    for s in states:
        row = [getattr(s, c) for c in STATE_COLUMNS]
        yield row if param_value is None else [param_value] + row


def states_csv(states: Sequence[StationaryState]) -> str:
    return csv_text(STATE_COLUMNS, state_rows(states))


def states_json(states: Sequence[StationaryState]) -> str:
    return json_text(list(states))


def states_from_json(text: str) -> list[StationaryState]:
    return [StationaryState(**d) for d in json.loads(text)]


def scan_csv(result: ScanResult) -> str:
    rows = []
    for value, states in zip(result.values, result.states):
        rows.extend(state_rows(states, value))
    return csv_text(["parameter_value"] + STATE_COLUMNS, rows)


def scan_json(result: ScanResult) -> str:
    return json_text(result)


def emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


@dataclasses.dataclass
class RunManifest:
    command: str
    flags: dict
    config: dict
    outputs: list
    seeds: list = dataclasses.field(default_factory=list)
    extra: dict = dataclasses.field(default_factory=dict)
    version: str = __version__
    created: str = ""


def manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def write_manifest(out: Path, command: str, flags: dict, cfg: TugOfWarConfig, outputs: Sequence[Path],
                   seeds: Sequence[int] = (), extra: Optional[dict] = None) -> Path:
    """Write the manifest next to ``out``; the timestamp lives only here."""
    manifest = RunManifest(
        command=command,
        flags={k: (str(v) if isinstance(v, Path) else v) for k, v in flags.items()},
        config=config_to_dict(cfg),
        outputs=[str(p) for p in outputs],
        seeds=list(seeds),
        extra=extra or {},
        created=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    )
    path = manifest_path(out)
    path.write_text(json_text(manifest))
    return path
