"""Per-round / per-iteration run logs and their CSV form.

A transcript CSV carries its metadata (kind, seed, config echo, oracle-call
counts, extras) as ``# key: <json>`` comment lines ahead of the header, so a
CSV parses back into an equal :class:`SolveTranscript`.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

LEARN = "learn"
ZERO_SUM = "zero-sum"
CCE = "cce"
AGNOSTIC = "agnostic"

COLUMNS = {
    LEARN: ["round", "phase", "x", "y", "mixture_loss", "prediction", "mistake", "update", "pool_size"],
    ZERO_SUM: ["iteration", "A_size", "B_size", "val_AB_prev", "val_AB", "oracle_calls"],
    CCE: ["iteration", "A_size", "B_size", "val_AB_prev", "val_AB", "oracle_calls"],
    AGNOSTIC: ["round", "x", "y", "master_loss"],
}
_META = ("kind", "seed", "config", "oracle_calls", "extras")


@dataclass
class SolveTranscript:
    kind: str
    records: list[dict] = field(default_factory=list)
    oracle_calls: dict[str, int] = field(default_factory=dict)
    config: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None
    extras: dict[str, Any] = field(default_factory=dict)

    def count_call(self, oracle: str, n: int = 1) -> None:
        self.oracle_calls[oracle] = self.oracle_calls.get(oracle, 0) + n

    def append(self, record: dict) -> None:
        key = COLUMNS[self.kind][0]
        if self.records and record[key] <= self.records[-1][key]:
            raise ValueError(f"transcript records must be strictly ordered by {key}")
        self.records.append(record)

    def column(self, name: str) -> list:
        return [r[name] for r in self.records]

    # CSV round trip

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in _META:
            buf.write(f"# {key}: {json.dumps(getattr(self, key), sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        cols = COLUMNS[self.kind]
        writer.writerow(cols)
        for r in self.records:
            writer.writerow([_fmt(r[c]) for c in cols])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SolveTranscript":
        meta: dict[str, Any] = {}
        body = []
        for line in text.splitlines():
            if line.startswith("# "):
                key, _, payload = line[2:].partition(": ")
                meta[key] = json.loads(payload)
            elif line:
                body.append(line)
        kind = meta["kind"]
        reader = csv.reader(body)
        header = next(reader)
        if header != COLUMNS[kind]:
            raise ValueError(f"unexpected transcript header {header}")
        records = [{c: _parse(c, v) for c, v in zip(header, row)} for row in reader]
        return cls(
            kind=kind,
            records=records,
            oracle_calls=meta.get("oracle_calls", {}),
            config=meta.get("config", {}),
            seed=meta.get("seed"),
            extras=meta.get("extras", {}),
        )


_INT_COLS = {"round", "phase", "x", "y", "prediction", "pool_size", "iteration", "A_size", "B_size", "oracle_calls"}
_BOOL_COLS = {"mistake", "update"}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse(col: str, v: str):
    if v == "":
        return None
    if col in _BOOL_COLS:
        return v == "1"
    if col in _INT_COLS:
        return int(v)
    return float(v)
