"""Run records and their CSV form."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

COLUMNS = (
    "protocol", "n", "m", "k", "tau", "eps", "gamma", "seed", "valid",
    "rounds", "classical_msgs", "quantum_msgs", "total_msgs", "wall_ms",
)
NUMERIC = ("n", "m", "k", "tau", "eps", "gamma", "rounds", "classical_msgs", "quantum_msgs", "total_msgs", "wall_ms")


@dataclass(frozen=True)
class RunRecord:
    protocol: str
    n: int
    m: int
    k: int | None
    tau: int | None
    eps: float | None
    gamma: float | None
    seed: int
    valid: bool
    rounds: int
    classical_msgs: int
    quantum_msgs: int
    wall_ms: float = 0.0

    @property
    def total_msgs(self) -> int:
        return self.classical_msgs + self.quantum_msgs

    def row(self) -> list[str]:
        def fmt(v) -> str:
            if v is None:
                return ""
            if isinstance(v, bool):
                return "1" if v else "0"
            if isinstance(v, float):
                return f"{v:.6g}"
            return str(v)

        return [fmt(getattr(self, c)) for c in COLUMNS]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> RunRecord:
        def num(key: str, conv):
            v = row.get(key, "")
            return conv(v) if v != "" else None

        return cls(
            protocol=row["protocol"],
            n=int(row["n"]),
            m=int(row["m"]),
            k=num("k", int),
            tau=num("tau", int),
            eps=num("eps", float),
            gamma=num("gamma", float),
            seed=int(row["seed"]),
            valid=row["valid"] == "1",
            rounds=int(row["rounds"]),
            classical_msgs=int(row["classical_msgs"]),
            quantum_msgs=int(row["quantum_msgs"]),
            wall_ms=float(row.get("wall_ms") or 0),
        )


def to_csv(records: list[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def write_csv(records: list[RunRecord], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_csv(records))


def read_csv(path: str | Path) -> list[RunRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"CSV lacks columns: {', '.join(sorted(missing))}")
        return [RunRecord.from_row(r) for r in reader]


def column_values(records: list[RunRecord], column: str) -> list[float]:
    if column not in NUMERIC:
        raise ValueError(f"column {column!r} is not numeric; choose from {', '.join(NUMERIC)}")
    return [float(getattr(r, column)) for r in records]

