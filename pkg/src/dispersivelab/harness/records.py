"""Result records and their on-disk forms.

One suite run produces one ResultRecord: an ordered tuple of cases, each
carrying its inputs, the measured value, the predicted value, and the
anchor -- a one-line statement of where the prediction comes from, stored
as a string so a FAIL row is legible without the source tree.  The CSV
form contains everything except timing and is byte-identical across runs
with the same config hash; wall-clock lives only in the JSON summary.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

PASS = "PASS"
FAIL = "FAIL"


@dataclass(frozen=True)
class CaseResult:
    id: str
    inputs: dict
    measured: float
    predicted: float
    anchor: str
    verdict: str

    @property
    def passed(self):
        return self.verdict == PASS


@dataclass(frozen=True)
class ResultRecord:
    suite: str
    config_hash: str
    seed: int
    cases: tuple
    wall_clock_s: float
    # name -> (header tuple, row list); exported as two-or-more column CSV
    plot_tables: dict = field(default_factory=dict)

    @property
    def all_passed(self):
        return all(c.passed for c in self.cases)

    def failures(self):
        return [c for c in self.cases if not c.passed]


def verdict_two_sided(measured, predicted, tol) -> str:
    return PASS if abs(measured - predicted) <= tol else FAIL


def verdict_leq(measured, bound) -> str:
    return PASS if measured <= bound else FAIL


def _cell(value):
    """Deterministic text for one CSV cell (repr round-trips floats)."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _inputs_json(inputs):
    return json.dumps(inputs, sort_keys=True, separators=(",", ":"),
                      default=str)


def write_case_csv(record: ResultRecord, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# suite={record.suite} config={record.config_hash} "
                 f"seed={record.seed}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ("id", "verdict", "measured", "predicted", "anchor", "inputs"))
        for c in record.cases:
            writer.writerow((c.id, c.verdict, _cell(c.measured),
                             _cell(c.predicted), c.anchor,
                             _inputs_json(c.inputs)))


def write_summary_json(record: ResultRecord, path) -> None:
    payload = {
        "suite": record.suite,
        "config_hash": record.config_hash,
        "cases": [
            {"id": c.id, "inputs": c.inputs, "measured": c.measured,
             "predicted": c.predicted, "anchor": c.anchor,
             "verdict": c.verdict}
            for c in record.cases
        ],
        "wall_clock_s": record.wall_clock_s,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=str)
        fh.write("\n")


def write_plot_tables(record: ResultRecord, outdir) -> list:
    """Write each plot table as <name>.csv under outdir; returns paths."""
    paths = []
    for name, (header, rows) in record.plot_tables.items():
        path = os.path.join(outdir, f"{name}.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow(tuple(_cell(v) for v in row))
        paths.append(path)
    return paths


def write_record(record: ResultRecord, outdir) -> dict:
    """Persist the full record; returns {kind: path} of what was written."""
    os.makedirs(outdir, exist_ok=True)
    csv_path = os.path.join(outdir, f"{record.suite}_results.csv")
    json_path = os.path.join(outdir, f"{record.suite}_summary.json")
    write_case_csv(record, csv_path)
    write_summary_json(record, json_path)
    written = {"results": csv_path, "summary": json_path}
    for i, path in enumerate(write_plot_tables(record, outdir)):
        written[f"plot{i}"] = path
    return written
