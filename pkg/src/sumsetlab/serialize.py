"""CSV/JSON encoding of results.

Counts stay integers and rationals are ``{"num", "den"}`` pairs, so a parsed
document reproduces the in-memory object exactly; floats appear only in the
``prob`` / ``stderr`` convenience fields.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from .bitset import IntervalSpec, Kind, Preset
from .exact import DistQuery, Ensemble, ExactPmf
from .identities import GapReport, TailReport
from .montecarlo import EstimatedPmf

SCHEMA_VERSION = 1
CSV_FIELDS = ["m", "count", "denom_log2", "prob"]


def frac(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def unfrac(d: dict) -> Fraction:
    return Fraction(d["num"], d["den"])


def envelope(command: str, inputs: dict, results) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs, "results": results}


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


# -- distributions -----------------------------------------------------------


def pmf_rows(pmf) -> list[dict]:
    if isinstance(pmf, ExactPmf):
        return [
            {"m": m, "count": c, "denom_log2": pmf.n_free, "prob": c / pmf.total}
            for m, c in enumerate(pmf.dense())
        ]
    rows = []
    for m, c in enumerate(pmf.dense()):
        rows.append({"m": m, "count": c, "denom_log2": None, "prob": pmf.prob(m), "stderr": pmf.stderr(m)})
    return rows


def pmf_to_json(pmf) -> dict:
    if isinstance(pmf, ExactPmf):
        return {"method": "exact", "denom_log2": pmf.n_free, "support_max": pmf.support_max,
                "rows": pmf_rows(pmf)}
    return {"method": "mc", "samples": pmf.samples, "seed": pmf.seed, "rows": pmf_rows(pmf)}


def query_from_json(d: dict) -> DistQuery:
    label = d["interval"]
    try:
        interval = Preset(label)
    except ValueError:
        interval = IntervalSpec(d["lo"], d["hi"])
    return DistQuery(Ensemble(d["ensemble"]), Kind(d["kind"]), interval, d["n"])


def pmf_from_json(d: dict, query: DistQuery | None = None):
    counts = {r["m"]: r["count"] for r in d["rows"] if r["count"]}
    if d["method"] == "exact":
        return ExactPmf(d["denom_log2"], counts, d["support_max"])
    return EstimatedPmf(d["samples"], counts, d["seed"], query)


def pmf_to_csv(pmf, header_lines: list[str] = ()) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    fields = CSV_FIELDS + ([] if isinstance(pmf, ExactPmf) else ["stderr"])
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in pmf_rows(pmf):
        writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def pmf_from_csv(text: str) -> dict[int, int]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return {int(r["m"]): int(r["count"]) for r in csv.DictReader(lines) if int(r["count"])}


# -- reports -----------------------------------------------------------------


def _num(x):
    if isinstance(x, Fraction):
        return frac(x)
    return x


def _unnum(x):
    if isinstance(x, dict):
        return unfrac(x)
    return x


def gap_to_json(rep: GapReport) -> dict:
    return {
        "rule": rep.rule,
        "n": rep.n,
        "method": rep.method,
        "tv_gap": rep.tv_gap,
        "tv_exact": None if rep.tv_exact is None else frac(rep.tv_exact),
        "rhs_tail_mass": rep.rhs_tail_mass,
        "tolerance": rep.tolerance,
        "passed": rep.passed,
        "lhs": [_num(x) for x in rep.lhs],
        "rhs": [_num(x) for x in rep.rhs],
        "gaps": [_num(x) for x in rep.gaps],
    }


def gap_from_json(d: dict) -> GapReport:
    return GapReport(
        d["rule"], d["n"], d["method"],
        [_unnum(x) for x in d["lhs"]], [_unnum(x) for x in d["rhs"]], [_unnum(x) for x in d["gaps"]],
        d["tv_gap"], None if d["tv_exact"] is None else unfrac(d["tv_exact"]),
        d["rhs_tail_mass"], d["tolerance"],
    )


def tail_to_json(rep: TailReport) -> dict:
    return {
        "m_star": rep.m_star,
        "witnesses": rep.witnesses,
        "plateaus": rep.plateaus,
        "is_nonincreasing_after_mode": rep.is_nonincreasing_after_mode,
        "strictly_decreasing_after_mode": rep.strictly_decreasing_after_mode,
    }


def tail_from_json(d: dict) -> TailReport:
    return TailReport(d["m_star"], d["witnesses"], d["is_nonincreasing_after_mode"], d["plateaus"])
