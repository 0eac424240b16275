"""Grid sweeps over (scheme, D, seed) with one CSV row per episode."""

from __future__ import annotations

import csv
import io
import traceback

from .config import RunConfig
from .runner import any_violation, run_episode

COLUMNS = ("scheme", "D", "seed", "T", "R_T", "ideal_rate", "avg_distortion", "outage_rate",
           "erasure_rate", "lambda_final", "Q_T", "divergences", "verdicts", "status", "error")


def _verdict_field(summary: dict) -> str:
    parts = [f"{k}={v['status']}" for k, v in sorted(summary["verdicts"].items())]
    return ";".join(parts)


def sweep_rows(template: RunConfig, D_values, seeds, schemes=None):
    """Yield one row dict per (scheme, D, seed); failures are recorded, not raised."""
    schemes = schemes or [template.scheme]
    for scheme in schemes:
        for D in D_values:
            for seed in seeds:
                row = dict.fromkeys(COLUMNS, "")
                row.update(scheme=scheme, D=D, seed=seed)
                try:
                    cfg = template.replace(scheme=scheme, D=float(D), seed=int(seed))
                    _, summary = run_episode(cfg)
                except Exception as exc:  # noqa: BLE001 - row-level failure record
                    row["status"] = "error"
                    row["error"] = f"{type(exc).__name__}: {exc}"
                    row["_trace"] = traceback.format_exc()
                    yield row
                    continue
                row.update(
                    scheme=cfg.scheme, T=summary["T"], R_T=summary["R_T"], ideal_rate=summary["ideal_rate"],
                    avg_distortion=summary["avg_distortion"], outage_rate=summary["outage_rate"],
                    erasure_rate=summary["erasure_rate"], lambda_final=summary["lambda_final"],
                    Q_T=summary["Q_T"], divergences=summary["divergences"],
                    verdicts=_verdict_field(summary),
                    status="violated" if any_violation(summary) else "ok")
                yield row


def write_csv(rows, fh) -> list:
    writer = csv.DictWriter(fh, fieldnames=COLUMNS, extrasaction="ignore")
    writer.writeheader()
    out = []
    for row in rows:
        writer.writerow(row)
        out.append(row)
    return out


def sweep(template: RunConfig, D_values, seeds, schemes=None, path=None) -> tuple[str, list]:
    """Run the grid; return the CSV text and the row dicts (also written to ``path`` if given)."""
    buf = io.StringIO()
    rows = write_csv(sweep_rows(template, D_values, seeds, schemes), buf)
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text, rows
