"""Quality-of-experience summaries and result export.

The CSV layout is long-form `section,key,value` rows so that one flat file
can carry scalar metrics and CDF tables side by side. Floats are printed
with 4 decimal places in CSV; JSON keeps full precision.
"""

import csv
import io
import json
from dataclasses import dataclass

from .errors import InvalidParameterError
from .fairness import FairnessResult

BUFFER_CDF_STEP_S = 0.5


@dataclass(frozen=True)
class QoeReport:
    bitrate_changes: int
    stall_events: int
    stall_durations_s: tuple
    mean_bitrate_kbps: float
    bitrate_cdf: tuple  # ((kbps, fraction of segments at or below), ...)
    buffer_cdf: tuple   # ((seconds, fraction of samples at or below), ...)


def summarize(trace, ladder):
    """Collapse a SessionTrace into its headline QoE numbers."""
    qualities = [r.quality_index for r in trace.records]
    changes = sum(1 for a, b in zip(qualities, qualities[1:]) if a != b)
    bitrates = [ladder.bitrates_kbps[q] for q in qualities]
    mean_bitrate = sum(bitrates) / len(bitrates)
    n = len(bitrates)
    bitrate_cdf = tuple(
        (rung, sum(1 for b in bitrates if b <= rung) / n)
        for rung in ladder.bitrates_kbps)
    levels = [level for _, level in trace.buffer_series]
    buffer_cdf = ()
    if levels:
        top = max(levels)
        thresholds = [0.0]
        while thresholds[-1] < top:
            thresholds.append(thresholds[-1] + BUFFER_CDF_STEP_S)
        m = len(levels)
        buffer_cdf = tuple(
            (th, sum(1 for lv in levels if lv <= th) / m)
            for th in thresholds)
    return QoeReport(
        bitrate_changes=changes,
        stall_events=len(trace.stalls),
        stall_durations_s=tuple(d for _, d in trace.stalls),
        mean_bitrate_kbps=mean_bitrate,
        bitrate_cdf=bitrate_cdf,
        buffer_cdf=buffer_cdf)


def _report_dict(report):
    return {
        "bitrate_changes": report.bitrate_changes,
        "stall_events": report.stall_events,
        "stall_durations_s": list(report.stall_durations_s),
        "mean_bitrate_kbps": report.mean_bitrate_kbps,
        "bitrate_cdf": [list(row) for row in report.bitrate_cdf],
        "buffer_cdf": [list(row) for row in report.buffer_cdf],
    }


def _fairness_dict(result):
    return {
        "jfi": result.jfi,
        "total_avg_kbps": result.total_avg_kbps,
        "per_client_avg_kbps": list(result.per_client_avg_kbps),
    }


def to_dict(obj):
    if isinstance(obj, QoeReport):
        return _report_dict(obj)
    if isinstance(obj, FairnessResult):
        return _fairness_dict(obj)
    raise InvalidParameterError("cannot export %r" % (type(obj).__name__,))


def _csv_rows(obj):
    rows = [("section", "key", "value")]
    if isinstance(obj, QoeReport):
        rows.append(("summary", "bitrate_changes", str(obj.bitrate_changes)))
        rows.append(("summary", "stall_events", str(obj.stall_events)))
        rows.append(("summary", "mean_bitrate_kbps",
                     "%.4f" % obj.mean_bitrate_kbps))
        for i, d in enumerate(obj.stall_durations_s, start=1):
            rows.append(("stall_durations_s", str(i), "%.4f" % d))
        for kbps, frac in obj.bitrate_cdf:
            rows.append(("bitrate_cdf", "%.4f" % kbps, "%.4f" % frac))
        for seconds, frac in obj.buffer_cdf:
            rows.append(("buffer_cdf", "%.4f" % seconds, "%.4f" % frac))
    elif isinstance(obj, FairnessResult):
        rows.append(("summary", "jfi", "%.4f" % obj.jfi))
        rows.append(("summary", "total_avg_kbps",
                     "%.4f" % obj.total_avg_kbps))
        for i, v in enumerate(obj.per_client_avg_kbps):
            rows.append(("per_client_avg_kbps", str(i), "%.4f" % v))
    else:
        raise InvalidParameterError(
            "cannot export %r" % (type(obj).__name__,))
    return rows


def export(obj, fmt, destination=None):
    """Render a QoeReport or FairnessResult as 'json' or 'csv' text.

    Writes to `destination` (a path or writable file object) when given,
    and always returns the rendered text.
    """
    if fmt == "json":
        text = json.dumps(to_dict(obj), indent=2) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(_csv_rows(obj))
        text = buf.getvalue()
    else:
        raise InvalidParameterError("unknown export format %r" % (fmt,))
    if destination is not None:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w") as fh:
                fh.write(text)
    return text


def parse_csv_export(text):
    """Read a CSV export back into {section: ...} (inverse of export)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != ["section", "key", "value"]:
        raise InvalidParameterError("not a toolkit CSV export")
    out = {}
    for section, key, value in reader:
        out.setdefault(section, [])
        out[section].append((key, float(value)))
    return out
