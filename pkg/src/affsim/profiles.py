"""Piecewise-constant bandwidth traces.

A profile is a list of (start_time_s, bandwidth_kbps) breakpoints plus a
duration. Each breakpoint holds until the next one starts (intervals are
right-open), and the last one holds until the duration runs out. A profile
loaded without an explicit duration is open ended: the final bandwidth
persists indefinitely and only lookups below infinity are answerable.
"""

import math
import random
from bisect import bisect_right
from dataclasses import dataclass

from .errors import (InvalidParameterError, OutOfRangeError,
                     ProfileParseError, ProfileValidationError)


@dataclass(frozen=True)
class BandwidthProfile:
    breakpoints: tuple  # ((start_s, kbps), ...)
    duration_s: float

    def __post_init__(self):
        bps = tuple((float(t), float(b)) for t, b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        if not bps:
            raise ProfileValidationError("profile needs at least one row")
        if bps[0][0] != 0.0:
            raise ProfileValidationError(
                "first breakpoint must start at 0, got %g" % bps[0][0])
        for (t0, _), (t1, _) in zip(bps, bps[1:]):
            if t1 <= t0:
                raise ProfileValidationError(
                    "start times must be strictly increasing (%g then %g)"
                    % (t0, t1))
        for t, b in bps:
            if b < 0:
                raise ProfileValidationError(
                    "bandwidth must be >= 0, got %g at t=%g" % (b, t))
        if not (self.duration_s >= bps[-1][0]):
            raise ProfileValidationError(
                "duration %g ends before the last breakpoint at %g"
                % (self.duration_s, bps[-1][0]))


def load_profile(source, duration_s=None):
    """Parse `time_s,bandwidth_kbps` rows into a profile.

    `source` is a string or an iterable of lines. Blank lines and lines
    starting with '#' are skipped. A leading header row is tolerated when
    its first field is not numeric. Any other unparseable row raises
    ProfileParseError with its 1-based line number.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = [line.rstrip("\n") for line in source]
    rows = []
    saw_data = False
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 2:
            raise ProfileParseError(
                line_no, "expected 2 comma-separated fields, got %d"
                % len(fields))
        if not saw_data:
            try:
                float(fields[0])
            except ValueError:
                saw_data = True  # header row, consume it
                continue
        try:
            t, b = float(fields[0]), float(fields[1])
        except ValueError:
            raise ProfileParseError(
                line_no, "could not parse %r as numbers" % (line,)) from None
        if not (math.isfinite(t) and math.isfinite(b)):
            raise ProfileParseError(line_no, "values must be finite")
        rows.append((t, b))
        saw_data = True
    if not rows:
        raise ProfileValidationError("profile has no data rows")
    if duration_s is None:
        duration_s = math.inf
    return BandwidthProfile(tuple(rows), duration_s)


def dump_profile(profile):
    """Serialize back to CSV text that load_profile accepts."""
    out = ["time_s,bandwidth_kbps"]
    for t, b in profile.breakpoints:
        out.append("%r,%r" % (t, b))
    return "\n".join(out) + "\n"


def bandwidth_at(profile, t):
    """Bandwidth in kbit/s at time t, for 0 <= t < duration."""
    if t < 0 or t >= profile.duration_s:
        raise OutOfRangeError(
            "t=%g outside [0, %g)" % (t, profile.duration_s))
    starts = [bp[0] for bp in profile.breakpoints]
    return profile.breakpoints[bisect_right(starts, t) - 1][1]


@dataclass(frozen=True)
class ProfileStats:
    max_mbps: float
    min_mbps: float
    avg_mbps: float
    stddev_mbps: float


def profile_stats(profile):
    """Time-weighted stats over the whole profile, in Mbit/s."""
    if not math.isfinite(profile.duration_s) or profile.duration_s <= 0:
        raise InvalidParameterError(
            "stats need a finite positive duration, got %r"
            % (profile.duration_s,))
    pieces = []  # (length_s, kbps)
    bps = profile.breakpoints
    for i, (start, kbps) in enumerate(bps):
        end = bps[i + 1][0] if i + 1 < len(bps) else profile.duration_s
        end = min(end, profile.duration_s)
        if end > start:
            pieces.append((end - start, kbps))
    total = sum(length for length, _ in pieces)
    mean = sum(length * b for length, b in pieces) / total
    var = sum(length * (b - mean) ** 2 for length, b in pieces) / total
    return ProfileStats(
        max_mbps=max(b for _, b in pieces) / 1000.0,
        min_mbps=min(b for _, b in pieces) / 1000.0,
        avg_mbps=mean / 1000.0,
        stddev_mbps=math.sqrt(var) / 1000.0)


def fairness_table3():
    """Built-in shared-link trace: 22 -> 12 -> 6 -> 22 Mbit/s over 360 s."""
    return BandwidthProfile(
        ((0.0, 22000.0), (100.0, 12000.0), (200.0, 6000.0), (300.0, 22000.0)),
        360.0)


BUILTIN_PROFILES = {"fairness-table3": fairness_table3}

# Per-kind targets in kbit/s: (floor, ceiling, mean, stddev). The generator
# reproduces these as time-weighted stats of the emitted trace.
SYNTH_TARGETS = {
    "test1": (800.0, 2400.0, 2170.0, 276.5),
    "test2": (10.0, 4570.0, 1230.0, 637.4),
    "test3": (10.0, 5730.0, 2310.0, 1331.7),
}

TEST4_HIGH_KBPS = 2390.0
TEST4_LOW_KBPS = 600.0

MIN_SYNTH_DURATION_S = 60.0


def synthesize_profile(kind, seed, duration_s):
    """Generate a seeded random trace shaped like one of four scenarios.

    test1 through test3 are noisy traces whose time-weighted mean and
    stddev land on fixed targets (drawn values are affinely recentered,
    then clipped to the target floor/ceiling, and the trace touches both
    extremes at least once). test4 is a deterministic two-plateau trace:
    a high half followed by a sudden drop, independent of the seed.
    """
    if duration_s < MIN_SYNTH_DURATION_S:
        raise InvalidParameterError(
            "duration_s must be >= %g, got %r"
            % (MIN_SYNTH_DURATION_S, duration_s))
    if kind == "test4":
        return BandwidthProfile(
            ((0.0, TEST4_HIGH_KBPS), (duration_s / 2.0, TEST4_LOW_KBPS)),
            duration_s)
    if kind not in SYNTH_TARGETS:
        raise InvalidParameterError("unknown synthetic kind %r" % (kind,))
    lo, hi, target_mean, target_sd = SYNTH_TARGETS[kind]
    rng = random.Random("%s:%d" % (kind, seed))
    segments = []  # [length_s, kbps]
    t = 0.0
    while t < duration_s:
        length = min(rng.uniform(1.0, 5.0), duration_s - t)
        segments.append([length, rng.gauss(target_mean, target_sd)])
        t += length
    # Recenter so the realized time-weighted stats hit the targets, then
    # clip; a few rounds absorb the distortion clipping introduces.
    for _ in range(4):
        total = sum(length for length, _ in segments)
        mean = sum(length * v for length, v in segments) / total
        var = sum(length * (v - mean) ** 2 for length, v in segments) / total
        sd = math.sqrt(var)
        if sd == 0.0:
            break
        scale = target_sd / sd
        for seg in segments:
            seg[1] = min(hi, max(lo, target_mean + scale * (seg[1] - mean)))
    # Guarantee the extremes appear. Touches are kept short so they do not
    # disturb the calibrated stats, and scale down with short durations.
    touch_len = min(1.0, duration_s / 600.0)
    touches = max(1, round(duration_s / 600.0))
    for value in (lo, hi):
        for _ in range(touches):
            i = rng.randrange(len(segments))
            length, v = segments[i]
            if length > 2.0 * touch_len:
                segments[i] = [length - touch_len, v]
                segments.insert(i + 1, [touch_len, value])
            else:
                segments[i] = [length, value]
    breakpoints = []
    t = 0.0
    for length, v in segments:
        breakpoints.append((t, v))
        t += length
    return BandwidthProfile(tuple(breakpoints), duration_s)
