"""Single-client playback simulation over a bandwidth trace.

Deterministic fluid model. A download consumes the full link capacity, so
its duration is found by inverting the cumulative capacity integral, never
by time stepping. Playback holds until the first segment lands, then the
buffer drains one media second per wall second whenever playback is active.
Draining to empty mid-download opens a stall, which closes at a completion
once the buffer refills to the rebuffer target. A request that would land
more media than the buffer can hold waits until one segment of room has
drained free. Requests are otherwise issued back to back, one at a time.
"""

from bisect import bisect_right
from dataclasses import dataclass

from .abr import AbrConfig, BitrateLadder, decide
from .errors import InvalidParameterError, ProfileExhaustedError
from .estimators import EstimatorConfig, ThroughputSample, estimator_new, \
    estimator_update

DEFAULT_MAX_BUFFER_S = 30.0
BUFFER_TICK_S = 0.5


@dataclass(frozen=True)
class SimConfig:
    ladder: BitrateLadder = BitrateLadder()
    abr: AbrConfig = AbrConfig()
    estimator: EstimatorConfig = EstimatorConfig()
    max_buffer_s: float = DEFAULT_MAX_BUFFER_S
    rebuffer_target_s: float = None  # None means one segment duration
    total_segments: int = 150


@dataclass(frozen=True)
class SegmentRecord:
    index: int
    quality_index: int
    size_kbit: float
    t_request_s: float
    t_complete_s: float
    instant_throughput_kbps: float
    estimate_kbps: float
    buffer_after_s: float
    decision_reason: str


@dataclass(frozen=True)
class SessionTrace:
    records: tuple
    stalls: tuple  # ((start_s, duration_s), ...)
    startup_delay_s: float
    wall_time_s: float
    idle_full_s: float  # request time lost waiting for buffer room
    buffer_series: tuple  # ((t_s, level_s), ...)


def _validated(cfg):
    if cfg.total_segments < 1:
        raise InvalidParameterError(
            "total_segments must be >= 1, got %r" % (cfg.total_segments,))
    seg_dur = cfg.ladder.segment_duration_s
    if cfg.max_buffer_s <= cfg.abr.panic_buffer_s:
        raise InvalidParameterError(
            "max_buffer_s %g must exceed panic_buffer_s %g"
            % (cfg.max_buffer_s, cfg.abr.panic_buffer_s))
    if cfg.max_buffer_s < seg_dur:
        raise InvalidParameterError(
            "max_buffer_s %g cannot hold one %g s segment"
            % (cfg.max_buffer_s, seg_dur))
    target = cfg.rebuffer_target_s
    if target is None:
        target = seg_dur
    if not (0.0 < target <= cfg.max_buffer_s):
        raise InvalidParameterError(
            "rebuffer_target_s must be in (0, max_buffer_s], got %r"
            % (target,))
    return seg_dur, target


def integrate_download(profile, start_s, size_kbit):
    """Seconds needed to move size_kbit starting at start_s.

    Walks the profile's constant pieces and accumulates capacity until the
    requested size is covered. Raises ProfileExhaustedError when the trace
    ends first.
    """
    if size_kbit <= 0:
        raise InvalidParameterError(
            "size_kbit must be positive, got %r" % (size_kbit,))
    if start_s < 0 or start_s >= profile.duration_s:
        raise ProfileExhaustedError(
            "download starts at %g, outside the trace" % (start_s,))
    bps = profile.breakpoints
    idx = bisect_right([bp[0] for bp in bps], start_s) - 1
    t = start_s
    remaining = size_kbit
    while True:
        piece_end = bps[idx + 1][0] if idx + 1 < len(bps) else \
            profile.duration_s
        bw = bps[idx][1]
        if bw > 0:
            need = remaining / bw
            if t + need <= piece_end:
                return t + need - start_s
            remaining -= bw * (piece_end - t)
        t = piece_end
        idx += 1
        if t >= profile.duration_s:
            raise ProfileExhaustedError(
                "trace ends at %g with %g kbit still to download"
                % (profile.duration_s, remaining))


def run_session(profile, cfg):
    """Play cfg.total_segments segments against the profile.

    Returns the full per-segment trace plus stall and buffer accounting.
    The closing identity, checked by the test suite to nanosecond scale:
    wall_time = startup_delay + total media duration + total stall time.
    Time lost to buffer-full waits overlaps playback, so it appears as
    idle_full_s instead of extending the wall clock.
    """
    seg_dur, target = _validated(cfg)
    est_state = estimator_new(cfg.estimator)
    estimate = None

    t = 0.0
    buffer = 0.0
    playing = False
    stalled = False
    stall_start = 0.0
    startup_delay = 0.0
    idle_full = 0.0
    stalls = []
    records = []
    series = [(0.0, 0.0)]
    next_tick = BUFFER_TICK_S

    def advance(to_t, draining):
        # move the clock, emitting 0.5 s buffer samples along the way
        nonlocal t, buffer, next_tick
        if to_t <= t:
            return
        while next_tick <= to_t:
            level = buffer - (next_tick - t) if draining else buffer
            series.append((next_tick, max(0.0, level)))
            next_tick += BUFFER_TICK_S
        if draining:
            buffer = max(0.0, buffer - (to_t - t))
        t = to_t

    for index in range(1, cfg.total_segments + 1):
        if buffer > cfg.max_buffer_s - seg_dur:
            # no room for the next segment: let playback drain some out
            wait = buffer - (cfg.max_buffer_s - seg_dur)
            idle_full += wait
            advance(t + wait, draining=True)
            buffer = cfg.max_buffer_s - seg_dur
        decision = decide(cfg.ladder, cfg.abr, estimate, buffer, index == 1)
        size = cfg.ladder.bitrates_kbps[decision.quality_index] * seg_dur
        t_request = t
        series.append((t, buffer))
        tau = integrate_download(profile, t_request, size)
        t_complete = t_request + tau
        if playing and not stalled:
            if buffer < tau:
                advance(t_request + buffer, draining=True)
                buffer = 0.0
                stalled = True
                stall_start = t
                series.append((t, 0.0))
                advance(t_complete, draining=False)
            else:
                advance(t_complete, draining=True)
        else:
            advance(t_complete, draining=False)
        inst = size / tau
        est_state, est = estimator_update(
            est_state, ThroughputSample(inst, index))
        estimate = est
        buffer += seg_dur
        if index == 1:
            playing = True
            startup_delay = t_complete
        if stalled and (buffer >= target or index == cfg.total_segments):
            # a stall can only close when new media lands; at end of
            # stream the player drains whatever it has
            stalls.append((stall_start, t_complete - stall_start))
            stalled = False
        records.append(SegmentRecord(
            index=index, quality_index=decision.quality_index,
            size_kbit=size, t_request_s=t_request, t_complete_s=t_complete,
            instant_throughput_kbps=inst, estimate_kbps=est.value_kbps,
            buffer_after_s=buffer, decision_reason=decision.reason))
        series.append((t, buffer))

    advance(t + buffer, draining=True)
    buffer = 0.0
    series.append((t, 0.0))
    return SessionTrace(
        records=tuple(records), stalls=tuple(stalls),
        startup_delay_s=startup_delay, wall_time_s=t,
        idle_full_s=idle_full, buffer_series=tuple(series))
