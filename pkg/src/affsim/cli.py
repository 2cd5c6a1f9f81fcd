"""Command line front end.

Subcommands: run (single session), fairness (shared link), compare (all
three estimators on one trace), stats (trace statistics). Every domain
error exits nonzero with a one-line diagnostic on stderr.
"""

import argparse
import json
import sys

from .abr import AbrConfig, BitrateLadder
from .errors import AffSimError
from .estimators import EstimatorConfig
from .fairness import FairnessConfig, run_fairness
from .profiles import BUILTIN_PROFILES, load_profile, profile_stats, \
    synthesize_profile
from .report import export, summarize, to_dict
from .sim import SimConfig, run_session

SYNTH_KINDS = ("test1", "test2", "test3", "test4")
ESTIMATOR_CHOICES = ("aff", "ewma", "avg3")
COMPARE_ORDER = ("aff", "avg3", "ewma")


def _add_profile_args(p, profile_required=True):
    group = p.add_mutually_exclusive_group(required=profile_required)
    group.add_argument("--profile",
                       help="bandwidth trace CSV path, or a built-in name "
                            "(%s)" % ", ".join(sorted(BUILTIN_PROFILES)))
    group.add_argument("--synth", choices=SYNTH_KINDS,
                       help="generate a synthetic trace instead")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for synthetic traces and client jitter")
    p.add_argument("--duration", type=float, default=None,
                   help="trace duration in seconds (csv traces default to "
                        "open ended, synthetic ones to a generous span)")


def _add_session_args(p):
    p.add_argument("--segments", type=int, default=150)
    p.add_argument("--segment-duration", type=float, default=2.0)
    p.add_argument("--ladder", default="250,500,1000,2000",
                   help="comma separated bitrates in kbit/s, ascending")
    p.add_argument("--panic-buffer", type=float, default=8.0)
    p.add_argument("--max-buffer", type=float, default=30.0)
    p.add_argument("--rebuffer-target", type=float, default=None)
    p.add_argument("--initial-quality", type=int, default=0)


def _add_estimator_args(p):
    p.add_argument("--estimator", choices=ESTIMATOR_CHOICES, default="aff")
    p.add_argument("--step-size", type=float, default=0.1)
    p.add_argument("--forgetting-min", type=float, default=0.6)
    p.add_argument("--forgetting-max", type=float, default=1.0)
    p.add_argument("--ewma-weight", type=float, default=0.2)
    p.add_argument("--avg-window", type=int, default=3,
                   help="sample count for the sliding mean")


def _add_out_args(p):
    p.add_argument("--out", help="write the report to this path")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _estimator_config(args, kind):
    internal = {"aff": "aff", "ewma": "ewma", "avg3": "sliding_mean"}[kind]
    return EstimatorConfig(
        kind=internal, step_size=args.step_size,
        forgetting_min=args.forgetting_min,
        forgetting_max=args.forgetting_max,
        ewma_weight=args.ewma_weight, window=args.avg_window)


def _sim_config(args, kind):
    try:
        rungs = tuple(float(b) for b in args.ladder.split(","))
    except ValueError:
        raise AffSimError("could not parse --ladder %r" % (args.ladder,)) \
            from None
    return SimConfig(
        ladder=BitrateLadder(rungs, args.segment_duration),
        abr=AbrConfig(args.panic_buffer, args.initial_quality),
        estimator=_estimator_config(args, kind),
        max_buffer_s=args.max_buffer,
        rebuffer_target_s=args.rebuffer_target,
        total_segments=args.segments)


def _build_profile(args, default_synth_duration):
    if args.synth:
        duration = args.duration
        if duration is None:
            duration = default_synth_duration
        return synthesize_profile(args.synth, args.seed, duration)
    if args.profile in BUILTIN_PROFILES:
        return BUILTIN_PROFILES[args.profile]()
    with open(args.profile) as fh:
        return load_profile(fh, args.duration)


def _synth_span(args):
    # generous default so sessions with stalls still fit in the trace
    return max(60.0, 2.0 * args.segments * args.segment_duration + 120.0)


def _print_session(trace, report):
    stall_total = sum(d for _, d in trace.stalls)
    print("segments: %d" % len(trace.records))
    print("mean_bitrate_kbps: %.4f" % report.mean_bitrate_kbps)
    print("bitrate_changes: %d" % report.bitrate_changes)
    print("stall_events: %d" % report.stall_events)
    print("stall_time_s: %.4f" % stall_total)
    print("startup_delay_s: %.4f" % trace.startup_delay_s)
    print("wall_time_s: %.4f" % trace.wall_time_s)
    print("idle_full_s: %.4f" % trace.idle_full_s)


def _write_trace_csv(trace, path):
    with open(path, "w") as fh:
        fh.write("index,quality_index,size_kbit,t_request_s,t_complete_s,"
                 "instant_throughput_kbps,estimate_kbps,buffer_after_s,"
                 "decision_reason\n")
        for r in trace.records:
            fh.write("%d,%d,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%s\n" % (
                r.index, r.quality_index, r.size_kbit, r.t_request_s,
                r.t_complete_s, r.instant_throughput_kbps, r.estimate_kbps,
                r.buffer_after_s, r.decision_reason))


def _cmd_run(args):
    profile = _build_profile(args, _synth_span(args))
    cfg = _sim_config(args, args.estimator)
    trace = run_session(profile, cfg)
    report = summarize(trace, cfg.ladder)
    _print_session(trace, report)
    if args.trace:
        _write_trace_csv(trace, args.trace)
    if args.out:
        export(report, args.format, args.out)
    return 0


def _cmd_fairness(args):
    if args.profile is None and args.synth is None:
        args.profile = "fairness-table3"
    profile = _build_profile(args, _synth_span(args))
    try:
        window = tuple(float(x) for x in args.window.split(":"))
        if len(window) != 2:
            raise ValueError
    except ValueError:
        raise AffSimError("window must look like LO:HI, got %r"
                          % (args.window,)) from None
    cfg = FairnessConfig(
        n_clients=args.clients, start_jitter_s=args.jitter, window=window,
        profile=profile, sim=_sim_config(args, args.estimator),
        rng_seed=args.seed)
    result = run_fairness(cfg)
    print("clients: %d" % args.clients)
    print("jfi: %.4f" % result.jfi)
    print("total_avg_kbps: %.4f" % result.total_avg_kbps)
    for i, v in enumerate(result.per_client_avg_kbps):
        print("client_%d_avg_kbps: %.4f" % (i, v))
    if args.out:
        export(result, args.format, args.out)
    return 0


def _cmd_compare(args):
    profile = _build_profile(args, _synth_span(args))
    rows = []
    for kind in COMPARE_ORDER:
        cfg = _sim_config(args, kind)
        trace = run_session(profile, cfg)
        rows.append((kind, summarize(trace, cfg.ladder)))
    header = ("method", "bitrate_changes", "stall_events", "stall_time_s",
              "mean_bitrate_kbps")
    table = [header]
    for kind, rep in rows:
        stall_time = ", ".join("%.2f" % d for d in rep.stall_durations_s) \
            or "--"
        table.append((kind, str(rep.bitrate_changes),
                      str(rep.stall_events), stall_time,
                      "%.2f" % rep.mean_bitrate_kbps))
    widths = [max(len(row[i]) for row in table)
              for i in range(len(header))]
    for row in table:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths))
              .rstrip())
    if args.out:
        payload = {kind: to_dict(rep) for kind, rep in rows}
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return 0


def _cmd_stats(args):
    profile = _build_profile(args, 600.0)
    stats = profile_stats(profile)
    print("max_mbps: %.4f" % stats.max_mbps)
    print("min_mbps: %.4f" % stats.min_mbps)
    print("avg_mbps: %.4f" % stats.avg_mbps)
    print("stddev_mbps: %.4f" % stats.stddev_mbps)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="affsim",
        description="Trace-driven adaptive bitrate simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one playback session")
    _add_profile_args(p_run)
    _add_session_args(p_run)
    _add_estimator_args(p_run)
    _add_out_args(p_run)
    p_run.add_argument("--trace", help="write the per-segment CSV here")
    p_run.set_defaults(func=_cmd_run)

    p_fair = sub.add_parser("fairness",
                            help="simulate clients sharing one link")
    _add_profile_args(p_fair, profile_required=False)
    _add_session_args(p_fair)
    _add_estimator_args(p_fair)
    _add_out_args(p_fair)
    p_fair.add_argument("--clients", type=int, default=10)
    p_fair.add_argument("--jitter", type=float, default=15.0)
    p_fair.add_argument("--window", default="50:350")
    p_fair.set_defaults(func=_cmd_fairness, segments=180)

    p_cmp = sub.add_parser("compare",
                           help="run all three estimators on one trace")
    _add_profile_args(p_cmp)
    _add_session_args(p_cmp)
    _add_estimator_args(p_cmp)
    p_cmp.add_argument("--out", help="write per-method reports as JSON")
    p_cmp.set_defaults(func=_cmd_compare)

    p_stats = sub.add_parser("stats", help="print trace statistics")
    _add_profile_args(p_stats)
    p_stats.set_defaults(func=_cmd_stats)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AffSimError, OSError) as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
