"""The voltpick command line.

Subcommands: profile build | profile show | analyze | recommend | compare |
apply | meter selftest.  Exit codes: 0 success, 1 user or config error,
2 environment error (for example no readable energy counters).

The meter backend resolves as: VOLTPICK_BACKEND environment variable if
set, else --backend, else rapl-powercap.  Synthetic scripts given on the
command line tile (repeat) as needed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import jsonio
from .analyzer import analyze_corpus, load_usage_report, save_usage_report
from .errors import EnvironmentFailure, VoltpickError
from .groups import builtin_groups
from .harness import RunPlan, scenario_preset
from .languages import language_profile
from .meter import ENV_BACKEND, BACKEND_RAPL, Meter, MeterConfig, open_meter
from .patcher import MODE_DRY_RUN, MODE_IN_PLACE, apply_patches, plan_patches
from .profile import build_profile, load_profile, save_profile
from .recommend import (
    compare_profiles,
    recommend_program,
    recommendation_set_from_dict,
    recommendation_set_to_dict,
)
from .render import FORMATS, render_profile, render_report


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; this tool reserves 2 for the host."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_meter_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend",
                        choices=("rapl-powercap", "time-power", "synthetic"),
                        default=BACKEND_RAPL,
                        help="meter backend (VOLTPICK_BACKEND overrides)")
    parser.add_argument("--power", type=float, default=None, metavar="WATTS",
                        help="assumed power for the time-power estimator")
    parser.add_argument("--script", default=None, metavar="UJ,UJ,...",
                        help="synthetic backend: comma-separated raw counter values")
    parser.add_argument("--script-file", default=None, metavar="FILE",
                        help="synthetic backend: file with one raw counter value per line")
    parser.add_argument("--counter-max", type=int, default=None, metavar="UJ",
                        help="counter wraparound modulus in microjoules")


def _meter_from_args(args) -> Meter:
    backend = os.environ.get(ENV_BACKEND) or args.backend
    script = None
    if args.script_file is not None:
        script = [int(line) for line in
                  Path(args.script_file).read_text().split()]
    elif args.script is not None:
        script = [int(v) for v in args.script.split(",") if v.strip()]
    config = MeterConfig(
        backend_kind=backend,
        assumed_power_watts=args.power,
        counter_max_microjoules=args.counter_max,
        script=script,
        repeat_script=script is not None,
    )
    return open_meter(config)


def _stderr_progress(record: dict) -> None:
    sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def build_parser() -> _Parser:
    parser = _Parser(prog="voltpick",
                     description="Energy profiles and substitution "
                                 "recommendations for interchangeable "
                                 "data-structure implementations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    profile = sub.add_parser("profile", help="build or inspect energy profiles")
    profile_sub = profile.add_subparsers(dest="profile_command", required=True,
                                         parser_class=_Parser)

    build = profile_sub.add_parser(
        "build", help="micro-benchmark a construct pool into a profile")
    build.add_argument("--group", default="list,map,set",
                       help="comma-separated api kinds to profile")
    build.add_argument("--scenario", choices=("small", "medium", "big"),
                       default="small")
    build.add_argument("--runs", type=int, default=10, metavar="N")
    build.add_argument("--warmups", type=int, default=3, metavar="W")
    build.add_argument("--threshold", type=float, default=100.0, metavar="F",
                       help="discard factor over the fastest alternative's mean time")
    build.add_argument("--seed", type=int, default=0, metavar="S")
    build.add_argument("--out", required=True, metavar="FILE")
    build.add_argument("--elements", type=int, default=None,
                       help="override the scenario's element count (expert knob)")
    build.add_argument("--reps", type=int, default=None,
                       help="override the scenario's op repetitions (expert knob)")
    build.add_argument("--note", default="", help="free-form environment note")
    _add_meter_flags(build)

    show = profile_sub.add_parser("show",
                                  help="render a profile grid")
    show.add_argument("file")
    show.add_argument("--dominance", action="store_true",
                      help="also list dominance pairs and incomparable implementations")

    analyze = sub.add_parser("analyze",
                             help="scan a source corpus into a usage report")
    analyze.add_argument("--lang", required=True)
    analyze.add_argument("--loop-weight", type=float, default=1.0, metavar="L",
                         help="weight calls by L**loop_depth (default 1: raw counts)")
    analyze.add_argument("--corpus", default=None, help="corpus label")
    analyze.add_argument("--out", default=None, metavar="FILE")
    analyze.add_argument("paths", nargs="+", metavar="PATH")

    recommend = sub.add_parser("recommend",
                               help="combine a profile and a usage report")
    recommend.add_argument("--profile", required=True, metavar="FILE")
    recommend.add_argument("--usage", required=True, metavar="FILE")
    recommend.add_argument("--respect-thread-safety",
                           action=argparse.BooleanOptionalAction, default=True,
                           help="never replace a thread-safe implementation "
                                "with a thread-unsafe one (default on)")
    recommend.add_argument("--format", choices=FORMATS, default="table")
    recommend.add_argument("--out", default=None, metavar="FILE")

    compare = sub.add_parser("compare",
                             help="recommend under several profiles and diff the choices")
    compare.add_argument("--usage", required=True, metavar="FILE")
    compare.add_argument("--profile", required=True, nargs="+", metavar="FILE")
    compare.add_argument("--respect-thread-safety",
                         action=argparse.BooleanOptionalAction, default=True)

    apply_cmd = sub.add_parser("apply",
                               help="apply recommendations to source files")
    apply_cmd.add_argument("--recommendations", required=True, metavar="FILE")
    apply_cmd.add_argument("--lang", required=True)
    mode = apply_cmd.add_mutually_exclusive_group()
    mode.add_argument("--dry-run", dest="mode", action="store_const",
                      const=MODE_DRY_RUN, default=MODE_DRY_RUN,
                      help="print a unified diff, change nothing (default)")
    mode.add_argument("--in-place", dest="mode", action="store_const",
                      const=MODE_IN_PLACE, help="rewrite files atomically")
    apply_cmd.add_argument("paths", nargs="+", metavar="PATH")

    meter = sub.add_parser("meter", help="meter diagnostics")
    meter_sub = meter.add_subparsers(dest="meter_command", required=True,
                                     parser_class=_Parser)
    selftest = meter_sub.add_parser(
        "selftest", help="open the configured backend and measure a few spans")
    selftest.add_argument("--spans", type=int, default=3)
    _add_meter_flags(selftest)

    return parser


def _cmd_profile_build(args) -> int:
    kinds = list(dict.fromkeys(k.strip() for k in args.group.split(",") if k.strip()))
    try:
        groups = builtin_groups(kinds)
    except KeyError as exc:
        raise VoltpickError(str(exc)) from exc
    scenario = scenario_preset(args.scenario, args.elements, args.reps)
    plan = RunPlan(total_runs=args.runs, warmup_discard=args.warmups,
                   time_threshold_factor=args.threshold, rng_seed=args.seed)
    meter = _meter_from_args(args)
    profile = build_profile(groups, scenario, meter, plan,
                            progress=_stderr_progress,
                            environment_note=args.note)
    save_profile(profile, args.out)
    sys.stderr.write(json.dumps({"event": "profile-written", "path": args.out,
                                 "entries": len(profile.entries)},
                                sort_keys=True) + "\n")
    return 0


def _cmd_profile_show(args) -> int:
    profile = load_profile(args.file)
    sys.stdout.write(render_profile(profile, show_dominance=args.dominance))
    return 0


def _cmd_analyze(args) -> int:
    lang = language_profile(args.lang)
    report = analyze_corpus(args.paths, lang, loop_weight=args.loop_weight,
                            corpus_label=args.corpus)
    for note in report.diagnostics:
        sys.stderr.write(f"voltpick: analyze: {note}\n")
    if args.out:
        save_usage_report(report, args.out)
    else:
        from .analyzer import report_to_dict
        sys.stdout.write(jsonio.dumps(report_to_dict(report)))
    return 0


def _cmd_recommend(args) -> int:
    profile = load_profile(args.profile)
    report = load_usage_report(args.usage)
    rec_set = recommend_program(report, profile,
                                respect_thread_safety=args.respect_thread_safety)
    _emit(render_report(rec_set, args.format), args.out)
    return 0


def _cmd_compare(args) -> int:
    report = load_usage_report(args.usage)
    profiles = [load_profile(p) for p in args.profile]
    comparison = compare_profiles(report, profiles,
                                  respect_thread_safety=args.respect_thread_safety)
    for path, rec_set in zip(args.profile, comparison.sets):
        sys.stdout.write(
            f"== {path} (scenario {rec_set.scenario_id}): "
            f"{rec_set.aggregate_current_joules:g} J -> "
            f"{rec_set.aggregate_recommended_joules:g} J "
            f"({rec_set.aggregate_savings_fraction * 100:.1f}%)\n"
        )
    if comparison.differing_sites:
        sys.stdout.write("sites whose choice differs across profiles:\n")
        for site_id in sorted(comparison.differing_sites):
            picks = comparison.differing_sites[site_id]
            sys.stdout.write(f"  {site_id}: " + " / ".join(picks) + "\n")
    else:
        sys.stdout.write("all profiles agree on every site\n")
    return 0


def _cmd_apply(args) -> int:
    lang = language_profile(args.lang)
    doc = jsonio.read(args.recommendations)
    rec_set = recommendation_set_from_dict(doc)
    patches = plan_patches(rec_set, args.paths, lang)
    result = apply_patches(patches, args.mode)
    if args.mode == MODE_DRY_RUN:
        sys.stdout.write(result)
    else:
        for path in result:
            sys.stderr.write(f"voltpick: patched {path}\n")
    return 0


def _cmd_meter_selftest(args) -> int:
    meter = _meter_from_args(args)
    for _ in range(args.spans):
        token = meter.span_begin()
        total = 0
        for i in range(200_000):
            total += i * i
        reading = meter.span_end(token)
        sys.stdout.write(json.dumps({
            "backend": reading.backend_id,
            "domain": reading.domain,
            "joules": reading.joules,
            "elapsed_seconds": reading.elapsed_seconds,
        }, sort_keys=True) + "\n")
    return 0


_COMMANDS = {
    ("profile", "build"): _cmd_profile_build,
    ("profile", "show"): _cmd_profile_show,
    ("analyze", None): _cmd_analyze,
    ("recommend", None): _cmd_recommend,
    ("compare", None): _cmd_compare,
    ("apply", None): _cmd_apply,
    ("meter", "selftest"): _cmd_meter_selftest,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    subcommand = getattr(args, "profile_command", None) or \
        getattr(args, "meter_command", None)
    handler = _COMMANDS[(args.command, subcommand)]
    try:
        return handler(args)
    except EnvironmentFailure as exc:
        sys.stderr.write(f"voltpick: environment error: {exc}\n")
        return 2
    except VoltpickError as exc:
        sys.stderr.write(f"voltpick: error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"voltpick: error: {exc}\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(f"voltpick: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
