"""Human- and machine-readable rendering of recommendation sets and profiles."""

from __future__ import annotations

import csv
import io

from . import jsonio
from .harness import STATUS_MEASURED
from .profile import EnergyProfile, dominance_pairs
from .recommend import RecommendationSet, recommendation_set_to_dict

FORMATS = ("table", "csv", "json")


def _pct(fraction: float) -> str:
    return f"{fraction * 100:.1f}%"


def render_report(rec_set: RecommendationSet, fmt: str = "table") -> str:
    """Render a recommendation set.

    Estimates are profile-relative scores in joules, not predictions of
    real consumption; the table header says so.
    """
    if fmt == "json":
        return jsonio.dumps(recommendation_set_to_dict(rec_set))
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["site_id", "current_impl", "recommended_impl",
                         "estimated_current_joules", "estimated_recommended_joules",
                         "savings_fraction"])
        for r in rec_set.recommendations:
            writer.writerow([r.site_id, r.current_impl, r.recommended_impl,
                             repr(r.estimated_current_joules),
                             repr(r.estimated_recommended_joules),
                             repr(r.savings_fraction)])
        return buffer.getvalue()
    if fmt != "table":
        raise ValueError(f"format must be one of {FORMATS}")

    headers = ["site", "current", "recommended", "current score (J)",
               "recommended score (J)", "savings"]
    rows = [
        [r.site_id, r.current_impl,
         r.recommended_impl + (" *" if r.current_estimate_partial else ""),
         f"{r.estimated_current_joules:g}",
         f"{r.estimated_recommended_joules:g}",
         _pct(r.savings_fraction)]
        for r in rec_set.recommendations
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    lines.extend("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row))
                 for row in rows)
    lines.append(
        f"aggregate: {rec_set.aggregate_current_joules:g} J -> "
        f"{rec_set.aggregate_recommended_joules:g} J "
        f"(savings {_pct(rec_set.aggregate_savings_fraction)}; "
        "profile-relative scores)"
    )
    for note in rec_set.diagnostics:
        lines.append(f"note: {note}")
    if any(r.current_estimate_partial for r in rec_set.recommendations):
        lines.append("*: current implementation unmeasured for some used ops; "
                     "its score is best-effort")
    return "\n".join(lines) + "\n"


def render_profile(profile: EnergyProfile, show_dominance: bool = False) -> str:
    """Long-form grid: one row per (implementation, operation) cell."""
    lines = [
        f"device: {profile.device_fingerprint}",
        f"scenario: {profile.scenario.scenario_id} "
        f"(elements={profile.scenario.element_count}, "
        f"repetitions={profile.scenario.op_repetitions})",
        f"created: {profile.created_at}",
        "",
    ]
    width_impl = max((len(i) for i, _ in profile.entries), default=4)
    width_op = max((len(o) for _, o in profile.entries), default=2)
    for kind in sorted(profile.kinds()):
        lines.append(f"[{kind}]")
        for impl in profile.impls_for_kind(kind):
            for op in profile.ops_for_kind(kind):
                entry = profile.entry(impl, op)
                if entry is None:
                    continue
                if entry.status == STATUS_MEASURED:
                    detail = f"{entry.mean_joules:.6g} J  {entry.mean_seconds:.6g} s"
                else:
                    detail = entry.status
                lines.append(f"  {impl.ljust(width_impl)}  {op.ljust(width_op)}  {detail}")
        lines.append("")

    if show_dominance:
        lines.append("dominance:")
        any_pair = False
        for kind in sorted(profile.kinds()):
            for a, b in dominance_pairs(profile, kind):
                lines.append(f"  {a} dominates {b}  [{kind}]")
                any_pair = True
        incomparable = sorted({
            impl for (impl, _op), e in profile.entries.items()
            if e.status != STATUS_MEASURED
        })
        for impl in incomparable:
            gaps = sorted(op for (i, op), e in profile.entries.items()
                          if i == impl and e.status != STATUS_MEASURED)
            lines.append(f"  {impl} is incomparable (no measurement for: "
                         f"{', '.join(gaps)})")
        if not any_pair and not incomparable:
            lines.append("  none: all implementations are competitive somewhere")
    return "\n".join(lines) + "\n"
