"""voltpick: energy profiles for interchangeable data-structure implementations.

The pipeline has three legs.  First, metered micro-benchmarks turn a pool
of implementations into a per-operation energy profile (meter, groups,
harness, profile).  Second, a lexical scanner (or an ingested report)
estimates how intensively a program uses those operations per construction
site (analyzer, languages).  Third, the recommender combines both through
a linear model and the patcher rewrites the chosen constructor tokens
(recommend, patcher).
"""

from .analyzer import (
    UsageReport,
    UsageSite,
    analyze_corpus,
    load_usage_report,
    save_usage_report,
    scan_file,
)
from .errors import VoltpickError
from .groups import (
    ConstructGroup,
    ImplementationAdapter,
    ImplementationDescriptor,
    OperationSpec,
    Workload,
    builtin_group,
    builtin_groups,
    make_descriptor_group,
)
from .harness import (
    SCENARIOS,
    MeasurementSeries,
    OpSummary,
    RunPlan,
    Scenario,
    apply_time_threshold,
    run_operation,
    scenario_preset,
    summarize,
)
from .languages import LanguageProfile, clike_profile, language_profile, minilang_profile
from .meter import (
    EnergyReading,
    Meter,
    MeterConfig,
    SpanToken,
    correct_wraparound,
    open_meter,
    synthetic_script_for_spans,
)
from .patcher import Patch, apply_patches, plan_patches
from .profile import (
    EnergyProfile,
    ProfileEntry,
    build_profile,
    dominates,
    load_profile,
    prune_dominated,
    save_profile,
    scale_profile,
)
from .recommend import (
    Recommendation,
    RecommendationSet,
    compare_profiles,
    estimate_site,
    recommend_program,
    recommend_site,
)
from .render import render_profile, render_report

__version__ = "0.1.0"
