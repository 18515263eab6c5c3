"""Closing the loop: patch the corpus and verify the fixpoint.

plan_patches re-scans the sources (stale sites are rejected rather than
mispatched) and rewrites only the constructor tokens.  A dry run emits a
standard unified diff; in-place application writes atomically per file.
After patching, re-analyzing and re-recommending proposes no further
change: the corpus is a fixpoint of the pipeline.
"""

import os
import tempfile
from pathlib import Path

from voltpick import (
    EnergyProfile,
    ProfileEntry,
    Scenario,
    analyze_corpus,
    apply_patches,
    minilang_profile,
    plan_patches,
    recommend_program,
)

CORPUS = {
    "cache.mini": """\
let hot = array_list()
let cold = array_list()

warm_up(items) {
    for item in items {
        hot.push(item)
    }
    cold.each(archive)
}
""",
}


def entry(j):
    return ProfileEntry("measured", float(j), float(j))


profile = EnergyProfile(
    schema_version=1,
    device_fingerprint="demo-host;meter=handcrafted",
    scenario=Scenario("small", 1_000, 1_000),
    created_at="2026-01-01T00:00:00Z",
    entries={
        ("array_list", "insert(end)"): entry(4),
        ("array_list", "iteration(iterator)"): entry(3),
        ("linked_list", "insert(end)"): entry(2),
        ("linked_list", "iteration(iterator)"): entry(5),
    },
    api_kinds={"array_list": "list", "linked_list": "list"},
)

lang = minilang_profile()

with tempfile.TemporaryDirectory() as tmp:
    os.chdir(tmp)  # relative paths keep the diff headers tidy
    paths = []
    for name, text in CORPUS.items():
        Path(name).write_text(text)
        paths.append(name)

    # hot does mostly insert(end): linked_list is cheaper (2 vs 4 per call);
    # cold only iterates: array_list is already the right choice there.
    recs = recommend_program(analyze_corpus(paths, lang), profile)
    for rec in recs.recommendations:
        arrow = "->" if rec.is_change else "keeps"
        print(f"{rec.site_id}: {rec.current_impl} {arrow} "
              f"{rec.recommended_impl if rec.is_change else ''}".rstrip())

    patches = plan_patches(recs, paths, lang)
    print("\nunified diff (dry run):\n")
    print(apply_patches(patches, "dry_run"))

    apply_patches(patches, "in_place")
    print("after in-place patching:\n")
    print(Path(paths[0]).read_text())

    # fixpoint: a second pass finds nothing left to change
    again = recommend_program(analyze_corpus(paths, lang), profile)
    assert all(not r.is_change for r in again.recommendations)
    print("second pass proposes no further change: fixpoint reached")
