"""From source text to per-site recommendations.

The scanner is lexical: it masks comments and strings, finds construction
sites, binds identifiers within their brace scopes, and counts the method
calls the language profile maps to operations.  Counts can be weighted by
L**depth for calls inside loops.  The recommender then scores every
candidate implementation per site as sum(count x profile score) and picks
the cheapest comparable one.
"""

from voltpick import (
    EnergyProfile,
    ProfileEntry,
    Scenario,
    minilang_profile,
    recommend_program,
    scan_file,
)
from voltpick.analyzer import UsageReport
from voltpick.render import render_report

SOURCE = """\
# tiny job queue
let queue = array_list()
let done = hash_set()

drain() {
    while has_work() {
        queue.push(fetch())       # one weight-L call
        if done.has(current()) {
            queue.pop_front()
        }
    }
    queue.each(log_line)
}
"""

lang = minilang_profile()

# Raw counts (loop weight 1) versus depth-weighted counts (loop weight 10):
for weight in (1.0, 10.0):
    sites = scan_file(SOURCE, lang, loop_weight=weight, file_label="queue.mini")
    print(f"loop weight {weight:g}:")
    for site in sites:
        print(f"  {site.site_id} {site.current_impl}: {site.op_counts}")

# A profile would normally come from `profile build`; a handcrafted one
# keeps the demo self-contained.  Scores are joules per operation.
def entry(j):
    return ProfileEntry("measured", float(j), float(j))

profile = EnergyProfile(
    schema_version=1,
    device_fingerprint="demo-host;meter=handcrafted",
    scenario=Scenario("small", 1_000, 1_000),
    created_at="2026-01-01T00:00:00Z",
    entries={
        ("array_list", "insert(end)"): entry(4),
        ("array_list", "remove(start)"): entry(5),
        ("array_list", "iteration(iterator)"): entry(3),
        ("linked_list", "insert(end)"): entry(2),
        ("linked_list", "remove(start)"): entry(2),
        ("linked_list", "iteration(iterator)"): entry(2),
        ("hash_set", "contains"): entry(3),
        ("avl_tree_set", "contains"): entry(2),
    },
    api_kinds={"array_list": "list", "linked_list": "list",
               "hash_set": "set", "avl_tree_set": "set"},
)

sites = scan_file(SOURCE, lang, loop_weight=10.0, file_label="queue.mini")
report = UsageReport("demo", "minilang", 10.0, sites)
recs = recommend_program(report, profile)

print()
print(render_report(recs, "table"))

# The queue site moves to linked_list because the weighted mix (heavy
# insert(end)/remove(start) inside the loop) favors it; the done site moves
# to avl_tree_set because its contains score is lower.
