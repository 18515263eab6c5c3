"""Crafted per-cell energy values for fixture-driven pipeline tests.

The synthetic meter replays these as constant joules per span, so a built
profile's measured means equal the table values exactly.  The numbers were
chosen so that, for the minilang fixture corpus with loop weight 1:

* typed_array dominates cow_list and sync_list; array_list dominates
  sync_list; nothing dominates array_list or typed_array (they tie on
  get(random-index)); linked_list and block_deque have unsupported cells
  and stay out of dominance both ways,
* hash_map dominates every other map, so the prices site keeps hash_map,
* the two array_list list sites that never use random iteration move to
  linked_list, the one that does moves to typed_array, and both hash_set
  sites move to avl_tree_set,
* every per-operation time spread stays far below the 100x discard factor.
"""

from __future__ import annotations

from voltpick import builtin_groups
from voltpick.harness import measurement_grid

LIST_JOULES = {
    "array_list": {
        "insert(start)": 5, "insert(middle)": 5, "insert(end)": 4,
        "insert(value)": 6, "remove(start)": 5, "remove(middle)": 5,
        "remove(end)": 5, "remove(value)": 5, "get(random-index)": 2,
        "iteration(iterator)": 3, "iteration(random)": 6, "contains(value)": 4,
    },
    "block_deque": {
        "insert(start)": 2, "insert(middle)": 6, "insert(end)": 3,
        "insert(value)": 7, "remove(start)": 2, "remove(middle)": 6,
        "remove(end)": 2, "remove(value)": 6, "get(random-index)": 9,
        "iteration(iterator)": 4, "contains(value)": 6,
    },
    "cow_list": {
        "insert(start)": 9, "insert(middle)": 9, "insert(end)": 9,
        "insert(value)": 9, "remove(start)": 9, "remove(middle)": 9,
        "remove(end)": 9, "remove(value)": 9, "get(random-index)": 3,
        "iteration(iterator)": 5, "iteration(random)": 5, "contains(value)": 9,
    },
    "linked_list": {
        "insert(start)": 2, "insert(middle)": 3, "insert(end)": 2,
        "insert(value)": 2, "remove(start)": 2, "remove(middle)": 3,
        "remove(end)": 2, "remove(value)": 3,
        "iteration(iterator)": 2, "contains(value)": 3,
    },
    "sync_list": {
        "insert(start)": 6, "insert(middle)": 6, "insert(end)": 6,
        "insert(value)": 6, "remove(start)": 6, "remove(middle)": 6,
        "remove(end)": 6, "remove(value)": 6, "get(random-index)": 4,
        "iteration(iterator)": 6, "iteration(random)": 7, "contains(value)": 6,
    },
    "typed_array": {
        "insert(start)": 4, "insert(middle)": 4, "insert(end)": 3,
        "insert(value)": 5, "remove(start)": 4, "remove(middle)": 4,
        "remove(end)": 4, "remove(value)": 4, "get(random-index)": 2,
        "iteration(iterator)": 3, "iteration(random)": 2, "contains(value)": 3,
    },
}

MAP_JOULES = {
    "avl_tree_map": 5,
    "hash_map": 2,
    "ordered_hash_map": 3,
    "sync_hash_map": 4,
}

SET_JOULES = {
    "avl_tree_set": {"add": 2, "contains": 2, "iteration": 4},
    "hash_set": {"add": 3, "contains": 3, "iteration": 3},
    "sync_hash_set": {"add": 5, "contains": 5, "iteration": 5},
}

EXPECTED_CHANGES = {
    "inventory.mini:4:13": ("array_list", "linked_list"),
    "inventory.mini:25:18": ("array_list", "linked_list"),
    "report.mini:3:12": ("hash_set", "avl_tree_set"),
    "report.mini:4:13": ("array_list", "typed_array"),
    "report.mini:18:17": ("hash_set", "avl_tree_set"),
}
EXPECTED_KEEPS = {"inventory.mini:5:14": "hash_map"}


def cell_joules(impl_id: str, op_id: str) -> int | None:
    if impl_id in LIST_JOULES:
        return LIST_JOULES[impl_id].get(op_id)
    if impl_id in MAP_JOULES:
        return MAP_JOULES[impl_id]
    return SET_JOULES[impl_id].get(op_id)


def build_script(runs_per_cell: int) -> list[int]:
    """Raw meter script matching the profile builder's grid order."""
    script: list[int] = []
    for _group, adapter, op in measurement_grid(builtin_groups()):
        if not adapter.supports(op.op_id):
            continue
        joules = cell_joules(adapter.impl_id, op.op_id)
        assert joules is not None, (adapter.impl_id, op.op_id)
        script.extend([0, joules * 1_000_000] * runs_per_cell)
    return script
