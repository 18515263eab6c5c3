"""Applying recommendations to source text.

Only the construction-site token is rewritten; declared-type tokens
elsewhere are not chased (anything broader needs a real refactoring
engine).  Sources are re-scanned at patch time so a site that drifted
since analysis is rejected as stale rather than mispatched.  Dry runs emit
a standard unified diff and touch nothing; in-place application writes
through a temp file and an atomic rename so a crash never leaves a
half-written file.
"""

from __future__ import annotations

import difflib
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .analyzer import scan_file
from .errors import OverlapError, StaleSite, TemplateMissing
from .languages import LanguageProfile
from .recommend import RecommendationSet

MODE_DRY_RUN = "dry_run"
MODE_IN_PLACE = "in_place"


@dataclass(frozen=True)
class Patch:
    """One constructor-token replacement, byte-addressed."""

    file: str
    line: int
    byte_start: int
    byte_end: int
    original_text: str
    replacement_text: str
    site_id: str


def plan_patches(recs: RecommendationSet, sources: Iterable,
                 lang_profile: LanguageProfile) -> list[Patch]:
    """One patch per changed site; unchanged sites produce none.

    Every changed site must resolve, by site id and current implementation,
    to a construction site in the present text of the given sources.
    """
    texts: dict[str, str] = {}
    sites_by_id = {}
    for path in sorted(str(p) for p in sources):
        text = Path(path).read_text(encoding="utf-8")
        texts[path] = text
        for site in scan_file(text, lang_profile, file_label=path):
            sites_by_id[site.site_id] = site

    patches: list[Patch] = []
    for rec in recs.recommendations:
        if not rec.is_change:
            continue
        site = sites_by_id.get(rec.site_id)
        if site is None:
            raise StaleSite(
                f"{rec.site_id} no longer resolves to a construction site "
                "(source drifted since analysis?)"
            )
        if site.current_impl != rec.current_impl:
            raise StaleSite(
                f"{rec.site_id} now constructs {site.current_impl}, "
                f"but the recommendation was made against {rec.current_impl}"
            )
        replacement = lang_profile.substitution_template.get(rec.recommended_impl)
        if replacement is None:
            raise TemplateMissing(
                f"no constructor token for {rec.recommended_impl!r} in "
                f"language {lang_profile.lang_id!r}"
            )
        text = texts[site.file]
        char_start, char_end = site.ctor_span
        byte_start = len(text[:char_start].encode("utf-8"))
        byte_end = byte_start + len(text[char_start:char_end].encode("utf-8"))
        patches.append(Patch(
            file=site.file,
            line=site.line,
            byte_start=byte_start,
            byte_end=byte_end,
            original_text=text[char_start:char_end],
            replacement_text=replacement,
            site_id=rec.site_id,
        ))
    return patches


def _grouped_and_checked(patches: Sequence[Patch]) -> dict[str, list[Patch]]:
    by_file: dict[str, list[Patch]] = {}
    for patch in patches:
        by_file.setdefault(patch.file, []).append(patch)
    for path, group in by_file.items():
        group.sort(key=lambda p: p.byte_start)
        for a, b in zip(group, group[1:]):
            if a.byte_end > b.byte_start:
                raise OverlapError(
                    f"{path}: patches at bytes {a.byte_start}-{a.byte_end} and "
                    f"{b.byte_start}-{b.byte_end} overlap"
                )
    return by_file


def _patched_bytes(original: bytes, group: Sequence[Patch]) -> bytes:
    out = bytearray()
    cursor = 0
    for patch in group:
        expected = patch.original_text.encode("utf-8")
        actual = original[patch.byte_start:patch.byte_end]
        if actual != expected:
            raise StaleSite(
                f"{patch.file}:{patch.line}: expected {expected!r} at bytes "
                f"{patch.byte_start}-{patch.byte_end}, found {actual!r}"
            )
        out += original[cursor:patch.byte_start]
        out += patch.replacement_text.encode("utf-8")
        cursor = patch.byte_end
    out += original[cursor:]
    return bytes(out)


def unified_diff(path: str, before: str, after: str) -> str:
    lines = difflib.unified_diff(
        before.splitlines(keepends=True),
        after.splitlines(keepends=True),
        fromfile=f"a/{path}",
        tofile=f"b/{path}",
    )
    return "".join(lines)


def apply_patches(patches: Sequence[Patch], mode: str = MODE_DRY_RUN) -> str | list[str]:
    """Dry-run returns the unified diff; in-place rewrites files atomically.

    The in-place result is exactly the dry-run diff applied: both paths
    splice the same byte ranges.
    """
    if mode not in (MODE_DRY_RUN, MODE_IN_PLACE):
        raise ValueError(f"mode must be {MODE_DRY_RUN!r} or {MODE_IN_PLACE!r}")
    by_file = _grouped_and_checked(patches)

    if mode == MODE_DRY_RUN:
        chunks = []
        for path in sorted(by_file):
            original = Path(path).read_bytes()
            patched = _patched_bytes(original, by_file[path])
            chunks.append(unified_diff(path, original.decode("utf-8"),
                                       patched.decode("utf-8")))
        return "".join(chunks)

    written = []
    for path in sorted(by_file):
        original = Path(path).read_bytes()
        patched = _patched_bytes(original, by_file[path])
        directory = os.path.dirname(os.path.abspath(path)) or "."
        fd, temp_path = tempfile.mkstemp(dir=directory, prefix=".voltpick-")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(patched)
            os.replace(temp_path, path)
        except BaseException:
            try:
                os.unlink(temp_path)
            except OSError:
                pass
            raise
        written.append(path)
    return written
