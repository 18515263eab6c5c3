"""Static usage analysis: per-site operation counts from a source corpus.

The scanner is lexical and deliberately modest: it masks comments and
string literals, finds construction sites via the language profile's
declaration patterns, binds each declared identifier within its enclosing
brace scope (flow-insensitive, innermost declaration wins), and counts
every method call on a bound identifier whose token the profile maps to an
operation.  Each call is weighted by L**d where d is the loop nesting
depth at the call and L is the loop weight (default 1, i.e. raw call-site
counts; weighting is an explicit experiment knob).

Scope rules, spelled out because they are the whole contract:

* A brace block opened by a loop keyword (per the profile) is a loop
  scope; calls in a loop header, before the opening brace, count at the
  surrounding depth.
* A declaration claims its whole enclosing block.  A call binds to the
  declaration in the innermost enclosing block that has one; within that
  block, the nearest declaration at or before the call wins, else the
  block's first declaration (flow-insensitive).
* Aliasing, returns, and cross-function flow are not tracked.  Reports
  produced by stronger analyzers can be ingested instead (load_usage_report).

Inserting or editing comments never changes counts, and scanning is a pure
function of (text, profile, weight), so corpus analysis parallelizes and
always merges deterministically in sorted path order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import jsonio
from .errors import DecodeError, MalformedReport, UnknownIdentifier
from .groups import ConstructGroup, builtin_groups
from .languages import LanguageProfile

REPORT_SCHEMA_VERSION = 1


@dataclass
class UsageSite:
    """One construction site and the operation counts observed on it."""

    site_id: str
    file: str
    line: int
    column: int
    current_impl: str
    api_kind: str
    op_counts: dict[str, float] = field(default_factory=dict)
    raw_counts: dict[str, int] = field(default_factory=dict)
    max_loop_depth: int = 0
    ctor_span: tuple[int, int] | None = None  # char offsets; scan-time only


@dataclass
class UsageReport:
    corpus_label: str
    lang_id: str
    loop_weight: float
    sites: list[UsageSite] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


# --- masking ------------------------------------------------------------------

def mask_text(text: str, profile: LanguageProfile) -> str:
    """Blank out comments and string literals, preserving offsets and newlines."""
    out = list(text)
    i, n = 0, len(text)
    line = profile.line_comment
    block = profile.block_comment
    escape = profile.string_escape

    def blank(start: int, end: int) -> None:
        for j in range(start, end):
            if out[j] != "\n":
                out[j] = " "

    while i < n:
        if block and text.startswith(block[0], i):
            end = text.find(block[1], i + len(block[0]))
            end = n if end < 0 else end + len(block[1])
            blank(i, end)
            i = end
            continue
        if line and text.startswith(line, i):
            end = text.find("\n", i)
            end = n if end < 0 else end
            blank(i, end)
            i = end
            continue
        ch = text[i]
        if ch in profile.string_delimiters:
            j = i + 1
            while j < n and text[j] != ch:
                j += 2 if text[j] == escape else 1
            end = min(j + 1, n)
            blank(i, end)
            i = end
            continue
        i += 1
    return "".join(out)


# --- block structure ------------------------------------------------------------

@dataclass
class _Block:
    start: int
    end: int
    is_loop: bool


def _block_structure(masked: str, loop_tokens: frozenset[str]) -> list[_Block]:
    """All brace blocks plus a whole-file root block (index 0)."""
    events: list[tuple[int, str]] = []
    if loop_tokens:
        keyword = re.compile(r"\b(?:" + "|".join(map(re.escape, sorted(loop_tokens))) + r")\b")
        events.extend((m.start(), "loop") for m in keyword.finditer(masked))
    for m in re.finditer(r"[{};]", masked):
        events.append((m.start(), m.group()))
    events.sort()

    blocks = [_Block(0, len(masked), False)]
    stack = [0]
    pending_loop = False
    for pos, kind in events:
        if kind == "loop":
            pending_loop = True
        elif kind == "{":
            blocks.append(_Block(pos, len(masked), pending_loop))
            stack.append(len(blocks) - 1)
            pending_loop = False
        elif kind == ";":
            pending_loop = False
        elif kind == "}" and len(stack) > 1:
            blocks[stack.pop()].end = pos + 1
    return blocks


def _innermost(blocks: list[_Block], pos: int) -> int:
    best = 0
    for idx, blk in enumerate(blocks):
        if blk.start <= pos < blk.end and blk.start >= blocks[best].start:
            best = idx
    return best


def _loop_depth(blocks: list[_Block], pos: int) -> int:
    return sum(1 for blk in blocks if blk.is_loop and blk.start <= pos < blk.end)


# --- scanning ---------------------------------------------------------------------

@dataclass
class _Declaration:
    name: str
    pos: int
    block: int
    site: UsageSite


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def scan_file(source_text: str, lang_profile: LanguageProfile,
              loop_weight: float = 1.0,
              file_label: str = "<memory>") -> list[UsageSite]:
    """Scan one source text and return its usage sites in position order."""
    masked = mask_text(source_text, lang_profile)
    blocks = _block_structure(masked, lang_profile.loop_open_tokens)

    declarations: list[_Declaration] = []
    for pattern, impl_id, api_kind in lang_profile.compiled_declarations():
        for m in pattern.finditer(masked):
            ctor_start, ctor_end = m.span("ctor")
            line, col = _line_col(source_text, ctor_start)
            site = UsageSite(
                site_id=f"{file_label}:{line}:{col}",
                file=file_label,
                line=line,
                column=col,
                current_impl=impl_id,
                api_kind=api_kind,
                ctor_span=(ctor_start, ctor_end),
            )
            declarations.append(
                _Declaration(m.group("name"), m.start(), _innermost(blocks, m.start()), site)
            )
    declarations.sort(key=lambda d: d.pos)

    by_name: dict[str, list[_Declaration]] = {}
    for decl in declarations:
        by_name.setdefault(decl.name, []).append(decl)

    decl_spans = [d.site.ctor_span for d in declarations]

    for m in lang_profile.compiled_calls().finditer(masked):
        pos = m.start()
        # a constructor call is not a method call on its own token
        if any(start <= pos < end for start, end in decl_spans):
            continue
        candidates = [
            d for d in by_name.get(m.group("recv"), ())
            if blocks[d.block].start <= pos < blocks[d.block].end
        ]
        if not candidates:
            continue
        innermost_start = max(blocks[d.block].start for d in candidates)
        scoped = [d for d in candidates if blocks[d.block].start == innermost_start]
        before = [d for d in scoped if d.pos <= pos]
        decl = before[-1] if before else scoped[0]

        op_id = lang_profile.method_map.get(decl.site.api_kind, {}).get(m.group("method"))
        if op_id is None:
            continue
        depth = _loop_depth(blocks, pos)
        site = decl.site
        site.raw_counts[op_id] = site.raw_counts.get(op_id, 0) + 1
        site.op_counts[op_id] = site.op_counts.get(op_id, 0.0) + loop_weight**depth
        site.max_loop_depth = max(site.max_loop_depth, depth)

    return [d.site for d in declarations]


def analyze_corpus(paths: Iterable, lang_profile: LanguageProfile,
                   loop_weight: float = 1.0,
                   corpus_label: str | None = None) -> UsageReport:
    """Scan files in sorted path order; per-file errors become diagnostics."""
    ordered = sorted(str(p) for p in paths)
    report = UsageReport(
        corpus_label=corpus_label or (ordered[0] if ordered else "empty"),
        lang_id=lang_profile.lang_id,
        loop_weight=loop_weight,
    )
    for path in ordered:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            report.diagnostics.append(f"{path}: {exc}")
            continue
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            report.diagnostics.append(f"{path}: {DecodeError(exc)}")
            continue
        report.sites.extend(scan_file(text, lang_profile, loop_weight, path))
    return report


# --- persistence --------------------------------------------------------------------

_TOP_FIELDS = {"schema_version", "corpus", "lang", "loop_weight", "sites"}
_SITE_FIELDS = {"site_id", "file", "line", "impl", "api_kind", "counts", "raw_counts"}


def report_to_dict(report: UsageReport) -> dict:
    sites = []
    for site in report.sites:
        sites.append({
            "site_id": site.site_id,
            "file": site.file,
            "line": site.line,
            "impl": site.current_impl,
            "api_kind": site.api_kind,
            "counts": {op: jsonio.canonical_number(c)
                       for op, c in sorted(site.op_counts.items())},
            "raw_counts": dict(sorted(site.raw_counts.items())),
        })
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "corpus": report.corpus_label,
        "lang": report.lang_id,
        "loop_weight": jsonio.canonical_number(report.loop_weight),
        "sites": sites,
    }


def save_usage_report(report: UsageReport, path) -> None:
    jsonio.write(path, report_to_dict(report))


def load_usage_report(path, groups: Sequence[ConstructGroup] | None = None) -> UsageReport:
    """Parse and validate a usage report against the registered groups.

    Unknown implementation or operation identifiers are rejected so that
    externally produced reports cannot smuggle vocabulary the profiles do
    not speak.  Site columns are not part of the schema; loaded sites carry
    column 0 and no constructor span (patching always re-scans sources).
    """
    try:
        doc = jsonio.read(path)
    except ValueError as exc:
        raise MalformedReport(f"cannot parse {path}: {exc}") from exc
    return report_from_dict(doc, groups)


def report_from_dict(doc, groups: Sequence[ConstructGroup] | None = None) -> UsageReport:
    if groups is None:
        groups = builtin_groups()
    impl_kinds: dict[str, str] = {}
    ops_by_kind: dict[str, set[str]] = {}
    for group in groups:
        ops_by_kind[group.api_kind] = {o.op_id for o in group.operations}
        for desc in group.descriptors():
            impl_kinds[desc.impl_id] = desc.api_kind

    if not isinstance(doc, dict):
        raise MalformedReport("report document must be a JSON object")
    if doc.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise MalformedReport(
            f"report schema_version {doc.get('schema_version')!r}; "
            f"this build speaks {REPORT_SCHEMA_VERSION}"
        )
    unknown = set(doc) - _TOP_FIELDS
    if unknown:
        raise MalformedReport(f"unknown top-level fields: {sorted(unknown)}")
    missing = _TOP_FIELDS - set(doc)
    if missing:
        raise MalformedReport(f"missing fields: {sorted(missing)}")
    if not isinstance(doc["sites"], list):
        raise MalformedReport("sites must be a list")

    report = UsageReport(
        corpus_label=str(doc["corpus"]),
        lang_id=str(doc["lang"]),
        loop_weight=float(doc["loop_weight"]),
    )
    seen_ids: set[str] = set()
    for row in doc["sites"]:
        if not isinstance(row, dict):
            raise MalformedReport("each site must be an object")
        unknown = set(row) - _SITE_FIELDS
        if unknown:
            raise MalformedReport(f"unknown site fields: {sorted(unknown)}")
        missing = _SITE_FIELDS - set(row)
        if missing:
            raise MalformedReport(f"site missing fields: {sorted(missing)}")
        site_id = str(row["site_id"])
        if site_id in seen_ids:
            raise MalformedReport(f"duplicate site_id {site_id!r}")
        seen_ids.add(site_id)

        impl, kind = str(row["impl"]), str(row["api_kind"])
        if impl not in impl_kinds:
            raise UnknownIdentifier(f"site {site_id}: unknown impl {impl!r}")
        if impl_kinds[impl] != kind:
            raise UnknownIdentifier(
                f"site {site_id}: {impl} is {impl_kinds[impl]}, report says {kind}"
            )
        valid_ops = ops_by_kind.get(kind, set())
        counts: dict[str, float] = {}
        raw: dict[str, int] = {}
        for source, sink, caster in ((row["counts"], counts, float),
                                     (row["raw_counts"], raw, int)):
            if not isinstance(source, dict):
                raise MalformedReport(f"site {site_id}: counts must be objects")
            for op, value in source.items():
                if op not in valid_ops:
                    raise UnknownIdentifier(
                        f"site {site_id}: unknown {kind} op {op!r}"
                    )
                number = caster(value)
                if number < 0:
                    raise MalformedReport(f"site {site_id}: negative count for {op}")
                sink[op] = number

        report.sites.append(UsageSite(
            site_id=site_id,
            file=str(row["file"]),
            line=int(row["line"]),
            column=0,
            current_impl=impl,
            api_kind=kind,
            op_counts=counts,
            raw_counts=raw,
        ))
    return report
