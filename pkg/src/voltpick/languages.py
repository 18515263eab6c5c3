"""Language profiles: the syntax knowledge the usage scanner needs.

A LanguageProfile tells the scanner how one surface syntax spells four
things: construction sites (declaration patterns mapping a constructor
token to an implementation), method calls on an identifier, loop-opening
keywords, and comment/string syntax for masking.  It also carries the
substitution table the patcher uses to rewrite a constructor token into
the one for a different implementation.

Two profiles ship: ``clike`` for a conventional brace/semicolon syntax
with ``new`` constructor expressions, and ``minilang`` for the compact
``let x = ctor()`` syntax the test fixtures use.  Both are assembled by
expanding per-implementation templates over a group registry, so a custom
pool gets profiles the same way.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import PatternError, UnknownIdentifier
from .groups import ConstructGroup, builtin_groups


@dataclass
class LanguageProfile:
    """Everything the scanner and patcher need to know about one syntax.

    declaration_patterns maps a regex (with named groups ``name`` and
    ``ctor``) to the (impl_id, api_kind) its constructor token denotes.
    call_pattern extracts (receiver, method) pairs via named groups
    ``recv`` and ``method``.  method_map resolves a method token to an
    operation id per api_kind.  substitution_template maps an impl_id to
    the constructor token that spells it in this language.
    """

    lang_id: str
    declaration_patterns: dict[str, tuple[str, str]]
    call_pattern: str
    method_map: dict[str, dict[str, str]]
    loop_open_tokens: frozenset[str]
    line_comment: str | None = None
    block_comment: tuple[str, str] | None = None
    string_delimiters: tuple[str, ...] = ('"',)
    string_escape: str = "\\"
    substitution_template: dict[str, str] = field(default_factory=dict)

    def compiled_declarations(self) -> list[tuple[re.Pattern, str, str]]:
        out = []
        for pattern, (impl_id, api_kind) in self.declaration_patterns.items():
            try:
                compiled = re.compile(pattern)
            except re.error as exc:
                raise PatternError(f"bad declaration pattern {pattern!r}: {exc}") from exc
            if "name" not in compiled.groupindex or "ctor" not in compiled.groupindex:
                raise PatternError(
                    f"declaration pattern {pattern!r} must define groups 'name' and 'ctor'"
                )
            out.append((compiled, impl_id, api_kind))
        return out

    def compiled_calls(self) -> re.Pattern:
        try:
            compiled = re.compile(self.call_pattern)
        except re.error as exc:
            raise PatternError(f"bad call pattern: {exc}") from exc
        if "recv" not in compiled.groupindex or "method" not in compiled.groupindex:
            raise PatternError("call pattern must define groups 'recv' and 'method'")
        return compiled

    def validate(self, groups: Iterable[ConstructGroup]) -> None:
        """Check every referenced impl and op exists in the registry."""
        known_impls: dict[str, str] = {}
        known_ops: dict[str, set[str]] = {}
        for group in groups:
            known_ops[group.api_kind] = {o.op_id for o in group.operations}
            for desc in group.descriptors():
                known_impls[desc.impl_id] = desc.api_kind
        for _, (impl_id, api_kind) in self.declaration_patterns.items():
            if impl_id not in known_impls:
                raise UnknownIdentifier(f"declaration maps to unknown impl {impl_id!r}")
            if known_impls[impl_id] != api_kind:
                raise UnknownIdentifier(
                    f"{impl_id} is {known_impls[impl_id]}, profile says {api_kind}"
                )
        for api_kind, methods in self.method_map.items():
            ops = known_ops.get(api_kind)
            if ops is None:
                raise UnknownIdentifier(f"method map for unknown api_kind {api_kind!r}")
            for token, op_id in methods.items():
                if op_id not in ops:
                    raise UnknownIdentifier(
                        f"method {token!r} maps to unknown {api_kind} op {op_id!r}"
                    )
        self.compiled_declarations()
        self.compiled_calls()


_IDENT = r"[A-Za-z_]\w*"

MINILANG_METHODS = {
    "list": {
        "push_front": "insert(start)",
        "insert_at": "insert(middle)",
        "push": "insert(end)",
        "insert_near": "insert(value)",
        "pop_front": "remove(start)",
        "remove_at": "remove(middle)",
        "pop": "remove(end)",
        "remove_value": "remove(value)",
        "get": "get(random-index)",
        "each": "iteration(iterator)",
        "shuffled_each": "iteration(random)",
        "has": "contains(value)",
    },
    "map": {
        "put": "put",
        "get": "get",
        "drop": "remove",
        "each": "iteration(entries)",
    },
    "set": {
        "add": "add",
        "has": "contains",
        "each": "iteration",
    },
}

CLIKE_METHODS = {
    "list": {
        "add_first": "insert(start)",
        "add_at": "insert(middle)",
        "add": "insert(end)",
        "add_near": "insert(value)",
        "remove_first": "remove(start)",
        "remove_at": "remove(middle)",
        "remove_last": "remove(end)",
        "remove": "remove(value)",
        "get": "get(random-index)",
        "for_each": "iteration(iterator)",
        "shuffled_each": "iteration(random)",
        "contains": "contains(value)",
    },
    "map": {
        "put": "put",
        "get": "get",
        "remove": "remove",
        "for_each": "iteration(entries)",
    },
    "set": {
        "add": "add",
        "contains": "contains",
        "for_each": "iteration",
    },
}


def _token_table(groups: Iterable[ConstructGroup],
                 tokens: Mapping[str, str] | None) -> dict[str, tuple[str, str]]:
    """ctor token -> (impl_id, api_kind); tokens default to the impl ids."""
    table = {}
    for group in groups:
        for desc in group.descriptors():
            token = (tokens or {}).get(desc.impl_id, desc.impl_id)
            table[token] = (desc.impl_id, desc.api_kind)
    return table


def minilang_profile(groups: Iterable[ConstructGroup] | None = None,
                     ctor_tokens: Mapping[str, str] | None = None) -> LanguageProfile:
    """Profile for the fixture syntax: ``let name = ctor()``, ``#`` comments."""
    groups = list(groups) if groups is not None else builtin_groups()
    table = _token_table(groups, ctor_tokens)
    declarations = {
        rf"\blet\s+(?P<name>{_IDENT})\s*=\s*(?P<ctor>{re.escape(token)})\s*\(":
            (impl_id, api_kind)
        for token, (impl_id, api_kind) in table.items()
    }
    return LanguageProfile(
        lang_id="minilang",
        declaration_patterns=declarations,
        call_pattern=rf"\b(?P<recv>{_IDENT})\s*\.\s*(?P<method>{_IDENT})\s*\(",
        method_map=MINILANG_METHODS,
        loop_open_tokens=frozenset({"for", "while", "loop"}),
        line_comment="#",
        block_comment=("#[", "]#"),
        string_delimiters=('"',),
        substitution_template={impl: token for token, (impl, _) in table.items()},
    )


def clike_profile(groups: Iterable[ConstructGroup] | None = None,
                  ctor_tokens: Mapping[str, str] | None = None) -> LanguageProfile:
    """Profile for a brace syntax with ``name = new ctor(...)`` declarations."""
    groups = list(groups) if groups is not None else builtin_groups()
    table = _token_table(groups, ctor_tokens)
    declarations = {
        rf"\b(?P<name>{_IDENT})\s*=\s*new\s+(?P<ctor>{re.escape(token)})\s*\(":
            (impl_id, api_kind)
        for token, (impl_id, api_kind) in table.items()
    }
    return LanguageProfile(
        lang_id="clike",
        declaration_patterns=declarations,
        call_pattern=rf"\b(?P<recv>{_IDENT})\s*\.\s*(?P<method>{_IDENT})\s*\(",
        method_map=CLIKE_METHODS,
        loop_open_tokens=frozenset({"for", "while", "do"}),
        line_comment="//",
        block_comment=("/*", "*/"),
        string_delimiters=('"', "'"),
        substitution_template={impl: token for token, (impl, _) in table.items()},
    )


LANGUAGES = {
    "minilang": minilang_profile,
    "clike": clike_profile,
}


def language_profile(lang_id: str,
                     groups: Iterable[ConstructGroup] | None = None) -> LanguageProfile:
    try:
        builder = LANGUAGES[lang_id]
    except KeyError:
        raise PatternError(
            f"unknown language {lang_id!r}; shipped profiles: {sorted(LANGUAGES)}"
        ) from None
    return builder(groups)
