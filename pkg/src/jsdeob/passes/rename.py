"""Deterministic renaming of declared bindings to dictionary words.

Bindings are numbered in pre-order of scopes and, within a scope, in
declaration order.  Binding ``i`` gets ``words[i % D]``, suffixed with
``_k`` for ``k = i // D`` once the dictionary wraps.  Candidates that would
clash with an undeclared (global) name are skipped.
"""

from __future__ import annotations

import re
from dataclasses import replace
from pathlib import Path
from typing import Iterable, Sequence

from .. import nodes as N
from ..frontend.lexer import KEYWORDS, UNSUPPORTED_WORDS
from ..stack import deep_recursion
from .scope import analyze_scopes

ANIMALS = (
    "dog", "cat", "parrot", "lion", "tiger", "hamster", "chinchilla", "rabbit",
    "horse", "zebra", "giraffe", "elephant", "monkey", "panda", "koala", "kangaroo",
    "wolf", "fox", "bear", "otter", "beaver", "badger", "ferret", "weasel",
    "mouse", "rat", "squirrel", "hedgehog", "mole", "bat", "deer", "moose",
    "camel", "llama", "alpaca", "goat", "sheep", "cow", "pig", "donkey",
    "eagle", "falcon", "owl", "hawk", "swan", "goose", "duck", "penguin",
    "pelican", "flamingo", "crow", "raven", "robin", "sparrow", "shark", "whale",
    "dolphin", "seal", "walrus", "octopus", "squid", "crab", "lobster", "turtle",
)

RESERVED = KEYWORDS | UNSUPPORTED_WORDS | frozenset(
    "implements interface let package private protected public static yield".split())
# Names the parser treats as literals unless rebound; renaming to them would be confusing.
_LITERALISH = frozenset(["undefined", "NaN", "Infinity", "arguments", "eval"])
_IDENT = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*\Z")
RENAMED_KINDS = ("var", "function", "param", "catch", "fname")


class ConfigError(ValueError):
    """Invalid renaming dictionary."""


def validate_dictionary(words: Sequence[str]) -> tuple:
    words = tuple(words)
    if not words:
        raise ConfigError("dictionary is empty")
    seen = set()
    for w in words:
        if not _IDENT.match(w):
            raise ConfigError(f"not a valid identifier: {w!r}")
        if w in RESERVED:
            raise ConfigError(f"reserved word in dictionary: {w!r}")
        if w in _LITERALISH:
            raise ConfigError(f"dictionary entry shadows a built-in: {w!r}")
        if w in seen:
            raise ConfigError(f"duplicate dictionary entry: {w!r}")
        seen.add(w)
    return words


def load_dictionary(path) -> tuple:
    """Read a dictionary file: one identifier per line, `#` starts a comment."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.append(line)
    return validate_dictionary(words)


def _candidates(words):
    d = len(words)
    i = 0
    while True:
        k, r = divmod(i, d)
        yield words[r] if k == 0 else f"{words[r]}_{k}"
        i += 1


@deep_recursion
def run_rename(script: N.Script, dictionary: Iterable[str] = ANIMALS) -> N.PassOutcome:
    words = validate_dictionary(dictionary)
    info = analyze_scopes(script)
    renamable = []
    kept = set()
    for scope in info.scopes:
        for b in scope.bindings.values():
            if b.kind not in RENAMED_KINDS:
                continue
            if b.scope.home().dynamic or info.eval_visible(b):
                kept.add(b.name)  # code built at run time may refer to it by name
                continue
            renamable.append(b)
    forbidden = info.free_names() | kept | RESERVED | _LITERALISH
    names = _candidates(words)
    new_name = {}
    for b in renamable:
        cand = next(names)
        while cand in forbidden:
            cand = next(names)
        new_name[b] = cand
    if not new_name or all(b.name == n for b, n in new_name.items()):
        return N.PassOutcome(script, False)
    body = _Renamer(info, new_name).body(script.body)
    return N.PassOutcome(N.Script(body, script.source_name), True)


class _Renamer:
    def __init__(self, info, new_name):
        self.info = info
        self.new_name = new_name

    def rename(self, b, old):
        return self.new_name.get(b, old)

    def body(self, stmts):
        return tuple(self.visit(s) for s in stmts)

    def visit(self, node):
        t = type(node)
        if t is N.VarRef:
            b = self.info.binding_of.get(id(node))
            return N.VarRef(self.new_name[b]) if b in self.new_name else node
        fields = {}
        if t is N.VarDecl or t is N.FunDecl:
            b = self.info.decl_binding.get(id(node))
            if b in self.new_name:
                fields["name"] = self.new_name[b]
                fields["original_name"] = node.original_name or node.name
        if t in N.FUNCTION_NODES:
            scope = self.info.scope_of[id(node)]
            fields["params"] = tuple(self.rename(scope.bindings.get(p), p) for p in node.params)
            if t is N.FunExpr and node.name:
                fields["name"] = self.rename(scope.bindings.get(node.name), node.name)
        if t is N.Try and node.param:
            cs = self.info.scope_of.get(id(node))
            if cs is not None:
                fields["param"] = self.rename(cs.bindings.get(node.param), node.param)
        node = N.map_children(node, lambda c, f: self.visit(c))
        return replace(node, **fields) if fields else node
