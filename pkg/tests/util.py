"""Shared test helpers."""

from __future__ import annotations

from dataclasses import replace

from jsdeob import nodes as N
from jsdeob.passes.rename import run_rename

CANON_WORDS = tuple(f"n{i}" for i in range(64))


def strip_original_names(script: N.Script) -> N.Script:
    def strip(node):
        node = N.map_children(node, lambda c, f: strip(c))
        if isinstance(node, (N.VarDecl, N.FunDecl)) and node.original_name is not None:
            node = replace(node, original_name=None)
        return node

    return N.Script(tuple(strip(s) for s in script.body), "<canon>")


def canonical(script: N.Script) -> N.Script:
    """The script with every renamable binding given a name by position, comments dropped."""
    return strip_original_names(run_rename(strip_original_names(script), CANON_WORDS).script)


def alpha_equivalent(a: N.Script, b: N.Script) -> bool:
    return N.structural_eq(canonical(a), canonical(b))
