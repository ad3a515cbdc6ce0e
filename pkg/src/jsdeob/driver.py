"""Fixed-point pass pipeline."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import nodes as N
from .passes.constfold import run_const_fold
from .passes.constprop import run_propagate
from .passes.deadbranch import run_dead_branch
from .passes.inline import run_inline
from .passes.rename import ANIMALS, run_rename
from .passes.strdecode import run_str_decode
from .stack import deep_recursion

log = logging.getLogger(__name__)

PASSES: dict = {
    "strdecode": run_str_decode,
    "fold": run_const_fold,
    "propagate": run_propagate,
    "deadbranch": run_dead_branch,
    "inline": run_inline,
}
DEFAULT_ORDER = ("strdecode", "fold", "propagate", "deadbranch", "inline")


@dataclass(frozen=True)
class PipelineConfig:
    enabled_passes: Sequence[str] = DEFAULT_ORDER
    rename: bool = False
    max_iterations: int = 50
    recursion_limit: int = N.DEFAULT_RECURSION_LIMIT
    dictionary: Sequence[str] = ANIMALS
    debug: bool = False

    def __post_init__(self):
        if not self.enabled_passes:
            raise ValueError("at least one pass must be enabled")
        unknown = [p for p in self.enabled_passes if p not in PASSES]
        if unknown:
            raise ValueError(f"unknown pass(es): {', '.join(unknown)}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.recursion_limit < 1:
            raise ValueError("recursion_limit must be at least 1")


@dataclass
class DeobReport:
    iterations: int = 0
    per_pass_change_counts: dict = field(default_factory=dict)
    reached_fixed_point: bool = False

    def to_json(self) -> dict:
        return {"iterations": self.iterations,
                "perPassChangeCounts": dict(self.per_pass_change_counts),
                "reachedFixedPoint": self.reached_fixed_point}


def run_round(script: N.Script, cfg: PipelineConfig, report: Optional[DeobReport] = None):
    for name in cfg.enabled_passes:
        out = PASSES[name](script, limit=cfg.recursion_limit)
        if out.changed and not N.structural_eq(out.script, script):
            if report is not None:
                report.per_pass_change_counts[name] += 1
            script = out.script
    return script


def _check_depth(script: N.Script, limit: int):
    for s in script.body:
        if N.tree_depth(s) > limit:
            raise N.RecursionLimitError(f"AST nesting exceeds {limit}")


@deep_recursion
def deobfuscate(script: N.Script, cfg: PipelineConfig = PipelineConfig(), *,
                on_round: Optional[Callable[[int, N.Script], None]] = None):
    """Run the enabled passes in order, round after round, until nothing changes.

    Returns ``(script, report)``.  When ``max_iterations`` rounds all made
    changes the last tree is returned with ``reached_fixed_point`` false.
    """
    _check_depth(script, cfg.recursion_limit)
    report = DeobReport(per_pass_change_counts={p: 0 for p in cfg.enabled_passes})
    halstead = None
    if cfg.debug:
        from .metrics import measure
        halstead = measure(script).halstead_length
    while report.iterations < cfg.max_iterations:
        report.iterations += 1
        new = run_round(script, cfg, report)
        if on_round is not None:
            on_round(report.iterations, new)
        if cfg.debug:
            h = measure(new).halstead_length
            if h > halstead:
                log.warning("round %d grew Halstead length %d -> %d", report.iterations,
                            halstead, h)
            halstead = h
        if N.structural_eq(new, script):
            report.reached_fixed_point = True
            break
        script = new
    if cfg.rename:
        script = run_rename(script, cfg.dictionary).script
    return script, report


def deobfuscate_source(source, cfg: PipelineConfig = PipelineConfig(), name: str = "<input>"):
    """Parse, preprocess and deobfuscate ``source``; returns ``(script, report)``."""
    from .frontend import load
    return deobfuscate(load(source, name), cfg)
