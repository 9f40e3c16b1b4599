"""Checking complete programs against a draft's requirement."""

from __future__ import annotations

from typing import Optional

from ..errors import EvalError, SpliceTypeError
from ..lang import ast as A
from ..lang.draft import AutomatonRequirement, Requirement, Tests
from .api import ApiRegistry
from .automaton import check_automaton
from .evaluator import Compiled, Limits
from .vfs import EMPTY_FS, VirtualFS

TEST_FN = "__test__"


def _unit(candidate: A.Program, block: A.Block, ret: A.Type,
          registry: Optional[ApiRegistry]) -> Compiled:
    unit = Compiled(registry)
    unit.add_program(candidate)
    unit.add_block(TEST_FN, block, ret)
    return unit


def run_tests(candidate: A.Program, req: Tests, fs: VirtualFS = EMPTY_FS,
              limits: Limits = Limits(), registry: Optional[ApiRegistry] = None) -> bool:
    """True iff the (expanded) test block returns true; any failure is false."""
    try:
        unit = _unit(candidate, req.expanded, A.BOOL, registry)
        value, _ = unit.call(TEST_FN, [], fs, limits)
    except (EvalError, SpliceTypeError):
        return False
    return value is True


def driver_trace(candidate: A.Program, req: AutomatonRequirement, fs: VirtualFS = EMPTY_FS,
                 limits: Limits = Limits(), registry: Optional[ApiRegistry] = None):
    """Run the driver; returns ``(completed, trace)``."""
    try:
        unit = _unit(candidate, req.driver, A.UNIT, registry)
    except SpliceTypeError:
        return False, []
    try:
        _, trace = unit.call(TEST_FN, [], fs, limits)
    except EvalError as e:
        return False, e.trace
    return True, trace


def run_automaton(candidate: A.Program, req: AutomatonRequirement, fs: VirtualFS = EMPTY_FS,
                  limits: Limits = Limits(), registry: Optional[ApiRegistry] = None) -> bool:
    ok, trace = driver_trace(candidate, req, fs, limits, registry)
    return ok and check_automaton(trace, req.automaton)


class RequirementRunner:
    """Checks many candidates against one requirement, compiling the test or
    driver block once. Not thread-safe: use one runner per thread."""

    def __init__(self, requirement: Requirement, fs: VirtualFS = EMPTY_FS,
                 limits: Limits = Limits(), registry: Optional[ApiRegistry] = None):
        self.requirement = requirement
        self.fs = fs
        self.limits = limits
        self.unit = Compiled(registry)
        if isinstance(requirement, Tests):
            self.unit.add_block(TEST_FN, requirement.expanded, A.BOOL)
        else:
            self.unit.add_block(TEST_FN, requirement.driver, A.UNIT)

    def __call__(self, candidate: A.Program) -> bool:
        try:
            self.unit.add_program(candidate)
        except SpliceTypeError:
            return False
        try:
            value, trace = self.unit.call(TEST_FN, [], self.fs, self.limits)
        except EvalError:
            return False
        finally:
            self.unit.functions.pop(candidate.name, None)
        if isinstance(self.requirement, Tests):
            return value is True
        return check_automaton(trace, self.requirement.automaton)


def satisfies(candidate: A.Program, requirement: Requirement, fs: VirtualFS = EMPTY_FS,
              limits: Limits = Limits(), registry: Optional[ApiRegistry] = None) -> bool:
    if isinstance(requirement, Tests):
        return run_tests(candidate, requirement, fs, limits, registry)
    return run_automaton(candidate, requirement, fs, limits, registry)
