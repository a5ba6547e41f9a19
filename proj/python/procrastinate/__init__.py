"""Scheduling with lazy speed ramps, in arbitrary precision.

Times, works and stretches are decimal strings. Instances, schedules and
traces use the same JSON schemas as the command-line tool; the helpers here
accept either JSON text or the decoded dict and return decoded dicts.
"""

import json

from . import _core
from ._core import (
    DEFAULT_BITS,
    DomainError,
    InfeasibleError,
    NeverCompletesError,
    ParameterError,
    ParseError,
    UnsupportedError,
)

__all__ = [
    "DEFAULT_BITS",
    "DomainError",
    "InfeasibleError",
    "NeverCompletesError",
    "ParameterError",
    "ParseError",
    "UnsupportedError",
    "adaptive_adversary",
    "check_reduction",
    "completion_from",
    "gen_edd",
    "gen_fifo",
    "gen_lssf",
    "gen_random_feasible",
    "gen_srpt",
    "reduce_ssr",
    "simulate",
    "solve",
    "work_in",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def _job(job):
    job = dict(job)
    job.setdefault("id", 1)
    return json.dumps({k: str(v) if k != "id" else v for k, v in job.items()})


def _opt(x):
    return None if x is None else str(x)


def work_in(job, a, b, cap=None, bits=DEFAULT_BITS):
    """Work done by `job` (dict with release, due, work, slope, base) over [a, b]."""
    return _core.work_in(_job(job), str(a), str(b), _opt(cap), bits)


def completion_from(job, start, remaining, cap=None, bits=DEFAULT_BITS):
    """Time at which `remaining` work is done when `job` runs from `start`."""
    return _core.completion_from(_job(job), str(start), str(remaining), _opt(cap), bits)


def solve(instance, bits=DEFAULT_BITS):
    """Feasibility verdict and LRTB schedule as a schedule document."""
    return json.loads(_core.solve(_text(instance), bits))


def simulate(instance, policy, alpha="2", cap=None, bits=DEFAULT_BITS):
    """Runs an online policy; returns the trace document."""
    return json.loads(_core.simulate(_text(instance), policy, str(alpha), _opt(cap), bits))


def gen_lssf(n, delta=None, bits=DEFAULT_BITS):
    return json.loads(_core.gen_lssf(n, _opt(delta), bits))


def gen_srpt(n, bits=DEFAULT_BITS):
    return json.loads(_core.gen_srpt(n, bits))


def gen_fifo(target, bits=DEFAULT_BITS):
    return json.loads(_core.gen_fifo(str(target), bits))


def gen_edd(target, bits=DEFAULT_BITS):
    return json.loads(_core.gen_edd(str(target), bits))


def gen_random_feasible(n, seed, bits=DEFAULT_BITS):
    return json.loads(_core.gen_random_feasible(n, seed, bits))


def reduce_ssr(xs, threshold, bits=DEFAULT_BITS):
    return json.loads(_core.reduce_ssr(list(xs), threshold, bits))


def check_reduction(xs, threshold, bits=DEFAULT_BITS):
    """Returns (status, margin) for sum(sqrt(x)) >= threshold."""
    return _core.check_reduction(list(xs), threshold, bits)


def adaptive_adversary(policy, rounds=1, bits=DEFAULT_BITS):
    """Returns (instance, trace, missed) for the adversary run against `policy`."""
    instance, trace, missed = _core.adaptive_adversary(policy, rounds, bits)
    return json.loads(instance), json.loads(trace), missed
