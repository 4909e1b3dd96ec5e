"""Independent reference implementations used to cross-check the library.

They are written from the plain-language rules, deliberately in a different
shape from the production code (run lengths and enumeration instead of state
machines and heaps).
"""

from __future__ import annotations

from itertools import groupby


def runs(samples: list[bool]) -> list[tuple[bool, int, int]]:
    """(value, first index, last index inclusive) for each constant run."""
    out, i = [], 0
    for value, group in groupby(samples):
        n = len(list(group))
        out.append((value, i, i + n - 1))
        i += n
    return out


def error_status_oracle(samples: list[bool], maturation_ms: int, reset_ms: int) -> list[str]:
    """Status per 1 ms sample.

    An error latches once its condition has held for ``maturation_ms`` (so the
    sample at start + maturation is the first Set one) and unlatches once the
    condition has been absent for ``reset_ms`` after latching.
    """
    latched = [False] * len(samples)
    is_set = False
    for value, first, last in runs(samples):
        if value:
            if is_set:
                for t in range(first, last + 1):
                    latched[t] = True
            elif first + maturation_ms <= last:
                is_set = True
                for t in range(first + maturation_ms, last + 1):
                    latched[t] = True
        elif is_set:
            clear_at = first + reset_ms
            for t in range(first, min(clear_at, last + 1)):
                latched[t] = True
            if clear_at <= last:
                is_set = False
    status = []
    for c, s in zip(samples, latched):
        if s:
            status.append("Set" if c else "Resetting")
        else:
            status.append("Maturing" if c else "Clear")
    return status


def tick_schedule(nodes: list[tuple[str, int, int, int]], duration_us: int) -> list[tuple[int, str]]:
    """All (t, name) activations for (name, cycle, offset, priority) nodes, in execution order."""
    acts = []
    for name, cycle, offset, prio in nodes:
        k = 0
        while offset + k * cycle < duration_us:
            acts.append((offset + k * cycle, prio, name))
            k += 1
    return [(t, name) for t, _, name in sorted(acts)]


def alive_counts(step_times: list[int], start: int, end: int, window: int) -> list[tuple[int, int]]:
    """(window end, step count) for every complete window in [start, end]."""
    out = []
    w = start
    while w + window <= end:
        out.append((w + window, sum(1 for t in step_times if w <= t < w + window)))
        w += window
    return out


def sorted_median(samples: list[int]) -> int:
    s = sorted(samples)
    return s[(len(s) - 1) // 2]
