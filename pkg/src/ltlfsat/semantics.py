"""Finite-trace satisfaction and satisfiability by bounded trace enumeration.

`evaluate` is the semantic ground truth for the whole package; every
satisfying trace produced anywhere is checked against it.
`brute_force_sat` enumerates traces in increasing length and lexicographic
valuation order, so its witnesses are deterministic and shortest.
"""

from __future__ import annotations

import time

import numpy as np

from .errors import TimeoutExceeded
from .formula import (
    And,
    Atom,
    FalseConst,
    FiniteTrace,
    Next,
    Not,
    Or,
    Release,
    TrueConst,
    Until,
    WeakNext,
    atoms,
)

MAX_BRUTE_ATOMS = 4
_CHUNK = 1 << 16
# numpy bit arithmetic needs trace indices to fit a machine word
_MAX_INDEX_BITS = 62


def evaluate(trace, f):
    """Truth of the trace against f, by the defining semantic clauses.

    Weak-next and release are evaluated through their duals: weak-next holds
    at the last position, release demands its right side until the left has
    held.
    """
    missing = atoms(f) - trace.alphabet
    if missing:
        raise ValueError(f"atoms not declared in the trace alphabet: {sorted(missing)}")
    n = len(trace)
    memo = {}

    def ev(i, g):
        key = (i, g)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(g, TrueConst):
            out = True
        elif isinstance(g, FalseConst):
            out = False
        elif isinstance(g, Atom):
            out = g.name in trace.positions[i]
        elif isinstance(g, Not):
            out = not ev(i, g.operand)
        elif isinstance(g, And):
            out = ev(i, g.left) and ev(i, g.right)
        elif isinstance(g, Or):
            out = ev(i, g.left) or ev(i, g.right)
        elif isinstance(g, Next):
            out = i + 1 < n and ev(i + 1, g.operand)
        elif isinstance(g, WeakNext):
            out = i + 1 >= n or ev(i + 1, g.operand)
        elif isinstance(g, Until):
            out = False
            for k in range(i, n):
                if ev(k, g.right):
                    out = True
                    break
                if not ev(k, g.left):
                    break
        elif isinstance(g, Release):
            out = True
            for k in range(i, n):
                if not ev(k, g.right):
                    out = False
                    break
                if ev(k, g.left):
                    break
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = out
        return out

    return ev(0, f)


def _decode_positions(names, length, index):
    m = len(names)
    width = 1 << m
    out = []
    for i in range(length):
        code = (index >> ((length - 1 - i) * m)) & (width - 1)
        out.append(frozenset(names[j] for j in range(m) if code & (1 << j)))
    return tuple(out)


def _eval_block(f, names, length, start, count):
    """Vector of truth values of f over `count` consecutive trace indices."""
    m = len(names)
    width = 1 << m
    offsets = np.arange(count, dtype=np.int64)
    atom_bits = {}

    def bits(i, name):
        key = (i, name)
        got = atom_bits.get(key)
        if got is None:
            shift = (length - 1 - i) * m
            j = names.index(name)
            code = ((start + offsets) >> shift) & (width - 1)
            got = ((code >> j) & 1).astype(bool)
            atom_bits[key] = got
        return got

    memo = {}

    def ev(i, g):
        key = (i, g)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(g, TrueConst):
            out = np.ones(count, dtype=bool)
        elif isinstance(g, FalseConst):
            out = np.zeros(count, dtype=bool)
        elif isinstance(g, Atom):
            out = bits(i, g.name)
        elif isinstance(g, Not):
            out = ~ev(i, g.operand)
        elif isinstance(g, And):
            out = ev(i, g.left) & ev(i, g.right)
        elif isinstance(g, Or):
            out = ev(i, g.left) | ev(i, g.right)
        elif isinstance(g, Next):
            out = ev(i + 1, g.operand) if i + 1 < length else np.zeros(count, dtype=bool)
        elif isinstance(g, WeakNext):
            out = ev(i + 1, g.operand) if i + 1 < length else np.ones(count, dtype=bool)
        elif isinstance(g, Until):
            out = np.zeros(count, dtype=bool)
            holds = np.ones(count, dtype=bool)
            for k in range(i, length):
                out |= holds & ev(k, g.right)
                holds &= ev(k, g.left)
                if not holds.any():
                    break
            out = out.copy()
        elif isinstance(g, Release):
            out = np.ones(count, dtype=bool)
            released = np.zeros(count, dtype=bool)
            for k in range(i, length):
                out &= released | ev(k, g.right)
                released |= ev(k, g.left)
                if released.all():
                    break
            out = out.copy()
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = out
        return out

    return ev(0, f)


def brute_force_sat(f, max_len, *, timeout=None):
    """Shortest satisfying trace of f with length <= max_len, else None.

    None means unsatisfiable up to the bound, not unsatisfiable outright.
    Enumeration cost is 2**(atoms * length), so the alphabet is capped at
    four atoms.
    """
    names = sorted(atoms(f))
    if len(names) > MAX_BRUTE_ATOMS:
        raise ValueError(
            f"brute-force enumeration supports at most {MAX_BRUTE_ATOMS} atoms,"
            f" got {len(names)}"
        )
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    alphabet = frozenset(names)
    m = len(names)
    deadline = None if timeout is None else time.monotonic() + timeout
    for length in range(1, max_len + 1):
        if m * length > _MAX_INDEX_BITS:
            raise ValueError(
                f"enumeration space 2**{m * length} too large to index"
            )
        total = (1 << m) ** length
        start = 0
        while start < total:
            if deadline is not None and time.monotonic() > deadline:
                raise TimeoutExceeded(timeout)
            count = min(_CHUNK, total - start)
            sat = _eval_block(f, names, length, start, count)
            hits = np.flatnonzero(sat)
            if hits.size:
                trace = FiniteTrace(
                    _decode_positions(names, length, start + int(hits[0])), alphabet
                )
                assert evaluate(trace, f), "enumerated witness failed re-evaluation"
                return trace
            start += count
    return None
