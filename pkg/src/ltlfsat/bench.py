"""Benchmark formula generators and the measurement runner.

Three families: seeded random formulas of an exact surface length, scalable
process-constraint patterns (always finite-trace satisfiable), and practical
conjunctions of pattern instances over a small shared alphabet whose
verdicts vary. Generation is integer-seeded only, so the same spec and seed
reproduce byte-identical formula files on any platform.
"""

from __future__ import annotations

import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import cdlsc
from .errors import ResourceAbort
from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    FalseConst,
    Next,
    Not,
    Or,
    Release,
    TrueConst,
    Until,
    parse,
    render,
    to_nnf,
    to_tnf,
)
from .semantics import brute_force_sat, evaluate
from .transition import naive_check

_PROB_SCALE = 1 << 16


def _globally(f):
    return Release(FALSE, f)


def _eventually(f):
    return Until(TRUE, f)


def _implies(a, b):
    return Or(Not(a), b)


def _precedence(a, b):
    return Or(Until(Not(b), a), _globally(Not(b)))


PATTERNS = {
    "response": lambda a, b: _globally(_implies(a, _eventually(b))),
    "precedence": _precedence,
    "responded-existence": lambda a, b: _implies(_eventually(a), _eventually(b)),
    "alternate-response": lambda a, b: _globally(_implies(a, Next(Until(Not(a), b)))),
    "alternate-precedence": lambda a, b: And(
        _precedence(a, b), _globally(_implies(b, Next(_precedence(a, b))))
    ),
    "chain-response": lambda a, b: _globally(_implies(a, Next(b))),
    "chain-precedence": lambda a, b: _globally(_implies(Next(b), a)),
}

PATTERN_NAMES = tuple(sorted(PATTERNS))


def _conjoin(parts):
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def gen_random(vars, length, temporal_prob, seed):
    """Random formula with exactly `length` drawn operator/atom nodes.

    Temporal operators (next, until, release, globally, eventually) are
    drawn with the given probability, boolean ones otherwise; atoms are
    uniform. Integer-only seeding keeps generation platform-independent.
    """
    if vars < 1 or length < 1:
        raise ValueError("vars and length must be positive")
    if not 0.0 <= temporal_prob <= 1.0:
        raise ValueError("temporal_prob must lie in [0, 1]")
    rng = random.Random(seed)
    names = [f"p{i}" for i in range(vars)]
    threshold = round(temporal_prob * _PROB_SCALE)

    def draw(budget):
        if budget == 1:
            return Atom(names[rng.randrange(len(names))])
        temporal = rng.randrange(_PROB_SCALE) < threshold
        if temporal:
            ops = ["X", "G", "F"] if budget == 2 else ["X", "G", "F", "U", "R"]
        else:
            ops = ["!"] if budget == 2 else ["!", "&", "|"]
        op = ops[rng.randrange(len(ops))]
        if op in ("!", "X", "G", "F"):
            child = draw(budget - 1)
            if op == "!":
                return Not(child)
            if op == "X":
                return Next(child)
            if op == "G":
                return _globally(child)
            return _eventually(child)
        left_budget = rng.randrange(1, budget - 1)
        left = draw(left_budget)
        right = draw(budget - 1 - left_budget)
        if op == "&":
            return And(left, right)
        if op == "|":
            return Or(left, right)
        if op == "U":
            return Until(left, right)
        return Release(left, right)

    return draw(length)


def surface_length(f):
    """Drawn-node count of a generated formula.

    Globally/eventually were drawn as single operators, so their constant
    left sides do not count; generated formulas never contain free-standing
    constants.
    """
    if isinstance(f, Atom):
        return 1
    if isinstance(f, (TrueConst, FalseConst)):
        raise ValueError("free-standing constant in a generated formula")
    if isinstance(f, (Not, Next)):
        return 1 + surface_length(f.operand)
    if isinstance(f, Release) and isinstance(f.left, FalseConst):
        return 1 + surface_length(f.right)
    if isinstance(f, Until) and isinstance(f.left, TrueConst):
        return 1 + surface_length(f.right)
    return 1 + surface_length(f.left) + surface_length(f.right)


def gen_pattern(name, n):
    """The n-th instance of a pattern family: n template copies over fresh
    atom pairs, conjoined."""
    if name not in PATTERNS:
        raise ValueError(f"unknown pattern family {name!r}; choose one of {PATTERN_NAMES}")
    if n < 1:
        raise ValueError("the scaling parameter must be positive")
    template = PATTERNS[name]
    return _conjoin([template(Atom(f"a{i}"), Atom(f"b{i}")) for i in range(1, n + 1)])


_POOL_PER_FAMILY = 4


def gen_conjunction(pool_seed, k, seed, *, alphabet_size=6):
    """Conjunction of k pattern instances drawn from a seeded pool.

    Pool instances are templates instantiated with signed literals over a
    shared alphabet, so conjunctions can conflict and verdicts vary.
    """
    if k < 1:
        raise ValueError("k must be positive")
    pool_rng = random.Random(pool_seed)
    names = [f"q{i}" for i in range(alphabet_size)]

    def literal():
        a = Atom(names[pool_rng.randrange(len(names))])
        return Not(a) if pool_rng.randrange(2) else a

    pool = []
    for name in PATTERN_NAMES:
        template = PATTERNS[name]
        for _ in range(_POOL_PER_FAMILY):
            pool.append(template(literal(), literal()))
    rng = random.Random(seed)
    if k > len(pool):
        raise ValueError(f"k may not exceed the pool size {len(pool)}")
    chosen = rng.sample(pool, k)
    return _conjoin(chosen)


@dataclass(frozen=True)
class BenchSpec:
    family: str
    count: int
    seed: int
    vars: int = 3
    length_min: int = 5
    length_max: int = 12
    temporal_prob: float = 0.5
    pattern: str = "response"
    k_min: int = 3
    k_max: int = 8
    alphabet_size: int = 6


def instances(spec):
    """Deterministic (id, formula) list for a spec."""
    out = []
    if spec.family == "random":
        rng = random.Random(spec.seed)
        for i in range(spec.count):
            length = rng.randrange(spec.length_min, spec.length_max + 1)
            sub = rng.getrandbits(60)
            out.append((f"random-{i:04d}", gen_random(spec.vars, length, spec.temporal_prob, sub)))
    elif spec.family == "pattern":
        for i in range(spec.count):
            out.append((f"{spec.pattern}-{i + 1:03d}", gen_pattern(spec.pattern, i + 1)))
    elif spec.family == "conjunction":
        rng = random.Random(spec.seed)
        for i in range(spec.count):
            k = rng.randrange(spec.k_min, spec.k_max + 1)
            pool_seed = rng.getrandbits(60)
            sub = rng.getrandbits(60)
            out.append((
                f"conjunction-{i:04d}",
                gen_conjunction(pool_seed, k, sub, alphabet_size=spec.alphabet_size),
            ))
    else:
        raise ValueError(f"unknown family {spec.family!r}")
    return out


@dataclass(frozen=True)
class Limits:
    timeout: float | None = None
    max_frames: int | None = None
    state_limit: int = 1 << 20
    brute_bound: int = 8


@dataclass(frozen=True)
class BenchRow:
    id: str
    family: str
    verdict: str
    states_expanded: int
    sat_calls: int
    elapsed_ms: float
    verified: bool


@dataclass
class BenchReport:
    solver: str
    rows: list = field(default_factory=list)

    def totals(self):
        return {
            "instances": len(self.rows),
            "sat": sum(r.verdict == "sat" for r in self.rows),
            "unsat": sum(r.verdict == "unsat" for r in self.rows),
            "aborted": sum(r.verdict.startswith("abort") for r in self.rows),
            "states_expanded": sum(r.states_expanded for r in self.rows),
            "sat_calls": sum(r.sat_calls for r in self.rows),
            "elapsed_ms": sum(r.elapsed_ms for r in self.rows),
        }


CSV_HEADER = "id,family,verdict,states_expanded,sat_calls,elapsed_ms,verified"


def render_csv(report):
    lines = [CSV_HEADER]
    for r in report.rows:
        lines.append(
            f"{r.id},{r.family},{r.verdict},{r.states_expanded},{r.sat_calls},"
            f"{r.elapsed_ms:.3f},{str(r.verified).lower()}"
        )
    return "\n".join(lines) + "\n"


def run_instance(instance_id, family, text, solver, limits):
    """Check one rendered formula with the selected engine; aborts are
    recorded, never turned into verdicts."""
    original = parse(text)
    start = time.monotonic()
    states = 0
    calls = 0
    try:
        if solver == "cdlsc":
            verdict = cdlsc.check(
                original,
                timeout=limits.timeout,
                max_frames=limits.max_frames,
            )
            states = verdict.stats.states_expanded
            calls = verdict.stats.sat_calls
            sat = verdict.sat
            witness = verdict.witness
        elif solver == "naive":
            result = naive_check(
                to_tnf(to_nnf(original)),
                state_limit=limits.state_limit,
                timeout=limits.timeout,
            )
            states = result.states_expanded
            calls = result.sat_calls
            sat = result.sat
            witness = result.witness
        elif solver == "brute":
            witness = brute_force_sat(original, limits.brute_bound, timeout=limits.timeout)
            sat = witness is not None
        else:
            raise ValueError(f"unknown solver selector {solver!r}")
    except ResourceAbort as abort:
        elapsed = (time.monotonic() - start) * 1000.0
        states = getattr(abort, "states_expanded", states)
        return BenchRow(instance_id, family, f"abort:{abort.kind}", states, calls,
                        elapsed, False)
    elapsed = (time.monotonic() - start) * 1000.0
    verified = True
    if sat:
        verified = evaluate(witness, original)
    return BenchRow(instance_id, family, "sat" if sat else "unsat", states, calls,
                    elapsed, verified)


def _worker(payload):
    return run_instance(*payload)


def run_suite(spec, solver="cdlsc", limits=None, jobs=1):
    """One report row per instance; satisfying witnesses are re-verified."""
    limits = limits or Limits()
    payloads = [
        (instance_id, spec.family, render(f), solver, limits)
        for instance_id, f in instances(spec)
    ]
    report = BenchReport(solver=solver)
    if jobs <= 1:
        report.rows = [_worker(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            report.rows = list(pool.map(_worker, payloads))
    return report


def compare_reports(a, b):
    """Instance ids whose verdicts differ between two reports; aborted rows
    are skipped since they carry no verdict."""
    verdicts_b = {r.id: r.verdict for r in b.rows}
    mismatched = []
    for row in a.rows:
        other = verdicts_b.get(row.id)
        if other is None or row.verdict.startswith("abort") or other.startswith("abort"):
            continue
        if row.verdict != other:
            mismatched.append(row.id)
    return mismatched


def write_corpus(spec, outdir):
    """One formula per file plus a manifest describing the generation."""
    os.makedirs(outdir, exist_ok=True)
    entries = []
    for instance_id, f in instances(spec):
        filename = f"{instance_id}.ltlf"
        with open(os.path.join(outdir, filename), "w", encoding="utf-8") as fh:
            fh.write(render(f) + "\n")
        entries.append({"id": instance_id, "file": filename})
    manifest = {
        "family": spec.family,
        "count": spec.count,
        "seed": spec.seed,
        "params": {
            k: v
            for k, v in vars(spec).items()
            if k not in ("family", "count", "seed")
        },
        "formulas": entries,
    }
    with open(os.path.join(outdir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest
