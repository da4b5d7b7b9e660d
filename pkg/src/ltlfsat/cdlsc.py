"""Conflict-driven satisfiability search over the obligation transition
system.

The checker grows a sequence of frames, one per step budget. Frame i holds
member cores certifying that any state containing them cannot end a trace
within i steps. Successor search avoids the current frame; when it runs out
of candidates, the step query's core seeds the next frame. Unsatisfiability
is detected when the accumulated frames propositionally force the next one,
so no state escapes them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .abstraction import Encoder
from .errors import FrameLimitExceeded, SatCallLimitExceeded, TimeoutExceeded
from .formula import TAIL, FiniteTrace, atoms, closure, is_tnf, to_nnf, to_tnf
from .satengine import SatSolver
from .semantics import evaluate
from .transition import assemble_trace, state_of, successor_state


@dataclass
class Stats:
    states_expanded: int = 0
    sat_calls: int = 0
    frames: int = 0
    elapsed: float = 0.0


@dataclass(frozen=True)
class DebugInfo:
    frames: tuple
    spine: tuple | None


@dataclass
class Verdict:
    sat: bool
    witness: FiniteTrace | None
    invariant_level: int | None
    stats: Stats
    debug: DebugInfo | None = None


class WitnessError(AssertionError):
    """A produced witness failed semantic verification; internal bug."""


class ConflictSequence:
    """Frames of member cores, each frame guarded by an activation literal
    so newly added cores take effect on the very next solver call."""

    def __init__(self, encoder):
        self._encoder = encoder
        self.frames = []
        self._sets = []
        self._acts = []

    def __len__(self):
        return len(self.frames)

    def ensure(self, i):
        while len(self.frames) <= i:
            self.frames.append([])
            self._sets.append(set())
            self._acts.append(self._encoder.new_activation())

    def act(self, i):
        self.ensure(i)
        return self._acts[i]

    def add_core(self, i, core):
        assert core, "frames only hold nonempty cores"
        self.ensure(i)
        if core in self._sets[i]:
            return False
        self.frames[i].append(core)
        self._sets[i].add(core)
        self._encoder.block_core(self._acts[i], core)
        return True

    def covers(self, i, state):
        """Whether the frame contains the state: some core is a subset."""
        return any(core <= state for core in self.frames[i])

    def snapshot(self):
        return tuple(tuple(frame) for frame in self.frames)


def inv_found(frames):
    """Smallest level i such that membership in frames 0..i propositionally
    forces membership in frame i+1, or None.

    Frames are sequences of cores; a state is in a frame when it contains
    some core. Validity of the forcing is decided exactly, by
    unsatisfiability of the accumulated frames conjoined with the negated
    next frame over member variables.
    """
    for i in range(len(frames) - 1):
        if _frames_imply(frames[: i + 1], frames[i + 1]):
            return i
    return None


def _frames_imply(antecedent, consequent):
    if not consequent or any(not frame for frame in antecedent):
        return False
    solver = SatSolver()
    member_vars = {}

    def var(psi):
        v = member_vars.get(psi)
        if v is None:
            v = solver.new_var()
            member_vars[psi] = v
        return v

    for frame in antecedent:
        selectors = []
        for core in frame:
            d = solver.new_var()
            for psi in core:
                solver.add_clause([-d, var(psi)])
            selectors.append(d)
        solver.add_clause(selectors)
    for core in consequent:
        solver.add_clause([-var(psi) for psi in core])
    return not solver.solve().sat


def reconstruct_witness(labels, final_assignment, original, *, keep_tail=False):
    """Trace from the search spine's labels and the final assignment.

    The trace is cut at the first Tail-marked position; Tail is stripped
    unless the caller works on a raw TNF formula. The result is verified
    against the original formula; failure indicates an internal bug.
    """
    trace = assemble_trace(labels, final_assignment, atoms(original))
    if not keep_tail:
        trace = trace.without_atom(TAIL)
    if not evaluate(trace, original):
        raise WitnessError(
            f"reconstructed witness does not satisfy the formula: {original!r};"
            " for raw TNF input this usually means next-step obligations were"
            " not guarded by the Tail marker"
        )
    return trace


class _Run:
    def __init__(self, original, *, raw_tnf, max_frames, max_sat_calls, timeout,
                 phase_hint, check_cores, dump_dir, iteration_hook, keep_debug):
        self.original = original
        self.raw = raw_tnf
        if raw_tnf:
            if not is_tnf(original):
                raise ValueError("raw TNF input must be NNF and weak-next-free")
            self.tnf = original
        else:
            self.tnf = to_tnf(to_nnf(original))
        self.encoder = Encoder(
            phase_hint=phase_hint, check_cores=check_cores, dump_dir=dump_dir
        )
        self.s0 = state_of(self.tnf)
        if max_frames is None:
            max_frames = 1 << len(closure(self.tnf))
        self.max_frames = max_frames
        self.max_sat_calls = max_sat_calls
        self.deadline = None if timeout is None else time.monotonic() + timeout
        self.timeout = timeout
        self.iteration_hook = iteration_hook
        self.keep_debug = keep_debug
        self.seen = {self.s0}
        self.sequence = ConflictSequence(self.encoder)
        self.spine = None

    def _tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise TimeoutExceeded(self.timeout)
        if self.max_sat_calls is not None and self.encoder.sat_calls >= self.max_sat_calls:
            raise SatCallLimitExceeded(self.max_sat_calls)

    def _note(self, state):
        self.seen.add(state)

    def check(self):
        start = time.monotonic()
        out = self.encoder.query(self.s0, final=True)
        if out.sat:
            return self._sat_verdict([], out.assignment, start)
        self.sequence.add_core(0, out.core)
        frame_level = 0
        while True:
            if len(self.sequence) > self.max_frames:
                raise FrameLimitExceeded(self.max_frames)
            found = self._try_satisfy(frame_level)
            if found is not None:
                labels, final_assignment = found
                return self._sat_verdict(labels, final_assignment, start)
            if self.iteration_hook is not None:
                self.iteration_hook(frame_level, self.sequence.snapshot())
            level = inv_found(self.sequence.frames)
            if level is not None:
                return self._unsat_verdict(level, start)
            frame_level += 1
            self.sequence.ensure(frame_level)

    def _try_satisfy(self, frame_level):
        """Depth-first successor search honouring the frames.

        Returns (edge labels, final assignment) on success; on failure every
        explored state has contributed a core one frame up.
        """
        stack = [(self.s0, frame_level)]
        labels = []
        spine = [self.s0]
        while stack:
            state, level = stack[-1]
            self._tick()
            out = self.encoder.query(state, acts=(self.sequence.act(level),))
            if not out.sat:
                self.sequence.add_core(level + 1, out.core)
                stack.pop()
                if labels:
                    labels.pop()
                    spine.pop()
                continue
            succ = successor_state(out.assignment.next_bodies)
            self._note(succ)
            if level == 0:
                fout = self.encoder.query(succ, final=True)
                if fout.sat:
                    if self.keep_debug:
                        self.spine = tuple(spine + [succ])
                    return labels + [out.assignment], fout.assignment
                self.sequence.add_core(0, fout.core)
                continue
            labels.append(out.assignment)
            spine.append(succ)
            stack.append((succ, level - 1))
        return None

    def _stats(self, start):
        return Stats(
            states_expanded=len(self.seen),
            sat_calls=self.encoder.sat_calls,
            frames=len(self.sequence),
            elapsed=time.monotonic() - start,
        )

    def _sat_verdict(self, labels, final_assignment, start):
        target = self.tnf if self.raw else self.original
        witness = reconstruct_witness(
            labels, final_assignment, target, keep_tail=self.raw
        )
        debug = None
        if self.keep_debug:
            debug = DebugInfo(self.sequence.snapshot(), self.spine)
        return Verdict(True, witness, None, self._stats(start), debug)

    def _unsat_verdict(self, level, start):
        debug = None
        if self.keep_debug:
            debug = DebugInfo(self.sequence.snapshot(), None)
        return Verdict(False, None, level, self._stats(start), debug)


def check(f, *, raw_tnf=False, max_frames=None, max_sat_calls=None, timeout=None,
          phase_hint=False, check_cores=True, dump_dir=None, iteration_hook=None,
          keep_debug=False):
    """Decide satisfiability of f.

    Unless raw_tnf is set, f is normalized internally and witnesses are
    reported over its own atoms; with raw_tnf the input is taken as already
    tail-marked and witnesses keep the Tail atom. Resource limits raise
    instead of returning a verdict.
    """
    run = _Run(
        f,
        raw_tnf=raw_tnf,
        max_frames=max_frames,
        max_sat_calls=max_sat_calls,
        timeout=timeout,
        phase_hint=phase_hint,
        check_cores=check_cores,
        dump_dir=dump_dir,
        iteration_hook=iteration_hook,
        keep_debug=keep_debug,
    )
    return run.check()
