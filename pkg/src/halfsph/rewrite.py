"""Bounded derivation engine.

Proves that a target relation follows from a presentation, emitting a
replayable certificate.  Sound for "proved"; it never claims "not
derivable" (refutation is the job of halfsph.models).

A derivation step subtracts a multiple of one relation embedded in a word
context: given relation r, a term word m of r with coefficient c_m, and an
occurrence w = prefix . m . suffix of m inside a word w of the current
polynomial p with coefficient a, the step replaces

    p   ->   p - (a / c_m) * prefix * r * suffix

which cancels the word w exactly.  Greedy reduction always picks the
leading term of a relation as the pattern (direction "forward"); the
bounded search may pick any term, which covers reverse rule applications
and degree-raising insertions through constant terms.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple, Sequence

from .ncpoly import EMPTY_WORD, NCPolynomial, Word, render_word, word_key
from .presentations import Presentation

DEFAULT_BUDGET = 10_000


class RewriteRule(NamedTuple):
    """Oriented form of a relation: lhs rewrites to rhs.

    Under the graded-lex total order the leading word of a nonzero relation
    is strictly greater than every other word, so every relation orients.
    """

    lhs: Word
    rhs: NCPolynomial
    origin: int  # relation index in the presentation

    @property
    def relation(self) -> NCPolynomial:
        return NCPolynomial.from_word(self.lhs) - self.rhs


class Step(NamedTuple):
    rule: int        # relation index
    word: Word       # the word of p being cancelled
    offset: int      # start of the pattern occurrence inside word
    term: int        # index into the relation's descending term list (0 = leading)

    def to_json(self, n: int) -> dict:
        return {
            "step": n,
            "rule": self.rule,
            "position": {"word": render_word(self.word), "offset": self.offset},
            "direction": "forward" if self.term == 0 else f"reverse:{self.term}",
        }


class DerivationTrace:
    """Replayable certificate: applying steps to start yields end."""

    def __init__(self, start: NCPolynomial, steps: Sequence[Step], end: NCPolynomial):
        self.start = start
        self.steps = list(steps)
        self.end = end

    def to_json(self) -> list[dict]:
        return [s.to_json(n) for n, s in enumerate(self.steps)]

    def __len__(self):
        return len(self.steps)

    def __repr__(self):
        return f"DerivationTrace({len(self.steps)} steps, {self.start.render()!r} -> {self.end.render()!r})"


class RuleSet:
    """Indexed view of a presentation's relations for fast matching."""

    def __init__(self, P: Presentation):
        self.presentation = P
        self.monic = [r.monic() for r in P.relations]
        self.terms = [[w for w, _ in m.sorted_terms()] for m in self.monic]
        self.rules: list[RewriteRule] = []
        self.by_lhs: dict[Word, list[int]] = {}
        self.by_pattern: dict[Word, list[tuple[int, int]]] = {}
        self.constant_rels: list[tuple[int, int]] = []
        self.max_degree = 0
        for rid, m in enumerate(self.monic):
            lhs = self.terms[rid][0]
            self.rules.append(RewriteRule(lhs, NCPolynomial.from_word(lhs) - m, rid))
            self.by_lhs.setdefault(lhs, []).append(rid)
            self.max_degree = max(self.max_degree, len(lhs))
            for tix, w in enumerate(self.terms[rid]):
                if w == EMPTY_WORD:
                    self.constant_rels.append((rid, tix))
                else:
                    self.by_pattern.setdefault(w, []).append((rid, tix))
        self.lhs_lengths = sorted({len(w) for w in self.by_lhs})
        self.pattern_lengths = sorted({len(w) for w in self.by_pattern})

    def apply(self, p: NCPolynomial, step: Step) -> NCPolynomial:
        m = self.monic[step.rule]
        pat = self.terms[step.rule][step.term]
        w = step.word
        alpha = p.terms.get(w)
        if alpha is None:
            raise ValueError("step targets a word absent from the polynomial")
        if w[step.offset:step.offset + len(pat)] != pat:
            raise ValueError("step pattern does not occur at the stated offset")
        c_m = m.terms[pat]
        prefix = NCPolynomial.from_word(w[:step.offset])
        suffix = NCPolynomial.from_word(w[step.offset + len(pat):])
        return p - (prefix * m * suffix).scale(alpha / c_m)


def reduce(p: NCPolynomial, P: Presentation | RuleSet, budget: int = DEFAULT_BUDGET):
    """Deterministic greedy reduction by oriented rules.

    Scans words largest-first, offsets left to right, lowest rule id on
    ties.  Returns (reduced polynomial, steps, budget_exhausted).  The
    result equals p modulo the ideal; with a confluent rule set it is the
    normal form.
    """
    rs = P if isinstance(P, RuleSet) else RuleSet(P)
    steps: list[Step] = []
    exhausted = False
    while True:
        if budget is not None and len(steps) >= budget:
            exhausted = bool(_find_forward_step(p, rs))
            break
        step = _find_forward_step(p, rs)
        if step is None:
            break
        p = rs.apply(p, step)
        steps.append(step)
    return p, steps, exhausted


def _find_forward_step(p: NCPolynomial, rs: RuleSet):
    for w in sorted(p.terms, key=word_key, reverse=True):
        for offset in range(len(w)):
            best = None
            for L in rs.lhs_lengths:
                if offset + L > len(w):
                    break
                rids = rs.by_lhs.get(w[offset:offset + L])
                if rids:
                    rid = min(rids)
                    if best is None or rid < best[0]:
                        best = (rid, L)
            if best is not None:
                return Step(best[0], w, offset, 0)
    return None


class ImplicationResult(NamedTuple):
    proved: bool
    trace: DerivationTrace | None
    expansions: int
    note: str = ""

    def __repr__(self):
        if self.proved:
            return f"Proved({len(self.trace.steps)} steps)"
        return f"Inconclusive({self.note or 'budget'})"


def check_implication(P: Presentation | RuleSet, target: NCPolynomial,
                      budget: int = DEFAULT_BUDGET, max_depth: int = 6,
                      degree_slack: int = 1) -> ImplicationResult:
    """Semi-decide whether target lies in the two-sided *-ideal of P.

    Greedy reduction first; if that stalls, iterative-deepening search over
    single derivation steps in any direction, with a visited-set keyed by
    canonical (monic) form and a cap on intermediate word degree.  Identical
    inputs and budgets yield identical traces, and enlarging the budget
    never loses a proof.
    """
    rs = P if isinstance(P, RuleSet) else RuleSet(P)
    rs.presentation._validate(target)

    if target.is_zero():
        return ImplicationResult(True, DerivationTrace(target, [], target), 0)

    reduced, pre_steps, _ = reduce(target, rs, budget)
    if reduced.is_zero():
        return ImplicationResult(True, DerivationTrace(target, pre_steps, reduced), 0)

    cap = max(reduced.degree(), rs.max_degree) + degree_slack
    expansions = 0
    seen_budget_end = False

    for depth in range(1, max_depth + 1):
        memo: dict = {}
        found = _dfs(reduced, depth, rs, cap, memo, [expansions, budget])
        expansions = found[1]
        if found[0] is not None:
            steps = pre_steps + found[0]
            trace = DerivationTrace(target, steps, NCPolynomial.zero())
            return ImplicationResult(True, trace, expansions)
        if found[2]:
            seen_budget_end = True
            break

    note = "budget exhausted" if seen_budget_end else f"no proof within depth {max_depth}"
    return ImplicationResult(False, None, expansions, note)


def _dfs(p: NCPolynomial, depth: int, rs: RuleSet, cap: int, memo: dict, counter):
    """Depth-limited DFS; returns (steps or None, expansions, budget_hit)."""
    key = p.monic().canonical_key()
    prev = memo.get(key)
    if prev is not None and prev >= depth:
        return None, counter[0], False
    memo[key] = depth
    if counter[0] >= counter[1]:
        return None, counter[0], True
    counter[0] += 1

    children = _successor_steps(p, rs, cap)
    for step in children:
        q = rs.apply(p, step)
        if q.is_zero():
            return [step], counter[0], False
        if depth > 1:
            sub, _, hit = _dfs(q, depth - 1, rs, cap, memo, counter)
            if sub is not None:
                return [step] + sub, counter[0], False
            if hit:
                return None, counter[0], True
    return None, counter[0], False


def _successor_steps(p: NCPolynomial, rs: RuleSet, cap: int):
    """All single steps from p, deterministically ordered: words in
    descending canonical order, then offset, then rule id, then term."""
    out = []
    for w in sorted(p.terms, key=word_key, reverse=True):
        for offset in range(len(w) + 1):
            for rid, tix in rs.constant_rels:
                if len(w) + len(rs.terms[rid][0]) <= cap:
                    out.append(Step(rid, w, offset, tix))
            if offset == len(w):
                continue
            for L in rs.pattern_lengths:
                if offset + L > len(w):
                    break
                entries = rs.by_pattern.get(w[offset:offset + L])
                if not entries:
                    continue
                for rid, tix in entries:
                    if len(w) - L + len(rs.terms[rid][0]) <= cap:
                        out.append(Step(rid, w, offset, tix))
    return out


class EquivalenceResult(NamedTuple):
    forward: list   # relation of Q derived from P
    backward: list  # relation of P derived from Q

    @property
    def all_proved(self) -> bool:
        return all(r.proved for r in self.forward) and all(r.proved for r in self.backward)


def check_presentation_equivalence(P: Presentation, Q: Presentation,
                                   budget: int = DEFAULT_BUDGET) -> EquivalenceResult:
    """check_implication both ways on every relation; requires one alphabet."""
    if {f: (d.arity, d.size) for f, d in P.generators.items()} != \
       {f: (d.arity, d.size) for f, d in Q.generators.items()}:
        raise ValueError(f"alphabet mismatch between {P.name} and {Q.name}")
    rs_p, rs_q = RuleSet(P), RuleSet(Q)
    fwd = [check_implication(rs_p, r, budget) for r in Q.relations]
    bwd = [check_implication(rs_q, r, budget) for r in P.relations]
    return EquivalenceResult(fwd, bwd)
