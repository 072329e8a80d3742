"""Independent replay of serialized derivation traces.

This walks the JSON step list using nothing but polynomial arithmetic; it
shares no code with the search engine, so a Proved verdict can be checked
without trusting the prover.
"""

from __future__ import annotations

import re

from .ncpoly import Letter, NCPolynomial
from .presentations import Presentation

_LETTER_RE = re.compile(r"([a-zA-Z]+?)((?:_\d+)+|\d+)(\*?)$")


def parse_word_text(text: str, arities: dict) -> tuple:
    """Parse the canonical word rendering, e.g. "z1 z2*" or "u_10_2"."""
    text = text.strip()
    if text == "1":
        return ()
    letters = []
    for tok in text.split():
        m = _LETTER_RE.match(tok)
        if not m:
            raise ValueError(f"bad letter token {tok!r}")
        fam, digits, star = m.groups()
        if digits.startswith("_"):
            idx = tuple(int(d) for d in digits[1:].split("_"))
        else:
            arity = arities.get(fam)
            if arity is None:
                raise ValueError(f"unknown family {fam!r}")
            if len(digits) != arity:
                raise ValueError(f"token {tok!r}: {len(digits)} digits for arity {arity}")
            idx = tuple(int(d) for d in digits)
        letters.append(Letter(fam, idx, star == "*"))
    return tuple(letters)


def replay_trace(P: Presentation, start: NCPolynomial, steps_json: list[dict],
                 expect: NCPolynomial | None = None) -> tuple[bool, NCPolynomial, str]:
    """Apply the serialized steps to start; returns (ok, end, reason).

    ok is True when every step applies cleanly and the end polynomial equals
    `expect` (the zero polynomial by default).
    """
    if expect is None:
        expect = NCPolynomial.zero()
    arities = {f: d.arity for f, d in P.generators.items()}
    monic = [r.monic() for r in P.relations]
    p = start
    for entry in sorted(steps_json, key=lambda e: e["step"]):
        rid = entry["rule"]
        if not (0 <= rid < len(monic)):
            return False, p, f"step {entry['step']}: rule {rid} out of range"
        rel = monic[rid]
        terms = [w for w, _ in rel.sorted_terms()]
        direction = entry["direction"]
        tix = 0 if direction == "forward" else int(direction.split(":")[1])
        if not (0 <= tix < len(terms)):
            return False, p, f"step {entry['step']}: bad term index"
        pattern = terms[tix]
        try:
            w = parse_word_text(entry["position"]["word"], arities)
        except ValueError as e:
            return False, p, f"step {entry['step']}: {e}"
        off = entry["position"]["offset"]
        alpha = p.terms.get(w)
        if alpha is None:
            return False, p, f"step {entry['step']}: word not present"
        if w[off:off + len(pattern)] != pattern:
            return False, p, f"step {entry['step']}: pattern mismatch"
        c_m = rel.terms[pattern]
        prefix = NCPolynomial.from_word(w[:off])
        suffix = NCPolynomial.from_word(w[off + len(pattern):])
        p = p - (prefix * rel * suffix).scale(alpha / c_m)
    if p == expect:
        return True, p, ""
    return False, p, "end polynomial differs from expected"


def verify_proof(P: Presentation, target: NCPolynomial, steps_json: list[dict]) -> bool:
    """A proof is valid iff replaying it annihilates the target."""
    ok, _, _ = replay_trace(P, target, steps_json)
    return ok
