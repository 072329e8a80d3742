"""Catalog of sphere and quantum-group presentations, and the transformers
between them (real version, free complexification, projective lift).

A Presentation is a family of generator declarations plus a list of
relations, each an NCPolynomial asserted equal to zero.  Relation lists are
normalized on construction: zero polynomials are dropped, duplicates (up to
a scalar) are merged, and the list is closed under the involution so that
star(r) of every stored relation is itself stored.
"""

from __future__ import annotations

import itertools
from typing import Iterable, NamedTuple, Sequence

from .ncpoly import EMPTY_WORD, Letter, NCPolynomial, letter
from .scalars import GaussianRational, ONE

SPHERE_NAMES = ("R", "R*", "R+", "C", "C**", "C*", "C#", "Ccirc", "TSR", "C+")
GROUP_NAMES = ("UN", "UN**", "UN*", "UN#", "UNcirc", "TON", "KN-family", "UN+")


class UnknownPresetError(ValueError):
    pass


class GeneratorDecl(NamedTuple):
    family: str
    arity: int
    size: int  # every index component ranges over 1..size

    def letters(self):
        rng = range(1, self.size + 1)
        for idx in itertools.product(rng, repeat=self.arity):
            yield Letter(self.family, idx, False)


class Presentation:
    """Generator declarations plus a star-closed list of relations."""

    def __init__(self, name: str, generators: Iterable[GeneratorDecl],
                 relations: Iterable[NCPolynomial], metadata: dict | None = None):
        self.name = name
        self.generators = {g.family: g for g in generators}
        self.metadata = dict(metadata or {})
        self.relations: list[NCPolynomial] = []
        self._keys = set()
        for r in relations:
            self.add_relation(r)

    # -- construction ---------------------------------------------------------

    def add_relation(self, r: NCPolynomial):
        """Append r (skipping zero and scalar duplicates) and its star-closure."""
        for rel in (r, r.star()):
            if rel.is_zero():
                continue
            self._validate(rel)
            key = rel.monic().canonical_key()
            if key in self._keys:
                continue
            self._keys.add(key)
            self.relations.append(rel)

    def _validate(self, r: NCPolynomial):
        for l in r.letters():
            decl = self.generators.get(l.family)
            if decl is None:
                raise ValueError(f"{self.name}: undeclared generator family {l.family!r}")
            if len(l.index) != decl.arity:
                raise ValueError(f"{self.name}: letter {l.render()} has arity "
                                 f"{len(l.index)}, declared {decl.arity}")
            if any(not (1 <= i <= decl.size) for i in l.index):
                raise ValueError(f"{self.name}: letter {l.render()} out of range 1..{decl.size}")

    # -- queries ---------------------------------------------------------------

    def relation_keys(self) -> frozenset:
        return frozenset(self._keys)

    def same_relations(self, other: "Presentation") -> bool:
        return self.relation_keys() == other.relation_keys()

    def coordinate_family(self) -> str:
        if len(self.generators) == 1:
            return next(iter(self.generators))
        non_aux = [f for f in self.generators if f != "c"]
        if len(non_aux) == 1:
            return non_aux[0]
        raise ValueError(f"{self.name}: ambiguous coordinate family")

    def coordinate_letters(self) -> list[Letter]:
        return list(self.generators[self.coordinate_family()].letters())

    def __repr__(self):
        gens = ", ".join(f"{g.family}({g.size}^{g.arity})" for g in self.generators.values())
        return f"Presentation({self.name!r}, [{gens}], {len(self.relations)} relations)"


# ---------------------------------------------------------------------------
# relation builders
# ---------------------------------------------------------------------------

def _word_poly(*letters_):
    return NCPolynomial.from_word(tuple(letters_))


def unit_relations(letters_: Sequence[Letter]) -> list[NCPolynomial]:
    """Sum_i l_i l_i* = Sum_i l_i* l_i = 1."""
    s1 = NCPolynomial.zero()
    s2 = NCPolynomial.zero()
    for l in letters_:
        s1 = s1 + _word_poly(l, l.star)
        s2 = s2 + _word_poly(l.star, l)
    one = NCPolynomial.one()
    return [s1 - one, s2 - one]


def pairwise_commutators(alphabet: Sequence[Letter]) -> list[NCPolynomial]:
    out = []
    for a, b in itertools.combinations(alphabet, 2):
        out.append(_word_poly(a, b) - _word_poly(b, a))
    return out


def half_commutation_instances(alphabet: Sequence[Letter]) -> list[NCPolynomial]:
    """abc - cba over the given alphabet (all ordered triples)."""
    out = []
    for a, b, c in itertools.product(alphabet, repeat=3):
        out.append(_word_poly(a, b, c) - _word_poly(c, b, a))
    return out


def sharp_instances(plain: Sequence[Letter]) -> list[NCPolynomial]:
    """ab* = ba* and a*b = b*a over the plain alphabet."""
    out = []
    for a, b in itertools.product(plain, repeat=2):
        out.append(_word_poly(a, b.star) - _word_poly(b, a.star))
        out.append(_word_poly(a.star, b) - _word_poly(b.star, a))
    return out


def star_half_commutation_instances(plain: Sequence[Letter]) -> list[NCPolynomial]:
    """ab*c = cb*a over the plain alphabet."""
    out = []
    for a, b, c in itertools.product(plain, repeat=3):
        out.append(_word_poly(a, b.star, c) - _word_poly(c, b.star, a))
    return out


def self_adjointness(plain: Sequence[Letter]) -> list[NCPolynomial]:
    return [NCPolynomial.from_letter(l) - NCPolynomial.from_letter(l.star) for l in plain]


def make_schema_relation(sigma: Sequence[int], e: Sequence, d: Sequence, N: int,
                         family: str = "z") -> list[NCPolynomial]:
    """All N^k instances of z_{i1}^{e1}..z_{ik}^{ek} = z_{i_sigma(1)}^{d1}..z_{i_sigma(k)}^{dk}.

    sigma is 1-based (sigma[m-1] = image of position m); exponents are "1"
    or "*".  Zero instances (e.g. sigma = id with e = d) are kept, so the
    result always has exactly N^k entries.
    """
    k = len(sigma)
    if len(e) != k or len(d) != k:
        raise ValueError("exponent vectors must have the same length as sigma")
    if sorted(sigma) != list(range(1, k + 1)):
        raise ValueError(f"not a permutation of 1..{k}: {sigma}")
    star = {"1": False, "*": True, 1: False}
    out = []
    for idx in itertools.product(range(1, N + 1), repeat=k):
        lhs = tuple(Letter(family, (idx[m],), star[e[m]]) for m in range(k))
        rhs = tuple(Letter(family, (idx[sigma[m] - 1],), star[d[m]]) for m in range(k))
        out.append(NCPolynomial.from_word(lhs) - NCPolynomial.from_word(rhs))
    return out


# ---------------------------------------------------------------------------
# sphere and quantum-group presets
# ---------------------------------------------------------------------------

def make_sphere(name: str, N: int) -> Presentation:
    """One of the ten sphere presentations on coordinates z_1..z_N."""
    if name not in SPHERE_NAMES:
        raise UnknownPresetError(f"unknown sphere {name!r}; choose from {SPHERE_NAMES}")
    if N < 1:
        raise ValueError("N must be >= 1")
    decl = GeneratorDecl("z", 1, N)
    plain = list(decl.letters())
    full = plain + [l.star for l in plain]
    rels = unit_relations(plain)
    meta = {"kind": "sphere", "preset": name, "N": str(N)}
    if name == "C+":
        pass
    elif name == "C*":
        rels += star_half_commutation_instances(plain)
    elif name == "C**":
        rels += half_commutation_instances(full)
    elif name == "C#":
        rels += sharp_instances(plain)
    elif name == "Ccirc":
        rels += half_commutation_instances(full) + sharp_instances(plain)
    elif name == "C":
        rels += pairwise_commutators(full)
    elif name == "TSR":
        # No finite presentation exists; Ccirc + commutativity is enough for
        # every derivation used.  The honest point set is the membership
        # predicate in halfsph.models.
        rels += half_commutation_instances(full) + sharp_instances(plain)
        rels += pairwise_commutators(full)
        meta["pointset"] = "models.membership('TSR', ...)"
    elif name == "R":
        rels += self_adjointness(plain) + pairwise_commutators(plain)
    elif name == "R*":
        rels += self_adjointness(plain) + half_commutation_instances(plain)
    elif name == "R+":
        rels += self_adjointness(plain)
    return Presentation(name, [decl], rels, meta)


def biunitarity_relations(N: int, family: str = "u") -> list[NCPolynomial]:
    """The 4N^2 contraction relations making u and u^t unitaries."""
    u = lambda i, j, s=False: Letter(family, (i, j), s)
    rng = range(1, N + 1)
    out = []
    for i, j in itertools.product(rng, repeat=2):
        delta = NCPolynomial.one() if i == j else NCPolynomial.zero()
        row_row = sum((_word_poly(u(i, k), u(j, k, True)) for k in rng), NCPolynomial.zero())
        colstar_col = sum((_word_poly(u(k, i, True), u(k, j)) for k in rng), NCPolynomial.zero())
        col_col = sum((_word_poly(u(k, i), u(k, j, True)) for k in rng), NCPolynomial.zero())
        rowstar_row = sum((_word_poly(u(i, k, True), u(j, k)) for k in rng), NCPolynomial.zero())
        out += [row_row - delta, colstar_col - delta, col_col - delta, rowstar_row - delta]
    return out


def make_group(name: str, N: int) -> Presentation:
    """Quantum-group presentation on coordinates u_{ij}, biunitarity expanded
    at fixed N plus the half-liberation relations of the named preset."""
    if name not in GROUP_NAMES:
        raise UnknownPresetError(f"unknown group {name!r}; choose from {GROUP_NAMES}")
    if N < 1:
        raise ValueError("N must be >= 1")
    decl = GeneratorDecl("u", 2, N)
    plain = list(decl.letters())
    full = plain + [l.star for l in plain]
    rels = biunitarity_relations(N)
    meta = {"kind": "group", "preset": name, "N": str(N)}
    if name == "UN+":
        pass
    elif name == "UN":
        rels += pairwise_commutators(full)
    elif name == "UN*":
        rels += star_half_commutation_instances(plain)
    elif name == "UN**":
        rels += half_commutation_instances(full)
    elif name == "UN#":
        rels += sharp_instances(plain)
    elif name == "UNcirc":
        rels += half_commutation_instances(full) + sharp_instances(plain)
    elif name == "TON":
        rels += half_commutation_instances(full) + sharp_instances(plain)
        rels += pairwise_commutators(full)
        meta["pointset"] = "models.membership('TON', ...)"
    elif name == "KN-family":
        for i, j, k in itertools.product(range(1, N + 1), repeat=3):
            if j == k:
                continue
            a, b = Letter("u", (i, j), False), Letter("u", (i, k), False)
            rels.append(_word_poly(a, b.star))
            rels.append(_word_poly(a.star, b))
            a, b = Letter("u", (j, i), False), Letter("u", (k, i), False)
            rels.append(_word_poly(a, b.star))
            rels.append(_word_poly(a.star, b))
    return Presentation(name, [decl], rels, meta)


# ---------------------------------------------------------------------------
# transformers
# ---------------------------------------------------------------------------

def real_version(P: Presentation) -> Presentation:
    """Impose l = l* on every coordinate."""
    fam = P.coordinate_family()
    rels = list(P.relations) + self_adjointness(list(P.generators[fam].letters()))
    meta = dict(P.metadata)
    meta["transform"] = f"real_version({P.name})"
    return Presentation(f"real({P.name})", P.generators.values(), rels, meta)


def free_complexification(P: Presentation) -> Presentation:
    """Adjoin a free circle generator c; the complexification is generated by
    the derived coordinates w_i = c z_i (see complexified_polynomial)."""
    c = letter("c", 1)
    decls = list(P.generators.values()) + [GeneratorDecl("c", 1, 1)]
    rels = list(P.relations)
    rels.append(_word_poly(c, c.star) - NCPolynomial.one())
    rels.append(_word_poly(c.star, c) - NCPolynomial.one())
    meta = dict(P.metadata)
    meta["transform"] = f"free_complexification({P.name})"
    meta["derived_generators"] = "w_i = c z_i"
    return Presentation(f"tilde({P.name})", decls, rels, meta)


def complexified_polynomial(p: NCPolynomial, coordinate_family: str = "z") -> NCPolynomial:
    """Rewrite a polynomial in formal w-letters through w_i = c z_i."""
    c = letter("c", 1)

    def image(l: Letter):
        if l.family != "w" or l.starred:
            return None
        z = Letter(coordinate_family, l.index, False)
        return _word_poly(c, z)

    return p.substitute(image)


def counit_circle(p: NCPolynomial) -> NCPolynomial:
    """Substitute c -> 1, the counit of the free circle."""
    def image(l: Letter):
        if l.family == "c" and not l.starred:
            return NCPolynomial.one()
        if l.starred:
            return None
        return NCPolynomial.from_letter(l)

    return p.substitute(image)


def lift_projective(ideal_gens: Sequence[NCPolynomial], target, variant: str = "p",
                    N: int | None = None) -> Presentation:
    """Substitute p_{IJ} -> z_I z_J* (q_{IJ} -> z_J* z_I) into the ideal
    generators and append them to the target sphere presentation.

    target is a Presentation or a sphere preset name (then N is required).
    Index tuples of the p/q symbols are the concatenation (I, J) of two
    coordinate indices.
    """
    if variant not in ("p", "q"):
        raise ValueError("variant must be 'p' or 'q'")
    if isinstance(target, str):
        if N is None:
            raise ValueError("N required when target is a preset name")
        target = make_sphere(target, N)
    fam = target.coordinate_family()
    k = target.generators[fam].arity

    def image(l: Letter):
        if l.starred:
            return None
        if l.family != variant:
            raise ValueError(f"symbol {l.render()} outside the {variant!r} family")
        if len(l.index) != 2 * k:
            raise ValueError(f"symbol {l.render()} has arity {len(l.index)}, expected {2 * k}")
        zi = Letter(fam, l.index[:k], False)
        zj = Letter(fam, l.index[k:], False)
        if variant == "p":
            return _word_poly(zi, zj.star)
        return _word_poly(zj.star, zi)

    rels = list(target.relations)
    for g in ideal_gens:
        rels.append(g.substitute(image))
    meta = dict(target.metadata)
    meta["transform"] = f"lift_projective({variant}, {len(ideal_gens)} gens)"
    return Presentation(f"lift[{variant}]({target.name})", target.generators.values(), rels, meta)


def conjugation_stable_lift(p_gens: Sequence[NCPolynomial], q_gens: Sequence[NCPolynomial],
                            target, N: int | None = None) -> Presentation:
    """Lift the p-ideal and the q-ideal simultaneously.

    Both sides are required; an empty side marks the lift one-sided in the
    metadata instead of silently proceeding.
    """
    P = lift_projective(p_gens, target, "p", N)
    Q = lift_projective(q_gens, P, "q")
    if not p_gens or not q_gens:
        Q.metadata["one_sided"] = "p" if q_gens else "q" if p_gens else "both-empty"
    Q.metadata["transform"] = "conjugation_stable_lift"
    return Q


def torus_ideal(N: int, variant: str = "p") -> list[NCPolynomial]:
    """p_{ii} = 1/N, the projective ideal of the rescaled torus."""
    out = []
    inv_n = GaussianRational(1) / GaussianRational(N)
    for i in range(1, N + 1):
        out.append(NCPolynomial.from_letter(Letter(variant, (i, i), False))
                   - NCPolynomial.scalar(inv_n))
    return out


def kn_ideal(N: int, variant: str = "p") -> list[NCPolynomial]:
    """p_{(i,j),(i,k)} = 0 and p_{(j,i),(k,i)} = 0 for j != k, over the
    N^2-coordinate group sphere (monomial-matrix annihilation pattern)."""
    out = []
    for i, j, k in itertools.product(range(1, N + 1), repeat=3):
        if j == k:
            continue
        out.append(NCPolynomial.from_letter(Letter(variant, (i, j, i, k), False)))
        out.append(NCPolynomial.from_letter(Letter(variant, (j, i, k, i), False)))
    return out


def rescaled_group_sphere(N: int) -> Presentation:
    """The N^2-coordinate sphere carrying a quantum group u_{ij}/sqrt(N);
    unit relations appear in the exact rescaled form sum u u* = N."""
    decl = GeneratorDecl("u", 2, N)
    plain = list(decl.letters())
    n_scalar = NCPolynomial.scalar(N)
    s1 = sum((_word_poly(l, l.star) for l in plain), NCPolynomial.zero())
    s2 = sum((_word_poly(l.star, l) for l in plain), NCPolynomial.zero())
    return Presentation(f"usphere({N})", [decl],
                        [s1 - n_scalar, s2 - n_scalar],
                        {"kind": "group-sphere", "N": str(N)})


def pu_ideal(N: int) -> tuple[list[NCPolynomial], list[NCPolynomial]]:
    """The projective unitary-group ideal: the four contraction families
    sum_k p_{ik,jk} = sum_k q_{ki,kj} = sum_k p_{ki,kj} = sum_k q_{ik,jk} = delta_ij."""
    rng = range(1, N + 1)
    p_gens, q_gens = [], []
    for i, j in itertools.product(rng, repeat=2):
        delta = NCPolynomial.one() if i == j else NCPolynomial.zero()
        p1 = sum((NCPolynomial.from_letter(Letter("p", (i, k, j, k), False)) for k in rng),
                 NCPolynomial.zero())
        p2 = sum((NCPolynomial.from_letter(Letter("p", (k, i, k, j), False)) for k in rng),
                 NCPolynomial.zero())
        q1 = sum((NCPolynomial.from_letter(Letter("q", (k, i, k, j), False)) for k in rng),
                 NCPolynomial.zero())
        q2 = sum((NCPolynomial.from_letter(Letter("q", (i, k, j, k), False)) for k in rng),
                 NCPolynomial.zero())
        p_gens += [p1 - delta, p2 - delta]
        q_gens += [q1 - delta, q2 - delta]
    return p_gens, q_gens


def unitary_group_lift_check(N: int, budget: int = 4000,
                             p_gens: Sequence[NCPolynomial] | None = None,
                             q_gens: Sequence[NCPolynomial] | None = None) -> dict:
    """Verify that lifting the projective unitary-group ideal lands inside
    the biunitarity presentation: every contraction relation of the free
    unitary group is derivable in the lifted presentation.

    Returns {"verdict": bool, "results": [(relation, verdict, steps)]}.
    """
    from .rewrite import check_implication  # local import avoids a cycle

    if N > 3:
        raise ValueError("lift check is desk-scale only (N <= 3)")
    if p_gens is None and q_gens is None:
        p_gens, q_gens = pu_ideal(N)
    lifted = conjugation_stable_lift(p_gens or [], q_gens or [], rescaled_group_sphere(N))
    results = []
    ok = True
    for rel in biunitarity_relations(N):
        res = check_implication(lifted, rel, budget)
        proved = res.proved
        ok = ok and proved
        results.append((rel, proved, len(res.trace.steps) if proved else None))
    return {"verdict": ok, "presentation": lifted, "results": results}


def lemma44_schema(P: Presentation) -> Presentation:
    """Optional axiom schema: abc* = c*ba over the plain coordinates.

    The justification is categorical, not equational, so presentations caring
    about it must opt in; the flag is recorded in the metadata and surfaces
    in any trace derived from the result.
    """
    fam = P.coordinate_family()
    plain = list(P.generators[fam].letters())
    rels = list(P.relations)
    for a, b, c in itertools.product(plain, repeat=3):
        rels.append(_word_poly(a, b, c.star) - _word_poly(c.star, b, a))
    meta = dict(P.metadata)
    meta["lemma44"] = "assumed (categorical step, not derived by rewriting)"
    return Presentation(f"{P.name}+lemma44", P.generators.values(), rels, meta)
