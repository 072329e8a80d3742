"""Free *-algebra core.

Words over starred generator letters, polynomials with exact Gaussian
rational coefficients, the involution, substitution homomorphisms, and
two-leg tensor polynomials.  Everything here is an immutable value; all
operations return fresh objects.

Canonical term order is graded lexicographic on words, with letters ordered
by (family, index, starred).  This makes polynomial normal forms (and hence
hashes, memo keys and rendered text) deterministic.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, NamedTuple

from .scalars import GaussianRational, ONE, ZERO, render_scalar


class MismatchedGeneratorsError(ValueError):
    """Two operands disagree about a generator family's index arity."""


class SubstitutionError(KeyError):
    """A letter of the polynomial has no image under the substitution map."""


class Letter(NamedTuple):
    """One starred generator symbol.

    family: generator family tag, e.g. "z" (sphere coordinate), "u" (group
        coordinate, pair index), "c" (free-complexification circle), "x"/"y"
        (real/imaginary split coordinates), "p"/"q" (projective symbols).
    index: tuple of ints; arity is fixed per family within one context.
    starred: adjoint flag.
    """

    family: str
    index: tuple
    starred: bool = False

    @property
    def star(self) -> "Letter":
        return Letter(self.family, self.index, not self.starred)

    def render(self) -> str:
        idx = self.index
        if all(0 <= i <= 9 for i in idx):
            body = self.family + "".join(str(i) for i in idx)
        else:
            body = self.family + "_" + "_".join(str(i) for i in idx)
        return body + ("*" if self.starred else "")


def letter(family: str, *index: int, starred: bool = False) -> Letter:
    return Letter(family, tuple(index), starred)


# Words are plain tuples of Letters; the empty tuple is the unit.
Word = tuple

EMPTY_WORD: Word = ()


def word_key(w: Word):
    """Graded-lex sort key."""
    return (len(w), w)


def star_word(w: Word) -> Word:
    return tuple(l.star for l in reversed(w))


def render_word(w: Word) -> str:
    if not w:
        return "1"
    return " ".join(l.render() for l in w)


def _family_arities(words: Iterable[Word]) -> dict:
    out = {}
    for w in words:
        for l in w:
            a = out.setdefault(l.family, len(l.index))
            if a != len(l.index):
                raise MismatchedGeneratorsError(
                    f"family {l.family!r} used with index arities {a} and {len(l.index)}"
                )
    return out


class NCPolynomial:
    """Finite map Word -> GaussianRational; zero coefficients never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, GaussianRational] | None = None):
        t = {}
        if terms:
            for w, c in terms.items():
                if c:
                    t[w] = c
        object.__setattr__(self, "terms", t)

    def __setattr__(self, name, value):
        raise AttributeError("NCPolynomial is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "NCPolynomial":
        return NCPolynomial()

    @staticmethod
    def one() -> "NCPolynomial":
        return NCPolynomial({EMPTY_WORD: ONE})

    @staticmethod
    def scalar(c) -> "NCPolynomial":
        c = c if isinstance(c, GaussianRational) else GaussianRational(c)
        return NCPolynomial({EMPTY_WORD: c})

    @staticmethod
    def from_word(w: Word, coeff=ONE) -> "NCPolynomial":
        coeff = coeff if isinstance(coeff, GaussianRational) else GaussianRational(coeff)
        return NCPolynomial({tuple(w): coeff})

    @staticmethod
    def from_letter(l: Letter, coeff=ONE) -> "NCPolynomial":
        return NCPolynomial.from_word((l,), coeff)

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def letters(self):
        out = set()
        for w in self.terms:
            out.update(w)
        return out

    def coefficient(self, w: Word) -> GaussianRational:
        return self.terms.get(tuple(w), ZERO)

    def leading_word(self) -> Word:
        """Greatest word in graded-lex order; error on the zero polynomial."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading word")
        return max(self.terms, key=word_key)

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: word_key(t[0]), reverse=True)

    def canonical_key(self):
        return tuple(sorted(self.terms.items(), key=lambda t: word_key(t[0])))

    def monic(self) -> "NCPolynomial":
        """Divide by the leading coefficient (identity on zero)."""
        if not self.terms:
            return self
        lc = self.terms[self.leading_word()]
        if lc == ONE:
            return self
        return NCPolynomial({w: c / lc for w, c in self.terms.items()})

    def family_arities(self) -> dict:
        return _family_arities(self.terms)

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        t = dict(self.terms)
        for w, c in other.terms.items():
            s = t.get(w)
            s = c if s is None else s + c
            if s:
                t[w] = s
            elif w in t:
                del t[w]
        p = NCPolynomial.__new__(NCPolynomial)
        object.__setattr__(p, "terms", t)
        return p

    __radd__ = __add__

    def __neg__(self):
        p = NCPolynomial.__new__(NCPolynomial)
        object.__setattr__(p, "terms", {w: -c for w, c in self.terms.items()})
        return p

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        _family_arities(list(self.terms) + list(other.terms))
        t = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                s = t.get(w)
                s = c if s is None else s + c
                if s:
                    t[w] = s
                elif w in t:
                    del t[w]
        p = NCPolynomial.__new__(NCPolynomial)
        object.__setattr__(p, "terms", t)
        return p

    def __rmul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self

    def scale(self, c) -> "NCPolynomial":
        c = c if isinstance(c, GaussianRational) else GaussianRational(c)
        if not c:
            return NCPolynomial.zero()
        p = NCPolynomial.__new__(NCPolynomial)
        object.__setattr__(p, "terms", {w: c * x for w, x in self.terms.items()})
        return p

    # -- *-algebra structure ---------------------------------------------------

    def star(self) -> "NCPolynomial":
        """Antilinear antihomomorphism: words reversed, stars flipped,
        coefficients conjugated."""
        p = NCPolynomial.__new__(NCPolynomial)
        object.__setattr__(
            p, "terms", {star_word(w): c.conjugate() for w, c in self.terms.items()}
        )
        return p

    def substitute(self, images: Mapping[Letter, "NCPolynomial"] | Callable) -> "NCPolynomial":
        """Homomorphic image under letter -> polynomial.

        The map needs to be defined on unstarred letters only; starred
        letters go to the star of the image, keeping the map *-compatible.
        Letters with no image raise SubstitutionError.
        """
        if callable(images):
            lookup = images
        else:
            lookup = images.get
        cache = {}

        def image(l: Letter) -> NCPolynomial:
            got = cache.get(l)
            if got is not None:
                return got
            q = lookup(l)
            if q is None:
                base = lookup(l.star) if l.starred else None
                if base is None:
                    raise SubstitutionError(f"no image for letter {l.render()}")
                q = base.star()
            cache[l] = q
            return q

        total = NCPolynomial.zero()
        for w, c in self.terms.items():
            acc = NCPolynomial.scalar(c)
            for l in w:
                acc = acc * image(l)
            total = total + acc
        return total

    # -- equality, hashing, rendering -----------------------------------------

    def __eq__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.canonical_key())

    def __repr__(self):
        return f"NCPolynomial({self.render()!r})"

    def render(self) -> str:
        """Canonical text: `2 z1 z2* - i z3`, leading term first."""
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            txt = render_scalar(c)
            neg = txt.startswith("-")
            if neg:
                txt = txt[1:]
            if w:
                body = render_word(w) if txt == "1" else f"{txt} {render_word(w)}"
            else:
                body = txt
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(("- " if neg else "+ ") + body)
        return " ".join(parts)


def _as_poly(x):
    if isinstance(x, NCPolynomial):
        return x
    if isinstance(x, (int, GaussianRational)):
        return NCPolynomial.scalar(x)
    return NotImplemented


class TensorPolynomial:
    """Finite map (Word, Word) -> scalar: first leg group letters, second leg
    sphere letters.  Multiplication and star act leg-wise."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        t = {}
        if terms:
            for k, c in terms.items():
                if c:
                    t[(tuple(k[0]), tuple(k[1]))] = c
        object.__setattr__(self, "terms", t)

    def __setattr__(self, name, value):
        raise AttributeError("TensorPolynomial is immutable")

    @staticmethod
    def zero() -> "TensorPolynomial":
        return TensorPolynomial()

    @staticmethod
    def one() -> "TensorPolynomial":
        return TensorPolynomial({(EMPTY_WORD, EMPTY_WORD): ONE})

    @staticmethod
    def decomposable(left: NCPolynomial, right: NCPolynomial) -> "TensorPolynomial":
        t = {}
        for wl, cl in left.terms.items():
            for wr, cr in right.terms.items():
                c = cl * cr
                if c:
                    t[(wl, wr)] = t.get((wl, wr), ZERO) + c
        return TensorPolynomial(t)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        t = dict(self.terms)
        for k, c in other.terms.items():
            s = t.get(k)
            s = c if s is None else s + c
            if s:
                t[k] = s
            elif k in t:
                del t[k]
        p = TensorPolynomial.__new__(TensorPolynomial)
        object.__setattr__(p, "terms", t)
        return p

    def __neg__(self):
        p = TensorPolynomial.__new__(TensorPolynomial)
        object.__setattr__(p, "terms", {k: -c for k, c in self.terms.items()})
        return p

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        t = {}
        for (a1, x1), c1 in self.terms.items():
            for (a2, x2), c2 in other.terms.items():
                k = (a1 + a2, x1 + x2)
                c = c1 * c2
                s = t.get(k)
                s = c if s is None else s + c
                if s:
                    t[k] = s
                elif k in t:
                    del t[k]
        p = TensorPolynomial.__new__(TensorPolynomial)
        object.__setattr__(p, "terms", t)
        return p

    def scale(self, c) -> "TensorPolynomial":
        c = c if isinstance(c, GaussianRational) else GaussianRational(c)
        if not c:
            return TensorPolynomial.zero()
        return TensorPolynomial({k: c * x for k, x in self.terms.items()})

    def star(self) -> "TensorPolynomial":
        return TensorPolynomial(
            {
                (star_word(a), star_word(x)): c.conjugate()
                for (a, x), c in self.terms.items()
            }
        )

    def left_coefficients(self):
        """Group by right leg: right word -> NCPolynomial in the left leg."""
        out = {}
        for (a, x), c in self.terms.items():
            out.setdefault(x, {})[a] = out.get(x, {}).get(a, ZERO) + c
        return {x: NCPolynomial(d) for x, d in out.items()}

    def map_legs(self, left=None, right=None) -> "TensorPolynomial":
        """Apply word -> NCPolynomial maps to one or both legs."""
        total = TensorPolynomial.zero()
        for (a, x), c in self.terms.items():
            lp = left(a) if left else NCPolynomial.from_word(a)
            rp = right(x) if right else NCPolynomial.from_word(x)
            total = total + TensorPolynomial.decomposable(lp, rp).scale(c)
        return total

    def __eq__(self, other):
        if not isinstance(other, TensorPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda t: (word_key(t[0][0]), word_key(t[0][1])))))

    def render(self) -> str:
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda k: (word_key(k[0]), word_key(k[1])), reverse=True)
        parts = []
        for k in keys:
            c = render_scalar(self.terms[k])
            parts.append(f"{c} ({render_word(k[0])}) x ({render_word(k[1])})")
        return " + ".join(parts)

    def __repr__(self):
        return f"TensorPolynomial({self.render()!r})"
