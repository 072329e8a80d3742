"""Matrix models: samplers for the classical parameter manifolds, relation
residual checks, sound counterexample search, Gram ranks, and the finite
determinant / group-identity checks.

All floating point lives here.  Points are deterministic per seed; the RNG
is numpy's PCG64, recorded in each point's provenance.  Operator norm means
largest singular value throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .ncpoly import Letter, NCPolynomial, Word, letter, render_word
from .presentations import Presentation
from .scalars import GaussianRational

TOL_STRICT = 1e-9
REFUTATION_MARGIN = 1e-3
SVD_TOL = 1e-8
SELF_CHECK_TOL = 1e-12

RNG_NAME = "numpy PCG64"

MANIFOLDS = ("S_R", "S_C", "TSR", "T2SR", "dotS", "ddotS", "ddotS-subfamily",
             "preset-prop25", "U_N", "O_N", "U2N", "TO2N", "T2ON", "udiag")


class UnsupportedManifoldError(ValueError):
    pass


def opnorm(M: np.ndarray) -> float:
    return float(np.linalg.norm(np.atleast_2d(M), 2))


def haar_unitary(n: int, rng) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_orthogonal(n: int, rng) -> np.ndarray:
    m = rng.standard_normal((n, n))
    q, r = np.linalg.qr(m)
    return q * np.sign(np.diagonal(r))


@dataclass(frozen=True)
class ModelPoint:
    """Assignment of unstarred letters to d x d complex matrices."""

    dim: int
    assignment: dict
    provenance: dict = field(default_factory=dict)

    def matrix(self, l: Letter) -> np.ndarray:
        if l.starred:
            return self.assignment[l.star].conj().T
        return self.assignment[l]

    def letters(self):
        return sorted(self.assignment, key=lambda l: (l.family, l.index))

    def families(self):
        return sorted({l.family for l in self.assignment})

    def to_json(self) -> dict:
        mats = {}
        for l in self.letters():
            a = self.assignment[l]
            mats[l.render()] = [[[float(x.real), float(x.imag)] for x in row] for row in a]
        return {"dim": self.dim, "provenance": dict(self.provenance), "matrices": mats}


def point_from_json(data: dict) -> ModelPoint:
    from .replay import _LETTER_RE

    assignment = {}
    for name, rows in data["matrices"].items():
        m = _LETTER_RE.match(name)
        if not m:
            raise ValueError(f"bad letter name {name!r}")
        fam, digits, star = m.groups()
        if digits.startswith("_"):
            idx = tuple(int(d) for d in digits[1:].split("_"))
        else:
            idx = tuple(int(d) for d in digits)
        if star:
            raise ValueError("serialized points store unstarred letters only")
        arr = np.array([[complex(re_, im_) for re_, im_ in row] for row in rows])
        assignment[Letter(fam, idx, False)] = arr
    return ModelPoint(data["dim"], assignment, dict(data.get("provenance", {})))


def evaluate(point: ModelPoint, poly: NCPolynomial) -> np.ndarray:
    """Value of a polynomial at the point; the empty word is the identity."""
    d = point.dim
    out = np.zeros((d, d), dtype=complex)
    for w, c in poly.terms.items():
        m = np.eye(d, dtype=complex)
        for l in w:
            m = m @ point.matrix(l)
        out += complex(c) * m
    return out


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def _vec_point(family: str, values: np.ndarray, manifold: str, N: int, seed,
               extra: dict | None = None) -> dict:
    return {Letter(family, (i + 1,), False): np.array([[values[i]]], dtype=complex)
            for i in range(N)}


def _scalar_assignment(pairs) -> dict:
    return {l: np.array([[v]], dtype=complex) for l, v in pairs}


def sample(manifold: str, N: int, seed: int = 0, **params) -> ModelPoint:
    """Deterministic point of the named classical parameter manifold.

    Every sampler re-checks its manifold's defining equations before
    returning; a residual above 1e-12 is a bug, not a data point.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if manifold not in MANIFOLDS:
        raise UnsupportedManifoldError(
            f"unsupported manifold {manifold!r}; choose from {MANIFOLDS}")
    rng = np.random.default_rng(seed)
    prov = {"manifold": manifold, "N": N, "seed": seed, "rng": RNG_NAME}
    if params:
        prov["params"] = repr(sorted(params.items()))

    if manifold == "S_R":
        x = rng.standard_normal(N)
        x /= np.linalg.norm(x)
        assignment = _vec_point("z", x.astype(complex), manifold, N, seed)
    elif manifold == "S_C":
        z = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        z /= np.linalg.norm(z)
        assignment = _vec_point("z", z, manifold, N, seed)
    elif manifold == "TSR":
        x = rng.standard_normal(N)
        x /= np.linalg.norm(x)
        u = np.exp(2j * np.pi * rng.random())
        assignment = _vec_point("z", u * x, manifold, N, seed)
    elif manifold == "T2SR":
        p = rng.standard_normal(N)
        p /= np.linalg.norm(p)
        theta = 2 * np.pi * rng.random()
        lam, mu = np.cos(theta), np.sin(theta)
        u = np.exp(2j * np.pi * rng.random())
        x, y = u * lam * p, u * mu * p
        assignment = {**{letter("x", i + 1): np.array([[x[i]]], dtype=complex) for i in range(N)},
                      **{letter("y", i + 1): np.array([[y[i]]], dtype=complex) for i in range(N)}}
    elif manifold == "dotS":
        v = rng.standard_normal(2 * N) + 1j * rng.standard_normal(2 * N)
        v /= np.linalg.norm(v)
        x, y = v[:N], v[N:]
        s = np.sum(x * np.conj(y))
        if abs(s) > 0:
            y = y * np.exp(1j * np.angle(s))
        assignment = {**{letter("x", i + 1): np.array([[x[i]]], dtype=complex) for i in range(N)},
                      **{letter("y", i + 1): np.array([[y[i]]], dtype=complex) for i in range(N)}}
    elif manifold in ("ddotS", "ddotS-subfamily"):
        p = params.get("p")
        q = params.get("q")
        p = rng.standard_normal(N) if p is None else np.asarray(p, dtype=float)
        q = rng.standard_normal(N) if q is None else np.asarray(q, dtype=float)
        p = p / np.linalg.norm(p)
        q = q / np.linalg.norm(q)
        u = np.exp(2j * np.pi * rng.random()) if params.get("phase", True) else 1.0
        x = u * (p + q) / 2
        y = u * (p - q) / 2j
        prov["subfamily"] = "(p,q)"
        assignment = {**{letter("x", i + 1): np.array([[x[i]]], dtype=complex) for i in range(N)},
                      **{letter("y", i + 1): np.array([[y[i]]], dtype=complex) for i in range(N)}}
    elif manifold == "preset-prop25":
        if N != 2:
            raise ValueError("preset-prop25 is the fixed N=2 point")
        r = 1 / np.sqrt(2)
        assignment = _scalar_assignment([
            (letter("x", 1), 1j * r), (letter("x", 2), 0.0),
            (letter("y", 1), 0.0), (letter("y", 2), r),
        ])
    elif manifold == "U_N":
        U = haar_unitary(N, rng)
        assignment = {letter("u", i + 1, j + 1): np.array([[U[i, j]]], dtype=complex)
                      for i in range(N) for j in range(N)}
    elif manifold == "O_N":
        O = haar_orthogonal(N, rng)
        assignment = {letter("u", i + 1, j + 1): np.array([[complex(O[i, j])]], dtype=complex)
                      for i in range(N) for j in range(N)}
    elif manifold == "U2N":
        V = haar_unitary(N, rng)
        W = haar_unitary(N, rng)
        A = (V + W) / 2
        B = 1j * (W - V) / 2
        assignment = _ab_assignment(A, B, N)
    elif manifold == "TO2N":
        V = haar_unitary(N, rng)
        z = np.exp(2j * np.pi * rng.random())
        A = z * V.real
        B = z * V.imag
        assignment = _ab_assignment(A, B, N)
    elif manifold == "T2ON":
        A0 = haar_orthogonal(N, rng)
        theta = 2 * np.pi * rng.random()
        z = np.exp(2j * np.pi * rng.random())
        A = z * np.cos(theta) * A0
        B = z * np.sin(theta) * A0
        assignment = _ab_assignment(A, B, N)
    elif manifold == "udiag":
        d = int(params.get("d", 2))
        V = haar_unitary(d, rng)
        slots = rng.standard_normal((d, N))
        slots /= np.linalg.norm(slots, axis=1, keepdims=True)
        assignment = {}
        for i in range(N):
            D = np.diag(slots[:, i]).astype(complex)
            assignment[letter("z", i + 1)] = V @ D
        prov["d"] = d

    dim = next(iter(assignment.values())).shape[0]
    point = ModelPoint(dim, assignment, prov)
    res = manifold_residual(point)
    if res > SELF_CHECK_TOL:
        raise AssertionError(f"sampler self-check failed for {manifold}: residual {res}")
    return point


def _ab_assignment(A: np.ndarray, B: np.ndarray, N: int) -> dict:
    out = {}
    for i in range(N):
        for j in range(N):
            out[letter("a", i + 1, j + 1)] = np.array([[A[i, j]]], dtype=complex)
            out[letter("b", i + 1, j + 1)] = np.array([[B[i, j]]], dtype=complex)
    return out


def _scalar_vector(point: ModelPoint, family: str) -> np.ndarray:
    ls = [l for l in point.letters() if l.family == family]
    return np.array([point.assignment[l][0, 0] for l in ls])


def manifold_residual(point: ModelPoint) -> float:
    """Max violation of the point's own manifold equations (post-hoc check)."""
    m = point.provenance.get("manifold")
    if m == "S_R":
        x = _scalar_vector(point, "z")
        return max(abs(np.sum(x * x.conj()) - 1), float(np.max(np.abs(x.imag))))
    if m == "S_C":
        z = _scalar_vector(point, "z")
        return abs(np.sum(np.abs(z) ** 2) - 1)
    if m == "TSR":
        z = _scalar_vector(point, "z")
        unit = abs(np.sum(np.abs(z) ** 2) - 1)
        pairs = np.abs(np.outer(z, z.conj()) - np.outer(z, z.conj()).T)
        return max(unit, float(pairs.max()))
    if m in ("dotS", "ddotS", "ddotS-subfamily", "preset-prop25", "T2SR"):
        x = _scalar_vector(point, "x")
        y = _scalar_vector(point, "y")
        unit = abs(np.sum(np.abs(x) ** 2) + np.sum(np.abs(y) ** 2) - 1)
        dot = abs(np.imag(np.sum(x * y.conj())))
        res = max(unit, dot)
        if m == "dotS":
            return res
        g1 = np.outer(x, x.conj()) + np.outer(y, y.conj())
        g2 = np.outer(x, y.conj()) - np.outer(y, x.conj())
        res = max(res, float(np.max(np.abs(g1.imag))), float(np.max(np.abs(g2.real))))
        if m == "T2SR":
            w = np.concatenate([x, y])
            pairs = np.abs(np.outer(w, w.conj()) - np.outer(w, w.conj()).T)
            res = max(res, float(pairs.max()))
        return res
    if m in ("U_N", "O_N"):
        N = point.provenance["N"]
        U = np.array([[point.assignment[letter("u", i + 1, j + 1)][0, 0]
                       for j in range(N)] for i in range(N)])
        res = max(opnorm(U @ U.conj().T - np.eye(N)), opnorm(U.conj().T @ U - np.eye(N)))
        if m == "O_N":
            res = max(res, float(np.max(np.abs(U.imag))))
        return res
    if m in ("U2N", "TO2N", "T2ON"):
        N = point.provenance["N"]
        A = np.array([[point.assignment[letter("a", i + 1, j + 1)][0, 0]
                       for j in range(N)] for i in range(N)])
        B = np.array([[point.assignment[letter("b", i + 1, j + 1)][0, 0]
                       for j in range(N)] for i in range(N)])
        U = np.block([[A, B], [-B, A]])
        res = max(opnorm(U @ U.conj().T - np.eye(2 * N)),
                  opnorm(U.conj().T @ U - np.eye(2 * N)))
        if m in ("TO2N", "T2ON"):
            w = np.concatenate([A.ravel(), B.ravel()])
            pairs = np.abs(np.outer(w, w.conj()) - np.outer(w, w.conj()).T)
            res = max(res, float(pairs.max()))
        if m == "T2ON":
            cross = np.abs(np.multiply.outer(A, B) - np.transpose(
                np.multiply.outer(A, B), (2, 3, 0, 1)))
            res = max(res, float(cross.max()))
        return res
    if m == "udiag":
        N = point.provenance["N"]
        d = point.dim
        zs = [point.assignment[letter("z", i + 1)] for i in range(N)]
        s1 = sum(z @ z.conj().T for z in zs)
        s2 = sum(z.conj().T @ z for z in zs)
        res = max(opnorm(s1 - np.eye(d)), opnorm(s2 - np.eye(d)))
        for zi, zj in itertools.product(zs, repeat=2):
            res = max(res, opnorm(zi @ zj.conj().T - zj @ zi.conj().T))
            res = max(res, opnorm(zi.conj().T @ zj - zj.conj().T @ zi))
        return res
    raise UnsupportedManifoldError(f"no residual check for {m!r}")


# ---------------------------------------------------------------------------
# model constructions (2x2 tricks)
# ---------------------------------------------------------------------------

def complex_doubling(point: ModelPoint) -> ModelPoint:
    """z_i = [[0, x_i],[x_i*, 0]] + i [[0, y_i],[y_i*, 0]] from an (x, y) point."""
    fams = point.families()
    if "x" not in fams or "y" not in fams:
        raise ValueError(f"complex doubling needs x and y letters, got {fams}")
    xs = [l for l in point.letters() if l.family == "x"]
    d = point.dim
    assignment = {}
    for lx in xs:
        ly = Letter("y", lx.index, False)
        X = point.assignment[lx]
        Y = point.assignment[ly]
        top = X + 1j * Y
        bot = X.conj().T + 1j * Y.conj().T
        Z = np.block([[np.zeros((d, d)), top], [bot, np.zeros((d, d))]])
        assignment[Letter("z", lx.index, False)] = Z
    prov = dict(point.provenance)
    prov["model"] = "complex_doubling"
    return ModelPoint(2 * d, assignment, prov)


def doubling(point: ModelPoint) -> ModelPoint:
    """Self-adjoint doubling z_i' = [[0, z_i],[z_i*, 0]]."""
    if "z" not in point.families():
        raise ValueError("doubling needs sphere letters")
    d = point.dim
    assignment = {}
    for l in point.letters():
        if l.family != "z":
            continue
        Z = point.assignment[l]
        assignment[l] = np.block([[np.zeros((d, d)), Z], [Z.conj().T, np.zeros((d, d))]])
    prov = dict(point.provenance)
    prov["model"] = "doubling"
    return ModelPoint(2 * d, assignment, prov)


def group_model(point: ModelPoint) -> ModelPoint:
    """u_{ij} = [[0, a_{ij} + i b_{ij}],[conj(a_{ij}) + i conj(b_{ij}), 0]] from
    a U2N point; the resulting block matrix is checked biunitary."""
    fams = point.families()
    if "a" not in fams or "b" not in fams:
        raise ValueError(f"group model needs a and b letters, got {fams}")
    N = point.provenance["N"]
    assignment = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            a = point.assignment[letter("a", i, j)][0, 0]
            b = point.assignment[letter("b", i, j)][0, 0]
            w = a + 1j * b
            wbar = np.conj(a) + 1j * np.conj(b)
            assignment[letter("u", i, j)] = np.array([[0, w], [wbar, 0]], dtype=complex)
    prov = dict(point.provenance)
    prov["model"] = "group_model"
    out = ModelPoint(2, assignment, prov)
    res = max(biunitarity_residuals(out, N).values())
    if res > 1e-10:
        raise AssertionError(f"group model failed biunitarity: {res}")
    return out


def biunitarity_residuals(point: ModelPoint, N: int, family: str = "u") -> dict:
    """Residuals of ww* = w*w = w^t conj(w) = conj(w) w^t = 1 for the block
    matrix w of u-letters (blocks are the letter matrices)."""
    d = point.dim
    W = np.zeros((N, N, d, d), dtype=complex)
    for i in range(N):
        for j in range(N):
            W[i, j] = point.assignment[Letter(family, (i + 1, j + 1), False)]

    def bmul(P, Q):
        return np.einsum("ikab,kjbc->ijac", P, Q)

    star = np.transpose(W, (1, 0, 3, 2)).conj()
    bar = np.transpose(W, (0, 1, 3, 2)).conj()
    trans = np.transpose(W, (1, 0, 2, 3))
    eye = np.zeros_like(W)
    for i in range(N):
        eye[i, i] = np.eye(d)

    def resid(P):
        return max(opnorm(P[i, j] - eye[i, j]) for i in range(N) for j in range(N))

    return {
        "ww*": resid(bmul(W, star)),
        "w*w": resid(bmul(star, W)),
        "wt_wbar": resid(bmul(trans, bar)),
        "wbar_wt": resid(bmul(bar, trans)),
    }


# ---------------------------------------------------------------------------
# relation checking and refutation
# ---------------------------------------------------------------------------

@dataclass
class SampleReport:
    residuals: list
    max_residual: float
    violation: tuple | None = None


def check_relations(P: Presentation, point: ModelPoint, tol: float = TOL_STRICT,
                    margin: float | None = None) -> SampleReport:
    """Operator-norm residual of every relation of P at the point."""
    missing = [l for r in P.relations for l in r.letters()
               if (l if not l.starred else l.star) not in point.assignment]
    if missing:
        raise ValueError(f"point does not cover letters {sorted({l.render() for l in missing})}")
    residuals = []
    for idx, rel in enumerate(P.relations):
        residuals.append((idx, opnorm(evaluate(point, rel))))
    worst = max(residuals, key=lambda t: t[1]) if residuals else (None, 0.0)
    violation = None
    if margin is not None and worst[1] > margin:
        violation = worst
    return SampleReport(residuals, worst[1], violation)


@dataclass
class Counterexample:
    point: ModelPoint
    target_residual: float
    presentation_residual: float
    seed: int

    def to_json(self) -> dict:
        return {
            "point": self.point.to_json(),
            "target_residual": self.target_residual,
            "presentation_residual": self.presentation_residual,
            "seed": self.seed,
        }


def refute_implication(P: Presentation, target: NCPolynomial,
                       sampler: Callable[[int], ModelPoint], trials: int = 500,
                       tol_strict: float = TOL_STRICT,
                       margin: float = REFUTATION_MARGIN,
                       seed0: int = 0) -> Counterexample | None:
    """Sound refutation: a counterexample satisfies every relation of P
    within tol_strict while violating the target beyond margin."""
    if margin <= tol_strict:
        raise ValueError("margin must exceed tol_strict")
    for t in range(trials):
        seed = seed0 + t
        point = sampler(seed)
        rep = check_relations(P, point, tol_strict)
        if rep.max_residual > tol_strict:
            continue
        res = opnorm(evaluate(point, target))
        if res > margin:
            assert rep.max_residual <= tol_strict
            return Counterexample(point, res, rep.max_residual, seed)
    return None


def reverify_counterexample(P: Presentation, target: NCPolynomial, data: dict,
                            tol_strict: float = TOL_STRICT,
                            margin: float = REFUTATION_MARGIN) -> bool:
    """Re-evaluate a serialized counterexample from scratch."""
    point = point_from_json(data["point"])
    rep = check_relations(P, point, tol_strict)
    res = opnorm(evaluate(point, target))
    return rep.max_residual <= tol_strict and res > margin


# ---------------------------------------------------------------------------
# named sphere/group samplers for refutation and coaction checks
# ---------------------------------------------------------------------------

def _padded_scalar_point(values, N: int, prov: dict) -> ModelPoint:
    vals = list(values) + [0.0] * (N - len(values))
    assignment = {letter("z", i + 1): np.array([[vals[i]]], dtype=complex)
                  for i in range(N)}
    return ModelPoint(1, assignment, prov)


SPHERE_SAMPLERS = ("preset-prop25", "pq-doubling", "pq-basis", "dot-doubling",
                   "udiag", "scalar-1i", "S_C", "S_R", "TSR", "doubling-SC")


def sphere_sampler(name: str, N: int, **params) -> Callable[[int], ModelPoint]:
    """Seed -> ModelPoint with sphere letters z_1..z_N, by sampler name."""
    if name == "preset-prop25":
        if N < 2:
            raise ValueError("preset-prop25 needs N >= 2")

        def f(seed):
            base = sample("preset-prop25", 2, seed)
            pt = complex_doubling(base)
            if N == 2:
                return pt
            assignment = dict(pt.assignment)
            for i in range(3, N + 1):
                assignment[letter("z", i)] = np.zeros((2, 2), dtype=complex)
            return ModelPoint(2, assignment, dict(pt.provenance, padded_to=N))
        return f
    if name == "pq-doubling":
        return lambda seed: complex_doubling(sample("ddotS", N, seed, **params))
    if name == "pq-basis":
        if N < 2:
            raise ValueError("pq-basis needs N >= 2")
        p = [0.0] * N
        q = [0.0] * N
        p[0] = 1.0
        q[1] = 1.0
        return lambda seed: complex_doubling(
            sample("ddotS", N, seed, p=p, q=q, phase=False))
    if name == "dot-doubling":
        return lambda seed: complex_doubling(sample("dotS", N, seed))
    if name == "udiag":
        d = params.get("d", 2)
        return lambda seed: sample("udiag", N, seed, d=d)
    if name == "scalar-1i":
        if N < 2:
            raise ValueError("scalar-1i needs N >= 2")
        r = 1 / np.sqrt(2)
        prov = {"manifold": "scalar-1i", "N": N, "seed": None, "rng": RNG_NAME}
        return lambda seed: _padded_scalar_point([r, 1j * r], N, dict(prov))
    if name in ("S_C", "S_R", "TSR"):
        return lambda seed: sample(name, N, seed)
    if name == "doubling-SC":
        return lambda seed: doubling(sample("S_C", N, seed))
    raise UnsupportedManifoldError(f"unknown sphere sampler {name!r}; "
                                   f"choose from {SPHERE_SAMPLERS}")


GROUP_SAMPLERS = ("U_N", "O_N", "TON", "U2N-group")


def group_sampler(name: str, N: int) -> Callable[[int], ModelPoint]:
    """Seed -> ModelPoint with group letters u_{ij}."""
    if name in ("U_N", "O_N"):
        return lambda seed: sample(name, N, seed)
    if name == "TON":
        def f(seed):
            rng = np.random.default_rng(seed)
            O = haar_orthogonal(N, rng)
            z = np.exp(2j * np.pi * rng.random())
            assignment = {letter("u", i + 1, j + 1): np.array([[z * O[i, j]]], dtype=complex)
                          for i in range(N) for j in range(N)}
            return ModelPoint(1, assignment,
                              {"manifold": "TON", "N": N, "seed": seed, "rng": RNG_NAME})
        return f
    if name == "U2N-group":
        return lambda seed: group_model(sample("U2N", N, seed))
    raise UnsupportedManifoldError(f"unknown group sampler {name!r}; "
                                   f"choose from {GROUP_SAMPLERS}")


# ---------------------------------------------------------------------------
# Gram ranks
# ---------------------------------------------------------------------------

def lemma43_family(which: int, N: int) -> list[Word]:
    """The three linear-independence monomial families.

    (1) z_a z_b* for a <= b; (2) z_a z_b z_c for a <= c; (3) z_a z_b* z_c
    for a <= c.
    """
    z = lambda i, s=False: Letter("z", (i,), s)
    rng = range(1, N + 1)
    if which == 1:
        return [(z(a), z(b, True)) for a in rng for b in rng if a <= b]
    if which == 2:
        return [(z(a), z(b), z(c)) for a in rng for b in rng for c in rng if a <= c]
    if which == 3:
        return [(z(a), z(b, True), z(c)) for a in rng for b in rng for c in rng if a <= c]
    raise ValueError("family index must be 1, 2 or 3")


def gram_rank(monomials: Sequence[Word], sampler: Callable[[int], ModelPoint],
              samples: int, svd_tol: float = SVD_TOL, seed0: int = 0):
    """Numerical rank of the monomial family over sampled points.

    Each monomial is evaluated at each sample and the matrix entries are
    flattened into one feature vector per monomial; the rank is the number
    of singular values above svd_tol relative to the largest.
    """
    if samples < len(monomials):
        raise ValueError("need at least as many samples as monomials")
    rows = []
    first = None
    degenerate = True
    for t in range(samples):
        point = sampler(seed0 + t)
        vec = np.concatenate([evaluate(point, NCPolynomial.from_word(w)).ravel()
                              for w in monomials])
        rows.append(vec)
        key = tuple(np.round(vec, 12))
        if first is None:
            first = key
        elif key != first:
            degenerate = False
    if degenerate and samples > 1:
        raise ValueError("degenerate sampler: all sampled points coincide")
    F = np.array(rows).reshape(samples, len(monomials), -1)
    F = np.transpose(F, (1, 0, 2)).reshape(len(monomials), -1)
    sv = np.linalg.svd(F, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0, sv
    return int(np.sum(sv > svd_tol * sv[0])), sv


# ---------------------------------------------------------------------------
# finite exact checks (4x4 determinants, U_{2,N} group identities)
# ---------------------------------------------------------------------------

def _exact_det(M: list[list[GaussianRational]]) -> GaussianRational:
    n = len(M)
    total = GaussianRational(0)
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):  # count inversions
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = GaussianRational(sign)
        for i in range(n):
            term = term * M[i][perm[i]]
        total = total + term
    return total


def prop23_determinants():
    """The two 4x4 sign matrices from the half-commutation splitting argument.

    Rows run over the four choices of (alpha, beta, gamma) in {i, -i}^3 with
    at most one -i; columns carry (1, ab, bg, ag) resp. (a, b, g, abg).
    Returns (det1, det2, M1, M2) with exact Gaussian rational determinants.
    """
    I = GaussianRational(0, 1)
    choices = [(I, I, I), (-I, I, I), (I, -I, I), (I, I, -I)]
    M1 = [[GaussianRational(1), a * b, b * g, a * g] for a, b, g in choices]
    M2 = [[a, b, g, a * b * g] for a, b, g in choices]
    return _exact_det(M1), _exact_det(M2), M1, M2


# -- small commutative polynomial helper (independent formal symbols) --------

def _cp(sym) -> dict:
    return {(sym,): Fraction(1)}


def _cp_scale(p: dict, c) -> dict:
    return {k: v * c for k, v in p.items()}


def _cp_add(p: dict, q: dict) -> dict:
    out = dict(p)
    for k, v in q.items():
        s = out.get(k, Fraction(0)) + v
        if s:
            out[k] = s
        elif k in out:
            del out[k]
    return out


def _cp_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for k1, v1 in p.items():
        for k2, v2 in q.items():
            k = tuple(sorted(k1 + k2))
            s = out.get(k, Fraction(0)) + v1 * v2
            if s:
                out[k] = s
            elif k in out:
                del out[k]
    return out


def u2n_group_identities(N: int = 2, pairs: int = 100, tol: float = 1e-10) -> dict:
    """Verify the product-closure argument for the U_{2,N} parameter spaces.

    Symbolic part: the two regrouping identities behind closure of U_N' are
    checked as exact identities of commutative polynomials in independent
    symbols a_{ip}, b_{ip}, c_{pj}, d_{pj} and their formal conjugates.
    Numeric part: products and adjoints of sampled T2ON and TO2N points are
    checked to satisfy the U_N' membership conditions within tol.
    """
    a = lambda i, p, bar=False: ("a", i, p, bar)
    b = lambda i, p, bar=False: ("b", i, p, bar)
    c = lambda p, j, bar=False: ("c", p, j, bar)
    d = lambda p, j, bar=False: ("d", p, j, bar)
    rng = range(1, N + 1)

    ok1 = ok2 = True
    for i, j, k, l in itertools.product(rng, repeat=4):
        ac_bd_ij = {}
        ad_bc_ij = {}
        ac_bd_kl_bar = {}
        ad_bc_kl_bar = {}
        for p in rng:
            ac_bd_ij = _cp_add(ac_bd_ij, _cp_add(_cp_mul(_cp(a(i, p)), _cp(c(p, j))),
                                                 _cp_scale(_cp_mul(_cp(b(i, p)), _cp(d(p, j))), -1)))
            ad_bc_ij = _cp_add(ad_bc_ij, _cp_add(_cp_mul(_cp(a(i, p)), _cp(d(p, j))),
                                                 _cp_mul(_cp(b(i, p)), _cp(c(p, j)))))
        for q in rng:
            ac_bd_kl_bar = _cp_add(ac_bd_kl_bar,
                                   _cp_add(_cp_mul(_cp(a(k, q, True)), _cp(c(q, l, True))),
                                           _cp_scale(_cp_mul(_cp(b(k, q, True)), _cp(d(q, l, True))), -1)))
            ad_bc_kl_bar = _cp_add(ad_bc_kl_bar,
                                   _cp_add(_cp_mul(_cp(a(k, q, True)), _cp(d(q, l, True))),
                                           _cp_mul(_cp(b(k, q, True)), _cp(c(q, l, True)))))

        lhs1 = _cp_add(_cp_mul(ac_bd_ij, ac_bd_kl_bar), _cp_mul(ad_bc_ij, ad_bc_kl_bar))
        lhs2 = _cp_add(_cp_mul(ac_bd_ij, ad_bc_kl_bar),
                       _cp_scale(_cp_mul(ad_bc_ij, ac_bd_kl_bar), -1))

        rhs1: dict = {}
        rhs2: dict = {}
        for p, q in itertools.product(rng, repeat=2):
            aa_bb = _cp_add(_cp_mul(_cp(a(i, p)), _cp(a(k, q, True))),
                            _cp_mul(_cp(b(i, p)), _cp(b(k, q, True))))
            ab_ba = _cp_add(_cp_mul(_cp(a(i, p)), _cp(b(k, q, True))),
                            _cp_scale(_cp_mul(_cp(b(i, p)), _cp(a(k, q, True))), -1))
            cc_dd = _cp_add(_cp_mul(_cp(c(p, j)), _cp(c(q, l, True))),
                            _cp_mul(_cp(d(p, j)), _cp(d(q, l, True))))
            dc_cd = _cp_add(_cp_mul(_cp(d(p, j)), _cp(c(q, l, True))),
                            _cp_scale(_cp_mul(_cp(c(p, j)), _cp(d(q, l, True))), -1))
            cd_dc = _cp_scale(dc_cd, -1)
            rhs1 = _cp_add(rhs1, _cp_add(_cp_mul(aa_bb, cc_dd), _cp_mul(ab_ba, dc_cd)))
            rhs2 = _cp_add(rhs2, _cp_add(_cp_mul(aa_bb, cd_dc), _cp_mul(ab_ba, cc_dd)))

        ok1 = ok1 and _cp_add(lhs1, _cp_scale(rhs1, -1)) == {}
        ok2 = ok2 and _cp_add(lhs2, _cp_scale(rhs2, -1)) == {}

    # Closure: T2ON lands in U_N' (the U_N-circ parameter space); TO2N is
    # checked against its own membership (phase times real block) since it
    # is not a subset of U_N'.
    worst_product = 0.0
    worst_adjoint = 0.0
    for t in range(pairs):
        p1 = sample("T2ON", N, 2 * t)
        p2 = sample("T2ON", N, 2 * t + 1)
        U1 = _u2n_matrix(p1, N)
        U2 = _u2n_matrix(p2, N)
        worst_product = max(worst_product, _unprime_residual(U1 @ U2, N))
        worst_adjoint = max(worst_adjoint, _unprime_residual(U1.conj().T, N))
        q1 = sample("TO2N", N, 2 * t)
        q2 = sample("TO2N", N, 2 * t + 1)
        V1 = _u2n_matrix(q1, N)
        V2 = _u2n_matrix(q2, N)
        worst_product = max(worst_product, _to2n_residual(V1 @ V2, N))
        worst_adjoint = max(worst_adjoint, _to2n_residual(V1.conj().T, N))

    return {
        "identity_real_regrouping": ok1,
        "identity_imag_regrouping": ok2,
        "closure_product_residual": worst_product,
        "closure_adjoint_residual": worst_adjoint,
        "closure_ok": worst_product <= tol and worst_adjoint <= tol,
        "verdict": ok1 and ok2 and worst_product <= tol and worst_adjoint <= tol,
    }


def _u2n_matrix(point: ModelPoint, N: int) -> np.ndarray:
    A = np.array([[point.assignment[letter("a", i + 1, j + 1)][0, 0]
                   for j in range(N)] for i in range(N)])
    B = np.array([[point.assignment[letter("b", i + 1, j + 1)][0, 0]
                   for j in range(N)] for i in range(N)])
    return np.block([[A, B], [-B, A]])


def _block_shape_residual(U: np.ndarray, N: int) -> float:
    return max(opnorm(U @ U.conj().T - np.eye(2 * N)),
               float(np.max(np.abs(U[:N, :N] - U[N:, N:]))),
               float(np.max(np.abs(U[:N, N:] + U[N:, :N]))))


def _unprime_residual(U: np.ndarray, N: int) -> float:
    """Violation of the U_N' membership conditions for a 2N x 2N block matrix."""
    A = U[:N, :N]
    B = U[:N, N:]
    g1 = np.multiply.outer(A, A.conj()) + np.multiply.outer(B, B.conj())
    g2 = np.multiply.outer(A, B.conj()) - np.multiply.outer(B, A.conj())
    return max(_block_shape_residual(U, N),
               float(np.max(np.abs(g1.imag))), float(np.max(np.abs(g2.real))))


def _to2n_residual(U: np.ndarray, N: int) -> float:
    """Violation of TO2N membership: unitary block shape, entries a common
    phase times reals (pairwise reality of all 2N^2 entries)."""
    w = np.concatenate([U[:N, :N].ravel(), U[:N, N:].ravel()])
    g = np.outer(w, w.conj())
    return max(_block_shape_residual(U, N), float(np.max(np.abs(g - g.T))))


# ---------------------------------------------------------------------------
# classical membership predicates
# ---------------------------------------------------------------------------

def membership(manifold: str, point: ModelPoint, tol: float = 1e-9) -> bool:
    """Classical membership for scalar (dim-1) points."""
    if point.dim != 1:
        raise ValueError("membership predicates apply to scalar points")
    if manifold == "TSR":
        z = _scalar_vector(point, "z")
        unit = abs(np.sum(np.abs(z) ** 2) - 1)
        g = np.outer(z, z.conj())
        return unit <= tol and float(np.max(np.abs(g - g.T))) <= tol
    if manifold == "S_C":
        z = _scalar_vector(point, "z")
        return abs(np.sum(np.abs(z) ** 2) - 1) <= tol
    if manifold == "S_R":
        z = _scalar_vector(point, "z")
        return abs(np.sum(np.abs(z) ** 2) - 1) <= tol and float(np.max(np.abs(z.imag))) <= tol
    if manifold == "TON":
        us = [l for l in point.letters() if l.family == "u"]
        N = max(l.index[0] for l in us)
        U = np.array([[point.assignment[letter("u", i + 1, j + 1)][0, 0]
                       for j in range(N)] for i in range(N)])
        unitary = max(opnorm(U @ U.conj().T - np.eye(N)), opnorm(U.conj().T @ U - np.eye(N)))
        w = U.ravel()
        g = np.outer(w, w.conj())
        return unitary <= tol and float(np.max(np.abs(g - g.T))) <= tol
    raise UnsupportedManifoldError(f"no membership predicate for {manifold!r}")
