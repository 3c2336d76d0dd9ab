"""Truncated tensor powers of the universal enveloping algebra of gl_n.

Elements live in U(gl_n)^{⊗k}[hbar]/(hbar^{N+1}) with a per-slot PBW degree
cap D.  The PBW basis is built from the elementary matrices E[i, j]
(0-based indices here; the JSON serialization uses 1-based labels, see
docs/formats.md), ordered lexicographically by (i, j).  Normal ordering uses

    [E[i,j], E[k,l]] = delta(j,k) E[i,l] - delta(l,i) E[k,j]

so all straightening coefficients are integers; products accumulate
per-monomial contribution lists and reduce them with math.fsum.  That makes
the cancellations that enforce structural identities (admissibility of
conjugated elements, top-degree drop in commutators) bitwise exact, which the
exactness checks in the test-suite rely on.

Truncation never raises: coefficients past hbar^N or words past the degree
cap are dropped and the element is marked ``lossy``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from math import fsum
from typing import Iterable, Mapping, Sequence

import numpy as np

Word = tuple  # tuple[int, ...], weakly increasing generator codes
Monomial = tuple  # tuple[Word, ...], one word per tensor slot


class AlgebraError(ValueError):
    """Invalid algebraic input."""


class ShapeMismatchError(AlgebraError):
    """Operands disagree in (n, arity, hbar_order, degree_cap)."""


class NotInvertibleError(AlgebraError):
    """Element has no invertible scalar part."""


class NotAdmissibleError(AlgebraError):
    """Designated-slot degree exceeds the hbar power somewhere."""


def gen_code(n: int, i: int, j: int) -> int:
    """Code of E[i,j] under the fixed lexicographic order on (i, j)."""
    if not (0 <= i < n and 0 <= j < n):
        raise AlgebraError(f"generator E[{i},{j}] out of range for gl_{n}")
    return i * n + j


def gen_pair(n: int, code: int) -> tuple:
    return divmod(code, n)


@lru_cache(maxsize=None)
def _straighten(n: int, word: Word) -> tuple:
    """Normal-order a word of generator codes.

    Returns a tuple of (sorted_word, integer_coefficient) pairs.  Recursion:
    swap the first descent and add the commutator term(s); each insertion
    shortens the word, so this terminates.
    """
    for p in range(len(word) - 1):
        if word[p] > word[p + 1]:
            break
    else:
        return ((word, 1),)
    a, b = word[p], word[p + 1]
    i1, j1 = divmod(a, n)
    i2, j2 = divmod(b, n)
    acc: dict = {}

    def _absorb(sub, factor):
        for w, c in sub:
            acc[w] = acc.get(w, 0) + factor * c

    _absorb(_straighten(n, word[:p] + (b, a) + word[p + 2:]), 1)
    if j1 == i2:
        _absorb(_straighten(n, word[:p] + (i1 * n + j2,) + word[p + 2:]), 1)
    if j2 == i1:
        _absorb(_straighten(n, word[:p] + (i2 * n + j1,) + word[p + 2:]), -1)
    return tuple((w, c) for w, c in acc.items() if c != 0)


def _word_mul(n: int, w1: Word, w2: Word) -> tuple:
    return _straighten(n, w1 + w2)


def _as_coeffs(value, order: int) -> tuple:
    """Coerce a scalar or an hbar-coefficient sequence to length order+1."""
    if isinstance(value, (int, float, complex, np.integer, np.floating, np.complexfloating)):
        vec = [complex(value)] + [0j] * order
        return tuple(vec)
    vec = [complex(v) for v in value]
    if len(vec) > order + 1 and any(v != 0 for v in vec[order + 1:]):
        raise AlgebraError("hbar polynomial longer than the truncation order")
    vec = vec[: order + 1]
    vec += [0j] * (order + 1 - len(vec))
    return tuple(vec)


class TruncatedElement:
    """Immutable sparse element of U(gl_n)^{⊗arity}[hbar]/(hbar^{N+1}).

    ``terms`` maps a monomial (one sorted word of generator codes per slot)
    to a length-(N+1) tuple of complex hbar coefficients.  Zero coefficient
    vectors are never stored.
    """

    __slots__ = ("n", "arity", "hbar_order", "degree_cap", "terms", "lossy")

    def __init__(self, n, arity, hbar_order, degree_cap, terms, lossy=False):
        if n < 1 or arity < 1 or hbar_order < 0 or degree_cap < 0:
            raise AlgebraError("invalid truncation parameters")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "hbar_order", hbar_order)
        object.__setattr__(self, "degree_cap", degree_cap)
        object.__setattr__(self, "terms", dict(terms))
        object.__setattr__(self, "lossy", bool(lossy))

    def __setattr__(self, *args):
        raise AttributeError("TruncatedElement is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n, arity, hbar_order, degree_cap):
        return cls(n, arity, hbar_order, degree_cap, {})

    @classmethod
    def scalar(cls, value, n, arity, hbar_order, degree_cap):
        coeffs = _as_coeffs(value, hbar_order)
        empty = tuple(() for _ in range(arity))
        terms = {} if not any(c != 0 for c in coeffs) else {empty: coeffs}
        return cls(n, arity, hbar_order, degree_cap, terms)

    @classmethod
    def one(cls, n, arity, hbar_order, degree_cap):
        return cls.scalar(1.0, n, arity, hbar_order, degree_cap)

    @classmethod
    def generator(cls, n, i, j, arity, slot, hbar_order, degree_cap):
        """E[i,j] (0-based) placed in the given tensor slot."""
        if degree_cap < 1:
            raise AlgebraError("degree cap too small for a generator")
        if not (0 <= slot < arity):
            raise AlgebraError("slot out of range")
        words = [() for _ in range(arity)]
        words[slot] = (gen_code(n, i, j),)
        coeffs = _as_coeffs(1.0, hbar_order)
        return cls(n, arity, hbar_order, degree_cap, {tuple(words): coeffs})

    # -- bookkeeping ---------------------------------------------------------

    @property
    def shape(self):
        return (self.n, self.arity, self.hbar_order, self.degree_cap)

    def _require_same_shape(self, other):
        if self.shape != other.shape:
            raise ShapeMismatchError(
                f"shape mismatch: {self.shape} vs {other.shape}")

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs(self) -> float:
        return max((abs(c) for cs in self.terms.values() for c in cs), default=0.0)

    def hbar_coefficient_norms(self):
        """Max |coefficient| per hbar power, length N+1."""
        out = [0.0] * (self.hbar_order + 1)
        for cs in self.terms.values():
            for k, c in enumerate(cs):
                a = abs(c)
                if a > out[k]:
                    out[k] = a
        return out

    def hbar_part(self, k) -> "TruncatedElement":
        """The coefficient of hbar^k, returned at hbar power zero."""
        terms = {}
        for m, cs in self.terms.items():
            if cs[k] != 0:
                terms[m] = _as_coeffs(cs[k], self.hbar_order)
        return TruncatedElement(*self.shape, terms, self.lossy)

    def allclose(self, other, tol=1e-12) -> bool:
        self._require_same_shape(other)
        keys = set(self.terms) | set(other.terms)
        zero = (0j,) * (self.hbar_order + 1)
        for m in keys:
            a = self.terms.get(m, zero)
            b = other.terms.get(m, zero)
            if any(abs(x - y) > tol for x, y in zip(a, b)):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, TruncatedElement):
            return NotImplemented
        return self.shape == other.shape and self.terms == other.terms

    def __hash__(self):
        return hash((self.shape, frozenset(self.terms.items())))

    def __repr__(self):
        flag = ", lossy" if self.lossy else ""
        return (f"TruncatedElement(n={self.n}, arity={self.arity}, "
                f"N={self.hbar_order}, D={self.degree_cap}, "
                f"terms={len(self.terms)}{flag})")

    # -- linear structure ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = TruncatedElement.scalar(other, *self.shape)
        self._require_same_shape(other)
        terms = dict(self.terms)
        for m, cs in other.terms.items():
            if m in terms:
                merged = tuple(a + b for a, b in zip(terms[m], cs))
                if any(c != 0 for c in merged):
                    terms[m] = merged
                else:
                    del terms[m]
            else:
                terms[m] = cs
        return TruncatedElement(*self.shape, terms, self.lossy or other.lossy)

    __radd__ = __add__

    def __neg__(self):
        terms = {m: tuple(-c for c in cs) for m, cs in self.terms.items()}
        return TruncatedElement(*self.shape, terms, self.lossy)

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = TruncatedElement.scalar(other, *self.shape)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value) -> "TruncatedElement":
        """Multiply by a complex scalar or an hbar polynomial."""
        coeffs = _as_coeffs(value, self.hbar_order)
        if not any(c != 0 for c in coeffs):
            return TruncatedElement.zero(*self.shape)
        N = self.hbar_order
        top = max(k for k, c in enumerate(coeffs) if c != 0)
        terms = {}
        lossy = self.lossy
        for m, cs in self.terms.items():
            out = [0j] * (N + 1)
            for k1, c1 in enumerate(cs):
                if c1 == 0:
                    continue
                if k1 + top > N:
                    lossy = True
                for k2, c2 in enumerate(coeffs):
                    if c2 != 0 and k1 + k2 <= N:
                        out[k1 + k2] += c1 * c2
            if any(c != 0 for c in out):
                terms[m] = tuple(out)
        return TruncatedElement(*self.shape, terms, lossy)

    def times_hbar(self, power=1) -> "TruncatedElement":
        coeffs = [0j] * (self.hbar_order + 1)
        if power <= self.hbar_order:
            coeffs[power] = 1.0
        return self.scale(coeffs)

    def subs_hbar_scale(self, factor) -> "TruncatedElement":
        """Substitute hbar -> factor * hbar (coefficient k gets factor^k)."""
        terms = {}
        for m, cs in self.terms.items():
            out = tuple(c * factor**k for k, c in enumerate(cs))
            if any(c != 0 for c in out):
                terms[m] = out
        return TruncatedElement(*self.shape, terms, self.lossy)

    # -- multiplication ------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        if not isinstance(other, TruncatedElement):
            return NotImplemented
        self._require_same_shape(other)
        n, arity, N, D = self.shape
        lossy = self.lossy or other.lossy
        acc: dict = {}
        for m1, c1 in self.terms.items():
            top1 = max(k for k, c in enumerate(c1) if c != 0)
            for m2, c2 in other.terms.items():
                top2 = max(k for k, c in enumerate(c2) if c != 0)
                if top1 + top2 > N:
                    lossy = True
                pair = [0j] * (N + 1)
                for k1, a in enumerate(c1):
                    if a == 0:
                        continue
                    for k2 in range(min(N - k1, top2) + 1):
                        b = c2[k2]
                        if b != 0:
                            pair[k1 + k2] += a * b
                if not any(c != 0 for c in pair):
                    continue
                per_slot = []
                dead = False
                for s in range(arity):
                    prods = _word_mul(n, m1[s], m2[s])
                    kept = [(w, c) for w, c in prods if len(w) <= D]
                    if len(kept) < len(prods):
                        lossy = True
                    if not kept:
                        dead = True
                        break
                    per_slot.append(kept)
                if dead:
                    continue
                for combo in itertools.product(*per_slot):
                    mono = tuple(w for w, _ in combo)
                    ic = 1
                    for _, c in combo:
                        ic *= c
                    bucket = acc.get(mono)
                    if bucket is None:
                        bucket = acc[mono] = [[] for _ in range(N + 1)]
                    for k, c in enumerate(pair):
                        if c != 0:
                            bucket[k].append(ic * c)
        terms = {}
        for mono, buckets in acc.items():
            cs = tuple(
                complex(fsum(v.real for v in b), fsum(v.imag for v in b))
                for b in buckets
            )
            if any(c != 0 for c in cs):
                terms[mono] = cs
        return TruncatedElement(n, arity, N, D, terms, lossy)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise AlgebraError("only nonnegative integer powers")
        out = TruncatedElement.one(*self.shape)
        for _ in range(k):
            out = out * self
        return out


# -- spec'd operations -------------------------------------------------------


def normal_order_product(a: TruncatedElement, b: TruncatedElement) -> TruncatedElement:
    """Product in canonical sparse normal form (same as ``a * b``)."""
    return a * b


def commutator(a: TruncatedElement, b: TruncatedElement) -> TruncatedElement:
    return a * b - b * a


def casimir(n, hbar_order, degree_cap, arity=2, slots=(0, 1)) -> TruncatedElement:
    """Sum of E[i,j] ⊗ E[j,i] over all pairs (trace-form dual bases)."""
    out = TruncatedElement.zero(n, arity, hbar_order, degree_cap)
    for i in range(n):
        for j in range(n):
            a = TruncatedElement.generator(n, i, j, arity, slots[0], hbar_order, degree_cap)
            b = TruncatedElement.generator(n, j, i, arity, slots[1], hbar_order, degree_cap)
            out = out + a * b
    return out


def cartan_casimir(n, hbar_order, degree_cap, arity=2, slots=(0, 1)) -> TruncatedElement:
    """Sum of E[i,i] ⊗ E[i,i] (orthonormal basis of the diagonal torus)."""
    out = TruncatedElement.zero(n, arity, hbar_order, degree_cap)
    for i in range(n):
        a = TruncatedElement.generator(n, i, i, arity, slots[0], hbar_order, degree_cap)
        b = TruncatedElement.generator(n, i, i, arity, slots[1], hbar_order, degree_cap)
        out = out + a * b
    return out


def kappa(n, i, j, hbar_order, degree_cap, arity=1, slot=0) -> TruncatedElement:
    """E[i,j]E[j,i] + E[j,i]E[i,j], in normal order.  Symmetric in (i, j)."""
    if i == j:
        raise AlgebraError("kappa requires i != j")
    a = TruncatedElement.generator(n, i, j, arity, slot, hbar_order, degree_cap)
    b = TruncatedElement.generator(n, j, i, arity, slot, hbar_order, degree_cap)
    return a * b + b * a


def mixed_root_term(n, i, j, hbar_order, degree_cap, arity=2, slots=(0, 1)) -> TruncatedElement:
    """E[i,j] ⊗ E[j,i] + E[j,i] ⊗ E[i,j] (the root-pair block of the Casimir)."""
    if i == j:
        raise AlgebraError("mixed root term requires i != j")
    out = TruncatedElement.zero(n, arity, hbar_order, degree_cap)
    for (p, q) in ((i, j), (j, i)):
        a = TruncatedElement.generator(n, p, q, arity, slots[0], hbar_order, degree_cap)
        b = TruncatedElement.generator(n, q, p, arity, slots[1], hbar_order, degree_cap)
        out = out + a * b
    return out


def coproduct(a: TruncatedElement, slot=0) -> TruncatedElement:
    """Apply Delta(x) = x⊗1 + 1⊗x to one slot, doubling it.

    On a sorted word this is the exact subset split, so no re-straightening
    is needed and no precision is lost.  Arity grows by one; degree caps
    cannot overflow because split words are shorter.
    """
    n, arity, N, D = a.shape
    terms: dict = {}
    for mono, cs in a.terms.items():
        w = mono[slot]
        for mask in range(1 << len(w)):
            left = tuple(w[p] for p in range(len(w)) if mask >> p & 1)
            right = tuple(w[p] for p in range(len(w)) if not mask >> p & 1)
            new = mono[:slot] + (left, right) + mono[slot + 1:]
            if new in terms:
                terms[new] = tuple(x + y for x, y in zip(terms[new], cs))
            else:
                terms[new] = cs
    terms = {m: cs for m, cs in terms.items() if any(c != 0 for c in cs)}
    return TruncatedElement(n, arity + 1, N, D, terms, a.lossy)


def embed_slots(a: TruncatedElement, positions: Sequence, arity: int) -> TruncatedElement:
    """Place the slots of ``a`` at the given positions of a larger tensor power."""
    if len(positions) != a.arity or len(set(positions)) != a.arity:
        raise AlgebraError("positions must be distinct and match the arity")
    if any(not 0 <= p < arity for p in positions):
        raise AlgebraError("position out of range")
    terms = {}
    for mono, cs in a.terms.items():
        words = [() for _ in range(arity)]
        for s, p in enumerate(positions):
            words[p] = mono[s]
        terms[tuple(words)] = cs
    return TruncatedElement(a.n, arity, a.hbar_order, a.degree_cap, terms, a.lossy)


def weight_of_word(n: int, word: Word, u: Sequence) -> complex:
    """ad(diag(u)) eigenvalue of a word: sum of u[i] - u[j] over its generators."""
    w = 0j
    for g in word:
        i, j = divmod(g, n)
        w += u[i] - u[j]
    return w


def ad_cartan(a: TruncatedElement, u: Sequence, slot=0) -> TruncatedElement:
    """[diag(u) in the given slot, a]; monomials are weight vectors."""
    n = a.n
    terms = {}
    for mono, cs in a.terms.items():
        w = weight_of_word(n, mono[slot], u)
        if w != 0:
            out = tuple(w * c for c in cs)
            if any(c != 0 for c in out):
                terms[mono] = out
    return TruncatedElement(*a.shape, terms, a.lossy)


def exp_ad_cartan(a: TruncatedElement, z, u: Sequence, slot=0) -> TruncatedElement:
    """Apply exp(z · ad diag(u)^{(slot)}): scale each monomial by e^{z·weight}."""
    n = a.n
    terms = {}
    for mono, cs in a.terms.items():
        w = weight_of_word(n, mono[slot], u)
        f = np.exp(z * w) if w != 0 else 1.0
        out = tuple(f * c for c in cs)
        if any(c != 0 for c in out):
            terms[mono] = out
    return TruncatedElement(*a.shape, terms, a.lossy)


def _nilpotent_bound(a: TruncatedElement) -> int:
    # each factor raises (hbar order + total degree) by >= 1
    return (a.hbar_order + 1) + a.arity * a.degree_cap + 1


def _check_series_argument(a: TruncatedElement):
    empty = tuple(() for _ in range(a.arity))
    cs = a.terms.get(empty)
    if cs is not None and cs[0] != 0:
        raise NotInvertibleError(
            "series argument must vanish at hbar^0 in its scalar part")


def exp_series(a: TruncatedElement) -> TruncatedElement:
    """exp(a) for a with no hbar^0 scalar part (the series truncates)."""
    _check_series_argument(a)
    out = TruncatedElement.one(*a.shape)
    term = TruncatedElement.one(*a.shape)
    for k in range(1, _nilpotent_bound(a)):
        term = (term * a).scale(1.0 / k)
        if term.is_zero():
            break
        out = out + term
    return out


def log_series(a: TruncatedElement) -> TruncatedElement:
    """log(a) for a = 1 + x with x lacking an hbar^0 scalar part."""
    empty = tuple(() for _ in range(a.arity))
    cs = a.terms.get(empty)
    if cs is None or cs[0] != 1:
        raise NotInvertibleError("log requires unit constant term")
    x = a - 1.0
    _check_series_argument(x)
    out = TruncatedElement.zero(*a.shape)
    term = TruncatedElement.one(*a.shape)
    for k in range(1, _nilpotent_bound(a)):
        term = term * x
        if term.is_zero():
            break
        out = out + term.scale((-1.0) ** (k + 1) / k)
    return out


def invert(a: TruncatedElement) -> TruncatedElement:
    """Inverse of an element with invertible hbar^0 scalar part."""
    empty = tuple(() for _ in range(a.arity))
    cs = a.terms.get(empty)
    if cs is None or cs[0] == 0:
        raise NotInvertibleError("inverse requires invertible constant term")
    c0 = cs[0]
    y = a.scale(1.0 / c0) - 1.0
    out = TruncatedElement.one(*a.shape)
    term = TruncatedElement.one(*a.shape)
    for k in range(1, _nilpotent_bound(a)):
        term = term * y
        if term.is_zero():
            break
        out = out + term.scale((-1.0) ** k)
    return out.scale(1.0 / c0)


def conjugate(t: TruncatedElement, a: TruncatedElement) -> TruncatedElement:
    """t^{-1} · a · t."""
    return invert(t) * a * t


@dataclass(frozen=True)
class FiltrationProfile:
    """Subadditive degree budget o_k per hbar power, with o_1 >= 2."""

    orders: tuple

    def __post_init__(self):
        o = tuple(int(v) for v in self.orders)
        object.__setattr__(self, "orders", o)
        if any(v < 0 for v in o):
            raise AlgebraError("filtration orders must be nonnegative")
        if len(o) > 1 and o[1] < 2:
            raise AlgebraError("filtration requires o_1 >= 2")
        for k in range(len(o)):
            for l in range(len(o) - k):
                if o[k] + o[l] > o[k + l]:
                    raise AlgebraError(
                        f"filtration not subadditive at ({k},{l})")

    def __getitem__(self, k):
        return self.orders[k]


def total_degree(mono: Monomial) -> int:
    return sum(len(w) for w in mono)


def filtration_check(a: TruncatedElement, profile: FiltrationProfile) -> bool:
    """True iff every hbar^k coefficient has total PBW degree <= o_k."""
    orders = profile.orders
    for mono, cs in a.terms.items():
        d = total_degree(mono)
        for k, c in enumerate(cs):
            if c != 0:
                if k >= len(orders) or d > orders[k]:
                    return False
    return True


def filtration_violations(a, profile):
    bad = []
    for mono, cs in a.terms.items():
        d = total_degree(mono)
        for k, c in enumerate(cs):
            if c != 0 and (k >= len(profile.orders) or d > profile.orders[k]):
                bad.append((mono, k, c))
    return bad


def admissibility_check(a: TruncatedElement, slot=None) -> bool:
    """True iff the designated-slot degree is <= k at every hbar^k term."""
    s = a.arity - 1 if slot is None else slot
    for mono, cs in a.terms.items():
        d = len(mono[s])
        for k, c in enumerate(cs):
            if c != 0 and d > k:
                return False
    return True


def admissibility_violations(a: TruncatedElement, slot=None):
    s = a.arity - 1 if slot is None else slot
    bad = []
    for mono, cs in a.terms.items():
        d = len(mono[s])
        for k, c in enumerate(cs):
            if c != 0 and d > k:
                bad.append((mono, k, c))
    return bad


@lru_cache(maxsize=None)
def _word_matrix(n: int, word: Word):
    m = np.eye(n, dtype=complex)
    for g in word:
        i, j = divmod(g, n)
        e = np.zeros((n, n), dtype=complex)
        e[i, j] = 1.0
        m = m @ e
    return m


def evaluation_rep(a: TruncatedElement) -> np.ndarray:
    """Defining representation on (C^n)^{⊗arity}.

    Returns an array of shape (N+1, n^arity, n^arity): one matrix per hbar
    power.  Multiplicative: rep(ab) = rep(a) rep(b) order-by-order in hbar.
    """
    n, arity, N, _ = a.shape
    dim = n ** arity
    out = np.zeros((N + 1, dim, dim), dtype=complex)
    for mono, cs in a.terms.items():
        mat = _word_matrix(n, mono[0])
        for w in mono[1:]:
            mat = np.kron(mat, _word_matrix(n, w))
        for k, c in enumerate(cs):
            if c != 0:
                out[k] += c * mat
    return out


# -- serialization -----------------------------------------------------------


def to_json_dict(a: TruncatedElement) -> dict:
    """JSON form with 1-based generator labels and sorted monomials."""
    items = []
    for mono in sorted(a.terms):
        cs = a.terms[mono]
        items.append({
            "monomial": [[[g // a.n + 1, g % a.n + 1] for g in word] for word in mono],
            "coeffs": [[c.real, c.imag] for c in cs],
        })
    return {
        "n": a.n,
        "arity": a.arity,
        "hbar_order": a.hbar_order,
        "degree_cap": a.degree_cap,
        "terms": items,
    }


def from_json_dict(d: Mapping) -> TruncatedElement:
    n = int(d["n"])
    arity = int(d["arity"])
    N = int(d["hbar_order"])
    D = int(d["degree_cap"])
    terms = {}
    for item in d["terms"]:
        mono = tuple(
            tuple(gen_code(n, int(i) - 1, int(j) - 1) for i, j in word)
            for word in item["monomial"]
        )
        if len(mono) != arity or any(len(w) > D for w in mono):
            raise AlgebraError("serialized monomial violates the declared shape")
        if any(tuple(w) != tuple(sorted(w)) for w in mono):
            raise AlgebraError("serialized monomial is not normal-ordered")
        cs = tuple(complex(re, im) for re, im in item["coeffs"])
        if len(cs) != N + 1:
            raise AlgebraError("coefficient vector length mismatch")
        if any(c != 0 for c in cs):
            terms[mono] = cs
    return TruncatedElement(n, arity, N, D, terms)


def dumps(a: TruncatedElement, **kw) -> str:
    return json.dumps(to_json_dict(a), **kw)


def loads(s: str) -> TruncatedElement:
    return from_json_dict(json.loads(s))
