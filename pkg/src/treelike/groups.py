"""Finite A-generated groups: evaluation, BFS enumeration with witness
words, canonical morphisms, exponent, subdirect products, and builtins.

A FinGroup is a group generated by one element per alphabet letter.  The
element domain is opaque: elements only need to be hashable and to come
with multiplication/inversion callables.  Permutation groups (tuples of
images, acting on the right) cover all builtins; extension groups plug in
their own element arithmetic.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

from .words import Word, reduce_word

DEFAULT_ENUM_BUDGET = 10**6


class EnumerationBudgetError(RuntimeError):
    """Raised when a closure computation would exceed its element budget."""

    def __init__(self, budget: int, context: str = "enumeration"):
        super().__init__("%s exceeds budget of %d elements" % (context, budget))
        self.budget = budget


def perm_identity(n: int) -> tuple:
    return tuple(range(n))


def perm_mul(p: tuple, q: tuple) -> tuple:
    """Composite permutation: apply p first, then q."""
    return tuple(q[i] for i in p)


def perm_inv(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


class FinGroup:
    """A-generated finite group with a lazily built element table.

    Enumeration is a BFS from the identity over generator and inverse
    generator steps; element ids are BFS discovery order (identity = 0)
    and each element stores a shortest witness word.
    """

    def __init__(self, alphabet: Sequence[str], gens: Sequence, identity,
                 mul: Callable, inv: Callable, name: str = "G",
                 degree: Optional[int] = None,
                 enum_budget: int = DEFAULT_ENUM_BUDGET):
        if len(set(alphabet)) != len(alphabet):
            raise ValueError("alphabet names must be distinct")
        if len(gens) != len(alphabet):
            raise ValueError("need one generator per letter")
        self.alphabet = tuple(alphabet)
        self.gens = tuple(gens)
        self.identity = identity
        self.mul = mul
        self.inv = inv
        self.name = name
        self.degree = degree
        self.enum_budget = enum_budget
        self._elems: Optional[list] = None
        self._index: Optional[dict] = None
        self._witness: Optional[list] = None
        self._steps: Optional[list] = None      # per letter: list of successor ids
        self._steps_inv: Optional[list] = None
        self._exponent: Optional[int] = None

    @classmethod
    def from_perms(cls, alphabet: Sequence[str], perms: Sequence[tuple],
                   name: str = "G", enum_budget: int = DEFAULT_ENUM_BUDGET
                   ) -> "FinGroup":
        perms = [tuple(p) for p in perms]
        if not perms:
            raise ValueError("need at least one generator")
        n = len(perms[0])
        for p in perms:
            if sorted(p) != list(range(n)):
                raise ValueError("generator %r is not a permutation of 0..%d" % (p, n - 1))
        return cls(alphabet, perms, perm_identity(n), perm_mul, perm_inv,
                   name=name, degree=n, enum_budget=enum_budget)

    def __repr__(self):
        return "FinGroup(%s, |A|=%d)" % (self.name, len(self.alphabet))

    @property
    def n_letters(self) -> int:
        return len(self.alphabet)

    # -- element table -------------------------------------------------

    def _enumerate(self) -> None:
        if self._elems is not None:
            return
        gens = list(self.gens)
        gens_inv = [self.inv(g) for g in gens]
        elems = [self.identity]
        index = {self.identity: 0}
        witness: list[Word] = [()]
        steps = [[] for _ in gens]
        steps_inv = [[] for _ in gens]
        i = 0
        while i < len(elems):
            x = elems[i]
            for a in range(len(gens)):
                for table, g, letter in ((steps[a], gens[a], a + 1),
                                         (steps_inv[a], gens_inv[a], -(a + 1))):
                    y = self.mul(x, g)
                    j = index.get(y)
                    if j is None:
                        j = len(elems)
                        if j >= self.enum_budget:
                            raise EnumerationBudgetError(
                                self.enum_budget, "enumeration of %s" % self.name)
                        elems.append(y)
                        index[y] = j
                        witness.append(witness[i] + (letter,))
                    table.append(j)
            i += 1
        self._elems, self._index, self._witness = elems, index, witness
        self._steps, self._steps_inv = steps, steps_inv

    def order(self) -> int:
        self._enumerate()
        return len(self._elems)

    def element(self, i: int):
        self._enumerate()
        return self._elems[i]

    def id_of(self, elem) -> int:
        self._enumerate()
        return self._index[elem]

    def witness(self, i: int) -> Word:
        """A shortest word evaluating to element i."""
        self._enumerate()
        return self._witness[i]

    def step(self, i: int, letter: int) -> int:
        """Cayley neighbor: id of element(i) * letter image."""
        self._enumerate()
        if letter > 0:
            return self._steps[letter - 1][i]
        return self._steps_inv[-letter - 1][i]

    def evaluate(self, w: Sequence[int]) -> int:
        """Element id of [w]_G."""
        self._enumerate()
        i = 0
        for x in w:
            if not x or abs(x) > len(self.gens):
                raise ValueError("letter %r outside alphabet of size %d"
                                 % (x, len(self.gens)))
            i = self.step(i, x)
        return i

    def element_of(self, w: Sequence[int]):
        """Raw element of [w]_G, without enumerating the group."""
        x = self.identity
        for s in w:
            if not s or abs(s) > len(self.gens):
                raise ValueError("letter %r outside alphabet" % (s,))
            g = self.gens[abs(s) - 1]
            x = self.mul(x, g if s > 0 else self.inv(g))
        return x

    def mul_ids(self, i: int, j: int) -> int:
        self._enumerate()
        return self._index[self.mul(self._elems[i], self._elems[j])]

    def inv_id(self, i: int) -> int:
        self._enumerate()
        return self._index[self.inv(self._elems[i])]

    def order_of(self, i: int) -> int:
        n, j = 1, i
        while j != 0:
            j = self.mul_ids(j, i)
            n += 1
        return n

    def exponent(self) -> int:
        """lcm of element orders; equals the order of a free generator of
        the 2-generated free object in the formation generated by self."""
        if self._exponent is None:
            self._enumerate()
            self._exponent = math.lcm(*(self.order_of(i)
                                        for i in range(len(self._elems))))
        return self._exponent

    def separated(self) -> bool:
        """Whether distinct letters have distinct, nonidentity images and
        |A| >= 2 (the standing hypothesis of the border construction)."""
        if len(self.gens) < 2:
            return False
        if len(set(self.gens)) != len(self.gens):
            return False
        return all(g != self.identity for g in self.gens)

    # -- morphisms -----------------------------------------------------

    def canonical_morphism_to(self, other: "FinGroup") -> Optional[list]:
        """Table of the morphism extending letter |-> letter, or None.

        phi(h) := [witness(h)]_other; phi is a well-defined morphism iff
        it commutes with every generator step, which is checked over the
        whole table.
        """
        if self.alphabet != other.alphabet:
            raise ValueError("alphabets differ")
        self._enumerate()
        phi = [other.evaluate(self._witness[i]) for i in range(len(self._elems))]
        for i in range(len(self._elems)):
            for a in range(1, len(self.gens) + 1):
                if phi[self.step(i, a)] != other.step(phi[i], a):
                    return None
        return phi

    def to_json(self) -> dict:
        if self.degree is None:
            raise ValueError("only permutation groups serialize to JSON")
        return {"degree": self.degree,
                "gens": {name: list(self.gens[i])
                         for i, name in enumerate(self.alphabet)}}


def canonical_morphism(H: FinGroup, G: FinGroup) -> Optional[list]:
    """Morphism table H ->> G extending letter |-> letter, or None."""
    return H.canonical_morphism_to(G)


def evaluate(G: FinGroup, w: Sequence[int]) -> int:
    return G.evaluate(reduce_word(w))


def subdirect(groups: Sequence[FinGroup], name: Optional[str] = None) -> FinGroup:
    """A-generated subgroup of the direct product generated by the
    diagonal generator tuples."""
    if not groups:
        raise ValueError("need at least one factor")
    alphabet = groups[0].alphabet
    for g in groups[1:]:
        if g.alphabet != alphabet:
            raise ValueError("alphabets differ")
    gens = [tuple(g.gens[a] for g in groups) for a in range(len(alphabet))]
    identity = tuple(g.identity for g in groups)

    def mul(x, y):
        return tuple(g.mul(xi, yi) for g, xi, yi in zip(groups, x, y))

    def inv(x):
        return tuple(g.inv(xi) for g, xi in zip(groups, x))

    return FinGroup(alphabet, gens, identity, mul, inv,
                    name=name or "subdirect(%s)" % ",".join(g.name for g in groups),
                    enum_budget=min(g.enum_budget for g in groups))


def group_from_json(data: dict, name: str = "G") -> FinGroup:
    """Parse {degree, gens:{letter: [perm images], ...}}; letters are
    sorted by name to fix the alphabet order."""
    if not isinstance(data, dict):
        raise ValueError("group JSON: expected an object")
    if "degree" not in data or "gens" not in data:
        raise ValueError("group JSON: need fields 'degree' and 'gens'")
    degree = data["degree"]
    if not isinstance(degree, int) or degree < 1:
        raise ValueError("group JSON field 'degree': positive integer required")
    gens = data["gens"]
    if not isinstance(gens, dict) or not gens:
        raise ValueError("group JSON field 'gens': nonempty object required")
    alphabet = sorted(gens)
    perms = []
    for letter in alphabet:
        p = gens[letter]
        if (not isinstance(p, list) or len(p) != degree
                or sorted(p) != list(range(degree))):
            raise ValueError("group JSON field 'gens.%s': not a permutation of 0..%d"
                             % (letter, degree - 1))
        perms.append(tuple(p))
    return FinGroup.from_perms(alphabet, perms, name=name)


# -- builtins ----------------------------------------------------------
#
# Generator assignments (all on the alphabet a, b unless noted):
#   C2     a, b |-> the same transposition (not separated)
#   C3     a |-> g, b |-> g^2 for g a 3-cycle
#   C5     a |-> g, b |-> g^2 for g a 5-cycle
#   C2xC2  a |-> (0 1), b |-> (2 3)
#   S3     a |-> (0 1), b |-> (0 1 2)
#   D4     a, b |-> two adjacent reflections of the square
#   A5     a |-> (0 1 2 3 4), b |-> (0 1 2)


def _cycle(n: int) -> tuple:
    return tuple(list(range(1, n)) + [0])


def _builtin_factories() -> dict:
    def pg(name, perms):
        return lambda: FinGroup.from_perms(("a", "b"), perms, name=name)

    table = {
        "C2": pg("C2", [(1, 0), (1, 0)]),
        "C3": pg("C3", [_cycle(3), perm_mul(_cycle(3), _cycle(3))]),
        "C5": pg("C5", [_cycle(5), perm_mul(_cycle(5), _cycle(5))]),
        "C2xC2": pg("C2xC2", [(1, 0, 2, 3), (0, 1, 3, 2)]),
        "S3": pg("S3", [(1, 0, 2), (1, 2, 0)]),
        "D4": pg("D4", [(1, 0, 3, 2), (0, 3, 2, 1)]),
        "A5": pg("A5", [_cycle(5), (1, 2, 0, 3, 4)]),
    }
    return table


BUILTIN_NAMES = tuple(sorted(_builtin_factories()))


def builtin(name: str) -> FinGroup:
    """A fresh instance of a named builtin group."""
    try:
        factory = _builtin_factories()[name]
    except KeyError:
        raise ValueError("unknown builtin group %r (have: %s)"
                         % (name, ", ".join(BUILTIN_NAMES))) from None
    return factory()
