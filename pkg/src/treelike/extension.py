"""Universal extensions of a finite A-generated group and the
constructive separation certificate.

Fix an A-generated finite group G and let R be the kernel of the
evaluation F ->> G from the free group on A.  R is free of rank
r = |G|(|A|-1)+1, with a basis attached to any spanning tree of the
Cayley graph of G (one basis element per non-tree positive edge; see
the rewriting module).  For a finite simple group S, let R(S) be the
intersection of the kernels of all surjective homomorphisms R ->> S.
The quotient F/R(S) is the universal S-extension of G: the largest
A-generated extension of a direct power of S by G.

Concrete model for S = C_p.  Here R(C_p) = R^p [R, R], and F/R(C_p)
has a faithful arithmetic model: pairs (g, c) of a base element g of G
and a sparse cocycle c mapping Cayley-graph positive edges (vertex,
letter) to residues mod p, multiplied by (g1, c1)(g2, c2) =
(g1 g2, c1 + g1.c2) where the shift relabels (g1.c2)(g1 x, a) = c2(x, a).
A word w maps to the pair (base [w]_G, per-edge signed traversal counts
of its Cayley path mod p).  Faithfulness: an element with trivial image
projects to a closed path at 1, whose full edge-count vector is
determined linearly over Z by its counts on the non-tree edges of any
spanning tree (tree counts are forced by the flow conditions at
vertices); the non-tree counts are exactly the exponent sums of the
Nielsen basis in the rewritten word, so the cocycle vanishes mod p
precisely when the word lies in R^p [R, R].  Hence the model has order
|G| * p^r and realizes F/R(C_p).

Order of free generators.  The certificate needs the order o of a free
generator of the relatively free group on two generators in the class
of direct powers of S.  For S = C_p that group is C_p x C_p and o = p =
exponent(S).  In general o = exponent(S): the free object embeds in a
direct power S^K with the generator pair (a, b) ranging over a set of
coordinate pairs that includes, for every x in S, a coordinate where a
evaluates to x -- for abelian S because (x, y) pairs exhaust S^2, and
for non-abelian simple S because every nonidentity x extends to a
generating pair (x, y) of S, so the coordinate (x, y) appears in the
defining family of surjections.  A coordinate-wise power a^m is then
trivial iff x^m = 1 for all x in S, i.e. iff exponent(S) divides m.
The helper free_object_pair_check verifies the two-generator instances
of this identification by brute force.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product as iter_product
from typing import Dict, List, Optional, Sequence, Tuple

from .cayley import Edge, borders, path_span
from .constellations import Constellation, _span_components
from .groups import EnumerationBudgetError, FinGroup
from .rewriting import (basis_index, exponent_sums, nielsen_basis, rewrite,
                        spanning_tree_avoiding)
from .words import Word, concat, invert_word, reduce_word

S_EQUAL_BUDGET = 10**8


class CertificateError(RuntimeError):
    """A certificate step the theory guarantees failed; indicates a
    violated precondition or an implementation bug."""


@dataclass(frozen=True)
class ExtElement:
    """Element of the universal C_p-extension: base element id of G plus
    a sparse cocycle, stored as a sorted tuple of ((vertex, letter),
    nonzero residue) pairs."""

    base: int
    cocycle: tuple

    def cocycle_dict(self) -> Dict[Edge, int]:
        return dict(self.cocycle)

    def support(self) -> int:
        return len(self.cocycle)


def _pack(base: int, cocycle: Dict[Edge, int]) -> ExtElement:
    return ExtElement(base, tuple(sorted(
        (k, v) for k, v in cocycle.items() if v)))


class ExtContext:
    """Arithmetic for the universal C_p-extension of a fixed G."""

    def __init__(self, G: FinGroup, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise ValueError("p must be prime, got %r" % (p,))
        self.G = G
        self.p = p
        self.identity = ExtElement(0, ())

    def letter(self, a: int) -> ExtElement:
        """Image of base letter a: ([a]_G, one unit on the edge (1, a))."""
        return ExtElement(self.G.evaluate((a,)), (((0, a), 1),))

    def mul(self, x: ExtElement, y: ExtElement) -> ExtElement:
        G, p = self.G, self.p
        c = dict(x.cocycle)
        for (v, a), val in y.cocycle:
            key = (G.mul_ids(x.base, v), a)
            c[key] = (c.get(key, 0) + val) % p
        return _pack(G.mul_ids(x.base, y.base), c)

    def inv(self, x: ExtElement) -> ExtElement:
        G, p = self.G, self.p
        b = G.inv_id(x.base)
        c = {}
        for (v, a), val in x.cocycle:
            c[(G.mul_ids(b, v), a)] = -val % p
        return _pack(b, c)

    def evaluate(self, w: Sequence[int]) -> ExtElement:
        """Walk the Cayley graph of G from 1 reading w, adding +1/-1 mod
        p on each traversed positive edge.  Agrees with the product of
        letter images (tested); base is [w]_G."""
        G, p = self.G, self.p
        cur = 0
        c: Dict[Edge, int] = {}
        for x in w:
            if x > 0:
                e = (cur, x)
                cur = G.step(cur, x)
                c[e] = (c.get(e, 0) + 1) % p
            else:
                cur = G.step(cur, x)
                e = (cur, -x)
                c[e] = (c.get(e, 0) - 1) % p
        return _pack(cur, c)

    def fin_group(self, name: Optional[str] = None,
                  enum_budget: Optional[int] = None) -> FinGroup:
        """The extension as an A-generated FinGroup over ExtElements."""
        G = self.G
        gens = [self.letter(a) for a in range(1, G.n_letters + 1)]
        return FinGroup(G.alphabet, gens, self.identity, self.mul, self.inv,
                        name=name or "%s^%d" % (G.name, self.p),
                        enum_budget=enum_budget or G.enum_budget)


def ext_evaluate(G: FinGroup, p: int, w: Sequence[int]) -> ExtElement:
    """Image of w in the universal C_p-extension of G."""
    return ExtContext(G, p).evaluate(w)


def ext_order(G: FinGroup, n_letters: int, p: int) -> int:
    """Predicted order |G| * p^(|G|(|A|-1)+1) of the C_p-extension."""
    return G.order() * p ** (G.order() * (n_letters - 1) + 1)


def extension_group(G: FinGroup, p: int, name: Optional[str] = None,
                    enum_budget: Optional[int] = None) -> FinGroup:
    return ExtContext(G, p).fin_group(name, enum_budget)


# -- equality oracle for general simple S ------------------------------


@dataclass(frozen=True)
class SEqualResult:
    """Verdict of the S-extension equality oracle.

    status: 'equal' (exact scan exhausted), 'distinct' (witness
    assignment found, or images in G already differ), or
    'probably-equal' (witness search exhausted its samples).
    witness maps basis index -> S element id for the separating
    assignment, when one exists.
    """

    status: str
    witness: Optional[tuple] = None
    rank: int = 0
    samples_tried: int = 0


def _generates(S: FinGroup, ids: Sequence[int]) -> bool:
    """Whether the given element ids generate S."""
    n = S.order()
    seen = {0}
    frontier = [0]
    gens = [i for i in set(ids) if i != 0]
    if not gens:
        return n == 1
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = S.mul_ids(x, g)
            if y not in seen:
                seen.add(y)
                if len(seen) == n:
                    return True
                frontier.append(y)
    return len(seen) == n


def _letter_image_ids(S: FinGroup) -> List[int]:
    """Distinct nonidentity generator-image ids; they generate S."""
    out: List[int] = []
    for a in range(1, S.n_letters + 1):
        i = S.evaluate((a,))
        if i and i not in out:
            out.append(i)
    return out


def _materialize_witness(S: FinGroup, r: int, value_of: Dict[int, int],
                         fill: List[int]) -> Optional[tuple]:
    """Extend a partial assignment (basis index -> S id) to a full
    generating r-tuple, or None when no extension generates S.  Indices
    outside value_of never occur in the word, so any values work there;
    when enough of them are free the letter images go in and generation
    is automatic, otherwise all completions are searched."""
    spare = [i for i in range(r) if i not in value_of]
    full = [value_of.get(i, 0) for i in range(r)]
    if len(spare) >= len(fill):
        for slot, x in zip(spare, fill):
            full[slot] = x
        return tuple(full)
    for completion in iter_product(range(S.order()), repeat=len(spare)):
        for slot, x in zip(spare, completion):
            full[slot] = x
        if _generates(S, full):
            return tuple(full)
    return None


def _eval_assignment(S: FinGroup, factors: Sequence[Tuple[int, int]],
                     value_of: Dict[int, int]) -> int:
    acc = 0
    for i, s in factors:
        v = value_of[i]
        acc = S.mul_ids(acc, v if s > 0 else S.inv_id(v))
    return acc


def s_equal(G: FinGroup, S: FinGroup, u: Sequence[int], v: Sequence[int],
            mode: str = "exact", samples: int = 4000,
            budget: int = S_EQUAL_BUDGET,
            seed: Optional[int] = None) -> SEqualResult:
    """Equality of [u] and [v] in the universal S-extension of G.

    Immediately distinct when the images in G differ.  Otherwise
    u v^-1 lies in the kernel R and is rewritten over the Nielsen basis
    (rank r); the images are equal iff every assignment of the basis
    into S whose values generate S evaluates the rewritten word to the
    identity.

    exact mode scans assignments (budget-limited by |S|^r); only the
    basis elements occurring in the rewritten word need values, since
    when at least two further basis elements remain free any separating
    partial assignment extends to a generating one (finite simple
    groups are 2-generated).  witness mode samples assignments,
    alternating uniform draws with sparse pairs (two random indices get
    random values, the rest the identity) and can certify only
    distinctness.
    """
    w = reduce_word(concat(tuple(u), invert_word(tuple(v))))
    if G.evaluate(w) != 0:
        return SEqualResult("distinct")
    tree = spanning_tree_avoiding(G)
    basis = nielsen_basis(G, tree)
    r = len(basis)
    factors = rewrite(G, tree, w)
    if not factors:
        return SEqualResult("equal", rank=r)
    used = sorted({i for i, _ in factors})
    n = S.order()
    fill = _letter_image_ids(S)
    if mode == "exact":
        if n ** r > budget:
            raise EnumerationBudgetError(budget,
                                         "exact scan of %d^%d assignments"
                                         % (n, r))
        # values outside the used indices never change the evaluation,
        # so scanning S^used is complete as long as each nonzero hit is
        # checked for a generating extension
        for combo in iter_product(range(n), repeat=len(used)):
            value_of = dict(zip(used, combo))
            if _eval_assignment(S, factors, value_of) == 0:
                continue
            witness = _materialize_witness(S, r, value_of, fill)
            if witness is not None:
                return SEqualResult("distinct", witness=witness, rank=r)
        return SEqualResult("equal", rank=r)
    if mode != "witness":
        raise ValueError("mode must be 'exact' or 'witness'")
    rng = random.Random(seed)
    for k in range(samples):
        if k % 2 == 0 and len(used) >= 2:
            i, j = rng.sample(used, 2)
            value_of = {t: 0 for t in used}
            value_of[i] = rng.randrange(1, n)
            value_of[j] = rng.randrange(1, n)
        else:
            value_of = {t: rng.randrange(n) for t in used}
        if _eval_assignment(S, factors, value_of) == 0:
            continue
        witness = _materialize_witness(S, r, value_of, fill)
        if witness is not None:
            return SEqualResult("distinct", witness=witness, rank=r,
                                samples_tried=k + 1)
    return SEqualResult("probably-equal", rank=r, samples_tried=samples)


# -- free object order check -------------------------------------------


def free_object_pair_check(S: FinGroup, m: int, n: int) -> bool:
    """Whether a^m b^n is trivial in the free object on (a, b) in the
    class of direct powers of S: evaluates x^m y^n coordinatewise over
    all pairs (x, y) in S^2.  Equals (exponent(S) | m and
    exponent(S) | n)."""
    size = S.order()
    pow_m = [_pow_id(S, x, m) for x in range(size)]
    pow_n = [_pow_id(S, y, n) for y in range(size)]
    return all(S.mul_ids(pm, pn) == 0 for pm in pow_m for pn in pow_n)


def _pow_id(S: FinGroup, x: int, m: int) -> int:
    m %= S.order_of(x)
    acc = 0
    for _ in range(m):
        acc = S.mul_ids(acc, x)
    return acc


# -- dissolving certificate --------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Constructive proof object that the universal S-extension of G
    separates the word pair (u, v) of a constellation.

    e is a border edge of X at the intersection component Z of 1 whose
    signed traversal count by u is nonzero mod o; f likewise for T and
    v; o = exponent(S).  Soundness: e never lies in T and f never in X
    (an intersection edge touching Z would sit inside Z), so over a
    spanning tree avoiding both edges the rewriting of u v^-1 splits
    into a u-part free of f's basis element and a v^-1-part free of
    e's.  Mapping e's basis element to a, f's to b and every other one
    to the identity therefore sends u v^-1 to a^u_exp * b^-v_exp in the
    two-generator free object over the direct powers of S, which is
    nontrivial because o divides neither exponent
    (free_object_pair_check).
    """

    e: Edge
    f: Edge
    u_exp: int
    v_exp: int
    o: int
    z: frozenset
    d_edges: frozenset
    c_edges: frozenset
    dp_edges: frozenset
    cp_edges: frozenset
    u_border_sum: int
    v_border_sum: int
    tree_edges: frozenset


def _check_path_inside(G: FinGroup, X, w: Sequence[int], end: int,
                       name: str) -> Dict[Edge, int]:
    span, got_end, counts = path_span(G, 0, w)
    if not span.pos_edges <= X.pos_edges or not span.vertices <= X.vertices:
        raise ValueError("%s does not run inside its subgraph" % name)
    if got_end != end:
        raise ValueError("%s does not read 1 -> g" % name)
    return counts


def dissolving_certificate(G: FinGroup, c: Constellation, u: Word, v: Word,
                           S: FinGroup) -> Certificate:
    """Build the separation certificate for a constellation word pair.

    Computes Z (intersection component of 1), the borders (D, C) of X
    and (D', C') of T at Z, checks both flow identities (u crosses the
    border of Z one time more outward than inward, and so does v), picks
    the smallest border edges with traversal count nonzero mod
    o = exponent(S), verifies the two border families are disjoint, and
    cross-checks the exponent sums against the rewriting module over a
    spanning tree avoiding both edges.  Raises CertificateError if a
    step the theory guarantees fails.
    """
    if not G.separated():
        raise ValueError("group does not satisfy the separated generation "
                         "property")
    u_counts = _check_path_inside(G, c.X, u, c.g, "u")
    v_counts = _check_path_inside(G, c.T, v, c.g, "v")
    inter_v = c.X.vertices & c.T.vertices
    roots = _span_components(inter_v, c.X.pos_edges & c.T.pos_edges, G)
    z = frozenset(x for x in inter_v if roots[x] == roots[0])
    d_edges, c_edges = borders(c.X, z)
    dp_edges, cp_edges = borders(c.T, z)
    u_sum = (sum(u_counts.get(e, 0) for e in d_edges)
             - sum(u_counts.get(e, 0) for e in c_edges))
    v_sum = (sum(v_counts.get(e, 0) for e in dp_edges)
             - sum(v_counts.get(e, 0) for e in cp_edges))
    if u_sum != 1 or v_sum != 1:
        raise CertificateError("border flow identity failed: got %d and %d"
                               % (u_sum, v_sum))
    if (d_edges | c_edges) & (dp_edges | cp_edges):
        raise CertificateError("border families are not disjoint; the "
                               "intersection component of 1 leaked")
    o = S.exponent()
    if o < 2:
        raise ValueError("S must be a nontrivial group")
    e = min((x for x in d_edges | c_edges if u_counts.get(x, 0) % o),
            default=None)
    f = min((x for x in dp_edges | cp_edges if v_counts.get(x, 0) % o),
            default=None)
    if e is None or f is None:
        raise CertificateError("no border edge with nonzero traversal mod %d"
                               % o)
    if f in u_counts or e in v_counts:
        raise CertificateError("chosen border edge traversed by the other "
                               "path; the borders leaked across X and T")
    tree = spanning_tree_avoiding(G, e, f)
    sums = exponent_sums(rewrite(G, tree, reduce_word(
        concat(tuple(u), invert_word(tuple(v))))))
    index = basis_index(nielsen_basis(G, tree))
    if sums.get(index[e], 0) != u_counts.get(e, 0):
        raise CertificateError("rewriting disagrees with traversal count "
                               "at e")
    if sums.get(index[f], 0) != -v_counts.get(f, 0):
        raise CertificateError("rewriting disagrees with traversal count "
                               "at f")
    return Certificate(e=e, f=f,
                       u_exp=u_counts[e] % o, v_exp=v_counts[f] % o, o=o,
                       z=z, d_edges=d_edges, c_edges=c_edges,
                       dp_edges=dp_edges, cp_edges=cp_edges,
                       u_border_sum=u_sum, v_border_sum=v_sum,
                       tree_edges=tree.tree_edges)


def certificate_to_json(cert: Certificate) -> dict:
    return {
        "schema": 1,
        "e": list(cert.e),
        "f": list(cert.f),
        "u_exp": cert.u_exp,
        "v_exp": cert.v_exp,
        "o": cert.o,
        "z": sorted(cert.z),
        "d_edges": sorted(list(x) for x in cert.d_edges),
        "c_edges": sorted(list(x) for x in cert.c_edges),
        "dp_edges": sorted(list(x) for x in cert.dp_edges),
        "cp_edges": sorted(list(x) for x in cert.cp_edges),
        "u_border_sum": cert.u_border_sum,
        "v_border_sum": cert.v_border_sum,
        "tree_edges": sorted(list(x) for x in cert.tree_edges),
    }
