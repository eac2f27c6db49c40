"""Iterated universal C_p-extensions with element-local arithmetic.

A tower starts from a separated finite A-generated base group G_0 and
sets G_n = the universal C_{p_n}-extension of G_{n-1}.  Orders grow as
|G_n| * p^(|G_n|(|A|-1)+1), so levels beyond 1 cannot be enumerated;
instead elements are represented recursively: a level-n element is a
level-(n-1) element together with a sparse cocycle mapping edges of the
level-(n-1) Cayley graph (element, letter) to residues mod p_n.
Multiplication shifts the right cocycle by the left base element, one
level down, and never touches elements outside the operands' supports.
Structural equality of the canonical encoding (sorted sparse keys, no
zero entries) is group equality, level by level, by the same
faithfulness argument as for the single-step model.

The campaign runner gathers finite-level evidence for tree-likeness of
the inverse limit: at each enumerable level it checks that the next
level dissolves all (or sampled) constellations; when the next level is
too large to enumerate, it falls back to per-word-pair border
certificates.  The separation experiment follows a reduced word that
lies outside a product of finitely generated subgroups and reports the
first level whose finite quotient separates it from the product.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .constellations import dissolves_all, sample_constellations
from .extension import CertificateError, dissolving_certificate
from .groups import (DEFAULT_ENUM_BUDGET, EnumerationBudgetError, FinGroup,
                     builtin, group_from_json)
from .rational import member_product
from .rewriting import graph_subgroup_basis
from .stallings import LabeledGraph
from .words import Word, is_reduced, word_str

MAX_LEVEL = 3


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


@dataclass(frozen=True)
class TowerSpec:
    """Configuration of a tower: separated base group, one prime per
    extension level, and budgets."""

    base: FinGroup
    primes: tuple
    max_level: int = MAX_LEVEL
    enum_budget: int = DEFAULT_ENUM_BUDGET
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(self.primes))
        if not self.primes:
            raise ValueError("tower needs at least one prime")
        for p in self.primes:
            if not _is_prime(p):
                raise ValueError("tower level primes must be prime, got %r"
                                 % (p,))
        if not self.base.separated():
            raise ValueError("base group must have distinct nonidentity "
                             "letter images (>= 2 letters)")


@dataclass(frozen=True)
class TowerElement:
    """Element of G_level: an id at level 0, else the projection one
    level down plus a sparse cocycle over level-(level-1) Cayley edges,
    stored as a tuple sorted by encoded key."""

    level: int
    value: int = 0
    prev: Optional["TowerElement"] = None
    cocycle: tuple = ()

    def support(self) -> int:
        return len(self.cocycle)


@lru_cache(maxsize=None)
def tower_encode(e: TowerElement) -> bytes:
    """Canonical length-prefixed serialization; injective per level, so
    it doubles as a sort key and wire format."""
    if e.level == 0:
        return b"0,%d" % e.value
    prev = tower_encode(e.prev)
    parts = [b"%d,%d:%s" % (e.level, len(prev), prev)]
    for (k, a), r in e.cocycle:
        ke = tower_encode(k)
        parts.append(b"%d:%s,%d,%d" % (len(ke), ke, a, r))
    return b";".join(parts)


def tower_equal(e1: TowerElement, e2: TowerElement) -> bool:
    """Structural equality; exact group equality by faithfulness."""
    if e1.level != e2.level:
        raise ValueError("elements live at different levels")
    return e1 == e2


def project(e: TowerElement) -> TowerElement:
    """Canonical projection one level down."""
    if e.level == 0:
        raise ValueError("level-0 elements have no projection")
    return e.prev


class Tower:
    """Arithmetic context over a TowerSpec, with per-level caches."""

    def __init__(self, spec: TowerSpec):
        self.spec = spec
        self._letters: Dict[Tuple[int, int], TowerElement] = {}
        self._identities: Dict[int, TowerElement] = {}
        self._groups: Dict[int, FinGroup] = {}

    def _check_level(self, n: int) -> None:
        if n < 0:
            raise ValueError("negative level")
        if n > self.spec.max_level:
            raise ValueError("level %d exceeds the configured maximum %d"
                             % (n, self.spec.max_level))
        if n > len(self.spec.primes):
            raise ValueError("level %d has no prime configured" % n)

    def prime(self, n: int) -> int:
        """Prime of the step G_{n-1} -> G_n."""
        return self.spec.primes[n - 1]

    def identity(self, n: int) -> TowerElement:
        got = self._identities.get(n)
        if got is None:
            if n == 0:
                got = TowerElement(0, 0)
            else:
                got = TowerElement(n, prev=self.identity(n - 1))
            self._identities[n] = got
        return got

    def letter(self, n: int, a: int) -> TowerElement:
        got = self._letters.get((n, a))
        if got is None:
            if n == 0:
                got = TowerElement(0, self.spec.base.evaluate((a,)))
            else:
                got = TowerElement(n, prev=self.letter(n - 1, a),
                                   cocycle=(((self.identity(n - 1), a), 1),))
            self._letters[(n, a)] = got
        return got

    def _pack(self, n: int, prev: TowerElement,
              c: Dict[tuple, int]) -> TowerElement:
        items = [(k, v) for k, v in c.items() if v]
        items.sort(key=lambda kv: (tower_encode(kv[0][0]), kv[0][1]))
        return TowerElement(n, prev=prev, cocycle=tuple(items))

    def mul(self, x: TowerElement, y: TowerElement) -> TowerElement:
        if x.level != y.level:
            raise ValueError("elements live at different levels")
        if x.level == 0:
            return TowerElement(0, self.spec.base.mul_ids(x.value, y.value))
        p = self.prime(x.level)
        c = dict(x.cocycle)
        for (k, a), r in y.cocycle:
            key = (self.mul(x.prev, k), a)
            c[key] = (c.get(key, 0) + r) % p
        return self._pack(x.level, self.mul(x.prev, y.prev), c)

    def inv(self, x: TowerElement) -> TowerElement:
        if x.level == 0:
            return TowerElement(0, self.spec.base.inv_id(x.value))
        p = self.prime(x.level)
        b = self.inv(x.prev)
        c = {}
        for (k, a), r in x.cocycle:
            c[(self.mul(b, k), a)] = -r % p
        return self._pack(x.level, b, c)

    def evaluate(self, n: int, w: Sequence[int]) -> TowerElement:
        """Image of w in G_n: walk the level-(n-1) Cayley graph from the
        identity, adding +1/-1 mod p_n on each traversed positive edge
        keyed by the current lower-level position."""
        self._check_level(n)
        if n == 0:
            return TowerElement(0, self.spec.base.evaluate(w))
        p = self.prime(n)
        pos = self.identity(n - 1)
        c: Dict[tuple, int] = {}
        for x in w:
            a = abs(x)
            if not 1 <= a <= self.spec.base.n_letters:
                raise ValueError("letter %r outside alphabet" % (x,))
            if x > 0:
                key = (pos, a)
                c[key] = (c.get(key, 0) + 1) % p
                pos = self.mul(pos, self.letter(n - 1, a))
            else:
                pos = self.mul(pos, self.inv(self.letter(n - 1, a)))
                key = (pos, a)
                c[key] = (c.get(key, 0) - 1) % p
        return self._pack(n, pos, c)

    def group(self, n: int) -> FinGroup:
        """G_n as an enumerable FinGroup (level 0 is the base itself);
        enumeration overflow propagates for large levels."""
        self._check_level(n)
        got = self._groups.get(n)
        if got is None:
            base = self.spec.base
            if n == 0:
                got = base
            else:
                gens = [self.letter(n, a)
                        for a in range(1, base.n_letters + 1)]
                got = FinGroup(base.alphabet, gens, self.identity(n),
                               self.mul, self.inv,
                               name="%s^%s" % (base.name, "^".join(
                                   str(p) for p in self.spec.primes[:n])),
                               enum_budget=self.spec.enum_budget)
            self._groups[n] = got
        return got


def tower_evaluate(spec: TowerSpec, n: int, w: Sequence[int]) -> TowerElement:
    return Tower(spec).evaluate(n, w)


def tower_spec_from_json(data: dict) -> TowerSpec:
    """Parse {base, primes, max_level?, enum_budget?, seed?}; base is a
    builtin group name or an inline group JSON object."""
    if not isinstance(data, dict):
        raise ValueError("tower config: expected an object")
    if "base" not in data or "primes" not in data:
        raise ValueError("tower config: need fields 'base' and 'primes'")
    raw = data["base"]
    if isinstance(raw, str):
        base = builtin(raw)
    elif isinstance(raw, dict):
        base = group_from_json(raw, name=str(data.get("name", "G")))
    else:
        raise ValueError("tower config field 'base': name or group object "
                         "required")
    primes = data["primes"]
    if not isinstance(primes, list) or not primes:
        raise ValueError("tower config field 'primes': nonempty list required")
    return TowerSpec(base, tuple(primes),
                     max_level=data.get("max_level", MAX_LEVEL),
                     enum_budget=data.get("enum_budget", DEFAULT_ENUM_BUDGET),
                     seed=data.get("seed"))


def _cyclic_group(p: int) -> FinGroup:
    cycle = tuple(list(range(1, p)) + [0])
    return FinGroup.from_perms(("a",), [cycle], name="C%d" % p)


def treelike_campaign(spec: TowerSpec, levels: int = 1,
                      mode: str = "exhaustive", step: str = "extension",
                      edge_budget: int = 16, samples: int = 200,
                      max_len: int = 8,
                      detail_limit: Optional[int] = 50) -> dict:
    """Evidence report for tree-likeness of the tower limit.

    For each level n < levels, checks that the next tower level (or G_n
    itself under step='identity', the failing baseline) dissolves the
    constellations of G_n.  When the next level cannot be enumerated,
    border certificates for sampled constellation word pairs stand in:
    each certificate alone proves its pair separated in G_{n+1}.
    """
    if step not in ("extension", "identity"):
        raise ValueError("step must be 'extension' or 'identity'")
    if step == "extension" and levels > len(spec.primes):
        raise ValueError("campaign over %d levels needs one prime per level"
                         % levels)
    tower = Tower(spec)
    rng = random.Random(spec.seed)
    report = {
        "schema": 1,
        "base": spec.base.name,
        "primes": list(spec.primes),
        "mode": mode,
        "step": step,
        "seed": spec.seed,
        "levels": [],
    }
    all_ok = True
    for n in range(levels):
        try:
            G = tower.group(n)
            order = G.order()
        except EnumerationBudgetError:
            report["levels"].append({"level": n, "overflow": "level"})
            all_ok = False
            break
        entry = {"level": n, "order": order}
        H = None
        if step == "identity":
            H = G
        else:
            try:
                H = tower.group(n + 1)
                H.order()
            except (EnumerationBudgetError, ValueError):
                H = None
        if H is not None:
            sub = dissolves_all(H, G, mode=mode, edge_budget=edge_budget,
                                samples=samples, max_len=max_len,
                                seed=rng.randrange(2 ** 30),
                                detail_limit=detail_limit)
            entry["dissolves"] = sub
            all_ok &= sub["all_dissolved"]
        else:
            # next level too large: certify sampled word pairs directly
            S = _cyclic_group(tower.prime(n + 1))
            certs = {"total": 0, "succeeded": 0}
            for c, u, v in sample_constellations(G, rng, samples, max_len):
                certs["total"] += 1
                try:
                    dissolving_certificate(G, c, u, v, S)
                    certs["succeeded"] += 1
                except CertificateError:
                    pass
            entry["overflow"] = "next level not enumerable"
            entry["certificates"] = certs
            all_ok &= certs["total"] == certs["succeeded"]
        report["levels"].append(entry)
    report["all_dissolved"] = all_ok
    return report


def rz_experiment(spec: TowerSpec, cores: Sequence[LabeledGraph], w: Word,
                  max_level: Optional[int] = None) -> dict:
    """Separation experiment for w against the product H_1 ... H_k.

    Ground truth comes from the saturation oracle.  When w is outside
    the product, the experiment walks up the tower looking for the first
    enumerable level whose quotient separates [w] from the product of
    the subgroup images (computed by closure and explicit product-set
    enumeration) and reports it, or reports the level where enumeration
    overflowed."""
    w = tuple(w)
    if not is_reduced(w):
        raise ValueError("word must be reduced")
    names = spec.base.alphabet
    truth, factors = member_product(cores, w)
    report = {
        "schema": 1,
        "base": spec.base.name,
        "primes": list(spec.primes),
        "word": word_str(w, names),
        "member": truth,
        "separated_at": None,
        "levels": [],
        "inconclusive": False,
    }
    if truth:
        report["factorization"] = [word_str(h, names) for h in factors]
        return report
    gens = [graph_subgroup_basis(g) for g in cores]
    tower = Tower(spec)
    top = min(spec.max_level, len(spec.primes))
    if max_level is not None:
        top = min(top, max_level)
    for n in range(top + 1):
        try:
            G = tower.group(n)
            order = G.order()
        except EnumerationBudgetError:
            report["levels"].append({"level": n, "overflow": True})
            break
        sub_ids = []
        for gen_words in gens:
            ids = {0}
            frontier = [0]
            images = [G.evaluate(g) for g in gen_words]
            while frontier:
                x = frontier.pop()
                for i in images:
                    for y in (G.mul_ids(x, i), G.mul_ids(x, G.inv_id(i))):
                        if y not in ids:
                            ids.add(y)
                            frontier.append(y)
            sub_ids.append(ids)
        product = {0}
        for ids in sub_ids:
            product = {G.mul_ids(x, h) for x in product for h in ids}
        wid = G.evaluate(w)
        contains = wid in product
        report["levels"].append({
            "level": n,
            "order": order,
            "subgroup_orders": [len(s) for s in sub_ids],
            "product_size": len(product),
            "contains": contains,
        })
        if not contains:
            report["separated_at"] = n
            break
    report["inconclusive"] = report["separated_at"] is None
    return report
