"""Membership in products of finitely generated subgroups of a free
group, decided by automata saturation over reduced words.

The product automaton chains the Stallings graphs of the factors: each
folded core graph is an automaton reading both directions of its edges,
the basepoint of factor i is linked by a separator epsilon-edge to the
basepoint of factor i+1, the initial state is the first basepoint and
the final state the last.  Saturation closes the automaton under free
cancellation: whenever q reads x to r, an epsilon-path leads from r to
r', and r' reads x^-1 to s, a new epsilon-edge q -> s is recorded.  At
the fixpoint, a reduced word lies in the product H_1 ... H_k iff it is
accepted with epsilon-moves allowed.

Every epsilon-edge carries its derivation (the letter x and the
epsilon-path it shortcuts, all strictly older), so an accepting run
expands into an actual letter path through the automaton whose label
freely reduces to the input; cutting that path at the separators yields
a factorization h_1, ..., h_k with red(h_1 ... h_k) = w and each h_i a
closed walk at the basepoint of its factor.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Set, Tuple

from .stallings import LabeledGraph, member, transition_maps
from .words import Word, concat, is_reduced, reduce_word


class ProductAutomaton:
    """Automaton over the concatenation of factor core graphs."""

    def __init__(self, cores: Sequence[LabeledGraph]):
        if not cores:
            raise ValueError("need at least one factor")
        for i, g in enumerate(cores):
            if g.basepoint is None:
                raise ValueError("factor %d has no basepoint" % i)
        self.cores = list(cores)
        self.trans: Dict[Tuple[int, int], int] = {}
        self.factor_of: List[int] = []
        self.base_state: List[int] = []
        n = 0
        for i, g in enumerate(cores):
            order = {v: n + j for j, v in enumerate(sorted(g.vertices, key=repr))}
            out, _ = transition_maps(g)
            for (v, a), wdst in out.items():
                self.trans[(order[v], a)] = order[wdst]
                self.trans[(order[wdst], -a)] = order[v]
            self.factor_of.extend([i] * len(g.vertices))
            self.base_state.append(order[g.basepoint])
            n += len(g.vertices)
        self.n_states = n
        self.initial = self.base_state[0]
        self.final = self.base_state[-1]
        # epsilon edges: target sets per source, plus derivations
        self.eps: Dict[int, Set[int]] = {}
        self.deriv: Dict[Tuple[int, int], tuple] = {}
        for i in range(len(cores) - 1):
            self._add_eps(self.base_state[i], self.base_state[i + 1],
                          ("sep", i))
        self._saturated = False

    def _add_eps(self, q: int, s: int, derivation: tuple) -> bool:
        if s in self.eps.get(q, ()):
            return False
        self.eps.setdefault(q, set()).add(s)
        self.deriv[(q, s)] = derivation
        return True

    def _eps_paths_from(self, r: int, snapshot: Dict[int, frozenset]
                        ) -> Dict[int, List[Tuple[int, int]]]:
        """Epsilon-paths (as edge lists) from r using snapshot edges."""
        paths = {r: []}
        queue = [r]
        head = 0
        while head < len(queue):
            q = queue[head]
            head += 1
            for s in snapshot.get(q, ()):
                if s not in paths:
                    paths[s] = paths[q] + [(q, s)]
                    queue.append(s)
        return paths

    def saturate(self) -> "ProductAutomaton":
        """Close under free cancellation.  Each round only consumes
        epsilon-edges created in earlier rounds, so every derivation
        refers to strictly older edges and witness expansion is
        well-founded.  At most |states|^2 edges exist, so this stops."""
        if self._saturated:
            return self
        letters = sorted({x for (_, x) in self.trans})
        while True:
            snapshot = {q: frozenset(s) for q, s in self.eps.items()}
            added = False
            for (q, x), r in list(self.trans.items()):
                paths = self._eps_paths_from(r, snapshot)
                for r2, path in paths.items():
                    s = self.trans.get((r2, -x))
                    if s is not None and s not in self.eps.get(q, ()):
                        added |= self._add_eps(q, s, ("cancel", x, tuple(path)))
            if not added:
                break
        self._saturated = True
        return self

    def _closure(self, states: Set[int]) -> Set[int]:
        out = set(states)
        stack = list(states)
        while stack:
            q = stack.pop()
            for s in self.eps.get(q, ()):
                if s not in out:
                    out.add(s)
                    stack.append(s)
        return out

    def accepts(self, w: Sequence[int]) -> bool:
        self.saturate()
        states = self._closure({self.initial})
        for x in w:
            states = self._closure({self.trans[(q, x)] for q in states
                                    if (q, x) in self.trans})
            if not states:
                return False
        return self.final in states

    def _run(self, w: Sequence[int]) -> Optional[List[tuple]]:
        """Accepting run as a move list: ('eps', q, s) and ('letter', x)
        entries; BFS over (letters consumed, state)."""
        self.saturate()
        start = (0, self.initial)
        parent: Dict[tuple, Optional[tuple]] = {start: None}
        queue = [start]
        head = 0
        goal = (len(w), self.final)
        while head < len(queue):
            node = queue[head]
            head += 1
            if node == goal:
                break
            k, q = node
            moves = []
            if k < len(w) and (q, w[k]) in self.trans:
                moves.append(((k + 1, self.trans[(q, w[k])]),
                              ("letter", w[k])))
            for s in self.eps.get(q, ()):
                moves.append(((k, s), ("eps", q, s)))
            for nxt, move in moves:
                if nxt not in parent:
                    parent[nxt] = (node, move)
                    queue.append(nxt)
        if goal not in parent:
            return None
        out = []
        node = goal
        while parent[node] is not None:
            node, move = parent[node]
            out.append(move)
        return list(reversed(out))

    def _expand_eps(self, q: int, s: int, sink: List[object]) -> None:
        """Append the letter-level events of an epsilon-edge: letters and
        'sep' markers.  Derivations reference only strictly older edges,
        so the explicit stack always shrinks toward separators."""
        stack: List[tuple] = [("edge", q, s)]
        while stack:
            item = stack.pop()
            if item[0] == "emit":
                sink.append(item[1])
                continue
            d = self.deriv[(item[1], item[2])]
            if d[0] == "sep":
                sink.append("sep")
                continue
            _, x, path = d
            stack.append(("emit", -x))
            for a, b in reversed(path):
                stack.append(("edge", a, b))
            stack.append(("emit", x))

    def factorize(self, w: Sequence[int]) -> Optional[List[Word]]:
        """Words h_1, ..., h_k with red(h_1 ... h_k) = w, each h_i in its
        factor subgroup; None when w is not in the product."""
        run = self._run(w)
        if run is None:
            return None
        events: List[object] = []
        for move in run:
            if move[0] == "letter":
                events.append(move[1])
            else:
                self._expand_eps(move[1], move[2], events)
        pieces: List[List[int]] = [[]]
        for ev in events:
            if ev == "sep":
                pieces.append([])
            else:
                pieces[-1].append(ev)
        while len(pieces) < len(self.cores):
            pieces.append([])
        factors = [reduce_word(tuple(p)) for p in pieces]
        check: Word = ()
        for i, h in enumerate(factors):
            if not member(self.cores[i], h):
                raise RuntimeError("internal: factor %d of the extracted "
                                   "witness fails membership" % i)
            check = concat(check, h)
        if check != reduce_word(tuple(w)):
            raise RuntimeError("internal: extracted witness does not "
                               "reduce to the query word")
        return factors


def product_automaton(cores: Sequence[LabeledGraph]) -> ProductAutomaton:
    """The chained factor automaton, not yet saturated."""
    return ProductAutomaton(cores)


def member_product(cores: Sequence[LabeledGraph], w: Sequence[int]
                   ) -> Tuple[bool, Optional[List[Word]]]:
    """Whether reduced w lies in H_1 ... H_k, with a verified
    factorization on success."""
    w = tuple(w)
    if not is_reduced(w):
        raise ValueError("word must be reduced")
    aut = ProductAutomaton(cores).saturate()
    factors = aut.factorize(w)
    return (factors is not None), factors
