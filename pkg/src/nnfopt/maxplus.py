"""Max-plus queries over decision-DNNF circuits.

Weights live in the semiring (Q with -infinity, max, +): an unsatisfiable
circuit has value -infinity, satisfiable ones an exact rational optimum.
The single-optimum query runs directly on non-smooth circuits by keeping,
for every node, the best weight of a model of the node completed greedily
on all remaining variables; the top-k query first normalizes the circuit
to the smooth binary form.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .circuit import (AND, FALSE, LIT, OR, TRUE, NnfCircuit, check_structure,
                      evaluate, smooth_binary_form)
from .cnf import CnfVariable, instance_variables
from .hypergraph import LiteralInstance

NEG_INF = float("-inf")


class WeightFunction:
    """Exact rational weight per (variable, bit), total on a universe."""

    def __init__(self, universe: Sequence, table: Mapping) -> None:
        self.universe = tuple(universe)
        uset = set(self.universe)
        self._w = {}
        for (var, bit), val in table.items():
            if var not in uset:
                raise ValueError(f"weight on undeclared variable {var!r}")
            if bit not in (0, 1):
                raise ValueError("bit must be 0 or 1")
            self._w[(var, bit)] = Fraction(val)
        for var in self.universe:
            self._w.setdefault((var, 0), Fraction(0))
            self._w.setdefault((var, 1), Fraction(0))

    def weight(self, var, bit) -> Fraction:
        return self._w[(var, int(bit))]

    def value_of(self, assignment: Mapping) -> Fraction:
        return sum((self._w[(v, int(assignment[v]))] for v in self.universe),
                   Fraction(0))

    def slack(self, var) -> Fraction:
        return max(self._w[(var, 0)], self._w[(var, 1)])

    def slack_bit(self, var) -> int:
        # prefers 0 on ties, so greedy completions lean lexicographically small
        return 0 if self._w[(var, 0)] >= self._w[(var, 1)] else 1

    def scaled(self, factor) -> "WeightFunction":
        factor = Fraction(factor)
        return WeightFunction(
            self.universe, {k: v * factor for k, v in self._w.items()})


def weights_from_profits(inst: LiteralInstance) -> WeightFunction:
    """Edge variables earn their profit when set, everything else weighs 0."""
    universe = instance_variables(inst)
    table = {(CnfVariable("y", i), 1): p for i, p in enumerate(inst.profit)}
    return WeightFunction(universe, table)


@dataclass(frozen=True)
class Optimum:
    """Best weight and, when finite, a model attaining it."""

    value: object
    witness: Optional[dict]


def _require_opt_structure(c: NnfCircuit) -> None:
    rep = check_structure(c)
    if not (rep.decomposable and rep.deterministic):
        raise ValueError("query needs a decomposable, deterministic circuit")


def optimize(c: NnfCircuit, w: WeightFunction) -> Optimum:
    """Maximum weight over the circuit's models, with witness.

    One bottom-up pass computes, per node, the best completed weight
    m(v) = max of w over models of v extended greedily outside var(v);
    a top-down walk then rebuilds a witness.  Ties between Or children go
    to the first child in declaration order.
    """
    if set(w.universe) != set(c.variables):
        raise ValueError("weight universe must match the circuit universe")
    _require_opt_structure(c)
    total = sum((w.slack(v) for v in c.variables), Fraction(0))

    m = []
    for node in c.nodes:
        kind = node[0]
        if kind == FALSE:
            m.append(NEG_INF)
        elif kind == TRUE:
            m.append(total)
        elif kind == LIT:
            var, sign = node[1], node[2]
            m.append(total - w.slack(var) + w.weight(var, 1 if sign else 0))
        elif kind == AND:
            acc = -(len(node[1]) - 1) * total
            for ch in node[1]:
                acc = acc + m[ch]
            m.append(acc)
        else:
            best = NEG_INF
            for ch in node[1]:
                if m[ch] > best:
                    best = m[ch]
            m.append(best)

    value = m[c.output]
    if value == NEG_INF:
        return Optimum(NEG_INF, None)
    witness: dict = {}
    stack = [c.output]
    while stack:
        nid = stack.pop()
        node = c.nodes[nid]
        kind = node[0]
        if kind == LIT:
            witness[node[1]] = 1 if node[2] else 0
        elif kind == AND:
            stack.extend(node[1])
        elif kind == OR:
            for ch in node[1]:
                if m[ch] == m[nid]:
                    stack.append(ch)
                    break
    for var in c.variables:
        if var not in witness:
            witness[var] = w.slack_bit(var)
    assert evaluate(c, witness), "witness must be a model"
    assert w.value_of(witness) == value, "witness must attain the optimum"
    return Optimum(value, witness)


def project_solution(tau: Mapping, inst: LiteralInstance) -> dict:
    """Vertex point of a multilinear-set model; the polynomial value at the
    point equals the model's weight under weights_from_profits."""
    h = inst.hypergraph
    for i, e in enumerate(h.edges):
        prod = 1
        for v in e:
            bit = tau[CnfVariable("x", v)]
            if (bit if inst.sigma[i][v] == 1 else 1 - bit) == 0:
                prod = 0
                break
        if int(tau[CnfVariable("y", i)]) != prod:
            raise ValueError(f"assignment is not in the multilinear set (edge {i})")
    return {v: int(tau[CnfVariable("x", v)]) for v in h.vertices}


def top_k(c: NnfCircuit, w: WeightFunction, k: int) -> list[tuple[dict, Fraction]]:
    """The k best models by weight, values nonincreasing.

    Returns fewer than k pairs exactly when the circuit has fewer models.
    Ties are broken toward lexicographically smaller assignments.  The
    circuit is normalized to smooth binary form internally.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if set(w.universe) != set(c.variables):
        raise ValueError("weight universe must match the circuit universe")
    _require_opt_structure(c)
    prep = smooth_binary_form(c)
    vs = prep.var_sets
    order = {v: i for i, v in enumerate(prep.variables)}
    varkey = lambda nid: tuple(sorted(vs[nid], key=order.__getitem__))
    sortkey = lambda entry: (-entry[0], entry[1])

    lists: list[list] = []
    for nid, node in enumerate(prep.nodes):
        kind = node[0]
        if kind == FALSE:
            lists.append([])
        elif kind == TRUE:
            lists.append([(Fraction(0), ())])
        elif kind == LIT:
            bit = 1 if node[2] else 0
            lists.append([(w.weight(node[1], bit), (bit,))])
        elif kind == AND:
            kids = node[1]
            if not kids:
                lists.append([(Fraction(0), ())])
                continue
            if len(kids) == 1:
                lists.append(list(lists[kids[0]]))
                continue
            la, lb = lists[kids[0]], lists[kids[1]]
            if not la or not lb:
                lists.append([])
                continue
            kv = varkey(nid)
            pos = {v: i for i, v in enumerate(kv)}
            ia = [pos[v] for v in varkey(kids[0])]
            ib = [pos[v] for v in varkey(kids[1])]

            def combine(ea, eb):
                bits = [0] * len(kv)
                for idx, b in zip(ia, ea[1]):
                    bits[idx] = b
                for idx, b in zip(ib, eb[1]):
                    bits[idx] = b
                return (ea[0] + eb[0], tuple(bits))

            merged = []
            seen = {(0, 0)}
            heap = [(sortkey(combine(la[0], lb[0])), 0, 0)]
            while heap and len(merged) < k:
                key, i, j = heapq.heappop(heap)
                merged.append(combine(la[i], lb[j]))
                if i + 1 < len(la) and (i + 1, j) not in seen:
                    seen.add((i + 1, j))
                    heapq.heappush(heap, (sortkey(combine(la[i + 1], lb[j])), i + 1, j))
                if j + 1 < len(lb) and (i, j + 1) not in seen:
                    seen.add((i, j + 1))
                    heapq.heappush(heap, (sortkey(combine(la[i], lb[j + 1])), i, j + 1))
            lists.append(merged)
        else:
            merged = list(heapq.merge(*(lists[ch] for ch in node[1]), key=sortkey))
            lists.append(merged[:k])

    out_entries = lists[prep.output]
    out_vars = varkey(prep.output)
    if out_entries:
        assert len(out_vars) == len(prep.variables), "normal form must cover the universe"
    result = []
    for value, bits in out_entries[:k]:
        result.append((dict(zip(out_vars, bits)), value))
    return result
