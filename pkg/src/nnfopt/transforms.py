"""Circuit transformations for cardinality and knapsack constraints.

Every node of a normalized circuit is copied once per achievable value of
an integer contribution function (the count of set variables from a
chosen subset, or a weighted sum), so that copy i of a node accepts
exactly the node's models whose contribution is i.  And nodes turn into
convolutions over their two children's copies; the per-value selector Or
nodes are deterministic because their children pin distinct partial sums,
which is recorded as a pseudo-variable decision marker.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .circuit import (AND, FALSE, LIT, OR, TRUE, CircuitBuilder, NnfCircuit,
                      check_structure, smooth_binary_form)


@dataclass(frozen=True)
class CardinalitySpec:
    """Counted variable subset and the admissible sums of their bits."""

    variables: tuple
    sums: frozenset

    def __init__(self, variables: Iterable, sums: Iterable[int]):
        object.__setattr__(self, "variables", tuple(variables))
        object.__setattr__(self, "sums", frozenset(int(s) for s in sums))
        bad = [s for s in self.sums if not 0 <= s <= len(self.variables)]
        if bad:
            raise ValueError(f"sums out of range: {sorted(bad)}")


def _require_transformable(c: NnfCircuit, counted) -> None:
    missing = set(counted) - set(c.variables)
    if missing:
        raise ValueError(f"counted variables not in universe: {sorted(missing, key=repr)}")
    rep = check_structure(c)
    if not (rep.decomposable and rep.deterministic):
        raise ValueError("transform needs a decomposable, deterministic circuit")


def _indexed_copies(prep: NnfCircuit, contrib: Mapping):
    """Copy each node of the smooth binary circuit per contribution value.

    contrib maps (variable, bit) to an integer; absent pairs contribute 0.
    Returns (builder, tables) where tables[nid] maps a value to the node
    copy accepting exactly the models of nid with that contribution.
    """
    vs = prep.var_sets
    order = {v: i for i, v in enumerate(prep.variables)}
    support = {var for (var, _bit), val in contrib.items() if val != 0}
    b = CircuitBuilder(prep.variables)
    tables: list[dict] = []
    for nid, node in enumerate(prep.nodes):
        kind = node[0]
        if kind == FALSE:
            tables.append({})
        elif kind == TRUE:
            tables.append({0: b.true()})
        elif kind == LIT:
            var, sign = node[1], node[2]
            val = contrib.get((var, 1 if sign else 0), 0)
            tables.append({val: b.literal(var, sign)})
        elif kind == AND:
            kids = node[1]
            if not kids:
                tables.append({0: b.true()})
            elif len(kids) == 1:
                tables.append(dict(tables[kids[0]]))
            else:
                t1, t2 = tables[kids[0]], tables[kids[1]]
                pairs: dict[int, list] = {}
                for a in sorted(t1):
                    for bb in sorted(t2):
                        pairs.setdefault(a + bb, []).append(
                            b.add_and((t1[a], t2[bb])))
                scope = tuple(sorted(vs[kids[0]] & support, key=order.__getitem__))
                table = {}
                for s in sorted(pairs):
                    alts = pairs[s]
                    table[s] = alts[0] if len(alts) == 1 else b.add_or(
                        alts, ("#sum", scope))
                tables.append(table)
        else:
            merged: dict[int, list] = {}
            for ch in node[1]:
                for s in sorted(tables[ch]):
                    merged.setdefault(s, []).append(tables[ch][s])
            table = {}
            for s in sorted(merged):
                alts = merged[s]
                table[s] = alts[0] if len(alts) == 1 else b.add_or(alts, node[2])
            tables.append(table)
    return b, tables


def counting_transform(c: NnfCircuit, counted: Iterable) -> tuple[NnfCircuit, tuple]:
    """Circuit with one root per possible count of set variables in counted.

    Root i accepts exactly the models of c that set i of the counted
    variables; structurally impossible counts come out as a shared false
    node.  The returned circuit's own output disjoins all roots, so its
    model set equals c's.
    """
    counted = tuple(counted)
    _require_transformable(c, counted)
    prep = smooth_binary_form(c)
    order = {v: i for i, v in enumerate(prep.variables)}
    contrib = {(x, 1): 1 for x in counted}
    b, tables = _indexed_copies(prep, contrib)
    out_table = tables[prep.output]
    p = len(counted)
    marker = ("#sum", tuple(sorted(counted, key=order.__getitem__)))
    roots = []
    for i in range(p + 1):
        roots.append(out_table[i] if i in out_table else b.false())
    output = b.add_or([out_table[s] for s in sorted(out_table)], marker)
    built = b.finish(output)
    prep_size = prep.node_count + prep.edge_count
    size = built.node_count + built.edge_count
    if size > 3 * (p + 2) ** 2 * max(prep_size, 1) + p + 2:
        raise AssertionError("counting transform exceeded its size bound")
    return built, tuple(roots)


def restrict_cardinality(c: NnfCircuit, spec: CardinalitySpec) -> NnfCircuit:
    """Models of c whose counted-bit sum lies in the admissible set.

    An empty admissible set yields a circuit with no models.
    """
    counted, roots = counting_transform(c, spec.variables)
    nodes = list(counted.nodes)
    order = {v: i for i, v in enumerate(counted.variables)}
    marker = ("#sum", tuple(sorted(spec.variables, key=order.__getitem__)))
    children = tuple(roots[i] for i in sorted(spec.sums)
                     if counted.nodes[roots[i]][0] != FALSE)
    nodes.append((OR, children, marker))
    return NnfCircuit(counted.variables, nodes, len(nodes) - 1)


def knapsack_transform(c: NnfCircuit, coeffs: Mapping, lower: int, upper: int) -> NnfCircuit:
    """Models of c with lower <= sum of coeffs[v]*bit(v) <= upper.

    Coefficients are integers and may be negative; variables without a
    coefficient count as zero.  Work is proportional to the number of
    achievable partial sums, which is bounded by the total absolute
    coefficient mass.
    """
    clean = {}
    for v, cv in coeffs.items():
        if int(cv) != cv:
            raise ValueError(f"knapsack coefficient for {v!r} must be an integer")
        clean[v] = int(cv)
    coeffs = clean
    _require_transformable(c, coeffs.keys())
    if int(lower) > int(upper):
        raise ValueError("empty knapsack interval")
    prep = smooth_binary_form(c)
    order = {v: i for i, v in enumerate(prep.variables)}
    contrib = {(x, 1): cv for x, cv in coeffs.items() if cv != 0}
    b, tables = _indexed_copies(prep, contrib)
    out_table = tables[prep.output]
    marker = ("#wsum", tuple(sorted(((v, cv) for v, cv in coeffs.items()),
                                    key=lambda t: order[t[0]])))
    children = tuple(out_table[s] for s in sorted(out_table)
                     if int(lower) <= s <= int(upper))
    output = b.add_or(children, marker)
    return b.finish(output)
