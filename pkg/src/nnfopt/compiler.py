"""Compilation of CNF formulas into decision-DNNF circuits.

Exhaustive search with unit propagation, connected-component splitting
and component caching.  Branches become Or nodes carrying their decision
variable, component splits become decomposable And nodes, and implied
literals are recorded as literal inputs of And nodes, so the output is
deterministic and decomposable by construction.
"""

from __future__ import annotations

import logging
import random
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .circuit import FALSE, TRUE, CircuitBuilder, NnfCircuit, _identity_node, _rebuild
from .cnf import CnfFormula, CnfVariable
from .hypergraph import Hypergraph, TreeDecomposition, beta_elimination_order

log = logging.getLogger(__name__)


@dataclass
class CompileConfig:
    """Search knobs.

    order_hint, when given, must be a permutation of the formula's
    variables; branching follows it.  Without a hint variables are
    branched in declaration order, optionally shuffled by seed (the
    default is fully deterministic).  cache_budget caps the number of
    cached components; beyond it compilation continues without reuse.
    """

    order_hint: Optional[Sequence[CnfVariable]] = None
    cache_budget: int = 1_000_000
    seed: Optional[int] = None


def _unit_propagate(clauses):
    """Fixpoint unit propagation over int-literal clauses.

    Returns (implied literal dict, residual clauses), or (None, ()) on
    conflict.  Residual clauses are satisfied-free, unit-free and
    simplified against every implied literal.  Counter-based: each clause
    is revisited only when one of its literals is falsified.
    """
    if any(not cl for cl in clauses):
        return None, ()
    queue = [cl[0] for cl in clauses if len(cl) == 1]
    if not queue:
        return {}, tuple(clauses)
    occ: dict[int, list[int]] = {}
    counts = []
    for i, cl in enumerate(clauses):
        counts.append(len(cl))
        for lit in cl:
            occ.setdefault(lit, []).append(i)
    implied: dict[int, int] = {}
    sat = bytearray(len(clauses))
    qi = 0
    while qi < len(queue):
        lit = queue[qi]
        qi += 1
        var = -lit if lit < 0 else lit
        prev = implied.get(var)
        if prev is not None:
            if prev != lit:
                return None, ()
            continue
        implied[var] = lit
        for i in occ.get(lit, ()):
            sat[i] = 1
        for i in occ.get(-lit, ()):
            if sat[i]:
                continue
            counts[i] -= 1
            if counts[i] == 0:
                return None, ()
            if counts[i] == 1:
                for cand in clauses[i]:
                    cv = -cand if cand < 0 else cand
                    known = implied.get(cv)
                    if known is None:
                        queue.append(cand)
                        break
                    if known == cand:
                        break
    residual = []
    for i, cl in enumerate(clauses):
        if sat[i]:
            continue
        if counts[i] == len(cl):
            if cl:
                residual.append(cl)
            continue
        keep = tuple(lit for lit in cl
                     if implied.get(-lit if lit < 0 else lit) is None)
        if keep:
            residual.append(keep)
    return implied, tuple(residual)


def _components(residual):
    """Split clauses into connected components of shared variables.

    Each component comes out deduplicated and sorted, which is its cache
    key; components are ordered by their first clause.
    """
    if not residual:
        return []
    var_to_clauses: dict[int, list[int]] = {}
    for idx, cl in enumerate(residual):
        for lit in cl:
            var_to_clauses.setdefault(abs(lit), []).append(idx)
    seen = [False] * len(residual)
    comps = []
    for start in range(len(residual)):
        if seen[start]:
            continue
        seen[start] = True
        stack = [start]
        member = []
        while stack:
            idx = stack.pop()
            member.append(idx)
            for lit in residual[idx]:
                for nxt in var_to_clauses[abs(lit)]:
                    if not seen[nxt]:
                        seen[nxt] = True
                        stack.append(nxt)
        comps.append(tuple(sorted({residual[i] for i in member})))
    return comps


def compile_formula(f: CnfFormula, config: Optional[CompileConfig] = None) -> NnfCircuit:
    """Compile a CNF formula into a decision-DNNF over f's universe.

    The circuit's model set equals the satisfying assignments of f;
    identical input and config always yield the identical circuit.
    """
    cfg = config or CompileConfig()
    variables = f.variables
    n = len(variables)

    if cfg.order_hint is not None:
        hint = tuple(cfg.order_hint)
        if len(hint) != n or set(hint) != set(variables):
            raise ValueError("order hint must be a permutation of the formula variables")
        base = hint
    else:
        base = list(variables)
        if cfg.seed is not None:
            random.Random(cfg.seed).shuffle(base)
    rank = {f.variable_number(v): i for i, v in enumerate(base)}

    def encode_clause(cl):
        lits = [f.variable_number(var) if sign else -f.variable_number(var)
                for var, sign in cl]
        return tuple(sorted(lits, key=abs))

    canonical = tuple(sorted({encode_clause(cl) for cl in f.clauses}))

    bld = CircuitBuilder(variables)
    cache: dict = {}
    overflow = False

    def kind_of(nid: int) -> str:
        return bld.nodes[nid][0]

    def branch(component) -> int:
        # the decided literal joins the clause set as a unit, so the
        # propagation pass in build both applies and records it
        v = min((x for cl in component for x in map(abs, cl)), key=rank.__getitem__)
        var_obj = variables[v - 1]
        children = []
        for lit in (-v, v):
            sub = build(component + ((lit,),))
            if kind_of(sub) != FALSE:
                children.append(sub)
        if not children:
            return bld.false()
        if len(children) == 1:
            return children[0]
        return bld.add_or(children, decision=var_obj)

    def build(clauses) -> int:
        nonlocal overflow
        implied, residual = _unit_propagate(clauses)
        if implied is None:
            return bld.false()
        parts = [bld.literal(variables[abs(l) - 1], l > 0)
                 for l in sorted(implied.values(), key=abs)]
        for comp in _components(residual):
            nid = cache.get(comp)
            if nid is None:
                nid = branch(comp)
                if len(cache) < cfg.cache_budget:
                    cache[comp] = nid
                elif not overflow:
                    overflow = True
                    log.warning("component cache budget (%d) exhausted; "
                                "continuing without reuse", cfg.cache_budget)
            if kind_of(nid) == FALSE:
                return bld.false()
            parts.append(nid)
        if not parts:
            return bld.true()
        if len(parts) == 1:
            return parts[0]
        return bld.add_and(parts)

    # branch/build alternation recurses at most a few frames per variable
    old_limit = sys.getrecursionlimit()
    need = 6 * n + 2000
    if old_limit < need:
        sys.setrecursionlimit(need)
    try:
        root = build(canonical)
    finally:
        if old_limit < need:
            sys.setrecursionlimit(old_limit)
    raw = bld.finish(root)
    return _rebuild(raw, lambda b, mapping, i, node: _identity_node(b, mapping, node))


def order_from_beta(h: Hypergraph) -> tuple[CnfVariable, ...]:
    """Branch order for beta-acyclic instances: vertex variables in reverse
    elimination order, each followed by the edge variables whose last
    vertex it is."""
    order = beta_elimination_order(h)
    if order is None:
        raise ValueError("hypergraph is not beta-acyclic")
    pos = {v: i for i, v in enumerate(order)}
    by_last: dict = {}
    for i, e in enumerate(h.edges):
        last = max(e, key=pos.__getitem__)
        by_last.setdefault(last, []).append(i)
    out = []
    for v in reversed(order):
        out.append(CnfVariable("x", v))
        out.extend(CnfVariable("y", i) for i in by_last.get(v, []))
    return tuple(out)


def order_from_decomposition(td: TreeDecomposition) -> tuple:
    """Variable order from a root-to-leaf sweep of an incidence-graph
    decomposition: variables in order of first bag appearance."""
    if not td._is_tree():
        raise ValueError("bag graph is not a tree")
    for el in {x for bag in td.bags.values() for x in bag}:
        if not td.check_connected(el):
            raise ValueError("decomposition violates connectedness")
        if not (isinstance(el, tuple) and len(el) == 2 and el[0] in ("v", "c")):
            raise ValueError("bags must contain incidence-graph nodes")
    root = min(td.bags)
    seen_bags = {root}
    stack = [root]
    out = []
    emitted = set()
    while stack:
        b = stack.pop()
        for el in sorted(td.bags[b], key=repr):
            if el[0] == "v" and el[1] not in emitted:
                emitted.add(el[1])
                out.append(el[1])
        nxt = sorted(td.tree[b] - seen_bags, reverse=True)
        seen_bags.update(nxt)
        stack.extend(nxt)
    return tuple(out)
