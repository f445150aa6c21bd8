"""Extended linear formulations extracted from normalized DNNF circuits.

One unknown per circuit edge plus, optionally, one per variable.  The
equalities say: the output absorbs one unit of flow, Or nodes conserve
flow, and every in-edge of an And node carries the node's full outflow.
Integral solutions are exactly the indicator vectors of certificates
(tree-shaped sub-DAGs picking one child per Or and all children per And),
and the system is totally dual integral: a single forward pass builds an
integral optimal dual for any integer edge costs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .circuit import (AND, FALSE, LIT, OR, TRUE, CapExceeded, CircuitBuilder,
                      NnfCircuit, _identity_node, check_normalized)
from .maxplus import WeightFunction


@dataclass(frozen=True)
class Row:
    tag: tuple
    coeffs: tuple          # ((column, coefficient), ...) in column order
    relation: str          # '=' or '>='
    rhs: int

    def value_at(self, point: Mapping) -> Fraction:
        return sum((Fraction(point[col]) * k for col, k in self.coeffs), Fraction(0))

    def holds_at(self, point: Mapping) -> bool:
        v = self.value_at(point)
        return v == self.rhs if self.relation == "=" else v >= self.rhs


class LinearSystem:
    """Sparse rows with coefficients in {-1, 0, 1} over named columns."""

    def __init__(self, columns: Sequence, rows: Sequence[Row],
                 column_names: Mapping) -> None:
        self.columns = tuple(columns)
        self.rows = tuple(rows)
        self.column_names = dict(column_names)
        for row in self.rows:
            for col, k in row.coeffs:
                if k not in (-1, 1):
                    raise ValueError("coefficients must stay in {-1, 0, 1}")
                if col not in self.column_names:
                    raise ValueError(f"unknown column {col!r}")

    def row_by_tag(self, tag: tuple) -> Row:
        for row in self.rows:
            if row.tag == tag:
                return row
        raise KeyError(tag)

    def check_point(self, point: Mapping) -> bool:
        return all(row.holds_at(point) for row in self.rows)

    def __repr__(self) -> str:
        return f"LinearSystem({len(self.rows)} rows, {len(self.columns)} columns)"


def build_system(c: NnfCircuit, include_x: bool = False) -> LinearSystem:
    """The flow system of a normalized circuit, in O(size) time.

    With include_x, adds one projection row per universe variable tying it
    to the outflow of its positive literal input; that requires the
    circuit to be smooth and to mention every variable.
    """
    check_normalized(c, require_smooth=include_x)
    rows: list[Row] = []
    ecols = [("y", eid) for eid in range(c.edge_count)]
    columns = list(ecols)
    names = {("y", eid): f"y{eid}" for eid in range(c.edge_count)}

    out_row = tuple((("y", eid), 1) for eid in c.in_edges(c.output))
    rows.append(Row(("out",), out_row, "=", 1))
    for nid, node in enumerate(c.nodes):
        kind = node[0]
        if kind == OR and nid != c.output:
            coeffs = [(("y", eid), 1) for eid in c.in_edges(nid)]
            coeffs += [(("y", eid), -1) for eid in c.out_edges(nid)]
            rows.append(Row(("or", nid), tuple(coeffs), "=", 0))
        elif kind == AND:
            outs = [(("y", eid), -1) for eid in c.out_edges(nid)]
            for eid in c.in_edges(nid):
                rows.append(Row(("and", nid, eid),
                                ((("y", eid), 1),) + tuple(outs), "=", 0))
    for eid in range(c.edge_count):
        rows.append(Row(("nonneg", eid), ((("y", eid), 1),), ">=", 0))

    if include_x:
        lits = c.literal_nodes()
        pos = {v: i + 1 for i, v in enumerate(c.variables)}
        satisfiable = bool(c.in_edges(c.output))
        for var in c.variables:
            if satisfiable and (var, True) not in lits and (var, False) not in lits:
                raise ValueError(f"variable {var!r} does not occur; normalize first")
            col = ("x", var)
            columns.append(col)
            names[col] = f"x{pos[var]}"
            coeffs = [(col, 1)]
            if (var, True) in lits:
                [lid] = lits[(var, True)]
                coeffs += [(("y", eid), -1) for eid in c.out_edges(lid)]
            rows.append(Row(("proj", var), tuple(coeffs), "=", 0))
    return LinearSystem(columns, rows, names)


# ---------------------------------------------------------------------------
# certificates


def validate_certificate(c: NnfCircuit, gates: frozenset) -> None:
    """Raise ValueError unless gates forms a certificate of c."""
    if c.output not in gates:
        raise ValueError("certificate must contain the output")
    for nid in gates:
        node = c.nodes[nid]
        kind = node[0]
        if kind == OR:
            chosen = [ch for ch in node[1] if ch in gates]
            if len(chosen) != 1:
                raise ValueError(f"Or gate {nid} must have exactly one chosen input")
        elif kind == AND:
            if any(ch not in gates for ch in node[1]):
                raise ValueError(f"And gate {nid} must have all inputs chosen")
        elif kind == FALSE:
            raise ValueError("certificates cannot pass through false")
        if nid != c.output:
            if not any(par in gates for _, par in
                       (c.edge_list[eid] for eid in c.out_edges(nid))):
                raise ValueError(f"gate {nid} feeds no chosen gate")


def enumerate_certificates(c: NnfCircuit, cap: int = 100000) -> list[frozenset]:
    """All certificates, as gate-id sets; raises CapExceeded beyond cap."""
    check_normalized(c, require_smooth=False)
    counts: list[int] = []
    for nid, node in enumerate(c.nodes):
        kind = node[0]
        if kind in (LIT, TRUE):
            counts.append(1)
        elif kind == FALSE:
            counts.append(0)
        elif kind == AND:
            n = 1
            for ch in node[1]:
                n *= counts[ch]
            counts.append(n)
        else:
            counts.append(sum(counts[ch] for ch in node[1]))
        if counts[-1] > cap:
            raise CapExceeded("certificate cap exceeded")
    if counts[c.output] > cap:
        raise CapExceeded("certificate cap exceeded")

    table: list[list[frozenset]] = []
    for nid, node in enumerate(c.nodes):
        kind = node[0]
        if kind in (LIT, TRUE):
            table.append([frozenset((nid,))])
        elif kind == FALSE:
            table.append([])
        elif kind == AND:
            acc = [frozenset((nid,))]
            for ch in node[1]:
                acc = [t | s for t in acc for s in table[ch]]
            table.append(acc)
        else:
            table.append([t | {nid} for ch in node[1] for t in table[ch]])
    return table[c.output]


def certificate_point(t: frozenset, c: NnfCircuit) -> tuple[dict, dict]:
    """The 0/1 (y, x) vectors of a certificate of a smooth normalized circuit."""
    check_normalized(c, require_smooth=True)
    validate_certificate(c, t)
    y = {}
    for eid, (ch, par) in enumerate(c.edge_list):
        y[("y", eid)] = 1 if (ch in t and par in t) else 0
    x = {}
    for nid in t:
        node = c.nodes[nid]
        if node[0] == LIT:
            var, sign = node[1], node[2]
            if ("x", var) in x:
                raise ValueError(f"two literals of {var!r} in one certificate")
            x[("x", var)] = 1 if sign else 0
    for var in c.variables:
        if ("x", var) not in x:
            raise ValueError(f"certificate fixes no literal of {var!r}")
    return y, x


def certificate_tree_cost(c: NnfCircuit, t: frozenset, cost: Mapping) -> Fraction:
    """Total cost of the edges with both endpoints in the certificate."""
    total = Fraction(0)
    for eid, (ch, par) in enumerate(c.edge_list):
        if ch in t and par in t:
            total += Fraction(cost.get(eid, 0))
    return total


# ---------------------------------------------------------------------------
# the constructive integral dual


def dual_optimize(c: NnfCircuit, cost: Mapping) -> tuple:
    """Optimal dual of max{cost . y} over the flow system, by one forward
    pass in topological order.

    Returns (value, assignment) where the assignment maps ('or', gate) and
    ('and', gate, edge) dual variables to their values; the output gate's
    variable carries the optimum, which equals the best certificate tree
    cost.  Integer costs give an integral dual.
    """
    check_normalized(c, require_smooth=False)
    if not c.in_edges(c.output):
        raise ValueError("unsatisfiable circuit: the primal system is infeasible")

    def base(nid: int, z: dict):
        node = c.nodes[nid]
        if node[0] == OR:
            return z[("or", nid)]
        if node[0] == AND:
            return sum(z[("and", nid, eid)] for eid in c.in_edges(nid))
        return 0

    z: dict = {}
    for nid, node in enumerate(c.nodes):
        kind = node[0]
        if kind == AND:
            for eid in c.in_edges(nid):
                ch, _ = c.edge_list[eid]
                z[("and", nid, eid)] = cost.get(eid, 0) + base(ch, z)
        elif kind == OR and node[1]:
            z[("or", nid)] = max(
                cost.get(eid, 0) + base(c.edge_list[eid][0], z)
                for eid in c.in_edges(nid))
    return z[("or", c.output)], z


def insert_literal_relays(c: NnfCircuit) -> NnfCircuit:
    """Give every literal input a single out-edge by routing multi-parent
    literals through a fresh unary Or; the function is unchanged."""
    multi = {ids[0] for (var, sign), ids in c.literal_nodes().items()
             if len(c.out_edges(ids[0])) > 1}
    if not multi:
        return c
    b = CircuitBuilder(c.variables)
    mapping: dict[int, int] = {}
    relays: dict[int, int] = {}
    for nid in c.reachable_from_output():
        node = c.nodes[nid]
        if node[0] in (AND, OR):
            kids = []
            for ch in node[1]:
                if ch in multi:
                    if ch not in relays:
                        relays[ch] = b.add_or((mapping[ch],), None)
                    kids.append(relays[ch])
                else:
                    kids.append(mapping[ch])
            if node[0] == AND:
                mapping[nid] = b.add_and(kids)
            else:
                mapping[nid] = b.add_or(kids, node[2])
        else:
            mapping[nid] = _identity_node(b, mapping, node)
    return b.finish(mapping[c.output])


def weight_edge_costs(c: NnfCircuit, w: WeightFunction) -> tuple[NnfCircuit, dict]:
    """Edge costs realizing a weight function: each variable's weight sits
    on the unique out-edge of its literal input.

    Returns (circuit, cost) where the circuit is c with relay nodes added
    when a literal had several out-edges.  Maximizing these costs over
    certificates reproduces the max-plus optimum.
    """
    relayed = insert_literal_relays(c)
    check_normalized(relayed, require_smooth=True)
    cost: dict[int, Fraction] = {}
    for (var, sign), ids in relayed.literal_nodes().items():
        [lid] = ids
        outs = relayed.out_edges(lid)
        if len(outs) != 1:
            raise AssertionError("literal relay insertion failed")
        cost[outs[0]] = w.weight(var, 1 if sign else 0)
    return relayed, cost


# ---------------------------------------------------------------------------
# total unimodularity counterexample


def _determinant(matrix: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(x) for x in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                factor = m[r][col] * inv
                for cc in range(col, n):
                    m[r][cc] -= factor * m[col][cc]
    return det


def non_tu_witness_circuit() -> NnfCircuit:
    """A small smooth-free DNNF whose flow matrix is not totally unimodular."""
    b = CircuitBuilder((1, 2, 3))
    l1 = b.literal(1, True)
    l2 = b.literal(2, True)
    l3 = b.literal(3, True)
    d = b.add_or((l1,), None)
    e = b.add_and((l2, l3))
    cc = b.add_and((d, e))
    bb = b.add_or((cc,), None)
    a = b.add_or((bb, d), None)
    out = b.add_or((a, e), None)
    return b.finish(out)


def tu_counterexample_check() -> int:
    """Determinant of the distinguished 6x6 submatrix of the witness
    circuit's flow system; a value outside {-1, 0, 1} shows the system is
    not totally unimodular."""
    c = non_tu_witness_circuit()
    system = build_system(c, include_x=False)
    # gates by construction order: 0..2 literals, 3 unary Or over l1,
    # 4 And(l2,l3), 5 And(3,4), 6 unary Or(5), 7 Or(6,3), 8 output Or(7,4)
    row_tags = [("out",), ("or", 7), ("and", 5, 3), ("and", 5, 4),
                ("or", 3), ("and", 4, 1)]
    col_order = [("y", 8), ("y", 5), ("y", 7), ("y", 3), ("y", 9), ("y", 4)]
    matrix = []
    for tag in row_tags:
        row = system.row_by_tag(tag)
        d = dict(row.coeffs)
        matrix.append([d.get(col, 0) for col in col_order])
    det = _determinant(matrix)
    assert det.denominator == 1
    return int(det)


# ---------------------------------------------------------------------------
# LP export


def _lp_number(value) -> str:
    """Exact plain-decimal rendering; rejects fractions that have none."""
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    den = f.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        raise ValueError(
            f"{f} has no exact decimal form; scale the objective to integers")
    digits = max(twos, fives)
    scaled = f * 10 ** digits
    text = str(scaled.numerator).rjust(digits + 1, "0")
    sign = "-" if text.startswith("-") else ""
    text = text.lstrip("-").rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def _lp_terms(pairs, names) -> str:
    parts = []
    for col, k in pairs:
        coeff = Fraction(k)
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        term = names[col] if mag == 1 else f"{_lp_number(mag)} {names[col]}"
        parts.append(f"{sign} {term}")
    return " ".join(parts) if parts else "0 " + next(iter(names.values()))


def to_lp_text(system: LinearSystem, objective: Mapping,
               sense: str = "max", comment: Optional[str] = None) -> str:
    """Render the system in the classic LP file dialect.

    Flow unknowns are declared nonnegative in Bounds, projection unknowns
    free.  Objective and right-hand sides must be exactly representable
    as decimals.
    """
    if not system.columns:
        raise ValueError("cannot export a system with no columns")
    names = system.column_names
    lines = []
    if comment:
        for ln in comment.splitlines():
            lines.append(f"\\ {ln}")
    lines.append("Maximize" if sense == "max" else "Minimize")
    obj_pairs = [(col, objective[col]) for col in system.columns if col in objective
                 and Fraction(objective[col]) != 0]
    obj_parts = []
    for col, k in obj_pairs:
        coeff = Fraction(k)
        sign = "-" if coeff < 0 else "+"
        obj_parts.append(f"{sign} {_lp_number(abs(coeff))} {names[col]}")
    lines.append(" obj: " + (" ".join(obj_parts) if obj_parts else "0 " +
                             names[system.columns[0]]))
    lines.append("Subject To")
    idx = 0
    bounds = []
    for row in system.rows:
        if row.relation == ">=" and len(row.coeffs) == 1 and row.coeffs[0][1] == 1:
            bounds.append(f" {names[row.coeffs[0][0]]} >= {_lp_number(row.rhs)}")
            continue
        idx += 1
        rel = "=" if row.relation == "=" else ">="
        lines.append(f" c{idx}: {_lp_terms(row.coeffs, names)} {rel} {_lp_number(row.rhs)}")
    lines.append("Bounds")
    lines.extend(bounds)
    for col in system.columns:
        if col[0] == "x":
            lines.append(f" {names[col]} free")
    lines.append("End")
    return "\n".join(lines) + "\n"
