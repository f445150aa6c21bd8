"""Parse a polynomial, look at its hypergraph, and build both CNF encodings.

The instance format is one monomial per line: a rational coefficient
followed by terms v<id> (a plain binary variable) or ~v<id> (its
complement 1-x).  Run with:  python demos/01_polynomials_and_encodings.py
"""

from nnfopt import (beta_elimination_order, encode_basic, encode_ordered,
                    formula_hypergraph, is_beta_acyclic, parse_instance)

TEXT = """\
-3 v1 v2 v3
4 v4 v5
5 v2 v3 v4 v5 v6
"""

parsed = parse_instance(TEXT)
inst = parsed.instance
h = inst.hypergraph
print("polynomial over vertices:", h.vertices)
for i in range(len(h.edges)):
    print(f"  monomial {i}: profit {inst.profit[i]} on {h.edge_vertices(i)}")

# The hypergraph is beta-acyclic: vertices can be eliminated so that each
# one's incident edges are nested at removal time.
order = beta_elimination_order(h)
print("beta elimination order:", order)

# Encoding 1: one link clause per (edge, vertex) plus one wide clause per
# edge.  Its clause structure can create cycles even for nice instances.
basic = encode_basic(inst)
print("basic encoding:", basic)
print("  beta-acyclic as a formula?",
      is_beta_acyclic(formula_hypergraph(basic)))

# Encoding 2: telescoped link clauses along a vertex order.  Fed a beta
# elimination order it keeps the formula beta-acyclic, which is what lets
# the compiler stay polynomial on this class.
ordered = encode_ordered(inst, order)
print("ordered encoding:", ordered)
print("  beta-acyclic as a formula?",
      is_beta_acyclic(formula_hypergraph(ordered)))

print("\nDIMACS of the ordered encoding:")
print(ordered.to_dimacs())
