"""Compile an encoding into a decision-DNNF and read the optimum off it.

Run with:  python demos/02_compile_and_optimize.py
"""

from nnfopt import (CompileConfig, brute_force, check_structure, compile_formula,
                    encode_ordered, model_count, optimize, order_from_beta,
                    parse_instance, project_solution, weights_from_profits,
                    beta_elimination_order, to_nnf_text)

TEXT = "-3 v1 v2 v3\n4 v4 v5\n5 v2 v3 v4 v5 v6\n"
inst = parse_instance(TEXT).instance
h = inst.hypergraph

formula = encode_ordered(inst, beta_elimination_order(h))
circuit = compile_formula(formula, CompileConfig(order_hint=order_from_beta(h)))
print("compiled:", circuit)
print("structure:", check_structure(circuit))

# Every point of {0,1}^V extends to exactly one model of the encoding, so
# the circuit must have 2^6 models.
print("model count:", model_count(circuit), "= 2^6")

# Max-plus query: edge variables carry their monomial's profit, a single
# bottom-up pass finds the best model, a top-down walk extracts it.
w = weights_from_profits(inst)
opt = optimize(circuit, w)
point = project_solution(opt.witness, inst)
print("optimum:", opt.value, "at", point)

# The brute-force oracle sweeps all 2^6 points directly on the polynomial.
[(ref_point, ref_value)] = brute_force(inst, None, 1)
print("oracle agrees:", ref_value == opt.value and ref_point == point)

print("\ncircuit in the standard text format (first lines):")
print("\n".join(to_nnf_text(circuit).splitlines()[:8]))
