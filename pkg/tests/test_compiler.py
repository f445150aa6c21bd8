import logging
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import worked_example, random_formula, random_instance, sat_assignments
from nnfopt import (CnfFormula, CompileConfig, Hypergraph, check_structure,
                    compile_formula, encode_basic, encode_ordered,
                    enumerate_models, formula_incidence_graph,
                    incidence_graph, lift_decomposition, minfill_decomposition,
                    model_count, order_from_beta, order_from_decomposition)
from nnfopt.cnf import CnfVariable
from nnfopt.hypergraph import TreeDecomposition, vertex_node


def x(v):
    return CnfVariable("x", v)


def model_rows(c):
    return {tuple(m[v] for v in c.variables) for m in enumerate_models(c, cap=100000)}


def truth_rows(f):
    return {tuple(a[v] for v in f.variables) for a in sat_assignments(f)}


class TestCompileSoundness:
    def test_worked_example_count(self):
        c = compile_formula(encode_basic(worked_example()))
        assert model_count(c) == 64

    def test_unsat_formula(self):
        f = CnfFormula([x(1)], [[(x(1), True)], [(x(1), False)]])
        c = compile_formula(f)
        assert model_count(c) == 0
        assert model_rows(c) == set()

    def test_empty_formula_all_models(self):
        f = CnfFormula([x(1), x(2)], [])
        assert model_count(compile_formula(f)) == 4

    def test_random_formulas_match_truth_table(self):
        rng = random.Random(42)
        for _ in range(60):
            f = random_formula(rng)
            c = compile_formula(f)
            rep = check_structure(c)
            assert rep.decomposable and rep.deterministic
            assert model_rows(c) == truth_rows(f)

    def test_random_encodings_match_truth_table(self):
        rng = random.Random(43)
        for _ in range(25):
            inst = random_instance(rng, max_v=4, max_e=4, max_deg=3)
            for f in (encode_basic(inst),
                      encode_ordered(inst, inst.hypergraph.vertices)):
                c = compile_formula(f)
                assert model_rows(c) == truth_rows(f)

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(st.integers(0, 2 ** 31 - 1))
    def test_property_truth_table(self, seed):
        f = random_formula(random.Random(seed), max_vars=5, max_clauses=8)
        c = compile_formula(f)
        assert model_rows(c) == truth_rows(f)
        rep = check_structure(c)
        assert rep.decomposable and rep.deterministic


class TestCompileDeterminism:
    def test_identical_runs_identical_nodes(self):
        f = encode_basic(worked_example())
        c1 = compile_formula(f)
        c2 = compile_formula(f)
        assert c1.nodes == c2.nodes and c1.output == c2.output

    def test_seeded_shuffle_reproducible(self):
        f = encode_basic(worked_example())
        a = compile_formula(f, CompileConfig(seed=5))
        b = compile_formula(f, CompileConfig(seed=5))
        assert a.nodes == b.nodes
        assert model_rows(a) == model_rows(compile_formula(f))

    def test_order_hint_changes_shape_not_models(self):
        f = encode_basic(worked_example())
        hint = tuple(reversed(f.variables))
        c = compile_formula(f, CompileConfig(order_hint=hint))
        assert model_rows(c) == truth_rows(f)

    def test_bad_hint_rejected(self):
        f = encode_basic(worked_example())
        with pytest.raises(ValueError, match="permutation"):
            compile_formula(f, CompileConfig(order_hint=f.variables[:3]))


class TestCacheBudget:
    def test_exhaustion_warns_but_stays_correct(self, caplog):
        f = encode_basic(worked_example())
        with caplog.at_level(logging.WARNING):
            c = compile_formula(f, CompileConfig(cache_budget=1))
        assert "cache budget" in caplog.text
        assert model_count(c) == 64


class TestOrderFromBeta:
    def test_worked_example_prefix(self):
        h = worked_example().hypergraph
        order = order_from_beta(h)
        xs = [v for v in order if v.kind == "x"]
        assert xs == [x(6), x(5), x(4), x(3), x(2), x(1)]
        # each edge variable sits right after its latest vertex
        names = list(order)
        assert names.index(CnfVariable("y", 2)) == names.index(x(6)) + 1

    def test_single_edge(self):
        h = Hypergraph([1, 2], [{1, 2}])
        order = order_from_beta(h)
        assert set(order) == {x(1), x(2), CnfVariable("y", 0)}

    def test_triangle_rejected(self):
        with pytest.raises(ValueError, match="beta-acyclic"):
            order_from_beta(Hypergraph([1, 2, 3], [{1, 2}, {2, 3}, {3, 1}]))


class TestOrderFromDecomposition:
    def test_single_bag(self):
        td = TreeDecomposition({0: [vertex_node(x(1)), vertex_node(x(2)), ("c", 0)]}, [])
        order = order_from_decomposition(td)
        assert set(order) == {x(1), x(2)}

    def test_path_decomposition_left_to_right(self):
        bags = {0: [vertex_node(x(1)), ("c", 0)],
                1: [vertex_node(x(1)), vertex_node(x(2))],
                2: [vertex_node(x(2)), vertex_node(x(3))]}
        td = TreeDecomposition(bags, [(0, 1), (1, 2)])
        assert order_from_decomposition(td) == (x(1), x(2), x(3))

    def test_lifted_worked_decomposition_covers_all_variables(self):
        inst = worked_example()
        h = inst.hypergraph
        lifted = lift_decomposition(minfill_decomposition(incidence_graph(h)), h)
        order = order_from_decomposition(lifted)
        f = encode_basic(inst)
        assert sorted(order, key=repr) == sorted(f.variables, key=repr)
        c = compile_formula(f, CompileConfig(order_hint=order))
        assert model_count(c) == 64

    def test_minfill_of_formula_graph_works_as_hint(self):
        f = encode_basic(worked_example())
        td = minfill_decomposition(formula_incidence_graph(f))
        order = order_from_decomposition(td)
        c = compile_formula(f, CompileConfig(order_hint=order))
        assert model_count(c) == 64

    def test_invalid_decomposition_rejected(self):
        td = TreeDecomposition({0: [vertex_node(x(1))], 1: [vertex_node(x(2))],
                                2: [vertex_node(x(1))]}, [(0, 1), (1, 2)])
        with pytest.raises(ValueError, match="connectedness"):
            order_from_decomposition(td)


class TestSizeSmoke:
    def test_beta_acyclic_chain_growth(self):
        # chains of nested edges stay small under the beta order
        sizes = []
        for n in (10, 20, 40):
            verts = list(range(1, n + 1))
            edges = [frozenset(range(1, i + 1)) for i in range(2, n + 1)]
            h = Hypergraph(verts, edges)
            from fractions import Fraction
            from nnfopt import LiteralInstance
            inst = LiteralInstance.plain(h, [Fraction(1)] * len(edges))
            from nnfopt import beta_elimination_order
            f = encode_ordered(inst, beta_elimination_order(h))
            c = compile_formula(f, CompileConfig(order_hint=order_from_beta(h)))
            sizes.append(c.node_count)
        n1, n2, n3 = sizes
        total1, total3 = 10 + 9, 40 + 39
        # subquadratic growth in |V|+|E| across the corpus
        assert n3 / n1 < (total3 / total1) ** 2
