import io
import sys

import pytest

from corpus import WORKED_TEXT
from nnfopt.cli import main
from nnfopt import from_nnf_text


@pytest.fixture()
def example(tmp_path):
    path = tmp_path / "example.poly"
    path.write_text(WORKED_TEXT)
    return str(path)


def run(capsys, *argv, stdin=None):
    if stdin is not None:
        old = sys.stdin
        sys.stdin = io.StringIO(stdin)
        try:
            code = main(list(argv))
        finally:
            sys.stdin = old
    else:
        code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestSolve:
    def test_worked_example(self, capsys, example):
        code, out = run(capsys, "solve", example)
        assert code == 0
        assert out == "optimum 9\npoint v1=0 v2=1 v3=1 v4=1 v5=1 v6=1\n"

    def test_encodings_agree(self, capsys, example):
        outs = set()
        for enc in ("auto", "basic", "ordered"):
            code, out = run(capsys, "solve", "--encoding", enc, example)
            assert code == 0
            outs.add(out.splitlines()[0])
        assert outs == {"optimum 9"}

    def test_stdin_dash(self, capsys):
        code, out = run(capsys, "solve", "-", stdin=WORKED_TEXT)
        assert code == 0 and out.startswith("optimum 9\n")

    def test_minimize_sense(self, capsys, tmp_path):
        p = tmp_path / "m.poly"
        p.write_text("#minimize\n5\n-2 v1\n3 v1 v2\n")
        code, out = run(capsys, "solve", str(p))
        assert code == 0
        assert out.splitlines()[0] == "optimum 3"

    def test_knapsack_flag(self, capsys, example):
        code, out = run(capsys, "solve", "--knapsack", "2:2:1,1,1,1,1,1", example)
        assert code == 0
        assert out.splitlines()[0] == "optimum 4"

    def test_infeasible(self, capsys, example):
        code, out = run(capsys, "solve", "--card-set", "0",
                        "--knapsack", "6:6:1,1,1,1,1,1", example)
        assert code == 0 and out == "infeasible\n"


class TestCard:
    def test_worked_example_set_two(self, capsys, example):
        code, out = run(capsys, "card", "--set", "2", example)
        assert code == 0
        assert out.splitlines()[0] == "optimum 4"

    def test_directive_in_file(self, capsys, tmp_path):
        p = tmp_path / "c.poly"
        p.write_text("#card 2\n" + WORKED_TEXT)
        code, out = run(capsys, "solve", str(p))
        assert out.splitlines()[0] == "optimum 4"


class TestTopk:
    def test_worked_top3(self, capsys, example):
        code, out = run(capsys, "topk", "--k", "3", example)
        assert code == 0
        values = [ln.split()[1] for ln in out.splitlines()]
        assert values == ["9", "6", "4"]


class TestCompile:
    def test_emit_cnf_counts(self, capsys, example):
        code, out = run(capsys, "compile", "--emit-cnf", "--encoding", "ordered",
                        example)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "p cnf 9 13"
        assert len(lines) == 14

    def test_emit_nnf_parses_back(self, capsys, example):
        code, out = run(capsys, "compile", "--emit-nnf", example)
        assert code == 0
        c = from_nnf_text(out)
        assert c.node_count > 1

    def test_nothing_to_emit(self, capsys, example):
        code, _ = run(capsys, "compile", example)
        assert code == 2


class TestExtform:
    def test_emit_lp(self, capsys, example):
        code, out = run(capsys, "extform", example)
        assert code == 0
        assert out.splitlines()[1] == "Maximize"
        assert "Subject To" in out and out.rstrip().endswith("End")

    def test_fractional_objective_needs_scaling(self, capsys, tmp_path):
        p = tmp_path / "f.poly"
        p.write_text("1/3 v1\n")
        with pytest.raises(ValueError):
            run(capsys, "extform", str(p))
        code, out = run(capsys, "extform", "--scale-objective", str(p))
        assert code == 0 and "scaled by 3" in out.splitlines()[0]


class TestOracle:
    def test_matches_solve(self, capsys, example):
        _, solved = run(capsys, "solve", example)
        _, oracled = run(capsys, "oracle", example)
        assert solved == oracled

    def test_card_set(self, capsys, example):
        code, out = run(capsys, "oracle", "--card-set", "2", example)
        assert out.splitlines()[0] == "optimum 4"

    def test_topk_mode(self, capsys, example):
        code, out = run(capsys, "oracle", "--k", "3", example)
        values = [ln.split()[1] for ln in out.splitlines()]
        assert values == ["9", "6", "4"]

    def test_guard_exit_code(self, capsys, tmp_path):
        p = tmp_path / "big.poly"
        p.write_text("".join(f"1 v{i} v{i+1}\n" for i in range(1, 26)))
        code, _ = run(capsys, "oracle", str(p))
        assert code == 3


class TestGenLabs:
    def test_pipe_into_solve(self, capsys):
        code, text = run(capsys, "gen-labs", "6", "2")
        assert code == 0
        code, out = run(capsys, "solve", "-", stdin=text)
        assert code == 0
        code, oracle_out = run(capsys, "oracle", "-", stdin=text)
        assert out.splitlines()[0] == oracle_out.splitlines()[0]

    def test_bad_parameters_exit_three(self, capsys):
        code, _ = run(capsys, "gen-labs", "3", "3")
        assert code == 3


class TestExitCodes:
    def test_parse_error_is_two(self, capsys, tmp_path):
        p = tmp_path / "bad.poly"
        p.write_text("1 frog\n")
        code, _ = run(capsys, "solve", str(p))
        assert code == 2

    def test_missing_file_is_two(self, capsys, tmp_path):
        code, _ = run(capsys, "solve", str(tmp_path / "nope.poly"))
        assert code == 2


class TestDegenerateInstances:
    def test_duplicate_monomials_end_to_end(self, capsys):
        text = "1 v1 v2\n2 v1 v2\n"
        code, out = run(capsys, "solve", "-", stdin=text)
        assert code == 0 and out.splitlines()[0] == "optimum 3"
        _, oracle_out = run(capsys, "oracle", "-", stdin=text)
        assert out == oracle_out

    def test_cyclic_instance_encodings_agree(self, capsys):
        text = "2 v1 v2\n-1 v2 v3\n3 v3 v1\n"
        values = set()
        for enc in ("auto", "basic", "ordered"):
            code, out = run(capsys, "solve", "--encoding", enc, "-", stdin=text)
            assert code == 0
            values.add(out.splitlines()[0])
        _, oracle_out = run(capsys, "oracle", "-", stdin=text)
        assert values == {oracle_out.splitlines()[0]}

    def test_nonpositive_k_rejected_by_parser(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(capsys, "topk", "--k", "0", "-")
        assert exc.value.code == 2

    def test_constant_only_solve_and_oracle(self, capsys):
        code, out = run(capsys, "solve", "-", stdin="7\n")
        assert code == 0 and out.splitlines()[0] == "optimum 7"
        code, out2 = run(capsys, "oracle", "-", stdin="7\n")
        assert code == 0 and out == out2

    def test_offset_only_labs(self, capsys):
        code, text = run(capsys, "gen-labs", "2", "1")
        assert code == 0
        code, out = run(capsys, "solve", "-", stdin=text)
        assert code == 0 and out.splitlines()[0] == "optimum 1"
