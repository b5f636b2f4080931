import json

import pytest

from nsr.cli import EX_USAGE, main


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_reduce_examples(capsys):
    assert cli(capsys, "reduce", "--state", "0", "--strategy", "cbn", "set (S get) 0") == (0, "RESULT Normal 1 0\n", "")
    assert cli(capsys, "reduce", "--state", "4", "get")[1] == "RESULT Normal 4 #4\n"


def test_reduce_json(capsys):
    code, out, _ = cli(capsys, "reduce", "--format", "json-lines", "--strategy", "cbv", "S get")
    row = json.loads(out)
    assert code == 0 and row["state"] == 0 and row["outcome"] == "Normal"


def test_trace(capsys):
    code, out, _ = cli(capsys, "trace", "--state", "2", "set #5 get")
    lines = out.strip().splitlines()
    assert lines[0] == "5 | set | get" and lines[-1] == "RESULT Normal 5 #5"
    code, out, _ = cli(capsys, "trace", "--format", "json-lines", "(\\x. x) 0")
    assert json.loads(out.splitlines()[0])["rule"] == "beta"


def test_claims_run(capsys):
    code, out, _ = cli(capsys, "claims", "run", "corpus/")
    assert code == 0
    assert out.strip().splitlines()[-1].endswith("fail 0 unknown 0 error 0")


def test_claims_failure_exit(tmp_path, capsys):
    f = tmp_path / "x.claims"
    f.write_text("CLAIM a\nANCHOR x\nKIND reduce\nTERM 0\nOUTCOME Normal\nEND-STATE 3\n")
    code, out, _ = cli(capsys, "claims", "run", str(f))
    assert code == 1 and out.startswith("FAIL")
    f.write_text("CLAIM a\nKIND reduce\n")
    code, _, err = cli(capsys, "claims", "run", str(f))
    assert code == EX_USAGE and "x.claims:1" in err


@pytest.mark.parametrize("argv, code", [
    (["check", "--formula", "le(3, delta)", "--term", "dagger", "--state", "4"], 0),
    (["check", "--formula", "le(3, delta)", "--term", "dagger", "--state", "2"], 1),
    (["check", "--formula", "Nat(0)", "--term", "loop_plus", "--fuel", "30"], 2),
    (["check", "--formula", "le(x, delta)", "--term", "dagger", "--range", "0..4", "--bind", "x=const 0"], 0),
    (["check", "--formula", "fa_st x. lt(x, delta)", "--term", "\\w. loop_plus", "--range", "0..3",
      "--atoms", "saturated", "--fuel", "5000"], 0),
    (["check", "--formula", "X -> X", "--term", "\\x. x", "--pred", "X=nf2", "--generators", "#2 ;; S #1"], 0),
])
def test_check_exit_codes(capsys, argv, code):
    assert cli(capsys, *argv)[0] == code


def test_check_range_summary(capsys):
    code, out, _ = cli(capsys, "check", "--formula", "le(2, delta)", "--term", "dagger", "--range", "0..3")
    assert code == 1 and "0: nonmember" in out and "3: member" in out


def test_extract(capsys):
    code, out, _ = cli(capsys, "extract", "--state", "3", "\\k. T k get 'p")
    assert (code, out) == (0, "WITNESS 3 STATE 3 PAYLOAD 'p\n")
    code, out, _ = cli(capsys, "extract", "\\k. 'x")
    assert code == 1 and out.startswith("ERROR")
    code, out, _ = cli(capsys, "extract", "--fuel", "50", "\\k. loop_plus")
    assert code == 2


def test_typecheck(tmp_path, capsys):
    code, out, _ = cli(capsys, "typecheck", "src/nsr/corpus/derivations.txt")
    assert code == 0 and out.startswith("ACCEPT identity")
    f = tmp_path / "d.txt"
    f.write_text("DERIVATION w\nRULE ax :: x : A |- x : B\n")
    code, out, _ = cli(capsys, "typecheck", str(f))
    assert code == 1 and "REJECT w" in out and "(expected accept)" in out
    code, out, _ = cli(capsys, "typecheck", "--mode", "stateful", "src/nsr/corpus/derivations_rejected.txt")
    assert code == 1 and "REJECT external-substitution-effect-free [stateful]" in out


def test_realizer_listing(capsys):
    code, out, _ = cli(capsys, "list-realizers")
    names = [line.split()[0] for line in out.splitlines()]
    assert code == 0 and {"t_llpo", "diag", "ens0"} <= set(names)
    code, out, _ = cli(capsys, "show", "diag")
    assert code == 0 and "diag" in out


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["reduce", "--strategy", "lazy", "0"],
    ["reduce", "--state", "-1", "0"],
    ["reduce", "("],
    ["check", "--formula", "le(", "--term", "0"],
    ["check", "--formula", "bot", "--term", "0", "--state", "0", "--range", "0..2"],
    ["check", "--formula", "bot", "--term", "0", "--range", "5..2"],
    ["check", "--formula", "bot", "--term", "0", "--bind", "x"],
    ["show", "no_such_realizer"],
    ["typecheck", "/nonexistent"],
    ["claims", "run", "/nonexistent.claims"],
])
def test_usage_errors_exit_64(capsys, argv):
    with pytest.raises(SystemExit) as e:
        raise SystemExit(main(argv))
    assert e.value.code == EX_USAGE
