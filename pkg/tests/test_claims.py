import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nsr.claims import (
    ClaimFileError,
    Report,
    eval_template_expr,
    natural_key,
    parse_claims,
    run_claim,
    run_claims,
    shipped_corpus,
)

REDUCE = """\
CLAIM succ-{n}
ANCHOR successor
KIND reduce
FOR n 0..2
TERM S #{n}
STATE 0
OUTCOME Normal
END-TERM #{n + 1}
END-STATE 0
"""


def one(src):
    [c] = parse_claims(src)
    return run_claim(c)


def test_for_expansion_and_ids():
    cs = parse_claims(REDUCE)
    assert [c.id for c in cs] == ["succ-{n}[n=0]", "succ-{n}[n=1]", "succ-{n}[n=2]"]
    assert cs[2].get("END-TERM") == "#3"
    assert all(run_claim(c).status == "pass" for c in cs)


def test_case_braces_are_not_templates():
    src = REDUCE.replace("TERM S #{n}", r"TERM case inl #{n} { inl x -> S x | inr y -> y }")
    assert all(run_claim(c).status == "pass" for c in parse_claims(src))


def test_template_whitelist():
    assert eval_template_expr("max(n, 3) * 2 - n % 2", {"n": 5}) == 9
    assert eval_template_expr("next_odd(s)", {"s": 4}) == 5
    for bad in ["__import__(os)", "n ** 2", "open(n)", "n.real", "m"]:
        with pytest.raises(ValueError):
            eval_template_expr(bad, {"n": 2})


def test_bad_template_is_a_file_error():
    src = REDUCE.replace("#{n + 1}", "#{__import__(os)}")
    with pytest.raises(ClaimFileError):
        parse_claims(src)


@pytest.mark.parametrize("src, line, msg", [
    ("ANCHOR x\n", 1, "outside a CLAIM"),
    ("CLAIM a\nANCHOR x\nKIND reduce\nBOGUS 1\n", 4, "unknown key"),
    ("CLAIM a\nANCHOR x\nKIND reduce\nTERM 0\nTERM 1\n", 5, "duplicate key"),
    ("CLAIM a\nKIND reduce\n", 1, "no ANCHOR"),
    ("\n\nCLAIM a\nANCHOR x\nKIND sing\n", 3, "unknown KIND"),
    ("CLAIM a\nANCHOR x\nKIND reduce\nFOR n 3..1\n", 1, "empty range"),
    ("CLAIM a\nANCHOR x\nKIND reduce\nCLAIM a\nANCHOR y\nKIND reduce\n", 4, "duplicate claim id"),
])
def test_parse_errors_name_the_line(src, line, msg):
    with pytest.raises(ClaimFileError) as e:
        parse_claims(src, "f.claims")
    assert e.value.line == line and msg in str(e.value) and "f.claims" in str(e.value)


def test_statuses_and_exit_codes():
    ok = one("CLAIM a\nANCHOR x\nKIND reduce\nTERM S 0\nOUTCOME Normal\nEND-TERM #1\n")
    bad = one("CLAIM b\nANCHOR x\nKIND reduce\nTERM S 0\nOUTCOME Normal\nEND-TERM #2\n")
    unk = one("CLAIM c\nANCHOR x\nKIND member\nTERM loop_plus\nFORMULA Nat(0)\nFUEL 40\nVERDICT member\n")
    err = one("CLAIM d\nANCHOR x\nKIND reduce\nTERM (\nOUTCOME Normal\n")
    assert [r.status for r in (ok, bad, unk, err)] == ["pass", "fail", "unknown", "error"]
    assert Report([ok]).exit_code == 0
    assert Report([ok, unk]).exit_code == 2
    assert Report([ok, unk, bad]).exit_code == 1
    assert Report([err]).exit_code == 1
    assert bad.details and "ParseError" in err.details[0]


def test_report_formats():
    rep = Report([one("CLAIM a\nANCHOR x\nKIND reduce\nDEVIATION why\nTERM 0\nOUTCOME Normal\n")])
    assert rep.text().splitlines()[-1] == "TOTAL 1 pass 1 fail 0 unknown 0 error 0"
    assert "deviation: why" in rep.text(verbose=True)
    rows = [json.loads(x) for x in rep.json_lines().splitlines()]
    assert rows[0] == {"id": "a", "kind": "reduce", "status": "pass", "deviations": ["why"]}
    assert rows[-1]["total"] == 1


@given(st.lists(st.integers(0, 200), min_size=1, max_size=8))
def test_natural_sort(ns):
    ids = [f"c[n={n}]" for n in ns]
    assert sorted(ids, key=natural_key) == [f"c[n={n}]" for n in sorted(ns)]


def test_stuck_and_fuel_outcomes():
    assert one("CLAIM a\nANCHOR x\nKIND reduce\nTERM p1 0\nOUTCOME Stuck:project-nonpair\n").status == "pass"
    assert one("CLAIM a\nANCHOR x\nKIND reduce\nTERM loop_plus\nFUEL 9\nOUTCOME FuelExhausted\n"
               "END-STATE 2\n").status == "pass"


def test_shipped_corpus_passes():
    rep = run_claims()
    assert len(shipped_corpus()) >= 7
    bad = [r.line() for r in rep.results if r.status != "pass"]
    assert not bad and rep.exit_code == 0
    assert len(rep.results) > 800


def test_select_and_directory_paths(tmp_path):
    (tmp_path / "a.claims").write_text(REDUCE)
    (tmp_path / "notes.txt").write_text("ignored")
    rep = run_claims([str(tmp_path)], select="n=1")
    assert [r.id for r in rep.results] == ["succ-{n}[n=1]"]
    with pytest.raises(FileNotFoundError):
        run_claims([str(tmp_path / "missing.claims")])
