import json
import shutil
import subprocess

import pytest

from grail.cli import bundled_files, expected_status, main, run


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_grade_prints_bare_value(capsys):
    code, out, _ = call(capsys, "grade", "--theory", "qs0.glt", "--formula",
                        "(tensor (eq M x y) (eq M x y))", "--var", "x")
    assert code == 0 and out == "2\n"


def test_grade_of_term_and_all_vars(capsys):
    code, out, _ = call(capsys, "grade", "--theory", "unary.glt", "--term", "(f (f x))")
    assert code == 0 and out == "4\n"
    code, out, _ = call(capsys, "grade", "--theory", "qs0.glt", "--formula", "(eq M (plus x x) y)")
    assert out.splitlines() == ["x: 2", "y: 1"]


def test_check_derivation_exit_codes(capsys):
    assert call(capsys, "check-derivation", "congruence_plus.gld", "--theory", "qs0.glt")[0] == 0
    code, out, _ = call(capsys, "check-derivation", "replicable_attempt.gld", "--theory", "qs0.glt", "--json")
    report = json.loads(out)
    assert code == 1
    assert report["items"][0]["path"] == "root"
    assert report["items"][0]["kind"] == "rule-mismatch"


def test_usage_errors_exit_2(capsys):
    assert call(capsys, "check-theory", "no_such_theory.glt")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2
    capsys.readouterr()


@pytest.mark.parametrize("path", bundled_files(), ids=lambda p: p.name)
def test_bundled_file_matches_its_header(capsys, path):
    want = expected_status(path.read_text())
    assert want is not None
    command = {".glt": "check-theory", ".gld": "check-derivation", ".glm": "check-model"}[path.suffix]
    code, report, _ = run([command, str(path)])
    capsys.readouterr()
    if want == "ok":
        assert code == 0, report
    elif want == "violations":
        assert code == 1 and report["status"] == "violations"
    else:
        kind, where = want.split()[1:]
        assert code == 1
        assert (report["items"][0]["kind"], report["items"][0]["path"]) == (kind, where)


@pytest.mark.parametrize("argv", [
    ["check-model", "qs0_hausdorff.glm", "--lemma-depth", "2", "--samples", "20"],
    ["laws", "--doctrine", "kripke"],
    ["complete", "--max-size", "2"],
    ["eval", "--model", "qs0_hausdorff.glm", "--sequent", "(seq () (eq M (plus x y) (plus y x)))"],
    ["prove", "--theory", "qs0.glt", "--goal", "(seq () (eq M (plus x zero) x))", "--ctx", "(ctx (x M))"],
])
def test_json_is_deterministic(capsys, argv):
    first = call(capsys, *argv, "--json")
    second = call(capsys, *argv, "--json")
    assert first == second
    assert first[0] == 0
    assert "seconds" not in json.loads(first[1])


def test_timing_is_opt_in(capsys):
    _, out, _ = call(capsys, "laws", "--doctrine", "kripke", "--json", "--timing")
    assert "seconds" in json.loads(out)


def test_broken_doctrine_reports_counit(capsys):
    code, out, _ = call(capsys, "laws", "--doctrine", "broken-kripke", "--json")
    report = json.loads(out)
    assert code == 1
    assert [i["law"] for i in report["items"] if i["violation_count"]] == ["counit"]


def test_false_sequent_exit_1(capsys):
    code, out, _ = call(capsys, "eval", "--model", "qs0_hausdorff.glm", "--sequent", "(seq () (eq M x y))")
    assert code == 1


def test_eps_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("GRAIL_EPS", "0.5")
    _, out, _ = call(capsys, "check-theory", "qs0.glt", "--json")
    assert json.loads(out)["settings"]["eps"] == 0.5
    _, out, _ = call(capsys, "check-theory", "qs0.glt", "--json", "--eps", "0.25")
    assert json.loads(out)["settings"]["eps"] == 0.25


@pytest.mark.skipif(shutil.which("grail") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["grail", "grade", "--theory", "qs0.glt", "--formula", "(eq M x x)", "--var", "x"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout == "2\n"
