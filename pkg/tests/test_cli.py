import json
import subprocess
import sys

import pytest

from corrcalc.cli import emit_dot, run, run_suite
from corrcalc.fincat import category_to_json
from corrcalc.fixtures import arrow, one
from corrcalc.span import walking_span


def _doc(args):
    code, text = run(args)
    return code, json.loads(text)


def test_check_category_on_one():
    code, doc = _doc(["check-category", "ONE"])
    assert code == 0
    assert doc["anchor"] == "CAT_MODELS"


def test_base_change_failure_on_fs4():
    code, doc = _doc(["check-base-change", "FS4-all"])
    assert code == 1
    ce = doc["counterexample"]
    assert (ce["f_src"], ce["target"], ce["g_src"]) == ("2", "1", "3")


def test_malformed_inputs(tmp_path):
    assert run(["check-category", "NOPE"])[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["check-category", str(bad)])[0] == 2
    raw = category_to_json(arrow())
    raw["compose"] = raw["compose"][:-1]
    gap = tmp_path / "gap.json"
    gap.write_text(json.dumps(raw))
    assert run(["check-category", str(gap)])[0] == 2
    raw = category_to_json(arrow())
    raw["extra"] = 1
    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps(raw))
    assert run(["check-category", str(extra)])[0] == 2


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit) as exc:
        run(["check-category", "ONE", "--colour"])
    assert exc.value.code == 2


def test_file_with_marking(tmp_path):
    raw = category_to_json(arrow(), marking=[2])
    path = tmp_path / "arrow.json"
    path.write_text(json.dumps(raw))
    code, doc = _doc(["check-marking", str(path)])
    assert code == 0
    assert doc["witness"]["marked"] == ["id_0", "id_1", "a"]


def test_build_corr_then_yoneda(tmp_path):
    out = tmp_path / "corr.json"
    code, _ = run(["build-corr", "ARROW{a}", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["format"] == "bicat-v1"
    code, doc = _doc(["yoneda-check", "ARROW{a}", "--at", "1"])
    assert code == 0
    assert doc["witness"]["evaluation"] == ["<a|a>", "<id_1|id_1>"]


def test_compose_spans_in_fs4():
    code, doc = _doc(["compose-spans", "FS4", "--first", "2->1:00,2->1:00",
                      "--second", "2->1:00,2->1:00"])
    assert code == 0
    assert doc["witness"]["kernel"] == "4"


def test_find_adjoint(tmp_path):
    F = tmp_path / "bang.json"
    F.write_text(json.dumps({"ob_map": {"0": "*", "1": "*"},
                             "mor_map": {"id_0": "id_*", "id_1": "id_*", "a": "id_*"}}))
    code, doc = _doc(["find-adjoint", "ARROW", "--target", "ONE", "--functor", str(F)])
    assert code == 0
    assert doc["witness"]["right"]["ob_map"] == {"*": "1"}
    G = tmp_path / "top.json"
    G.write_text(json.dumps({"ob_map": {"*": "1"}, "mor_map": {"id_*": "id_1"}}))
    assert run(["find-adjoint", "ONE", "--target", "ARROW", "--functor", str(G)])[0] == 1


def _square(tmp_path, top):
    """The square of ``a`` against itself under ``ARROW -> ONE`` or ``ONE -> ARROW``."""
    if top:
        # id o id^! => bang^! o bang is the unit of bang, not invertible
        cats = {"X": "ARROW", "Y": "ONE"}
        bang = {"source": "X", "target": "Y", "ob_map": {"0": "*", "1": "*"},
                "mor_map": {"id_0": "id_*", "id_1": "id_*", "a": "id_*"}}
        ident = {"source": "X", "target": "X", "ob_map": {"0": "0", "1": "1"},
                 "mor_map": {"id_0": "id_0", "id_1": "id_1", "a": "a"}}
        sq = {"format": "square-v1", "categories": cats, "fbar": ident, "gbar": ident,
              "f": bang, "g": bang}
    else:
        cats = {"X": "ONE", "Y": "ARROW"}
        bot = {"source": "X", "target": "Y", "ob_map": {"*": "0"}, "mor_map": {"id_*": "id_0"}}
        ident = {"source": "X", "target": "X", "ob_map": {"*": "*"}, "mor_map": {"id_*": "id_*"}}
        sq = {"format": "square-v1", "categories": cats, "fbar": ident, "gbar": bot,
              "f": {"source": "Y", "target": "Y", "ob_map": {"0": "0", "1": "1"},
                    "mor_map": {"id_0": "id_0", "id_1": "id_1", "a": "a"}},
              "g": bot}
    path = tmp_path / f"sq{int(top)}.json"
    path.write_text(json.dumps(sq))
    return str(path)


def test_mate_and_bc(tmp_path):
    p = _square(tmp_path, top=False)
    code, doc = _doc(["mate", p])
    assert code == 0
    assert run(["check-bc", p])[0] == 0
    code, doc = _doc(["check-bc", _square(tmp_path, top=True)])
    assert code == 1
    assert doc["counterexample"]["mate"] == {"0": "a", "1": "id_1"}


def test_catfun_file(tmp_path):
    raw = {"format": "catfun-v1", "values": {"0": "ONE", "1": "ARROW"},
           "maps": {"a": {"ob_map": {"*": "0"}, "mor_map": {"id_*": "id_0"}}}}
    path = tmp_path / "h.json"
    path.write_text(json.dumps(raw))
    code, doc = _doc(["check-bivariant", "ARROW{a}", "--functor", str(path), "--dictionary"])
    assert code == 0
    assert doc["witness"]["dictionary_agrees"]
    raw["maps"]["a"]["ob_map"] = {"*": "1"}
    raw["maps"]["a"]["mor_map"] = {"id_*": "id_1"}
    path.write_text(json.dumps(raw))
    code, doc = _doc(["check-bivariant", "ARROW{a}", "--functor", str(path), "--dictionary"])
    assert code == 1
    assert doc["witness"]["dictionary_agrees"]


def test_grothendieck_artefact(tmp_path):
    out = tmp_path / "fib.json"
    assert run(["grothendieck", "ARROW", "--functor", "slice", "--out", str(out)])[0] == 0
    assert run(["check-fibration", str(out), "--variance", "both"])[0] == 0


def test_text_format():
    code, text = run(["check-twisted", "ARROW{a}", "--format", "text"])
    assert code == 0
    assert text == "holds twisted_bicartesian [BIV_TWIST_DEF]\n"


# DOT ------------------------------------------------------------------------------
def test_dot_of_one():
    dot = emit_dot(one())
    assert dot.count("label=") == 1
    assert "->" not in dot


def test_dot_of_walking_span():
    dot = emit_dot(walking_span())
    assert dot.count("[label=") == 5
    assert dot.count("->") == 2
    assert dot.count("style=dashed") == 1


def test_dot_of_universal_span():
    from corrcalc.marked import has_base_change
    from corrcalc.cli import load_marked
    from corrcalc.span import enumerate_spans
    M = has_base_change(load_marked("ARROW{a}")).payload
    code, dot = run(["check-twisted", "ARROW{a}", "--format", "dot"])
    n = sum(len(enumerate_spans(M, x, y)) for x in range(2) for y in range(2))
    assert sum(1 for line in dot.splitlines() if line.strip().startswith("n") and "->" not in line) == n


# determinism ------------------------------------------------------------------------
def test_repeated_runs_are_byte_identical():
    a = run(["check-bivariant", "P2-all", "--functor", "slice", "--dictionary"])
    b = run(["check-bivariant", "P2-all", "--functor", "slice", "--dictionary"])
    assert a == b


def test_suite_subset_independent_of_jobs():
    keys = ["corr:ONE", "compose:FS4", "twisted:ARROW{a}", "split:P2-allxONE"]
    assert json.dumps(run_suite(keys, 1)) == json.dumps(run_suite(keys, 2))


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "corrcalc.cli", "check-category", "ONE",
                          "--format", "text"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.startswith("holds check_category")
