"""Smoke test for the extension module.

Build and copy the library next to this file first:

    cargo build --release -p holoindex-py --features extension-module
    cp target/release/libholoindex.so python/holoindex.so
    python3 python/smoke_test.py
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

import holoindex  # noqa: E402


def main():
    f = holoindex.Germ(["z1 + z1^2", "z2 + z2^2"], codim=2)
    assert f.dicritical_test() == {"dicritical": False, "order": 2}
    v = f.verify_index()
    assert v["residues"] == [("[1:0]", "-1"), ("[1:1]", "1"), ("[0:1]", "-1")], v
    assert v["sum"] == v["expected"] == "-1" and v["pass"]

    charts = f.blow_up()
    assert len(charts) == 2
    s = charts[0].section("X_f")
    pts, orbits = s.singular_points()
    assert pts == [["0", "0"], ["0", "1"]] and orbits == [], (pts, orbits)
    assert [s.residue(p) for p in pts] == ["-1", "1"]

    g = holoindex.Germ(["z1 + z1^2*z2", "z2 + z1*z2^2"])
    assert g.contact_profile()["tangential"]
    assert holoindex.curve_branch_residue(g, "z1", "z2", ["0", "t"]) == g.section().residue(["0", "0"])

    try:
        holoindex.Germ(["z1", "z2"], codim=2)
    except ValueError as e:
        assert "IdentityMap" in str(e)
    else:
        raise AssertionError("identity accepted")

    corpus = pathlib.Path(__file__).resolve().parents[1] / "crates/core/tests/corpus"
    problem = (corpus / "index_p2_diagonal.problem.json").read_text()
    report = holoindex.run_problem(problem)
    assert report == (corpus / "index_p2_diagonal.expected.json").read_text()
    assert json.loads(report)["status"] == "pass"
    print("smoke test passed")


if __name__ == "__main__":
    main()
