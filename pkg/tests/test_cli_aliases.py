import json

from gasketbvp import cli


def test_half_sg3_alias(tmp_path, capsys):
    data = tmp_path / "f.json"
    data.write_text(json.dumps({
        "schema": 1, "q1": "1", "q0": "0", "default_tail": "0",
    }))
    code = cli.main(["solve", "--domain", "half-sg3", "--data", str(data),
                     "--level", "2"])
    out = capsys.readouterr().out
    assert code == 0
    # level-2 vertex table of the closed half domain: 16 contained cells
    # whose corners dedup to 27 vertices
    assert len(out.strip().splitlines()) - 1 == 27


def test_lower_rational_needs_dyadic(tmp_path, capsys):
    data = tmp_path / "g.json"
    data.write_text(json.dumps({
        "schema": 1, "q1": "1", "q2": "0", "default_tail": "0",
    }))
    code = cli.main(["solve", "--domain", "lower", "--lambda", "1/3",
                     "--data", str(data), "--mode", "rational"])
    assert code == 2
    assert cli.main(["solve", "--domain", "lower", "--lambda", "1/3",
                     "--data", str(data), "--mode", "float"]) == 0
    capsys.readouterr()
