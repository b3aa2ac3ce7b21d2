import csv
import io
import json

import pytest

from quasiwidth.analysis import CSV_COLUMNS
from quasiwidth.cli import EXIT_CERT, EXIT_INPUT, EXIT_OK, EXIT_VERIFY, build_parser, main

FAST = ["--samples", "200"]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_prints_constants(capsys):
    code, out, _ = run(["verify", "--format", "csv"], capsys)
    assert code == EXIT_OK
    assert "0.881373587" in out and "1.146215835" in out


def test_verify_json(capsys):
    code, out, err = run(["verify"], capsys)
    data = json.loads(out)
    assert code == EXIT_OK and data["ok"] and "0.881373587" in err
    assert list(data) == sorted(data)


def test_verify_failure_exit_code(capsys):
    assert run(["verify", "--tol", "-1"], capsys)[0] == EXIT_VERIFY


def test_gen_writes_loadable_curve(tmp_path, capsys):
    path = tmp_path / "c.json"
    code, _, err = run(["gen", "cn", "--n", "2", "--out", str(path)], capsys)
    assert code == EXIT_OK and json.loads(err)["certificate"]["ok"]
    code, out, _ = run(["analyze", str(path), "--seed", "0", "--format", "csv"] + FAST, capsys)
    assert code == EXIT_OK


def test_gen_certificate_failure(capsys):
    assert run(["gen", "cn", "--n", "1", "--eps", "0.9"], capsys)[0] == EXIT_CERT


def test_gen_custom_planar_schema(tmp_path, capsys):
    src = tmp_path / "p.json"
    src.write_text(json.dumps({"plane_arcs": [{"segment": [[0, 0], [1, 0]]}, {"segment": [[1, 0], [0, 1]]},
                                              {"segment": [[0, 1], [0, 0]]}]}))
    code, out, _ = run(["gen", "custom", "--curve", str(src)], capsys)
    assert code == EXIT_OK and len(json.loads(out)["arcs"]) == 3
    assert run(["gen", "custom"], capsys)[0] == EXIT_INPUT


def test_invalid_inputs(tmp_path, capsys):
    assert run(["analyze", "missing.json", "--seed", "1"], capsys)[0] == EXIT_INPUT
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--family", "circle"])  # --seed is required
    assert exc.value.code == EXIT_INPUT
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_INPUT
    assert run(["analyze", "--family", "circle", "--seed", "1", "--samples", "4"], capsys)[0] == EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["analyze", str(bad), "--seed", "1"], capsys)[0] == EXIT_INPUT
    assert run(["analyze", "--seed", "1"], capsys)[0] == EXIT_INPUT
    capsys.readouterr()


def test_self_crossing_curve_is_invalid(tmp_path, capsys):
    src = tmp_path / "bow.json"
    src.write_text(json.dumps({"plane_arcs": [{"segment": [[0, 0], [1, 1]]}, {"segment": [[1, 1], [1, 0]]},
                                              {"segment": [[1, 0], [0, 1]]}, {"segment": [[0, 1], [0, 0]]}]}))
    assert run(["analyze", str(src), "--seed", "1"], capsys)[0] == EXIT_INPUT


def test_analyze_csv_columns(capsys):
    code, out, _ = run(["analyze", "--family", "cn", "--n", "1", "2", "--seed", "3", "--format", "csv"] + FAST,
                       capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and tuple(rows[0]) == CSV_COLUMNS
    assert [r["n"] for r in rows] == ["1", "2"]
    assert out.splitlines()[0] == ",".join(CSV_COLUMNS)


def test_analyze_json_embeds_config(capsys):
    code, out, _ = run(["analyze", "--family", "square", "--seed", "3"] + FAST, capsys)
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["config"]["seed"] == 3 and data["config"]["N"] == 200
    assert data["results"][0]["config"] == data["config"]
    assert data["width_dominates"] and data["results"][0]["lower_bounds"]
    assert out == json.dumps(data, sort_keys=True, indent=1) + "\n"


def test_outputs_are_byte_identical(tmp_path, capsys):
    path = tmp_path / "a.json"
    runs = []
    for _ in range(2):
        assert run(["analyze", "--family", "gn", "--n", "4", "--seed", "7", "--out", str(path)] + FAST, capsys)[0] == 0
        runs.append(path.read_bytes())
    assert runs[0] == runs[1]


def test_probe_with_maps_file(tmp_path, capsys):
    maps = tmp_path / "maps.json"
    maps.write_text(json.dumps({"maps": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
                                         [[[2, 0], [1, 1]], [[0, 0], [1, 0]]]]}))
    code, out, _ = run(["probe", "--family", "cn", "--n", "1", "--seed", "0", "--maps", str(maps)] + FAST, capsys)
    data = json.loads(out)
    assert code == EXIT_OK and len(data["probes"][0]["entries"]) == 2
    e = data["probes"][0]["entries"]
    assert abs(e[0]["boundary_width_est"] - e[1]["boundary_width_est"]) < 1e-6
    bad = tmp_path / "badmaps.json"
    bad.write_text(json.dumps({"maps": [[[[1, 0], [1, 0]], [[1, 0], [1, 0]]]]}))
    assert run(["probe", "--family", "cn", "--seed", "0", "--maps", str(bad)], capsys)[0] == EXIT_INPUT
    assert run(["probe", "--family", "cn", "--seed", "0"], capsys)[0] == EXIT_INPUT


def test_parser_defaults():
    args = build_parser().parse_args(["analyze", "--family", "circle", "--seed", "0"])
    assert (args.samples, args.face_samples, args.refine, args.eps, args.format) == (2000, 5, 2, 0.2, "json")


def test_gen_families_arc_counts(capsys):
    code, out, _ = run(["gen", "circle"], capsys)
    assert code == EXIT_OK and len(json.loads(out)["arcs"]) == 1
    code, out, _ = run(["gen", "gn", "--n", "16"], capsys)
    assert code == EXIT_OK and len(json.loads(out)["arcs"]) == 8


def test_gen_cn3_certificate_angles(capsys):
    code, _, err = run(["gen", "cn", "--n", "3", "--eps", "0.2"], capsys)
    cert = json.loads(err)["certificate"]
    crossing = [a for a in cert["angles"].values() if not isinstance(a, dict)]
    assert code == EXIT_OK and cert["ok"] and crossing
    assert min(crossing) > 2 * 0.2


def test_probe_identity_reproduces_analyze(tmp_path, capsys):
    maps = tmp_path / "id.json"
    maps.write_text(json.dumps({"maps": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}))
    base = ["--family", "gn", "--n", "8", "--seed", "0"] + FAST
    _, out, _ = run(["analyze"] + base, capsys)
    ref = json.loads(out)["results"][0]
    _, out, _ = run(["probe", "--maps", str(maps), "--with-width"] + base, capsys)
    e = json.loads(out)["probes"][0]["entries"][0]
    assert abs(e["width_est"] - ref["width_est"]) < 1e-12
    assert abs(e["boundary_width_est"] - ref["boundary_width_est"]) < 1e-12


def test_probe_random_isometries_of_circle(tmp_path, capsys):
    import numpy as np

    from quasiwidth.moebius import random_mobius

    rng = np.random.default_rng(3)
    ms = [random_mobius(rng, 0.8).matrix for _ in range(6)]
    maps = tmp_path / "iso.json"
    maps.write_text(json.dumps({"maps": [[[[z.real, z.imag] for z in row] for row in m.tolist()] for m in ms]}))
    code, out, _ = run(["probe", "--family", "circle", "--seed", "0", "--maps", str(maps), "--with-width"], capsys)
    entries = json.loads(out)["probes"][0]["entries"]
    assert code == EXIT_OK and len(entries) == 6
    assert all(e["width_est"] <= 0.02 and e["boundary_width_est"] <= 0.02 for e in entries)
