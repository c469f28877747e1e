import json
import subprocess
import sys

import pytest
from fastapi.testclient import TestClient

from contactlab import fronts
from contactlab.jsonio import canonical_json
from contactlab.service import create_app
from contactlab.cli import main as cli_main


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def _run_cli(args, tmp_path=None):
    proc = subprocess.run(
        [sys.executable, "-m", "contactlab.cli"] + args,
        capture_output=True,
        timeout=300,
    )
    return proc


def test_health(client):
    r = client.get("/api/health")
    assert r.status_code == 200
    assert r.text == "ok"


def test_front_invariants_endpoint(client):
    r = client.post("/api/front/invariants", json={"word": "L1 R1"})
    assert r.status_code == 200
    body = json.loads(r.content)
    assert body["tb"] == -1 and body["r"] == 0


def test_front_move_endpoint(client):
    r = client.post(
        "/api/front/move",
        json={"word": "L1 R1", "move": "I_above", "index": 1, "strand": 1},
    )
    assert r.status_code == 200
    body = json.loads(r.content)
    assert body["invariants"]["tb"] == -1


def test_front_move_pattern_mismatch_is_422(client):
    r = client.post(
        "/api/front/move",
        json={"word": "L1 R1", "move": "III", "index": 0},
    )
    assert r.status_code == 422
    assert "error" in json.loads(r.content)


def test_contact_check_endpoint(client):
    r = client.post("/api/contact/check", json={"form": "dz + x*dy", "box": [-1, 1]})
    assert r.status_code == 200
    body = json.loads(r.content)
    assert body["contact"] is True
    assert body["min_abs_coefficient"] == 1.0


def test_contact_check_rejects_dz(client):
    r = client.post("/api/contact/check", json={"form": "dz"})
    assert r.status_code == 200
    body = json.loads(r.content)
    assert body["contact"] is False


def test_foliation_endpoint_sphere(client):
    surface = {
        "sigma": ["sin(pi*u)*cos(2*pi*v)", "sin(pi*u)*sin(2*pi*v)", "cos(pi*u)"],
        "periodic": [False, True],
        "topology": "sphere",
        "degenerate_points": [[0, 0], [1, 0]],
    }
    r = client.post(
        "/api/foliation/run",
        json={"form": "dz + x*dy - y*dx", "surface": surface},
    )
    assert r.status_code == 200
    body = json.loads(r.content)
    assert len(body["singularities"]) == 2
    assert body["chi_computed"] == 2
    assert body["genus_bound"]["satisfied"]


def test_dividing_set_endpoint_torus(client):
    surface = {
        "sigma": ["sin(2*pi*v)", "u", "v"],
        "periodic": [True, True],
        "topology": "torus",
        "ambient_periods": [1.0, 1.0],
    }
    r = client.post(
        "/api/foliation/dividing-set",
        json={"form": "standard", "surface": surface},
    )
    assert r.status_code == 200
    body = json.loads(r.content)
    assert body["status"] == "certified"
    assert len(body["curves"]) == 2


def test_front_geometry_endpoint(client):
    r = client.post("/api/front/geometry", json={"word": fronts.TREFOIL})
    assert r.status_code == 200
    body = json.loads(r.content)
    assert body["svg"].startswith("<svg")
    assert body["legendrian_residual"] < 1e-9
    assert len(body["space_curve"]) > 50


def test_stabilize_endpoint(client):
    r = client.post(
        "/api/front/stabilize",
        json={"word": "L1 R1", "sign": "+", "index": 1, "strand": 1},
    )
    body = json.loads(r.content)
    assert body["invariants"]["tb"] == -2
    assert body["invariants"]["r"] == 1


def test_moves_listing_endpoint(client):
    r = client.post("/api/front/moves", json={"word": "L1 R1"})
    body = json.loads(r.content)
    names = {m["move"] for m in body["moves"]}
    assert "I_above" in names and "I_below" in names
    # the trefoil admits a II expansion at its second left cusp
    r2 = client.post("/api/front/moves", json={"word": fronts.TREFOIL})
    names2 = {(m["move"], m["index"]) for m in json.loads(r2.content)["moves"]}
    assert ("II_left_above", 1) in names2


def test_cli_front_invariants_exit_zero(capsys):
    rc = cli_main(["front-invariants", "L1 R1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert json.loads(out)["tb"] == -1


def test_cli_invalid_word_exit_two(capsys):
    rc = cli_main(["front-invariants", "L1 R2"])
    assert rc == 2
    err = capsys.readouterr().err
    assert "out of range" in json.loads(err)["error"]


def test_cli_unknown_subcommand_exit_64(capsys):
    rc = cli_main(["frobnicate"])
    assert rc == 64


def test_cli_check_contact(capsys):
    rc = cli_main(["check-contact", "--form", "dz + x*dy", "--box", "-1,1"])
    assert rc == 0
    body = json.loads(capsys.readouterr().out)
    assert body["contact"] is True


def test_cli_and_service_byte_identical(client, capsys, tmp_path):
    pairs = [
        (["front-invariants", fronts.TREFOIL], "/api/front/invariants", {"word": fronts.TREFOIL}),
        (["bennequin", "L1 R1"], "/api/front/bennequin", {"word": "L1 R1"}),
        (
            ["check-contact", "--form", "standard", "--box", "-1,1"],
            "/api/contact/check",
            {"form": "standard", "box": [-1, 1]},
        ),
    ]
    for cli_args, endpoint, payload in pairs:
        out_file = tmp_path / "artifact.json"
        rc = cli_main(cli_args + ["--out", str(out_file)])
        assert rc == 0
        cli_bytes = out_file.read_bytes()
        response = client.post(endpoint, content=json.dumps(payload))
        assert response.status_code == 200
        assert cli_bytes == response.content, endpoint


def test_cli_outputs_are_deterministic(tmp_path):
    f1 = tmp_path / "a.json"
    f2 = tmp_path / "b.json"
    for f in (f1, f2):
        rc = cli_main(["bennequin", fronts.TREFOIL, "--out", str(f)])
        assert rc == 0
    assert f1.read_bytes() == f2.read_bytes()


def test_cli_render_svg(tmp_path):
    out = tmp_path / "front.svg"
    rc = cli_main(["render", "--word", "L1 R1", "--format", "svg", "--out", str(out)])
    assert rc == 0
    assert out.read_text().startswith("<svg")


def test_cli_foliate_with_surface_file(tmp_path, capsys):
    surface = {
        "sigma": ["sin(pi*u)*cos(2*pi*v)", "sin(pi*u)*sin(2*pi*v)", "cos(pi*u)"],
        "periodic": [False, True],
        "topology": "sphere",
        "degenerate_points": [[0, 0], [1, 0]],
    }
    path = tmp_path / "sphere.json"
    path.write_text(json.dumps(surface))
    rc = cli_main(["foliate", "--form", "rotational", "--surface", str(path)])
    assert rc == 0
    body = json.loads(capsys.readouterr().out)
    assert len(body["singularities"]) == 2
