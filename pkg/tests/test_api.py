import pytest
from fastapi.testclient import TestClient

from app.main import app

GOLDEN = {"p": 3, "k": 1, "classes": [{"form": [1, -1, -1], "coeff": 1}]}


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_root_and_health(client):
    assert client.get("/").json()["status"] == "ok"
    assert client.get("/health").json() == {"status": "healthy"}


def test_minpoly(client):
    r = client.get("/rpf/minpoly/5")
    assert r.status_code == 200
    assert r.json() == {"p": 5, "minpoly": [1, -1, -1]}


def test_minpoly_rejects_small_p(client):
    assert client.get("/rpf/minpoly/2").status_code == 422


def test_generators(client):
    body = client.get("/rpf/generators/4").json()
    assert body["S"]["b"] == ["0/1", "1/1"]


def test_cycle(client):
    body = client.get("/rpf/cycle", params={"p": 3, "form": "1,-1,-1"}).json()
    assert body["exponents"] == [2, 1]
    assert body["symmetric"] is True


def test_cycle_not_simple(client):
    r = client.get("/rpf/cycle", params={"p": 3, "form": "1,3,1"})
    assert r.status_code == 200
    assert r.json()["symmetric"] is not None


def test_classes(client):
    body = client.get("/rpf/classes", params={"p": 3, "word_len": 2}).json()
    assert any(c["class_tag"] == '[["1/1"],["-1/1"],["-1/1"]]' for c in body["classes"])
    assert client.get("/rpf/classes", params={"p": 3, "word_len": 50}).status_code == 422


def test_build_and_verify(client):
    built = client.post("/rpf/build", json=GOLDEN)
    assert built.status_code == 200
    rpf = built.json()["rpf"]
    report = client.post("/rpf/verify", json={"rpf": rpf, "k": 1}).json()
    assert report["passed"] is True
    report = client.post("/rpf/verify", json={"spec": GOLDEN, "numeric_check": 2}).json()
    assert report["passed"] is True and report["pole_audit"]["ok"] is True
    assert report["numeric"]["ok"] is True


def test_verify_rejects_non_rpf(client):
    one_over_z = {"field": {"p": 3, "D": None}, "num": [["1/1"]], "den": [["0/1"], ["1/1"]]}
    report = client.post("/rpf/verify", json={"rpf": one_over_z, "k": 2}).json()
    assert report["passed"] is False


def test_verify_needs_input(client):
    assert client.post("/rpf/verify", json={}).status_code == 422


def test_general_mode_malformed(client):
    body = dict(GOLDEN, mode="general")
    r = client.post("/rpf/build", json=body)
    assert r.status_code == 400
    assert "MalformedCombination" in r.json()["detail"]
