import pytest
from fastapi.testclient import TestClient

from wqosep.main import app

EVEN_A = {"states": ["p", "q"], "alphabet": ["a"], "initial": ["p"], "final": ["p"],
          "edges": [{"from": "p", "label": "a", "to": "q"}, {"from": "q", "label": "a", "to": "p"}]}
ODD_A = {**EVEN_A, "final": ["q"]}


@pytest.fixture
def client():
    with TestClient(app) as c:
        yield c


def test_health(client):
    assert client.get("/").json() == {"status": "ok"}
    assert client.get("/health").json() == {"status": "healthy"}


def test_compare(client):
    r = client.post("/orders/compare", json={"order": "mod:2", "alphabet": ["a", "b"], "u": "ab", "v": "abab"})
    assert r.status_code == 200
    assert r.json() == {"result": True}


def test_bad_order_is_a_client_error(client):
    r = client.post("/orders/compare", json={"order": "shuffle", "alphabet": ["a", "b"], "u": "a", "v": "a"})
    assert r.status_code == 400
    assert r.json()["error"] == "OrderSyntaxError"


def test_up_word_uses_edge_aliases(client):
    r = client.post("/orders/up-word", json={"order": "subword", "alphabet": ["a", "b"], "word": "ab"})
    assert r.status_code == 200
    edge = r.json()["automaton"]["edges"][0]
    assert {"from", "label", "to"} <= set(edge)


def test_kappa(client):
    r = client.post("/patterns/kappa", json={"d": 2, "word": "abba"})
    assert r.json() == {"d": 2, "profile": {"1": ["a", "b"], "2": ["a", "b"]}, "period": 1}
    assert client.post("/patterns/kappa", json={"d": 0, "word": "a"}).status_code == 422


def test_period_and_irreducible(client):
    assert client.post("/patterns/period", json={"d": 4, "word": "abab"}).json() == {"d": 4, "period": 2}
    r = client.post("/patterns/irreducible", json={"pattern": "a (abba)", "d": 2, "alphabet": ["a", "b"]})
    assert r.json() == {"result": True}


def test_closures(client):
    r = client.post("/closures/down", json={"order": "subword", "automaton": EVEN_A})
    assert r.status_code == 200
    assert r.json()["automaton"]["alphabet"] == ["a"]
    assert client.post("/closures/ideals", json={"order": "subword", "automaton": EVEN_A}).json() == ["(a)*"]
    assert client.post("/closures/up", json={"order": "mod:2", "automaton": EVEN_A}).status_code == 200


def test_malformed_automaton_is_unprocessable(client):
    bad = {**EVEN_A, "edges": [{"from": "p", "label": "b", "to": "q"}]}
    r = client.post("/closures/down", json={"order": "subword", "automaton": bad})
    assert r.status_code == 422
    assert r.json()["error"] == "AutomatonFormatError"


def test_ptl_separation(client):
    r = client.post("/separability/ptl", json={"order": "mod:2", "left": EVEN_A, "right": ODD_A})
    body = r.json()
    assert body["verdict"] == "separable"
    assert body["formula_text"] == "↑ε"
    assert "certificate" not in body
    r = client.post("/separability/ptl", json={"left": EVEN_A, "right": ODD_A})
    assert r.json()["certificate"] == "(a)*"


def test_mod_separation(client):
    body = client.post("/separability/mod", json={"left": EVEN_A, "right": ODD_A}).json()
    assert body["verdict"] == "separable"
    assert body["d_used"] == 2
    body = client.post("/separability/mod", json={"left": EVEN_A, "right": ODD_A, "d": 1}).json()
    assert body["verdict"] == "inseparable"
    assert body["d_used"] == 1


def test_mod_bound(client):
    assert client.get("/separability/mod-bound/2").json() == {"m": 2, "d": 80640}
    assert client.get("/separability/mod-bound/9").status_code == 400
