"""Shared fixtures: configured gateway apps with seeded users and catalogs."""

import base64
import json

import pytest
from starlette.testclient import TestClient

from qfaas.config import Config
from qfaas.gateway import create_app

ADMIN_PW = "admin-pw"
DEV_PW = "dev-pw"
ALICE_PW = "alice-pw"
BOB_PW = "bob-pw"

SEED_USERS = [
    {"username": "dev", "password": DEV_PW, "role": "developer"},
    {"username": "alice", "password": ALICE_PW, "role": "enduser"},
    {"username": "bob", "password": BOB_PW, "role": "enduser"},
]

QRNG_SRC = """fn qrng template qiskit {
    param n : int min=1 max=24 default=4
    circuit {
        qubits n
        repeat q in 0..n { h q }
        measure all
    }
    post top | to_int
}
"""

BELL_SRC = """fn bell template qiskit {
    circuit {
        qubits 2
        h 0
        cx 0 1
        measure all
    }
    post histogram
}
"""


def b64(text: str) -> str:
    return base64.b64encode(text.encode()).decode()


@pytest.fixture
def app_factory(tmp_path):
    clients = []

    def make(catalog: list[dict] | None = None, **overrides) -> TestClient:
        index = len(clients)
        config = Config(
            data_dir=tmp_path / f"data{index}",
            pbkdf2_iterations=600,
            admin_password=ADMIN_PW,
            seed_users=list(SEED_USERS),
            scheduler_tick_seconds=0.05,
            sim_workers=2,
        )
        for key, value in overrides.items():
            setattr(config, key, value)
        if catalog is not None:
            path = tmp_path / f"catalog{index}.json"
            path.write_text(json.dumps({"backends": catalog}))
            config.catalog_path = path
        client = TestClient(create_app(config))
        client.__enter__()
        clients.append(client)
        return client

    yield make
    for client in clients:
        client.__exit__(None, None, None)


@pytest.fixture
def client(app_factory) -> TestClient:
    return app_factory()


def login(client: TestClient, username: str, password: str) -> dict:
    response = client.post(
        "/api/auth/login", json={"username": username, "password": password}
    )
    assert response.status_code == 200, response.text
    return {"Authorization": f"Bearer {response.json()['access_token']}"}


def deploy(client: TestClient, headers: dict, name: str, source: str, *, template="qiskit",
           public=True, wait=True) -> str:
    body = {
        "name": name,
        "template": template,
        "fnCode": {"requirements": "", "handlerPy": b64(source), "handlerQs": ""},
        "public": public,
    }
    response = client.post("/api/functions", json=body, headers=headers)
    assert response.status_code == 202, response.text
    identifier = response.json()["function"]["identifier"]
    if wait:
        wait_deployed(client, headers, identifier)
    return identifier


def wait_deployed(client: TestClient, headers: dict, identifier: str, timeout=10.0) -> str:
    import time

    deadline = time.time() + timeout
    while time.time() < deadline:
        record = client.get(f"/api/functions/{identifier}", headers=headers).json()
        if record["status"] in ("Ready", "FailedDeploy"):
            return record["status"]
        time.sleep(0.02)
    raise AssertionError(f"deployment of {identifier} did not settle")


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        word = "PASS" if report.passed else ("FAIL" if report.failed else "SKIPPED")
        name = report.nodeid.split("::")[-1]
        print(f"\n[acceptance] {word}: {name}", flush=True)
