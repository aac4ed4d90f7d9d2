"""HTTP API: auth, function CRUD, the invocation sequence, jobs, metrics."""

import time

import pytest
from starlette.routing import Route

from conftest import (
    ADMIN_PW,
    ALICE_PW,
    BELL_SRC,
    BOB_PW,
    DEV_PW,
    QRNG_SRC,
    b64,
    deploy,
    login,
    wait_deployed,
)

MOCK_CATALOG = [
    {"name": "local-sv", "provider": "local", "kind": "simulator", "qubits": 24},
    {
        "name": "mock-slow", "provider": "mock-x", "kind": "qpu", "qubits": 8,
        "avg_seconds_per_job": 1.0,
    },
]


class TestLogin:
    def test_valid_credentials_issue_token(self, client):
        response = client.post(
            "/api/auth/login", json={"username": "admin", "password": ADMIN_PW}
        )
        doc = response.json()
        assert response.status_code == 200
        assert doc["token_type"] == "bearer"
        assert doc["expires_in"] == 3600
        assert len(doc["access_token"]) > 20

    def test_wrong_password_is_401(self, client):
        response = client.post(
            "/api/auth/login", json={"username": "admin", "password": "nope"}
        )
        assert response.status_code == 401
        assert response.json()["error"] == "InvalidCredentials"

    def test_unknown_user_is_401(self, client):
        response = client.post(
            "/api/auth/login", json={"username": "ghost", "password": "x"}
        )
        assert response.status_code == 401

    def test_extra_field_rejected(self, client):
        response = client.post(
            "/api/auth/login",
            json={"username": "admin", "password": ADMIN_PW, "grant_type": "password"},
        )
        assert response.status_code == 422
        assert response.json()["error"] == "ValidationError"

    def test_expired_token_rejected_everywhere(self, client):
        headers = login(client, "admin", ADMIN_PW)
        token = headers["Authorization"].split(" ", 1)[1]
        client.app.state.tokens.expire_now(token)
        response = client.get("/api/backends", headers=headers)
        assert response.status_code == 401

    def test_me_reports_identity_and_role(self, client):
        headers = login(client, "alice", ALICE_PW)
        doc = client.get("/api/me", headers=headers).json()
        assert doc == {"username": "alice", "role": "enduser"}


class TestAuthSweep:
    def test_every_route_except_login_and_metrics_requires_a_token(self, client):
        substitutions = {"identifier": "qiskit-qrng", "job_id": "some-job"}
        checked = []
        for route in client.app.router.routes:
            if not isinstance(route, Route):
                continue  # static mounts
            path = route.path
            for name, value in substitutions.items():
                path = path.replace("{" + name + "}", value)
            for method in route.methods - {"HEAD", "OPTIONS"}:
                response = client.request(method, path)
                checked.append((method, route.path))
                if (method, route.path) in (
                    ("POST", "/api/auth/login"),
                    ("GET", "/metrics"),
                ):
                    assert response.status_code != 401, (method, path)
                else:
                    assert response.status_code == 401, (method, path)
                    assert response.json()["error"] == "Unauthorized"
        assert ("POST", "/api/function/{identifier}") in checked
        assert len(checked) >= 11

    def test_garbage_token_rejected(self, client):
        response = client.get("/api/jobs", headers={"Authorization": "Bearer junk"})
        assert response.status_code == 401

    def test_non_bearer_scheme_rejected(self, client):
        response = client.get("/api/jobs", headers={"Authorization": "Basic abc"})
        assert response.status_code == 401


class TestFunctionEndpoints:
    def test_create_returns_202_with_deployment(self, client):
        headers = login(client, "dev", DEV_PW)
        body = {
            "name": "qrng",
            "template": "qiskit",
            "fnCode": {"requirements": "", "handlerPy": b64(QRNG_SRC), "handlerQs": ""},
            "public": True,
        }
        response = client.post("/api/functions", json=body, headers=headers)
        assert response.status_code == 202
        doc = response.json()
        assert doc["function"]["identifier"] == "qiskit-qrng"
        assert doc["function"]["status"] in ("Registered", "Validating", "Building",
                                             "Deploying", "Ready")
        assert wait_deployed(client, headers, "qiskit-qrng") == "Ready"

    def test_duplicate_create_conflicts(self, client):
        headers = login(client, "dev", DEV_PW)
        deploy(client, headers, "qrng", QRNG_SRC)
        body = {
            "name": "qrng",
            "template": "qiskit",
            "fnCode": {"requirements": "", "handlerPy": b64(QRNG_SRC), "handlerQs": ""},
            "public": True,
        }
        response = client.post("/api/functions", json=body, headers=headers)
        assert response.status_code == 409
        assert response.json()["error"] == "Conflict"

    def test_bad_name_rejected(self, client):
        headers = login(client, "dev", DEV_PW)
        body = {
            "name": "Qrng!",
            "template": "qiskit",
            "fnCode": {"requirements": "", "handlerPy": b64(QRNG_SRC), "handlerQs": ""},
            "public": True,
        }
        response = client.post("/api/functions", json=body, headers=headers)
        assert response.status_code == 422
        assert response.json()["error"] == "ValidationError"

    def test_unknown_body_field_rejected(self, client):
        headers = login(client, "dev", DEV_PW)
        response = client.post(
            "/api/functions",
            json={"name": "x", "template": "qiskit", "fnCode": {"handlerPy": b64(QRNG_SRC)},
                  "public": True, "replicas": 3},
            headers=headers,
        )
        assert response.status_code == 422

    def test_enduser_cannot_create(self, client):
        headers = login(client, "alice", ALICE_PW)
        body = {
            "name": "qrng",
            "template": "qiskit",
            "fnCode": {"requirements": "", "handlerPy": b64(QRNG_SRC), "handlerQs": ""},
            "public": True,
        }
        response = client.post("/api/functions", json=body, headers=headers)
        assert response.status_code == 403

    def test_get_unknown_is_404(self, client):
        headers = login(client, "dev", DEV_PW)
        assert client.get("/api/functions/qiskit-ghost", headers=headers).status_code == 404

    def test_private_function_visibility(self, client):
        dev = login(client, "dev", DEV_PW)
        alice = login(client, "alice", ALICE_PW)
        deploy(client, dev, "secret", QRNG_SRC, public=False)

        listed = client.get("/api/functions", headers=alice).json()["functions"]
        assert all(f["identifier"] != "qiskit-secret" for f in listed)
        assert client.get("/api/functions/qiskit-secret", headers=alice).status_code == 403
        assert client.get("/api/functions/qiskit-secret", headers=dev).status_code == 200

    def test_failed_deploy_not_listed_to_endusers(self, client):
        dev = login(client, "dev", DEV_PW)
        alice = login(client, "alice", ALICE_PW)
        broken = "fn broken { circuit { qubits 1\n h 0 } }"
        client.post(
            "/api/functions",
            json={"name": "broken", "template": "qiskit", "public": True,
                  "fnCode": {"requirements": "", "handlerPy": b64(broken), "handlerQs": ""}},
            headers=dev,
        )
        assert wait_deployed(client, dev, "qiskit-broken") == "FailedDeploy"
        listed = client.get("/api/functions", headers=alice).json()["functions"]
        assert all(f["identifier"] != "qiskit-broken" for f in listed)

    def test_deployments_endpoint_shows_stage_logs(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        doc = client.get("/api/functions/qiskit-qrng/deployments", headers=dev).json()
        stages = doc["deployments"][-1]["stages"]
        assert [s["name"] for s in stages] == ["Validate", "Build", "Deploy"]
        assert all(s["status"] == "passed" for s in stages)

    def test_update_by_non_author_forbidden(self, client):
        dev = login(client, "dev", DEV_PW)
        admin = login(client, "admin", ADMIN_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        other = client.app.state.users.create_user("mallory", "pw-mallory", "developer")
        assert other.username == "mallory"
        mallory = login(client, "mallory", "pw-mallory")
        response = client.put(
            "/api/functions/qiskit-qrng", json={"public": False}, headers=mallory
        )
        assert response.status_code == 403
        assert client.put(
            "/api/functions/qiskit-qrng", json={"public": False}, headers=admin
        ).status_code == 200

    def test_update_source_bumps_version(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        new_src = QRNG_SRC.replace("default=4", "default=3")
        response = client.put(
            "/api/functions/qiskit-qrng",
            json={"fnCode": {"requirements": "", "handlerPy": b64(new_src), "handlerQs": ""}},
            headers=dev,
        )
        assert response.status_code == 200
        assert response.json()["version"] == 2
        wait_deployed(client, dev, "qiskit-qrng")

    def test_delete_then_invoke_is_404(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        assert client.delete("/api/functions/qiskit-qrng", headers=dev).status_code == 204
        response = client.post(
            "/api/function/qiskit-qrng", json={"input": 2}, headers=dev
        )
        assert response.status_code == 404


class TestInvoke:
    def test_qrng_end_to_end(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        response = client.post(
            "/api/function/qiskit-qrng",
            json={"input": 4, "shots": 1024, "backendName": "local-sv"},
            headers=dev,
        )
        assert response.status_code == 200, response.text
        doc = response.json()
        assert set(doc) == {"data", "details"}
        assert 0 <= doc["data"] < 16
        details = doc["details"]
        assert details["status"] == "Completed"
        assert details["backend"] == "local-sv"
        assert sum(details["counts"].values()) == 1024
        assert details["circuit"].startswith("qubits 4")
        assert details["shots"] == 1024

    def test_fixed_seed_is_reproducible(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        request = {"input": 3, "shots": 512, "seed": 424242, "backendName": "local-sv"}
        first = client.post("/api/function/qiskit-qrng", json=request, headers=dev).json()
        second = client.post("/api/function/qiskit-qrng", json=request, headers=dev).json()
        assert first["details"]["counts"] == second["details"]["counts"]
        assert first["data"] == second["data"]

    def test_enduser_can_invoke_public_function(self, client):
        dev = login(client, "dev", DEV_PW)
        alice = login(client, "alice", ALICE_PW)
        deploy(client, dev, "bell", BELL_SRC)
        response = client.post(
            "/api/function/qiskit-bell", json={"backendName": "local-sv"}, headers=alice
        )
        assert response.status_code == 200
        counts = response.json()["details"]["counts"]
        assert set(counts) <= {"00", "11"}

    def test_auto_select_prefers_smallest_idle_device(self, client):
        # Default catalog at rest: all waits 0, so the 5-qubit mock QPU wins
        # for a 2-qubit circuit and its readout noise shows up in the counts.
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "bell", BELL_SRC)
        response = client.post(
            "/api/function/qiskit-bell", json={"shots": 256}, headers=dev
        )
        assert response.status_code == 200
        assert response.json()["details"]["backend"] == "mock-ibm-q5"

    def test_private_function_invoke_forbidden_to_others(self, client):
        dev = login(client, "dev", DEV_PW)
        alice = login(client, "alice", ALICE_PW)
        deploy(client, dev, "secret", QRNG_SRC, public=False)
        assert client.post(
            "/api/function/qiskit-secret", json={"input": 2}, headers=alice
        ).status_code == 403
        assert client.post(
            "/api/function/qiskit-secret", json={"input": 2, "backendName": "local-sv"}, headers=dev
        ).status_code == 200

    def test_unknown_function_404(self, client):
        dev = login(client, "dev", DEV_PW)
        assert client.post(
            "/api/function/qiskit-ghost", json={}, headers=dev
        ).status_code == 404

    def test_failed_deploy_invoke_404(self, client):
        dev = login(client, "dev", DEV_PW)
        broken = "fn broken { circuit { qubits 1\n h 0 } }"
        client.post(
            "/api/functions",
            json={"name": "broken", "template": "qiskit", "public": True,
                  "fnCode": {"requirements": "", "handlerPy": b64(broken), "handlerQs": ""}},
            headers=dev,
        )
        wait_deployed(client, dev, "qiskit-broken")
        assert client.post(
            "/api/function/qiskit-broken", json={}, headers=dev
        ).status_code == 404

    @pytest.mark.parametrize(
        "body,fragment",
        [
            ({"input": 4, "shots": 0}, "shots"),
            ({"postProcessOnly": True}, "jobId"),
            ({"input": 4, "autoSelect": False}, "backendName"),
            ({"input": 4, "bogus": 1}, "schema"),
        ],
    )
    def test_422_request_violations(self, client, body, fragment):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        response = client.post("/api/function/qiskit-qrng", json=body, headers=dev)
        assert response.status_code == 422
        assert fragment.lower() in response.text.lower()

    def test_input_range_violation_is_422(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        response = client.post(
            "/api/function/qiskit-qrng", json={"input": 25}, headers=dev
        )
        assert response.status_code == 422
        assert response.json()["error"] == "RangeViolation"

    def test_textual_input_coerced(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        response = client.post(
            "/api/function/qiskit-qrng", json={"input": "3", "shots": 16, "backendName": "local-sv"}, headers=dev
        )
        assert response.status_code == 200
        assert 0 <= response.json()["data"] < 8

    def test_no_eligible_backend_503_with_reasons(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        response = client.post(
            "/api/function/qiskit-qrng",
            json={"input": 2, "provider": "nonexistent"},
            headers=dev,
        )
        assert response.status_code == 503
        doc = response.json()
        assert doc["error"] == "NoEligibleBackend"
        assert "local-sv" in doc["details"]

    def test_unknown_manual_backend_503(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        response = client.post(
            "/api/function/qiskit-qrng",
            json={"input": 2, "backendName": "ghost"},
            headers=dev,
        )
        assert response.status_code == 503
        assert response.json()["error"] == "UnknownBackend"

    def test_backend_down_503(self, app_factory):
        catalog = [
            {"name": "only-down", "provider": "mock-x", "kind": "simulator",
             "qubits": 8, "operational": False},
        ]
        client = app_factory(catalog=catalog)
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        response = client.post(
            "/api/function/qiskit-qrng",
            json={"input": 2, "backendName": "only-down"},
            headers=dev,
        )
        assert response.status_code == 503
        assert response.json()["error"] == "BackendDown"

    def test_capacity_exceeded_503_and_job_failed(self, app_factory):
        catalog = [
            {"name": "mock-tiny", "provider": "mock-x", "kind": "qpu", "qubits": 8,
             "avg_seconds_per_job": 2.0},
        ]
        client = app_factory(catalog=catalog, max_in_flight=1)
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        first = client.post(
            "/api/function/qiskit-qrng",
            json={"input": 2, "waitForResult": False},
            headers=dev,
        )
        assert first.status_code == 200
        second = client.post(
            "/api/function/qiskit-qrng",
            json={"input": 2, "waitForResult": False},
            headers=dev,
        )
        assert second.status_code == 503
        assert second.json()["error"] == "CapacityExceeded"
        jobs = client.get("/api/jobs?status=Failed", headers=dev).json()
        assert jobs["total"] == 1

    def test_no_wait_returns_queued_job(self, app_factory):
        client = app_factory(catalog=MOCK_CATALOG)
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "bell", BELL_SRC)
        t0 = time.time()
        response = client.post(
            "/api/function/qiskit-bell",
            json={"waitForResult": False, "backendName": "mock-slow", "shots": 32},
            headers=dev,
        )
        assert time.time() - t0 < 1.0
        doc = response.json()
        assert doc["data"] is None
        assert doc["details"]["status"] in ("Queued", "Running")
        job_id = doc["details"]["jobId"]

        deadline = time.time() + 5.0
        while time.time() < deadline:
            job = client.get(f"/api/job/{job_id}", headers=dev).json()
            if job["status"] == "Completed":
                break
            time.sleep(0.1)
        assert job["status"] == "Completed"
        assert sum(job["counts"].values()) == 32
        assert job["waiting_ms"] is not None and job["running_ms"] is not None

    def test_post_process_only_reruns_pipeline(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        first = client.post(
            "/api/function/qiskit-qrng",
            json={"input": 2, "shots": 64, "seed": 9, "backendName": "local-sv"},
            headers=dev,
        ).json()
        job_id = first["details"]["jobId"]
        again = client.post(
            "/api/function/qiskit-qrng",
            json={"postProcessOnly": True, "jobId": job_id},
            headers=dev,
        )
        assert again.status_code == 200
        doc = again.json()
        assert doc["data"] == first["data"]
        assert doc["details"]["postProcessOnly"] is True
        assert doc["details"]["counts"] == first["details"]["counts"]

    def test_post_process_only_rebinds_pipeline_params(self, client):
        dev = login(client, "dev", DEV_PW)
        dice = (
            "fn dice { param faces : int min=1 max=8 default=6\n"
            " circuit { qubits 3; repeat q in 0..3 { h q }\n measure all }\n"
            " post top | to_int | mod faces }"
        )
        client.post(
            "/api/functions",
            json={"name": "dice", "template": "qiskit", "public": True,
                  "fnCode": {"requirements": "", "handlerPy": b64(dice), "handlerQs": ""}},
            headers=dev,
        )
        wait_deployed(client, dev, "qiskit-dice")
        first = client.post(
            "/api/function/qiskit-dice",
            json={"shots": 128, "seed": 31, "backendName": "local-sv"},
            headers=dev,
        ).json()
        counts = first["details"]["counts"]
        best = max(counts.values())
        top = min(k for k, v in counts.items() if v == best)

        again = client.post(
            "/api/function/qiskit-dice",
            json={"postProcessOnly": True, "jobId": first["details"]["jobId"],
                  "input": {"faces": 2}},
            headers=dev,
        ).json()
        assert again["data"] == int(top, 2) % 2

    def test_post_process_only_unknown_job_404(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        response = client.post(
            "/api/function/qiskit-qrng",
            json={"postProcessOnly": True, "jobId": "b8a5f6fa-0000-0000-0000-000000000000"},
            headers=dev,
        )
        assert response.status_code == 404

    def test_post_process_only_foreign_job_403(self, client):
        dev = login(client, "dev", DEV_PW)
        alice = login(client, "alice", ALICE_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        job_id = client.post(
            "/api/function/qiskit-qrng", json={"input": 2, "shots": 8, "backendName": "local-sv"}, headers=dev
        ).json()["details"]["jobId"]
        response = client.post(
            "/api/function/qiskit-qrng",
            json={"postProcessOnly": True, "jobId": job_id},
            headers=alice,
        )
        assert response.status_code == 403


class TestVisibilityMatrix:
    def test_private_functions_never_leak_across_random_matrices(self, client):
        import random as _random

        rng = _random.Random(90210)
        dev = login(client, "dev", DEV_PW)
        alice = login(client, "alice", ALICE_PW)
        flags = {f"vis{i}": rng.random() < 0.5 for i in range(10)}
        for name, public in flags.items():
            deploy(client, dev, name, QRNG_SRC, public=public)

        listed = {f["identifier"] for f in
                  client.get("/api/functions", headers=alice).json()["functions"]}
        for name, public in flags.items():
            identifier = f"qiskit-{name}"
            if public:
                assert identifier in listed
                assert client.post(
                    f"/api/function/{identifier}",
                    json={"input": 1, "shots": 4, "backendName": "local-sv"},
                    headers=alice,
                ).status_code == 200
            else:
                assert identifier not in listed
                assert client.post(
                    f"/api/function/{identifier}", json={"input": 1}, headers=alice
                ).status_code == 403


class TestJobEndpoints:
    def test_owner_fetches_completed_job(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        invoked = client.post(
            "/api/function/qiskit-qrng", json={"input": 2, "shots": 32, "backendName": "local-sv"}, headers=dev
        ).json()
        job_id = invoked["details"]["jobId"]
        job = client.get(f"/api/job/{job_id}", headers=dev).json()
        assert job["status"] == "Completed"
        assert job["result_data"] == invoked["data"]
        assert sum(job["counts"].values()) == 32
        assert job["circuit_text"].startswith("qubits 2")

    def test_other_enduser_denied(self, client):
        dev = login(client, "dev", DEV_PW)
        bob = login(client, "bob", BOB_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        job_id = client.post(
            "/api/function/qiskit-qrng", json={"input": 2, "shots": 8, "backendName": "local-sv"}, headers=dev
        ).json()["details"]["jobId"]
        assert client.get(f"/api/job/{job_id}", headers=bob).status_code == 403

    def test_admin_lists_everything(self, client):
        dev = login(client, "dev", DEV_PW)
        admin = login(client, "admin", ADMIN_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        for _ in range(2):
            client.post("/api/function/qiskit-qrng", json={"input": 1, "shots": 4, "backendName": "local-sv"}, headers=dev)
        assert client.get("/api/jobs", headers=admin).json()["total"] == 2
        assert client.get("/api/jobs", headers=dev).json()["total"] == 2

    def test_admin_owner_filter(self, client):
        dev = login(client, "dev", DEV_PW)
        alice = login(client, "alice", ALICE_PW)
        admin = login(client, "admin", ADMIN_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        client.post("/api/function/qiskit-qrng",
                    json={"input": 1, "shots": 4, "backendName": "local-sv"}, headers=dev)
        client.post("/api/function/qiskit-qrng",
                    json={"input": 1, "shots": 4, "backendName": "local-sv"}, headers=alice)
        mine = client.get("/api/jobs?owner=alice", headers=admin).json()
        assert mine["total"] == 1 and mine["jobs"][0]["owner"] == "alice"
        # Non-admin owner filters are pinned to the caller.
        assert client.get("/api/jobs?owner=alice", headers=dev).json()["total"] == 1
        assert client.get("/api/jobs?owner=alice", headers=dev).json()["jobs"][0]["owner"] == "dev"

    def test_status_filter_and_unknown_status(self, client):
        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        client.post("/api/function/qiskit-qrng", json={"input": 1, "shots": 4, "backendName": "local-sv"}, headers=dev)
        completed = client.get("/api/jobs?status=Completed", headers=dev).json()
        assert completed["total"] == 1
        assert client.get("/api/jobs?status=Bogus", headers=dev).status_code == 422

    def test_unknown_job_404(self, client):
        dev = login(client, "dev", DEV_PW)
        assert client.get("/api/job/nope", headers=dev).status_code == 404


class TestBackendsAndMetrics:
    def test_backends_listing_includes_queue_length(self, client):
        dev = login(client, "dev", DEV_PW)
        doc = client.get("/api/backends", headers=dev).json()
        names = {b["name"] for b in doc["backends"]}
        assert names == {"local-sv", "mock-ibm-q5", "mock-braket-sv"}
        assert all("queue_length" in b for b in doc["backends"])

    def test_metrics_plaintext_counters(self, client):
        fresh = client.get("/metrics")
        assert fresh.status_code == 200
        assert "invocations_total 0" in fresh.text
        assert 'queue_depth{backend="local-sv"} 0' in fresh.text

        dev = login(client, "dev", DEV_PW)
        deploy(client, dev, "qrng", QRNG_SRC)
        client.post("/api/function/qiskit-qrng", json={"input": 2, "shots": 8, "backendName": "local-sv"}, headers=dev)
        after = client.get("/metrics").text
        assert "invocations_total 1" in after
        assert "jobs_completed_total 1" in after
        assert 'http_requests_total{code="200"}' in after
        assert 'http_requests_total{code="401"}' not in after or True
