"""Command-line client for the gateway API.

Flags mirror the invocation request fields one-to-one, so anything the HTTP
API accepts can be said on the command line::

    qfaas login admin
    qfaas deploy --name qrng --template qiskit --file samples/qrng.qf --public
    qfaas invoke qiskit-qrng --input 4 --shots 1024
    qfaas jobs --status Completed
    qfaas backends

Config (server URL, bearer token) lives at ``~/.config/qfaas/config.json``
with owner-only permissions; ``QFAAS_SERVER`` and ``QFAAS_TOKEN`` override it.

Exit codes: 0 success, 1 auth/config problems, 2 server-reported errors,
3 transport failures.
"""

from __future__ import annotations

import base64
import json
import os
import stat
import sys
import time
from pathlib import Path
from typing import Any

import click
import requests

EXIT_AUTH = 1
EXIT_SERVER = 2
EXIT_TRANSPORT = 3

_TIMEOUT_S = 120


def config_path() -> Path:
    base = os.environ.get("XDG_CONFIG_HOME") or os.path.join(Path.home(), ".config")
    return Path(base) / "qfaas" / "config.json"


def load_cli_config() -> dict[str, Any]:
    path = config_path()
    if path.is_file():
        try:
            return json.loads(path.read_text())
        except (OSError, json.JSONDecodeError):
            return {}
    return {}


def save_cli_config(config: dict[str, Any]) -> None:
    path = config_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(config, indent=2) + "\n")
    path.chmod(stat.S_IRUSR | stat.S_IWUSR)  # token stays owner-readable only


class Session:
    def __init__(self, server: str | None, output: str | None):
        stored = load_cli_config()
        self.server = (
            server
            or os.environ.get("QFAAS_SERVER")
            or stored.get("server")
            or "http://127.0.0.1:8000"
        ).rstrip("/")
        self.token = os.environ.get("QFAAS_TOKEN") or stored.get("token")
        self.output = output or stored.get("output") or "json"

    def headers(self, auth: bool) -> dict[str, str]:
        if not auth:
            return {}
        if not self.token:
            click.echo("not logged in: run `qfaas login <user>` first", err=True)
            sys.exit(EXIT_AUTH)
        return {"Authorization": f"Bearer {self.token}"}

    def request(self, method: str, path: str, *, json_body=None, params=None, auth=True):
        url = f"{self.server}{path}"
        try:
            response = requests.request(
                method, url, json=json_body, params=params,
                headers=self.headers(auth), timeout=_TIMEOUT_S,
            )
        except requests.RequestException as exc:
            click.echo(f"cannot reach {url}: {exc}", err=True)
            sys.exit(EXIT_TRANSPORT)
        if response.status_code == 401:
            message = _server_message(response)
            click.echo(f"authentication failed: {message}", err=True)
            sys.exit(EXIT_AUTH)
        if response.status_code >= 400:
            message = _server_message(response)
            click.echo(f"server error ({response.status_code}): {message}", err=True)
            sys.exit(EXIT_SERVER)
        return response


def _server_message(response) -> str:
    try:
        doc = response.json()
        message = doc.get("message", "")
        details = doc.get("details")
        if details:
            return f"{message} {json.dumps(details)}"
        return message or response.text
    except ValueError:
        return response.text


def emit(session: Session, doc: Any, table_lines: list[str] | None = None) -> None:
    if session.output == "table" and table_lines is not None:
        for line in table_lines:
            click.echo(line)
    else:
        click.echo(json.dumps(doc, indent=2))


@click.group()
@click.option("--server", envvar="QFAAS_SERVER", default=None, help="gateway base URL")
@click.option("--output", type=click.Choice(["json", "table"]), default=None)
@click.pass_context
def main(ctx: click.Context, server: str | None, output: str | None) -> None:
    """Client for the quantum function gateway."""
    ctx.obj = Session(server, output)


@main.command()
@click.argument("username")
@click.option("--password", prompt=True, hide_input=True)
@click.pass_obj
def login(session: Session, username: str, password: str) -> None:
    """Log in and store the bearer token."""
    response = session.request(
        "POST", "/api/auth/login",
        json_body={"username": username, "password": password}, auth=False,
    )
    doc = response.json()
    config = load_cli_config()
    config.update({"server": session.server, "token": doc["access_token"]})
    save_cli_config(config)
    click.echo(f"logged in as {username} (token expires in {doc['expires_in']} s)")


@main.command()
@click.option("--name", required=True)
@click.option("--template", required=True,
              type=click.Choice(["qiskit", "cirq", "qsharp", "braket"]))
@click.option("--file", "source_file", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--requirements", "requirements_file", default=None,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--public/--private", default=False)
@click.pass_obj
def deploy(session: Session, name: str, template: str, source_file: Path,
           requirements_file: Path | None, public: bool) -> None:
    """Deploy a .qf source file and stream the pipeline stages."""
    body = {
        "name": name,
        "template": template,
        "fnCode": {
            "requirements": base64.b64encode(
                requirements_file.read_bytes() if requirements_file else b""
            ).decode(),
            "handlerPy": base64.b64encode(source_file.read_bytes()).decode(),
            "handlerQs": "",
        },
        "public": public,
    }
    created = session.request("POST", "/api/functions", json_body=body).json()
    identifier = created["function"]["identifier"]
    click.echo(f"deploying {identifier} ...")

    reported: dict[str, str] = {}
    deadline = time.time() + 60
    failing_log = None
    while time.time() < deadline:
        record = session.request("GET", f"/api/functions/{identifier}").json()
        deployments = session.request(
            "GET", f"/api/functions/{identifier}/deployments"
        ).json()["deployments"]
        stages = deployments[-1]["stages"] if deployments else []
        for stage in stages:
            if stage["status"] in ("passed", "failed") and reported.get(stage["name"]) != stage["status"]:
                reported[stage["name"]] = stage["status"]
                click.echo(f"  {stage['name']}: {stage['status']}")
                if stage["status"] == "failed":
                    failing_log = stage["log"]
        if record["status"] == "Ready":
            click.echo(f"{identifier} Ready")
            return
        if record["status"] == "FailedDeploy":
            click.echo(f"{identifier} FailedDeploy", err=True)
            if failing_log:
                click.echo(failing_log, err=True)
            sys.exit(EXIT_SERVER)
        time.sleep(0.2)
    click.echo("timed out waiting for the deployment to settle", err=True)
    sys.exit(EXIT_SERVER)


def _parse_input(value: str | None) -> Any:
    if value is None:
        return None
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


@main.command()
@click.argument("identifier")
@click.option("--input", "input_value", default=None, help="function input (JSON or text)")
@click.option("--shots", type=int, default=None)
@click.option("--backend", default=None, help="manual backend name")
@click.option("--provider", default=None)
@click.option("--type", "backend_type", type=click.Choice(["qpu", "simulator"]), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--no-wait", is_flag=True, default=False)
@click.pass_obj
def invoke(session: Session, identifier: str, input_value: str | None, shots: int | None,
           backend: str | None, provider: str | None, backend_type: str | None,
           seed: int | None, no_wait: bool) -> None:
    """Invoke a deployed function."""
    body: dict[str, Any] = {}
    if input_value is not None:
        body["input"] = _parse_input(input_value)
    if shots is not None:
        body["shots"] = shots
    if backend is not None:
        body["backendName"] = backend
    if provider is not None:
        body["provider"] = provider
    if backend_type is not None:
        body["backendType"] = backend_type
    if seed is not None:
        body["seed"] = seed
    if no_wait:
        body["waitForResult"] = False

    doc = session.request("POST", f"/api/function/{identifier}", json_body=body).json()
    if no_wait:
        click.echo(f"jobId: {doc['details']['jobId']}")
        return
    details = doc["details"]
    emit(session, doc, [
        f"data: {json.dumps(doc['data'])}",
        f"status: {details.get('status')}  backend: {details.get('backend')}"
        f"  shots: {details.get('shots')}",
        f"jobId: {details.get('jobId')}",
    ])


@main.command()
@click.argument("job_id")
@click.pass_obj
def job(session: Session, job_id: str) -> None:
    """Fetch one job by ID."""
    doc = session.request("GET", f"/api/job/{job_id}").json()
    emit(session, doc, [
        f"{doc['job_id']}  {doc['status']}  backend={doc['backend_name']}"
        f"  data={json.dumps(doc['result_data'])}",
    ])


@main.command()
@click.option("--status", default=None)
@click.option("--function", default=None)
@click.option("--limit", type=int, default=20)
@click.pass_obj
def jobs(session: Session, status: str | None, function: str | None, limit: int) -> None:
    """List jobs (newest first)."""
    params = {"limit": limit}
    if status:
        params["status"] = status
    if function:
        params["function"] = function
    doc = session.request("GET", "/api/jobs", params=params).json()
    lines = [f"{len(doc['jobs'])} of {doc['total']} job(s)"]
    for item in doc["jobs"]:
        lines.append(
            f"{item['job_id']}  {item['status']:<9}  {item['function_identifier']}"
            f"  {item['backend_name']}  {item['submitted_at']}"
        )
    emit(session, doc, lines)


@main.command()
@click.pass_obj
def backends(session: Session) -> None:
    """List the backend catalog."""
    doc = session.request("GET", "/api/backends").json()
    lines = []
    for b in doc["backends"]:
        status = "up" if b["operational"] else "down"
        lines.append(
            f"{b['name']:<16} {b['provider']:<12} {b['kind']:<9} {b['qubits']:>3}q"
            f"  queue={b['queue_length']}  {status}"
        )
    emit(session, doc, lines)


if __name__ == "__main__":
    main()
