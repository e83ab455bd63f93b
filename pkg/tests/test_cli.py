import json
import os
import signal
import socket
import subprocess
import sys
import time

import pytest
import requests

from cmsbridge.mock import copy_definition, dump_definition, serve

SECRET = "pa55-Zq8-not-in-argv"


def run(*args, env=None, timeout=60):
    full_env = dict(os.environ)
    full_env.update(env or {})
    return subprocess.run([sys.executable, "-m", "cmsbridge", *args], capture_output=True,
                          text=True, env=full_env, timeout=timeout)


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_pipeline(journal_mock, tmp_path):
    model = tmp_path / "journal.json"
    r = run("discover", "--url", journal_mock.url, "--platform", "drupal", "--out", str(model))
    assert r.returncode == 0, r.stderr
    r = run("generate", "--model", str(model), "--out", str(tmp_path / "gen"), "--scenario")
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "gen/journal_middleware/journal_site_manager.py").exists()
    assert (tmp_path / "gen/scenario.py").exists()
    r = run("diagram", "--model", str(model))
    assert r.returncode == 0 and "VideoArticle --|> ContentType" in r.stdout
    r = run("discover", "--url", journal_mock.url, "--platform", "drupal")
    assert r.stdout == model.read_text()


def test_usage_errors(tmp_path):
    assert run().returncode == 1
    assert run("bogus").returncode == 1
    assert run("discover", "--url", "http://127.0.0.1:1").returncode == 1
    assert run("discover", "--url", "http://x", "--platform", "joomla").returncode == 1
    r = run("discover", "--url", "http://127.0.0.1:1", "--platform", "drupal", "--user", "u")
    assert r.returncode == 1 and "--secret-env" in r.stderr
    r = run("discover", "--url", "http://127.0.0.1:1", "--platform", "drupal", "--user", "u",
            "--secret-env", "CMSBRIDGE_TEST_UNSET")
    assert r.returncode == 1
    assert run("discover", "--url", "ftp://x", "--platform", "drupal").returncode == 1
    assert run("generate", "--model", "m.json").returncode == 1


@pytest.mark.parametrize("flags", [["--secret", SECRET], [f"--secret={SECRET}"], [SECRET]])
def test_secret_cannot_be_passed_on_command_line(flags):
    r = run("discover", "--url", "http://127.0.0.1:1", "--platform", "drupal",
            "--user", "u", *flags)
    assert r.returncode == 1
    assert SECRET not in r.stdout + r.stderr


def test_operation_failures(tmp_path):
    out = tmp_path / "m.json"
    r = run("discover", "--url", "http://127.0.0.1:1", "--platform", "drupal", "--out", str(out))
    assert r.returncode == 2 and "Unreachable" in r.stderr
    assert not out.exists() and list(tmp_path.iterdir()) == []
    corrupt = tmp_path / "corrupt.json"
    corrupt.write_text("{ nope")
    assert run("generate", "--model", str(corrupt), "--out", str(tmp_path / "g")).returncode == 2
    assert run("diagram", "--model", str(tmp_path / "missing.json")).returncode == 2
    assert run("mock", "--site", str(corrupt)).returncode == 2


def test_auth_secret_stays_out_of_output(journal_definition, tmp_path):
    definition = copy_definition(journal_definition, auth=("editor", SECRET))
    with serve(definition) as site:
        out = tmp_path / "model.json"
        args = ["-v", "discover", "--url", site.url, "--platform", "drupal", "--user", "editor",
                "--secret-env", "JOURNAL_SECRET", "--out", str(out)]
        assert not any(SECRET in a for a in args)
        r = run(*args, env={"JOURNAL_SECRET": SECRET})
        assert r.returncode == 0, r.stderr
        assert site.requests and all(e.auth_present for e in site.requests)
        gen = tmp_path / "gen"
        assert run("generate", "--model", str(out), "--out", str(gen)).returncode == 0
        texts = [r.stdout, r.stderr, out.read_text()]
        texts += [p.read_text() for p in gen.rglob("*") if p.is_file()]
        assert not any(SECRET in t for t in texts)

        r = run("discover", "--url", site.url, "--platform", "drupal", "--user", "editor",
                "--secret-env", "JOURNAL_SECRET", env={"JOURNAL_SECRET": "wrong"})
        assert r.returncode == 2 and "AuthFailed" in r.stderr
        assert SECRET not in r.stderr and "wrong" not in r.stderr


def _start_mock(site_file, port):
    proc = subprocess.Popen([sys.executable, "-m", "cmsbridge", "mock", "--site", str(site_file),
                             "--port", str(port)], stderr=subprocess.PIPE, text=True)
    url = f"http://127.0.0.1:{port}"
    deadline = time.time() + 15
    while time.time() < deadline:
        try:
            requests.get(url + "/openapi.json", timeout=1)
            return proc, url
        except requests.ConnectionError:
            time.sleep(0.1)
    proc.kill()
    raise AssertionError("mock did not start")


@pytest.mark.parametrize("sig", [signal.SIGTERM, signal.SIGINT])
def test_mock_command(journal_definition, tmp_path, sig):
    site_file = tmp_path / "site.json"
    site_file.write_text(dump_definition(copy_definition(journal_definition,
                                                         auth=("editor", SECRET))))
    proc, url = _start_mock(site_file, free_port())
    try:
        r = requests.get(url + "/jsonapi/node/video_article/v1", auth=("editor", SECRET),
                         timeout=5)
        assert r.json()["data"]["attributes"]["likes"] == 154
        # a second instance on the same port fails cleanly
        busy = run("mock", "--site", str(site_file), "--port", str(url.rsplit(":", 1)[1]))
        assert busy.returncode == 2 and "PortInUse" in busy.stderr
    finally:
        proc.send_signal(sig)
        _, stderr = proc.communicate(timeout=15)
    assert proc.returncode == 0
    assert "stopped" in stderr and "/jsonapi/node/video_article/v1" in stderr
    assert SECRET not in stderr


def test_version():
    r = run("--version")
    assert r.returncode == 0 and r.stdout.startswith("cmsbridge ")
