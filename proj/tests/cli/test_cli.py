"""Command-line tool and published schemas.

usage: test_cli.py <uavmp binary> <source dir>
"""
import json
import os
import subprocess
import sys
import tempfile
import time
import unittest
import urllib.error
import urllib.request

import jsonschema

BIN = None
SRC = None


def schema(name):
    with open(os.path.join(SRC, "docs", "schemas", name + ".schema.json")) as f:
        return json.load(f)


def fixture(name):
    return os.path.join(SRC, "fixtures", name)


def run(*args, stdin=None, timeout=300):
    return subprocess.run([BIN, *args], input=stdin, capture_output=True, text=True, timeout=timeout)


def check(doc, name):
    jsonschema.Draft7Validator(schema(name)).validate(doc)


class Schemas(unittest.TestCase):
    def test_schemas_are_valid_draft7(self):
        folder = os.path.join(SRC, "docs", "schemas")
        names = sorted(os.listdir(folder))
        self.assertIn("mission.schema.json", names)
        for n in names:
            with open(os.path.join(folder, n)) as f:
                jsonschema.Draft7Validator.check_schema(json.load(f))

    def test_fixtures_follow_the_mission_schema(self):
        for n in ("tiny.json", "usecase1.json", "usecase2.json"):
            with open(fixture(n)) as f:
                check(json.load(f), "mission")
        with open(fixture("usecase1_injections.json")) as f:
            objective = schema("mission")
            for o in json.load(f):
                jsonschema.validate(o, {**objective, "$ref": "#/definitions/objective"})


class Validate(unittest.TestCase):
    def test_good_mission(self):
        r = run("validate", "--mission", fixture("usecase1.json"))
        self.assertEqual(r.returncode, 0, r.stderr)

    def test_bad_mission(self):
        with open(fixture("usecase1.json")) as f:
            doc = json.load(f)
        doc["arcSeconds"] = 20
        doc["uavs"][0]["fuel"] = -3
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
            json.dump(doc, f)
        try:
            r = run("validate", "--mission", f.name)
        finally:
            os.unlink(f.name)
        self.assertEqual(r.returncode, 2)
        err = json.loads(r.stderr.strip().splitlines()[-1])
        check(err, "cli-error")
        paths = {i["path"] for i in err["issues"]}
        self.assertIn("/arcSeconds", paths)
        self.assertIn("/uavs/0/fuel", paths)

    def test_usage_errors(self):
        self.assertEqual(run("frobnicate").returncode, 2)
        self.assertEqual(run("plan").returncode, 2)
        self.assertEqual(run("plan", "--mission", fixture("tiny.json"), "--runtime", "-1").returncode, 2)
        self.assertEqual(run("simulate", "--plan", "nofile.json#0").returncode != 0, True)


class Plan(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.dir = tempfile.TemporaryDirectory()
        cls.out = os.path.join(cls.dir.name, "tiny.json")
        cls.result = run("plan", "--mission", fixture("tiny.json"), "--runtime", "1", "--seed", "3", "--out", cls.out)

    @classmethod
    def tearDownClass(cls):
        cls.dir.cleanup()

    def test_plan_output(self):
        self.assertEqual(self.result.returncode, 0, self.result.stderr)
        summary = json.loads(self.result.stdout)
        self.assertGreaterEqual(summary["solutions"], 1)
        self.assertEqual(summary["seed"], 3)
        with open(self.out) as f:
            doc = json.load(f)
        check(doc, "plan-response")
        check(doc["mission"], "mission")
        self.assertEqual(len(doc["solutions"]), summary["solutions"])
        self.assertEqual([s["rank"] for s in doc["solutions"]], list(range(1, len(doc["solutions"]) + 1)))
        self.assertEqual(doc["seed"], 3)
        self.assertEqual(doc["config"]["seed"], 3)

    def test_request_mode(self):
        with open(fixture("tiny.json")) as f:
            req = {"mission": json.load(f), "config": {"runtime": 1, "seed": 4, "population": 16}}
        r = run("plan", "--request", "-", stdin=json.dumps(req))
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = json.loads(r.stdout)
        check(doc, "plan-response")
        self.assertEqual(doc["config"]["population"], 16)

    def test_unresolvable_mission(self):
        out = os.path.join(self.dir.name, "uc2.json")
        r = run("plan", "--mission", fixture("usecase2.json"), "--runtime", "2", "--seed", "1", "--out", out)
        self.assertEqual(r.returncode, 3, r.stderr)
        with open(out) as f:
            doc = json.load(f)
        check(doc, "plan-response")
        self.assertEqual(doc["solutions"], [])
        self.assertEqual(doc["histogram"][0]["reason"], "coverage_time")

    def test_simulate_is_deterministic(self):
        self.assertEqual(self.result.returncode, 0)
        a = run("simulate", "--plan", self.out + "#0", "--headless", "--tick", "1")
        b = run("simulate", "--plan", self.out + "#0", "--headless", "--tick", "1")
        c = run("simulate", "--plan", self.out + "#0", "--headless", "--tick", "13")
        self.assertEqual(a.returncode, 0, a.stderr)
        self.assertEqual(a.stdout, b.stdout)
        self.assertEqual(a.stdout, c.stdout)
        lines = a.stdout.strip().splitlines()
        self.assertGreater(len(lines), 3)
        ev = schema("event")
        times = []
        for l in lines:
            e = json.loads(l)
            jsonschema.validate(e, ev)
            times.append(e["t"])
        self.assertEqual(times, sorted(times))
        done = {json.loads(l)["subject"] for l in lines if json.loads(l)["kind"] == "task_completed"}
        self.assertEqual(done, {"P1/photograph", "P2/photograph", "P3/photograph"})
        self.assertNotEqual(run("simulate", "--plan", self.out + "#99", "--headless").returncode, 0)

    def test_replan(self):
        self.assertEqual(self.result.returncode, 0)
        inj = os.path.join(self.dir.name, "inj.json")
        with open(inj, "w") as f:
            json.dump({"name": "P9", "type": "target_photographing",
                       "geometry": {"kind": "point", "position": {"lat": 36.2, "lon": -2.6}}}, f)
        out = os.path.join(self.dir.name, "replan.json")
        events = os.path.join(self.dir.name, "events.jsonl")
        r = run("replan", "--plan", self.out + "#0", "--inject", inj, "--at", "600", "--runtime", "2", "--seed", "1",
                "--apply", "0", "--out", out, "--events", events)
        self.assertEqual(r.returncode, 0, r.stderr)
        summary = json.loads(r.stdout)
        self.assertAlmostEqual(summary["snapshotTime"], 602.0)
        self.assertTrue(all(t["status"] == "done" for t in summary["tasks"]))
        with open(out) as f:
            doc = json.load(f)
        check(doc, "plan-response")
        self.assertEqual(doc["mode"], "replan")
        kinds = []
        with open(events) as f:
            for l in f:
                e = json.loads(l)
                check(e, "event")
                kinds.append(e["kind"])
        self.assertIn("objective_injected", kinds)
        self.assertIn("plan_switched", kinds)


class Serve(unittest.TestCase):
    def setUp(self):
        self.data = tempfile.TemporaryDirectory()
        self.proc = subprocess.Popen([BIN, "serve", "--port", "0", "--data", self.data.name, "--tick", "1"],
                                     stdout=subprocess.DEVNULL, stderr=subprocess.PIPE, text=True)
        line = self.proc.stderr.readline()
        self.base = "http://127.0.0.1:%d" % json.loads(line)["port"]

    def tearDown(self):
        self.proc.terminate()
        self.proc.wait(timeout=30)
        self.proc.stderr.close()
        self.data.cleanup()

    def call(self, method, path, body=None):
        data = json.dumps(body).encode() if body is not None else None
        req = urllib.request.Request(self.base + path, data=data, method=method,
                                     headers={"Content-Type": "application/json"})
        try:
            with urllib.request.urlopen(req, timeout=120) as r:
                return r.status, r.read().decode()
        except urllib.error.HTTPError as e:
            return e.code, e.read().decode()

    def wait_job(self, job):
        for _ in range(600):
            st, body = self.call("GET", "/jobs/" + job)
            state = json.loads(body)["state"]
            if state not in ("queued", "running"):
                return state
            time.sleep(0.1)
        self.fail("job did not finish")

    def test_http_documents_follow_the_schemas(self):
        with open(fixture("tiny.json")) as f:
            mission = json.load(f)
        bad = dict(mission, arcSeconds=20)
        st, body = self.call("POST", "/missions", bad)
        self.assertEqual(st, 400)
        check(json.loads(body), "problem")
        st, body = self.call("GET", "/missions/m0404")
        self.assertEqual(st, 404)
        check(json.loads(body), "problem")

        st, body = self.call("POST", "/missions", mission)
        self.assertEqual(st, 201)
        mid = json.loads(body)["id"]
        check(json.loads(self.call("GET", "/missions/" + mid)[1])["mission"], "mission")
        st, body = self.call("POST", "/missions/%s/plan" % mid, {"runtime": 1, "seed": 2})
        self.assertEqual(st, 202)
        job = json.loads(body)
        st, body = self.call("POST", "/missions/%s/plan" % mid, {"runtime": 1})
        self.assertEqual(st, 409)
        check(json.loads(body), "problem")
        self.assertEqual(self.wait_job(job["id"]), "done")
        st, body = self.call("GET", "/missions/%s/plans/%s" % (mid, job["runId"]))
        self.assertEqual(st, 200)
        check(json.loads(body), "plan-response")

        st, body = self.call("POST", "/sessions", {"missionId": mid, "runId": job["runId"], "solutionIndex": 0})
        self.assertEqual(st, 201)
        sid = json.loads(body)["id"]
        st, body = self.call("POST", "/sessions/%s/advance" % sid, {"seconds": 800})
        check(json.loads(body)["telemetry"], "telemetry")
        st, body = self.call("GET", "/sessions/%s/snapshot?delta=5" % sid)
        self.assertEqual(st, 200)
        check(json.loads(body), "snapshot")
        st, body = self.call("GET", "/sessions/%s/telemetry?follow=0" % sid)
        self.assertEqual(st, 200)
        lines = [l for l in body.splitlines() if l]
        self.assertGreater(len(lines), 0)
        for l in lines:
            check(json.loads(l), "event")


def main():
    global BIN, SRC
    if len(sys.argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    BIN, SRC = os.path.abspath(sys.argv[1]), os.path.abspath(sys.argv[2])
    prog = unittest.main(argv=[sys.argv[0], "-v"], exit=False)
    return 0 if prog.result.wasSuccessful() else 1


if __name__ == "__main__":
    sys.exit(main())
