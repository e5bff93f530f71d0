#!/usr/bin/env python3
"""End-to-end checks of the riesz-stab CLI: exit codes, schemas, determinism."""

import json
import math
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

EXE = sys.argv[1]
ROOT = pathlib.Path(sys.argv[2])
SCHEMAS = ROOT / "schemas"
CONFIGS = ROOT / "configs"

failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(*args):
    return subprocess.run([EXE, *map(str, args)], capture_output=True, text=True, timeout=300)


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def valid(doc, name):
    try:
        jsonschema.validate(doc, schema(name))
        return True
    except jsonschema.ValidationError as e:
        print("     " + e.message)
        return False


# minimize
args = ("minimize", "-d", 2, "-s", 1, "-N", 4)
r = run(*args)
check(r.returncode == 0, "minimize exits 0")
doc = json.loads(r.stdout)
check(valid(doc, "minimize"), "minimize output matches schema")
check(math.isclose(doc["energy"], 4 + math.sqrt(2), rel_tol=1e-9), "four points in the square sit at the corners")
check(run(*args).stdout == r.stdout, "minimize rerun is byte-identical")

r = run("minimize", "-d", 3, "-s", 1, "-N", 6, "--domain", "ball:1")
check(r.returncode == 0 and valid(json.loads(r.stdout), "minimize"), "minimize on a ball")

# constants
r = run("constants", "-d", 3, "-s", 1)
doc = json.loads(r.stdout)
check(r.returncode == 0 and valid(doc, "constants"), "constants output matches schema")
check(abs(doc["I_s_ball"] - 0.5) < 1e-12, "constants -d 3 -s 1 gives I_s_ball 0.5")
doc = json.loads(run("constants", "-d", 1, "-s", 2).stdout)
check(valid(doc, "constants") and doc["C_sd"] == 0.125, "constants -d 1 -s 2 gives C_sd 1/8")

# certify and verify
with tempfile.TemporaryDirectory() as tmp:
    cert = pathlib.Path(tmp) / "cert.json"
    r = run("certify", "--potential", CONFIGS / "riesz_sss.conf", "-o", cert)
    check(r.returncode == 0, "certify riesz_sss exits 0")
    doc = json.loads(cert.read_text())
    check(valid(doc, "certificate") and doc["classification"] == "SSS", "riesz_sss certificate is SSS")
    again = pathlib.Path(tmp) / "again.json"
    run("certify", "--potential", CONFIGS / "riesz_sss.conf", "-o", again)
    check(again.read_bytes() == cert.read_bytes(), "certify rerun is byte-identical")

    r = run("verify", "--potential", CONFIGS / "riesz_sss.conf", "--certificate", cert, "--trials", 300)
    check(r.returncode == 0, "verify exits 0")
    doc = json.loads(r.stdout)
    check(valid(doc, "verify") and doc["violations"] == 0, "verify finds no violation")

    r = run("certify", "--potential", CONFIGS / "flat_step.conf", "-o", cert)
    doc = json.loads(cert.read_text())
    check(r.returncode == 0 and valid(doc, "certificate") and doc["classification"] == "SS", "flat_step is SS")

r = run("certify", "--potential", CONFIGS / "neg_exp.conf")
check(r.returncode == 3, "certify neg_exp exits 3")
doc = json.loads(r.stdout)
check(valid(doc, "certificate") and doc["classification"] == "Unstable", "neg_exp certificate is Unstable")

r = run("certify", "--potential", CONFIGS / "square_well.conf")
check(r.returncode in (0, 2) and valid(json.loads(r.stdout), "certificate"), "square_well certificate matches schema")

# scan
r = run("scan", "--over", "s", "--from", 0.5, "--to", 4, "--steps", 4)
lines = r.stdout.strip().splitlines()
check(r.returncode == 0 and len(lines) == 5 and "," in lines[0], "scan over s writes a header and 4 rows")

# usage errors
check(run("minimize", "-d", 1).returncode == 64, "missing option exits 64")
check(run().returncode == 64, "missing subcommand exits 64")
check(run("certify", "--potential", ROOT / "no-such.conf").returncode != 0, "missing config fails")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
