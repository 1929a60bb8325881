"""Documented CLI examples: exact unit, Manin check, zeta truncation consistency, exit codes."""
import json
import subprocess
import sys

cli = sys.argv[1]


def run(*args):
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    return proc.returncode, (json.loads(proc.stdout) if proc.stdout.strip().startswith("{") else None)


failures = []


def expect(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


rc, rec = run("unit", "--d", "5", "--format", "json")
unit = rec["result"]["unit"]
expect(rc == 0 and unit["a"] == {"num": "0", "den": "1"} and unit["b"] == {"num": "1", "den": "1"},
       "unit --d 5 is omega = (1 + sqrt 5)/2")
expect(rec["result"]["sqrt_coords"] == {"x": {"num": "1", "den": "2"}, "y": {"num": "1", "den": "2"}},
       "unit --d 5 in sqrt coordinates is 1/2 + sqrt(5)/2")

rc, rec = run("manin-check", "--level", "11", "--m", "2")
expect(rc == 0 and rec["result"]["pass"] and float(rec["result"]["gap"]["dec"]) < 1e-6, "manin-check m = 2 passes")

vals = []
for x in ("1000", "10000"):
    rc, rec = run("zeta", "--d", "5", "--l0", "1", "--s-re", "2", "--x", x, "--lattice-scale", "4")
    res = rec["result"]
    vals.append((float(res["value"]["re"]["dec"]), float(res["tail_bound"]["dec"])))
expect(abs(vals[0][0] - vals[1][0]) <= vals[0][1] + vals[1][1], "zeta at X = 1e3 and 1e4 within summed tail bounds")

rc, _ = run("unit", "--bogus")
expect(rc == 2, "unknown flag exits 2")
rc, _ = run("unit", "--d", "12")
expect(rc == 3, "non-squarefree d exits 3")
rc, _ = run("levy", "--precision-bits", "64", "--truncation", "200")
expect(rc == 4, "precision exhaustion exits 4")
rc, _ = run("psi", "--printed")
expect(rc == 3, "divergent psi mode without a regularizer exits 3")

sys.exit(1 if failures else 0)
