import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

exe, schema_path = sys.argv[1], sys.argv[2]
schema = json.loads(Path(schema_path).read_text())
failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(args, env=None):
    return subprocess.run([exe, *args], capture_output=True, text=True, env={**os.environ, **(env or {})})


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    cfg = tmp / "small.json"
    cfg.write_text(json.dumps({"n_x": 12, "n_t": 40, "horizon": {"mode": "fixed", "T": 1.0},
                               "output_dir": str(tmp / "a"), "emit_plots": True}))

    r = run(["run", "--config", str(cfg)])
    check(r.returncode == 0, "run exits 0")
    first = json.loads((tmp / "a" / "summary.json").read_text())
    jsonschema.validate(first, schema)
    check(True, "fixed-horizon summary validates against the schema")

    r = run(["run", "--config", str(cfg)], env={"FRACHEAT_OUTPUT_DIR": str(tmp / "b")})
    check(r.returncode == 0 and (tmp / "b" / "summary.json").exists(), "FRACHEAT_OUTPUT_DIR overrides output_dir")
    second = json.loads((tmp / "b" / "summary.json").read_text())
    for d in (first, second):
        d.pop("wall_time_seconds")
        d["resolved_config"].pop("output_dir")
    check(first == second, "identical configs give identical summaries")
    ta = (tmp / "a" / "trajectory.csv").read_bytes()
    tb = (tmp / "b" / "trajectory.csv").read_bytes()
    check(ta == tb, "identical configs give byte-identical trajectories")

    r = run(["run", "--config", str(cfg), "--seed", "7", "--threads", "2"], env={"FRACHEAT_OUTPUT_DIR": str(tmp / "c")})
    third = json.loads((tmp / "c" / "summary.json").read_text())
    check(third["seed"] == 7 and third["resolved_config"]["threads"] == 2, "--seed and --threads are recorded")

    mt = tmp / "mt.json"
    mt.write_text(json.dumps({"case_preset": "case2", "n_x": 12, "n_t": 40,
                              "horizon": {"mode": "minimal_time", "bracket": [0.05, 1.0], "tol": 0.01},
                              "output_dir": str(tmp / "mt")}))
    r = run(["run", "--config", str(mt)])
    check(r.returncode == 0, "minimal-time run exits 0")
    summary = json.loads((tmp / "mt" / "summary.json").read_text())
    jsonschema.validate(summary, schema)
    check(summary["T_min_estimate"] is not None and summary["minimal_time"] is not None,
          "minimal-time summary carries the estimate and the probe history")

    for script in ("plot_state.py", "plot_control.py", "plot_impulses.py"):
        p = subprocess.run([sys.executable, script], cwd=tmp / "a", capture_output=True, text=True,
                           env={**os.environ, "MPLBACKEND": "Agg"})
        check(p.returncode == 0, f"{script} renders ({p.stderr.strip()[-200:]})")

    bad = tmp / "bad.json"
    bad.write_text('{"s": 1.5}')
    r = run(["run", "--config", str(bad)], env={"FRACHEAT_OUTPUT_DIR": str(tmp / "bad")})
    check(r.returncode == 2, "out-of-range s exits 2")
    record = json.loads(r.stderr)
    check(record["error"]["field"] == "s", "error record names the field")

    r = run(["run", "--config", str(tmp / "missing.json")])
    check(r.returncode == 4, "unreadable config exits 4")

    r = run(["run"])
    check(r.returncode == 2, "missing --config exits 2")

    r = run(["spectrum", "--s", "0.8", "--nx", "20"])
    report = json.loads(r.stdout)
    check(r.returncode == 0 and len(report["eigenvalues"]) == 19 and report["min_gap"] > 0, "spectrum prints the eigenvalues")
    r = run(["spectrum", "--s", "1.2", "--nx", "20"])
    check(r.returncode == 2, "spectrum rejects s outside the window")

    r = run(["obs-curve", "--s", "0.8", "--tmin", "0.1", "--tmax", "2", "--points", "4", "--K", "5"])
    rows = r.stdout.strip().splitlines()
    check(r.returncode == 0 and rows[0] == "T,C_lower,slope_fit" and len(rows) == 5, "obs-curve prints a CSV curve")

if failures:
    print(f"{len(failures)} failure(s)")
    sys.exit(1)
