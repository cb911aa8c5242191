"""End-to-end run of the blockscope CLI against a locally emulated censor."""

import json
import os
import signal
import subprocess
import sys
import tempfile

CLI = sys.argv[1]
HERE = os.path.dirname(os.path.abspath(__file__))
failures = []


def run(*args, expect):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True, timeout=120)
    if proc.returncode != expect:
        failures.append(f"{' '.join(args)}: exit {proc.returncode}, expected {expect}\n{proc.stdout}{proc.stderr}")
    return proc


def start_emulator(work, generation):
    policy = json.load(open(os.path.join(HERE, "policy.json")))
    policy["generation"] = generation
    path = os.path.join(work, f"policy-{generation}.json")
    json.dump(policy, open(path, "w"))
    proc = subprocess.Popen(
        [CLI, "emulate", "--policy", path, "--http-port", "0", "--dns-base-port", "0",
         "--out", os.path.join(work, f"transcripts-{generation}.json")],
        stdout=subprocess.PIPE, text=True)
    text = ""
    while not text.rstrip().endswith("}\n}") and not text.endswith("}\n}\n"):
        line = proc.stdout.readline()
        if not line:
            raise RuntimeError("emulator exited early")
        text += line
    return proc, json.loads(text)["endpoints"]


def config_for(work, name, endpoints, overrides):
    resolvers = [
        {"name": "local", "address": "10.0.0.53"},
        {"name": "google", "address": "8.8.8.8"},
        {"name": "comodo", "address": "8.26.56.26", "nxdomain_redirector": "92.242.144.50"},
        {"name": "opendns", "address": "208.67.222.222", "nxdomain_redirector": "67.215.65.132"},
        {"name": "level3", "address": "209.244.0.3"},
        {"name": "norton", "address": "198.153.192.40", "nxdomain_redirector": "198.153.192.3"},
    ]
    cfg = {
        "resolvers": resolvers,
        "endpoints": endpoints,
        "host_overrides": overrides,
        "retries": 0,
        "timeouts": {"dns": 1000, "tcp": 1000, "http": 2000},
        "host_ip_table": {"youtube.com": "173.194.43.111", "vimeo.com": "198.18.0.20", "news.example": "198.18.0.30"},
    }
    path = os.path.join(work, name)
    json.dump(cfg, open(path, "w"))
    return path


def main():
    targets = os.path.join(HERE, "targets.txt")
    with tempfile.TemporaryDirectory() as work:
        out = lambda name: os.path.join(work, name)

        # Usage errors.
        run(expect=1)
        run("probe", expect=1)
        run("probe", "--targets", targets, "--out", out("x.json"), "--bogus", expect=1)
        run("report", out("does-not-exist.json"), expect=1)
        bad = out("bad.json")
        open(bad, "w").write('{"colour": "red"}')
        run("probe", "--targets", targets, "--config", bad, "--out", out("x.json"), expect=1)
        run("emulate", "--policy", bad, expect=1)
        run("--help", expect=0)

        censored, cend = start_emulator(work, "Isp302")
        clean, kend = start_emulator(work, "PassThrough")
        try:
            overrides = {"youtube.com": "173.194.43.111", "m.youtube.com": "173.194.43.111",
                         "vimeo.com": "198.18.0.20", "news.example": "198.18.0.30",
                         "www.google.com": "203.0.113.1"}
            ccfg = config_for(work, "censored.json", cend, overrides)
            kcfg = config_for(work, "clean.json", kend, {})

            run("clean", "--targets", targets, "--config", kcfg, "--out", out("clean.txt"),
                "--report", out("cleaning.json"), expect=0)
            cleaned = open(out("clean.txt")).read().split()
            if cleaned != ["http://youtube.com/", "http://vimeo.com/64414932", "http://vimeo.com/about",
                           "http://news.example/"]:
                failures.append(f"clean produced {cleaned}")

            run("probe", "--targets", out("clean.txt"), "--config", ccfg, "--clean-config", kcfg,
                "--out", out("results.json"), "--workers", "2", expect=0)
            p = run("classify", out("results.json"), "--reference", out("results.json.reference.json"),
                    "--config", ccfg, "--out", out("verdicts.json"), "--report", out("report.json"), expect=0)
            if "Total" not in p.stdout or "(4 sites tested)" not in p.stdout:
                failures.append("classify table:\n" + p.stdout)
            verdicts = {v["target"]: sorted(v["mechanisms"]) for v in json.load(open(out("verdicts.json")))["data"]}
            want = {"http://youtube.com/": ["DnsInjection", "Http302Redirect"],
                    "http://vimeo.com/64414932": ["Http302Redirect"],
                    "http://vimeo.com/about": [], "http://news.example/": []}
            if verdicts != want:
                failures.append(f"verdicts {verdicts}")
            p = run("report", out("verdicts.json"), "--out", out("report2.json"), expect=0)
            if "50.00" not in p.stdout:
                failures.append("report table:\n" + p.stdout)
            run("report", out("report.json"), expect=0)

            run("circumvent", "--targets", out("clean.txt"), "--config", ccfg, "--clean-config", kcfg,
                "--out", out("matrix.json"), expect=0)
            cells = json.load(open(out("matrix.json")))["data"]["cells"]
            if cells.get("http://youtube.com/", {}).get("CoralCdn") != "Accessible":
                failures.append(f"matrix {cells}")

            # Campaign-level failures.
            empty = out("empty.txt")
            open(empty, "w").write("# nothing here\n")
            run("probe", "--targets", empty, "--config", ccfg, "--out", out("x.json"), expect=2)
            dead = out("dead.json")
            cfg = json.load(open(kcfg))
            cfg["keyword_portal"] = "http://portal.invalid/"
            json.dump(cfg, open(dead, "w"))
            run("clean", "--targets", targets, "--config", dead, "--out", out("x.txt"), expect=2)
            unreachable = json.load(open(ccfg))
            unreachable["endpoints"] = {"*:80": "127.0.0.1:1"}
            unreachable["host_overrides"] = {}
            json.dump(unreachable, open(out("unreachable.json"), "w"))
            run("probe", "--targets", out("clean.txt"), "--config", out("unreachable.json"),
                "--out", out("x.json"), expect=2)
        finally:
            for proc in (censored, clean):
                proc.send_signal(signal.SIGTERM)
                if proc.wait(timeout=30) != 0:
                    failures.append(f"emulator exit {proc.returncode}")
        if not json.load(open(out("transcripts-Isp302.json")))["data"]:
            failures.append("emulator wrote no transcripts")

    for f in failures:
        print("FAIL:", f)
    print("cli: %d failure(s)" % len(failures))
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
