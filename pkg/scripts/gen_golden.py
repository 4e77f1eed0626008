#!/usr/bin/env python3
"""Regenerate the golden wire fixtures under tests/golden/.

Runs the real CLI with injected key/blind material so every fixture is a
byte-exact artifact of the public command surface. The frontend binding
tests consume the same directory. Run from the repository root:

    python scripts/gen_golden.py
"""

import hashlib
import json
import pathlib
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"

ORDER = 0xFFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551

KEY_HEX = "%064x" % (int.from_bytes(hashlib.sha256(b"ecpsi fixture key").digest(), "big") % (ORDER - 1) + 1)
BLIND_HEX = "%064x" % (int.from_bytes(hashlib.sha256(b"ecpsi fixture blind").digest(), "big") % (ORDER - 1) + 1)

SERVER_ELEMENTS = ["srv-%04d" % i for i in range(50)]
MEMBER_PICKS = [3, 7, 11, 19, 23, 31, 47]
CLIENT_ELEMENTS = []
for i in range(20):
    if i < len(MEMBER_PICKS):
        CLIENT_ELEMENTS.append("srv-%04d" % MEMBER_PICKS[i])
    else:
        CLIENT_ELEMENTS.append("cli-%04d" % i)

MAX_QUERIES = 100
FPR = 1e-6


def run(args):
    proc = subprocess.run([sys.executable, "-m", "ecpsi", *args],
                          capture_output=True, text=True, cwd=ROOT)
    if proc.returncode != 0:
        raise SystemExit("cli failed: %s\n%s" % (args, proc.stderr))
    return proc.stdout


def main():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    work = GOLDEN / "_work"
    work.mkdir(exist_ok=True)

    server_file = work / "server.txt"
    client_file = work / "client.txt"
    server_file.write_text("\n".join(SERVER_ELEMENTS) + "\n")
    client_file.write_text("\n".join(CLIENT_ELEMENTS) + "\n")

    # A throwaway key file so --key-in can inject the fixed key.
    seed_key = work / "seed-key.json"
    seed_key.write_text(json.dumps({
        "format": "ecpsi-key", "version": 1, "key": KEY_HEX,
        "dataset_size": 0, "max_queries": MAX_QUERIES, "fpr": FPR,
        "ds": "bloom", "pin_reveal": None,
    }))

    results = {}
    for ds in ("bloom", "gcs"):
        key_file = work / ("key-%s.json" % ds)
        run(["setup", "--server-set", str(server_file), "--max-queries", str(MAX_QUERIES),
             "--fpr", repr(FPR), "--ds", ds, "--out", str(GOLDEN / ("setup_%s.bin" % ds)),
             "--key-out", str(key_file), "--key-in", str(seed_key)])

        for mode, flag in (("reveal", ["--reveal"]), ("psic", [])):
            req = GOLDEN / ("request_%s.bin" % mode)
            state = work / ("state-%s-%s.json" % (ds, mode))
            run(["request", "--client-set", str(client_file), *flag,
                 "--out", str(req), "--state-out", str(state),
                 "--blind-in", BLIND_HEX])
            resp = GOLDEN / ("response_%s_%s.bin" % (ds, mode))
            run(["respond", "--key", str(key_file), "--in", str(req), "--out", str(resp)])
            out = run(["finish", "--state", str(state), "--setup",
                       str(GOLDEN / ("setup_%s.bin" % ds)), "--response", str(resp), "--json"])
            results["%s_%s" % (ds, mode)] = json.loads(out)

    # Requests are key-independent, so the two ds variants produced identical
    # request files; keep the single pair.
    manifest = {
        "key_hex": KEY_HEX,
        "blind_hex": BLIND_HEX,
        "max_queries": MAX_QUERIES,
        "fpr": FPR,
        "server_elements": SERVER_ELEMENTS,
        "client_elements": CLIENT_ELEMENTS,
        "expected_indices": list(range(len(MEMBER_PICKS))),
        "expected_cardinality": len(MEMBER_PICKS),
        "results": results,
        "files": {
            "setup_bloom": "setup_bloom.bin",
            "setup_gcs": "setup_gcs.bin",
            "request_reveal": "request_reveal.bin",
            "request_psic": "request_psic.bin",
            "response_bloom_reveal": "response_bloom_reveal.bin",
            "response_bloom_psic": "response_bloom_psic.bin",
            "response_gcs_reveal": "response_gcs_reveal.bin",
            "response_gcs_psic": "response_gcs_psic.bin",
        },
    }
    (GOLDEN / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")

    for path in sorted(GOLDEN.glob("*.bin")):
        print("%-28s %6d bytes sha256=%s" % (
            path.name, path.stat().st_size,
            hashlib.sha256(path.read_bytes()).hexdigest()[:16]))
    print("manifest expected:", results)

    import shutil
    shutil.rmtree(work)

    # the binding test suite consumes the same fixtures from its own tree
    frontend_fixtures = ROOT / "frontend" / "tests" / "fixtures"
    frontend_fixtures.mkdir(parents=True, exist_ok=True)
    for path in list(GOLDEN.glob("*.bin")) + [GOLDEN / "manifest.json"]:
        shutil.copy2(path, frontend_fixtures / path.name)
    print("copied fixtures to", frontend_fixtures)


if __name__ == "__main__":
    main()
