"""Compare the native and pure-Python pairing backends.

Each backend runs in its own interpreter (the backend is fixed at import),
selected through ABESD_BACKEND. Usage:

    python benchmarks/bench_backends.py [--reps 5] [--json out.json]
"""

import argparse
import json
import os
import subprocess
import sys
import time

POLICY = "(A and B) or (C and D and E)"


def _measure(reps: int) -> dict:
    from abesd import abe, pairing
    from abesd.rng import SeededRng

    rng = SeededRng("bench-backends")
    params, msk = abe.abe_setup(128, rng)
    sk = abe.abe_keygen(msk, params, ["A", "B", "C", "D", "E"], rng)
    g1, g2 = pairing.G1.generator(), pairing.G2.generator()
    k = rng.below(pairing.R)
    _, enc = abe.abe_encapsulate(params, POLICY, rng)

    ops = {
        "g1_mul": lambda: g1 * k,
        "g2_mul": lambda: g2 * k,
        "pairing": lambda: pairing.pairing(g1, g2),
        "hash_to_g1": lambda: pairing.hash_to_g1(rng.bytes(8), b"bench"),
        "encapsulate": lambda: abe.abe_encapsulate(params, POLICY, rng),
        "decapsulate": lambda: abe.abe_decapsulate(sk, params, enc),
    }
    out = {"backend": pairing.BACKEND}
    for name, fn in ops.items():
        fn()
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        out[name] = (time.perf_counter() - t0) / reps * 1e3
    return out


def _run(backend: str, reps: int) -> dict | None:
    env = dict(os.environ, ABESD_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, __file__, "--child", "--reps", str(reps)],
        env=env, capture_output=True, text=True,
    )
    if proc.returncode != 0:
        print(f"{backend} backend unavailable:\n{proc.stderr.strip()}", file=sys.stderr)
        return None
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--json")
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps(_measure(args.reps)))
        return

    results = {b: _run(b, args.reps) for b in ("native", "pure")}
    native, pure = results["native"], results["pure"]
    print(f"{'operation':<14}{'native ms':>12}{'pure ms':>12}{'speedup':>10}")
    for op in ("g1_mul", "g2_mul", "pairing", "hash_to_g1", "encapsulate", "decapsulate"):
        n = native[op] if native else float("nan")
        p = pure[op] if pure else float("nan")
        print(f"{op:<14}{n:>12.3f}{p:>12.3f}{p / n:>9.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2)


if __name__ == "__main__":
    main()
