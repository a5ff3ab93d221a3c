"""Benchmark the tape replay kernels: numba JIT vs pure-Python fallback.

The forward-replay and backward-sweep loops are the package's hot paths (one
pair per Adam iteration during refinement).  Both backends compute identical
values; this script measures the speed gap on a realistic workload.

Usage:
    python3 benchmarks/bench_tape.py [--frames 60] [--repeats 5]

The fallback is selected per process via SMPLID_NO_NUMBA=1, so this script
re-runs itself in a subprocess for the second measurement.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def measure(frames: int, repeats: int) -> dict:
    import smplid as sm
    from smplid.autodiff import KERNEL_BACKEND
    from smplid.diffpipe import build_physics_loss_tape, pack_motion
    from smplid.refinement import RefinementConfig

    skel = sm.default_skeleton()
    params = sm.build_segment_params(skel)
    walk = sm.synth_walk(frames / 30.0, 30.0)
    noisy = sm.add_uniform_noise(walk, 0.05, seed=42)
    cfg = RefinementConfig()

    t0 = time.perf_counter()
    tape, out = build_physics_loss_tape(
        skel, params, noisy, cfg.lambda_smooth, cfg.lambda_mag, cfg.lambda_reg, cfg.tau_max
    )
    record_s = time.perf_counter() - t0

    x = pack_motion(noisy)
    tape.forward(x)  # warm-up (includes JIT compilation on the numba path)
    tape.backward(out)

    fwd, bwd = [], []
    for _ in range(repeats):
        t0 = time.perf_counter()
        tape.forward(x)
        fwd.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        tape.backward(out)
        bwd.append(time.perf_counter() - t0)

    grad = tape.backward(out)
    return {
        "backend": KERNEL_BACKEND,
        "nodes": len(tape),
        "record_s": record_s,
        "forward_s": float(np.median(fwd)),
        "backward_s": float(np.median(bwd)),
        "value": float(tape.val[out]),
        "grad_norm": float(np.linalg.norm(grad)),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=60)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--emit-json", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.emit_json:
        print(json.dumps(measure(args.frames, args.repeats)))
        return 0

    results = []
    for disable in ("0", "1"):
        env = dict(os.environ, SMPLID_NO_NUMBA=disable)
        out = subprocess.run(
            [sys.executable, __file__, "--frames", str(args.frames),
             "--repeats", str(args.repeats), "--emit-json"],
            env=env, capture_output=True, text=True, check=True,
        )
        results.append(json.loads(out.stdout.strip().splitlines()[-1]))

    numba_res, python_res = results
    assert numba_res["nodes"] == python_res["nodes"]
    value_gap = abs(numba_res["value"] - python_res["value"]) / max(abs(python_res["value"]), 1e-30)

    print(f"tape: {numba_res['nodes']} nodes ({args.frames} frames, full loss pipeline)")
    print(f"{'backend':10s} {'record':>9s} {'forward':>10s} {'backward':>10s}")
    for r in results:
        print(f"{r['backend']:10s} {r['record_s']:8.2f}s {r['forward_s']*1e3:8.1f}ms {r['backward_s']*1e3:8.1f}ms")
    if python_res["forward_s"] > 0:
        print(f"speedup: forward {python_res['forward_s']/numba_res['forward_s']:.0f}x, "
              f"backward {python_res['backward_s']/numba_res['backward_s']:.0f}x")
    print(f"value agreement: relative gap {value_gap:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
