"""Time the compiled and numpy tracker kernels on one Mode-I frame.

    python3 benchmarks/bench_tracker.py [--repeat 20] [--snr-db 5]
"""

import argparse
import time

import numpy as np

from dabradar.estimators import _backend
from dabradar.numerology import MODE_I, encode_frame, random_prs, random_transitions
from dabradar.scene import PathSpec, SceneConfig, fading_profile, observe, synthesize_frame


def make_frame(snr_db, seed=0):
    rng = np.random.default_rng(seed)
    scene = SceneConfig([PathSpec(1.0, 0.0), PathSpec(0.3j, 8.0), PathSpec(0.2, 21.0)],
                        [PathSpec(0.05, 90.0, 160.0)])
    h = synthesize_frame(scene, 0, fading_profile(20.0, rng))
    noise_var = np.mean(np.abs(h) ** 2) / 10 ** (snr_db / 10)
    prs = random_prs(rng)
    x = encode_frame(prs, random_transitions(rng)).symbols
    return observe(h, x, noise_var, rng), prs, noise_var


def bench(kernel, y, prs, noise_var, repeat):
    kernel(y, prs, 0.15, noise_var)  # warm-up
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        kernel(y, prs, 0.15, noise_var)
        times.append(time.perf_counter() - t0)
    return np.median(times), np.min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--snr-db", type=float, default=5.0)
    args = ap.parse_args()
    y, prs, noise_var = make_frame(args.snr_db)
    print(f"frame {MODE_I.active_count} x {MODE_I.useful_symbols_per_frame}, active backend: "
          f"{_backend.BACKEND}")
    results = {}
    for name in ("python", "cython"):
        try:
            kernel = _backend.get_kernel(name)
        except ImportError:
            print(f"{name:7s} unavailable")
            continue
        med, best = bench(kernel, y, prs, noise_var, args.repeat)
        results[name] = kernel(y, prs, 0.15, noise_var)
        print(f"{name:7s} median {med * 1e3:8.2f} ms/frame   best {best * 1e3:8.2f} ms/frame")
    if len(results) == 2:
        a, b = results["python"], results["cython"]
        dev = max(float(np.max(np.abs(u.astype(complex) - v.astype(complex)))) for u, v in zip(a, b))
        print(f"max abs deviation between backends: {dev:.2e}")


if __name__ == "__main__":
    main()
