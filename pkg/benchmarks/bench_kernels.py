"""Compare the compiled and numpy kernels on the per-frequency response sweep.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from spincom import kernels
from spincom.model import linearize
from spincom.params import FORWARD, DriveConfig, PhysicalParams
from spincom.sweep import sweep


def bench_batch(model, n, repeat):
    omegas = 2 * np.pi * np.logspace(1, 7, n)
    args = (model.drift, omegas, model.output, model.feedthrough, model.noise_input, model.noise, model.signal_input)
    out = {}
    for name, backend in sorted(kernels.BACKENDS.items()):
        number = max(1, 20000 // n)
        t = min(timeit.repeat(lambda: backend.output_batch(*args), number=number, repeat=repeat)) / number
        out[name] = t
    return out


def bench_sweep(repeat):
    p = PhysicalParams()
    axes = {"nu_rot_hz": np.linspace(0, 8000, 100), "omega_hz": np.logspace(1, 6, 100)}
    out = {}
    for name in sorted(kernels.BACKENDS):
        previous = kernels.use_backend(name)
        try:
            out[name] = min(timeit.repeat(
                lambda: sweep(p, DriveConfig(FORWARD, 0.0, np.pi / 2), axes, "n_add_ratio"), number=1, repeat=repeat
            ))
        finally:
            kernels.use_backend(previous)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    _, model = linearize(PhysicalParams(), DriveConfig(FORWARD, 5690.0))
    names = sorted(kernels.BACKENDS)
    print(f"backends: {', '.join(names)} (active: {kernels.BACKEND})")
    print(f"{'frequencies':>12} " + " ".join(f"{n + ' [us]':>14}" for n in names) + (" speedup" if len(names) > 1 else ""))
    for n in (1, 10, 100, 1000, 10000):
        t = bench_batch(model, n, args.repeat)
        row = f"{n:>12} " + " ".join(f"{t[k] * 1e6:>14.1f}" for k in names)
        if len(names) > 1:
            row += f" {t['numpy'] / t['cython']:>7.1f}x"
        print(row)
    t = bench_sweep(args.repeat)
    print("100x100 (nu_rot, omega) n_add_ratio sweep: " + ", ".join(f"{k} {v * 1e3:.1f} ms" for k, v in t.items()))


if __name__ == "__main__":
    main()
