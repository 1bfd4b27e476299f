"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--train-steps 10]

Kernel timings import both backends side by side. The optional training-step
timing runs one short training loop per backend in a subprocess, since the
backend is fixed at import through SEASONTREND_BACKEND.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from seasontrend._kernels import _numba as NB
from seasontrend._kernels import _numpy as NP

TRAIN_SNIPPET = """
import time
from seasontrend import EncoderConfig, TrainConfig, gen_synthetic_corpus, train
c = gen_synthetic_corpus(0)
cfg = TrainConfig.desk_scale(iterations={steps})
train(c, EncoderConfig(m=1, h=64), TrainConfig.desk_scale(iterations=2))  # warm-up / jit
t = time.perf_counter()
train(c, EncoderConfig(m=1, h=64), cfg)
print(time.perf_counter() - t)
"""


def best_of(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t)
    return min(times)


def max_abs_diff(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return max(float(np.max(np.abs(u - v))) for u, v in zip(a, b))


def cases(rng):
    x = rng.standard_normal((64, 64, 32))
    w = rng.standard_normal((3, 32, 32))
    g = rng.standard_normal((64, 64, 32))
    wt = rng.standard_normal((32, 32, 32))  # widest trend-mixture kernel
    re = rng.standard_normal((64, 2048))
    im = rng.standard_normal((64, 2048))
    re_odd, im_odd = re[:63].copy(), im[:63].copy()
    e = rng.standard_normal(100_000)
    a = rng.standard_normal((256, 2048))
    return [
        ("conv forward k=3 d=4", "conv_forward", (x, w, 4)),
        ("conv forward k=32", "conv_forward", (x, wt, 1)),
        ("conv grad input k=3", "conv_backward_input", (g, w, 4)),
        ("conv grad weight k=3", "conv_backward_weight", (x, g, 3, 4)),
        ("dft radix-2 N=64", "dft_radix2", (re, im, False)),
        ("dft naive N=63", "dft_naive", (re_odd, im_odd, False)),
        ("arma filter 1e5", "arma_filter", (np.array([0.9, -0.1]), np.array([0.2, -0.5]), e)),
        ("gelu 5e5", "gelu", (a,)),
    ]


def train_time(backend, steps):
    env = {**os.environ, "SEASONTREND_BACKEND": backend}
    out = subprocess.run([sys.executable, "-c", TRAIN_SNIPPET.format(steps=steps)], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--train-steps", type=int, default=0, help="also time this many training steps per backend")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'kernel':<24}{'numba ms':>10}{'numpy ms':>10}{'speedup':>9}{'max |diff|':>12}")
    for label, name, fargs in cases(rng):
        f_nb, f_np = getattr(NB, name), getattr(NP, name)
        r_nb, r_np = f_nb(*fargs), f_np(*fargs)
        diff = max_abs_diff(r_nb, r_np)
        t_nb, t_np = best_of(f_nb, fargs, args.repeat), best_of(f_np, fargs, args.repeat)
        print(f"{label:<24}{t_nb * 1e3:>10.2f}{t_np * 1e3:>10.2f}{t_np / t_nb:>8.2f}x{diff:>12.1e}")

    if args.train_steps:
        t_nb, t_np = train_time("numba", args.train_steps), train_time("numpy", args.train_steps)
        print(f"\n{args.train_steps} training steps: numba {t_nb:.2f}s  numpy {t_np:.2f}s  ({t_np / t_nb:.2f}x)")


if __name__ == "__main__":
    main()
