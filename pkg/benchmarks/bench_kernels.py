"""Compare the compiled and numpy kernels on the two hot paths.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import math
import timeit

import numpy as np

from cpcsim import _kernels
from cpcsim.detectors import CascadeSpec, uniforms_per_trial
from cpcsim.evolution import return_spectrum


def cases():
    vals, weights = return_spectrum(8)
    thetas = np.arange(0.0, 70.0, 1e-4) * math.pi  # 700k-point revival scan grid
    spec = CascadeSpec(3, 2, 0.9, detect_residual=True)
    uniforms = np.random.default_rng(0).random((1 << 18, uniforms_per_trial(spec)))
    return {
        "revival spectral sum (n=8, 7e5 angles)": lambda k: k.return_probability(weights, vals, thetas),
        "cascade trials (depth 3, residual, 262144 trials)": lambda k: k.cascade_trials(
            uniforms, 3, 2, 0.9, 0.01, 0.9, True, 0.01
        ),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = {"python": _kernels.python_backend}
    if _kernels.compiled_backend is not None:
        backends["cython"] = _kernels.compiled_backend
    else:
        print("compiled kernels not built; timing the numpy fallback only")
    print(f"{'kernel':52s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup")
    for name, fn in cases().items():
        times = {b: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) for b, k in backends.items()}
        speedup = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:52s} " + " ".join(f"{t * 1e3:8.1f}ms" for t in times.values()) + f"   {speedup:6.2f}x")


if __name__ == "__main__":
    main()
