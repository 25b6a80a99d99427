"""Compare the compiled kernels with the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--json]

Each case runs on both modules, checks that they agree to 1e-12 relative,
and reports the best-of-N wall time per call.
"""

import argparse
import json
import sys
import timeit

import numpy as np

from edgeheat import _pykernels

try:
    from edgeheat import _ckernels
except ImportError:
    _ckernels = None

NU_GRID = np.linspace(0.0, 0.95, 20)
X_GRID = np.geomspace(1e-3, 80.0, 25)


def _scalar_sweep(fn):
    def run(mod):
        f = getattr(mod, fn)
        return [f(nu, x) for nu in NU_GRID for x in X_GRID]
    return run


def _zeros(mod):
    return [mod.bessel_j_zero(v, n) for v in (-0.7, -0.3, 0.0, 0.3, 0.5) for n in range(1, 41)]


def _kernel_array(mod):
    t, x, xt = np.meshgrid(np.geomspace(1e-2, 10, 20), np.linspace(0.05, 5, 20),
                           np.linspace(0.05, 5, 10), indexing="ij")
    return mod.friedrichs_kernel_array(0.3, t.ravel(), x.ravel(), xt.ravel())


CASES = {
    "bessel_i_scaled (500 calls)": _scalar_sweep("bessel_i_scaled"),
    "bessel_k_scaled (500 calls)": _scalar_sweep("bessel_k_scaled"),
    "bessel_jy (500 calls)": _scalar_sweep("bessel_jy"),
    "bessel_j_zero (200 zeros)": _zeros,
    "friedrichs_kernel_array (4000 points)": _kernel_array,
}


def _flat(values):
    return np.asarray(values, dtype=float).ravel()


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", action="store_true")
    args = p.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; run pip install -e . --no-build-isolation",
              file=sys.stderr)
        return 1
    rows = []
    for name, case in CASES.items():
        a, b = _flat(case(_ckernels)), _flat(case(_pykernels))
        rel = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
        tc = min(timeit.repeat(lambda: case(_ckernels), number=1, repeat=args.repeat))
        tp = min(timeit.repeat(lambda: case(_pykernels), number=1, repeat=args.repeat))
        rows.append({"case": name, "cython_s": tc, "python_s": tp, "speedup": tp / tc,
                     "max_rel_diff": rel})
    if args.json:
        print(json.dumps(rows, indent=2, sort_keys=True))
    else:
        print(f"{'case':40s} {'cython':>10s} {'python':>10s} {'speedup':>8s} {'max rel diff':>13s}")
        for r in rows:
            print(f"{r['case']:40s} {r['cython_s']:10.4f} {r['python_s']:10.4f} "
                  f"{r['speedup']:8.1f} {r['max_rel_diff']:13.2e}")
    return 0 if all(r["max_rel_diff"] <= 1e-12 for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
