#!/usr/bin/env python3
"""Benchmark the compiled line-scan kernel against the numpy fallback.

Runs the same representative coefficient workloads through both backends
in one process (the compiled extension and the pure-python reference are
both importable regardless of which one the package selected at import)
and reports wall times, speedup factors, and the maximum absolute
disagreement, which should be at floating-point noise level.

Usage: python scripts/benchmark_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from shearedge import kernels, regions
from shearedge.generators import (default_generator_2d, default_generator_3d)
from shearedge.quadrature import DEFAULT_2D, DEFAULT_3D, indicator_integral
from shearedge.transform2d import cone_matrix
from shearedge.transform3d import pyramid_matrix


def _workloads():
    gen2 = default_generator_2d()
    gen3 = default_generator_3d()
    disk = regions.Disk((0.0, 0.0), 1.0)
    ball = regions.Ball((0.0, 0.0, 0.0), 1.0)
    yield ("2D disk a=2^-9 aligned", disk, gen2,
           cone_matrix(2.0 ** -9, 0.0), np.array([1.0, 0.0]), DEFAULT_2D)
    yield ("2D disk a=2^-9 transversal", disk, gen2,
           cone_matrix(2.0 ** -9, 0.4), np.array([1.0, 0.0]), DEFAULT_2D)
    yield ("3D ball a=2^-7 aligned", ball, gen3,
           pyramid_matrix(2.0 ** -7, (0.0, 0.0)), np.array([1.0, 0.0, 0.0]),
           DEFAULT_3D)


def _with_backend(fn):
    saved = kernels.line_integrals
    results = {}
    backends = {"python": kernels.line_integrals_numpy}
    if kernels.BACKEND == "compiled":
        backends["compiled"] = saved
    try:
        for name, impl in backends.items():
            kernels.line_integrals = impl
            results[name] = fn()
    finally:
        kernels.line_integrals = saved
    return results


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if kernels.BACKEND != "compiled":
        print("note: compiled extension unavailable "
              "(or SHEAREDGE_FORCE_PYTHON set); timing the fallback only")

    print("%-28s %12s %12s %9s %11s"
          % ("workload", "python [ms]", "compiled", "speedup", "max |diff|"))
    for label, region, gen, M, p, settings in _workloads():

        def run():
            t0 = time.perf_counter()
            for _ in range(args.repeats):
                val, _, _ = indicator_integral(region, gen, M, p, settings)
            dt = (time.perf_counter() - t0) / args.repeats
            return val, dt

        res = _with_backend(run)
        vp, tp = res["python"]
        if "compiled" in res:
            vc, tc = res["compiled"]
            print("%-28s %12.2f %12.2f %8.1fx %11.2e"
                  % (label, tp * 1e3, tc * 1e3, tp / tc, abs(vp - vc)))
        else:
            print("%-28s %12.2f %12s %9s %11s"
                  % (label, tp * 1e3, "-", "-", "-"))


if __name__ == "__main__":
    main()
