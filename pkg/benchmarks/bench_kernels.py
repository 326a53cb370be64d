"""Time the compiled kernels against the NumPy fallback.

Usage::

    python3 benchmarks/bench_kernels.py            # 120 x 40 mesh
    python3 benchmarks/bench_kernels.py --hnex 300 --hney 100 --pairwise

Each kernel is timed on the inputs it sees inside the optimiser: filter
construction on element centroids, element energies from a displacement
field, and the value scatter that rebuilds the stiffness matrix.
"""
import argparse
import math
import time

import numpy as np

from hextop import kernels
from hextop.element import wachspress_k0
from hextop.fea import Assembler
from hextop.filters import pairwise_weights
from hextop.honeymesh import build_mesh


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--hnex", type=int, default=120)
    ap.add_argument("--hney", type=int, default=40)
    ap.add_argument("--rfill-factor", type=float, default=0.04,
                    help="filter radius as a fraction of the domain length (default 0.04)")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--pairwise", action="store_true",
                    help="also time the brute-force all-pairs filter construction")
    args = ap.parse_args(argv)

    mesh = build_mesh(args.hnex, args.hney)
    rfill = args.rfill_factor * args.hnex * math.sqrt(3)
    k0 = wachspress_k0()
    asm = Assembler(mesh, k0)
    rng = np.random.default_rng(0)
    u = rng.normal(size=mesh.ndof)
    moduli = rng.uniform(1e-9, 1, mesh.nelem)
    cx, cy = mesh.centroids[:, 0].copy(), mesh.centroids[:, 1].copy()
    dofs = np.ascontiguousarray(mesh.dofs, dtype=np.int64)
    kflat = k0.ravel().copy()

    print(f"mesh {args.hnex}x{args.hney}: {mesh.nelem} elements, {mesh.ndof} dofs, "
          f"rfill {rfill:.3f}")
    print(f"{'kernel':<18}" + "".join(f"{name:>12}" for name in sorted(kernels.backends())))
    cases = {
        "filter_triplets": lambda k: k.filter_triplets(cx, cy, rfill),
        "element_energies": lambda k: k.element_energies(u, dofs, k0),
        "scatter_values": lambda k: k.scatter_values(asm.slot, moduli, kflat, len(asm.indices)),
    }
    for label, call in cases.items():
        row = f"{label:<18}"
        for name, mod in sorted(kernels.backends().items()):
            row += f"{best_of(lambda: call(mod), args.repeat) * 1e3:10.3f}ms"
        print(row)
    if args.pairwise:
        t = best_of(lambda: pairwise_weights(mesh.centroids, rfill), 1)
        print(f"{'pairwise filter':<18}{t * 1e3:10.1f}ms  (all-pairs reference)")


if __name__ == "__main__":
    main()
