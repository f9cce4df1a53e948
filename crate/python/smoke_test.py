#!/usr/bin/env python3
"""Smoke test for the ffhyper_py extension module.

Build the module first:

    cargo build -p ffhyper-py

then run this script from the repository root:

    python3 python/smoke_test.py
"""

import os
import shutil
import sys
import tempfile


def locate_extension():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    candidates = [
        os.path.join(root, "target", profile, name)
        for profile in ("release", "debug")
        for name in ("libffhyper_py.so", "ffhyper_py.so", "libffhyper_py.dylib")
    ]
    for c in candidates:
        if os.path.exists(c):
            return c
    sys.exit("extension not found; run `cargo build -p ffhyper-py` first")


def main():
    ext = locate_extension()
    tmp = tempfile.mkdtemp(prefix="ffhyper_py_")
    shutil.copy(ext, os.path.join(tmp, "ffhyper_py.so"))
    sys.path.insert(0, tmp)
    import ffhyper_py as ff

    # exact root-of-unity arithmetic: zeta_4^2 = -1
    i = ff.root_of_unity(4, 1)
    minus_one = ff.root_of_unity(2, 1)
    assert (i * i) == minus_one, "zeta_4^2 should be -1"

    # Gauss sum of the trivial character is 1
    g0 = ff.gauss_sum(7, 0)
    assert g0.as_integer() == "1"

    # |g(eta)|^2 = q for a nontrivial character
    g = ff.gauss_sum(7, 2)
    assert (g * g.conj()).as_integer() == "7"

    # Jacobi sum of two trivial characters over F_7 is (1-(1-q)^2)/q = -5
    j = ff.jacobi_sum(7, [0, 0])
    assert j.as_integer() == "-5"

    # closed 1F0: F(phi_2; eps; 3) over F_7 = phi_2(-2) = -1
    v = ff.hyper_f(7, [3], [0], 3)
    assert v.as_integer() == "-1"

    # Hesse curve class counts at lambda = 3 over F_7 sum to the point count
    counts = ff.surface_counts(7, 3, [1, 1, 1], 3)
    assert len(counts) == 3
    total = sum(int(v.as_integer()) for (_, v) in counts)
    assert total == 9, f"Hesse point count should be 9, got {total}"

    # quartic Dwork K3 zeta series starts 1, 320, ...
    series = ff.zeta_series(13, 4, [1, 1, 1, 1], 2, 4)
    assert series[0] == "1" and series[1] == "320", series

    # a quick identity sweep
    checks = ff.verify("relations")
    assert all(ok for (_, ok, _) in checks), [c for c in checks if not c[1]]

    print("ffhyper_py smoke test: all assertions passed")


if __name__ == "__main__":
    main()
