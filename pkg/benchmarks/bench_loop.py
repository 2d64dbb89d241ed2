"""Ticks-per-second comparison of the two motion-loop backends.

Usage: python3 benchmarks/bench_loop.py [n_ticks]
"""

from __future__ import annotations

import sys
import time

from rehabloop import backend
from rehabloop.config import default_config


def bench(which: str, n_ticks: int) -> float:
    cfg = default_config()
    # Warm the projection table cache outside the timed region.
    backend.run_motion_loop(
        cfg.plan.exercise, cfg.plan.assist, cfg.dynamics, cfg.profile,
        0.02, 100, 1, force_backend=which,
    )
    t0 = time.perf_counter()
    backend.run_motion_loop(
        cfg.plan.exercise, cfg.plan.assist, cfg.dynamics, cfg.profile,
        0.02, n_ticks, 1, force_backend=which,
    )
    return n_ticks / (time.perf_counter() - t0)


def main() -> None:
    n_ticks = int(sys.argv[1]) if len(sys.argv) > 1 else 50_000
    rates = {}
    for which in ("python",) + (("compiled",) if backend.HAVE_COMPILED else ()):
        rates[which] = bench(which, n_ticks)
        print(f"{which:>9}: {rates[which]:>12,.0f} ticks/s")
    if "compiled" in rates:
        print(f"  speedup: {rates['compiled'] / rates['python']:.1f}x")
    else:
        print("  compiled kernel not available")


if __name__ == "__main__":
    main()
