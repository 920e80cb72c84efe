#!/usr/bin/env python3
"""Bitstream representation accuracy versus stream length.

Sweeps target probabilities 0.1..0.9, measures ensemble density error for
several stream lengths, optionally with process variation, and writes a CSV
next to a printed summary table.
"""

import argparse
from pathlib import Path

from spinsc.experiments import density_sweep
from spinsc.sbg import SbgMode


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20260801)
    parser.add_argument("--repeats", type=int, default=50)
    parser.add_argument("--lengths", type=int, nargs="+", default=[64, 128, 256])
    parser.add_argument("--mode", choices=["simple", "self_control"], default="simple")
    parser.add_argument("--pv", action="store_true", help="enable process variation")
    parser.add_argument("--out", type=Path, default=Path("out/accuracy_sweep.csv"))
    args = parser.parse_args()

    probs = tuple(round(0.1 * k, 1) for k in range(1, 10))
    pv = (0.05, 0.02) if args.pv else None
    results = density_sweep(probs, tuple(args.lengths), args.repeats, args.seed,
                            mode=SbgMode(args.mode), pv_sigmas=pv)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    lines = ["n,avg_error,max_error"]
    print(f"{'n':>6} {'avg error':>12} {'max error':>12}")
    for r in results:
        print(f"{r.length:>6} {r.avg_error:>12.6f} {r.max_error:>12.6f}")
        lines.append(f"{r.length},{r.avg_error:.6g},{r.max_error:.6g}")
    args.out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
