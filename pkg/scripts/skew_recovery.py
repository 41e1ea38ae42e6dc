"""Skew error on synthetic single-paragraph regions, refined vs single-pass.

    python scripts/skew_recovery.py --n 100
"""
import argparse

from cardseg.evaluate import skew_recovery
from cardseg.skew import SkewConfig

VARIANTS = {
    "default": SkewConfig(),
    "single-pass": SkewConfig(passes=1),
    "raw-profile": SkewConfig(profile_window=0),
    "raw single-pass": SkewConfig(profile_window=0, passes=1),
    "raw single-pass, common denominator": SkewConfig(profile_window=0, passes=1, denominator="common"),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1000)
    args = ap.parse_args()
    print(f"{'variant':<36} {'<=100cd':>8} {'median':>7} {'p95':>6} {'max':>6}")
    for name, cfg in VARIANTS.items():
        r = skew_recovery(args.n, args.seed, cfg)
        e = sorted(r.errors.tolist())
        p95 = e[min(len(e) - 1, (95 * len(e)) // 100)]
        print(f"{name:<36} {r.within(100):8.2f} {r.median:7.1f} {p95:6d} {e[-1]:6d}")


if __name__ == "__main__":
    main()
