"""Character segmentation accuracy on the synthetic corpus.

    python scripts/accuracy.py --n 200 --seed 42
"""
import argparse
import time

from cardseg.evaluate import corpus_accuracy
from cardseg.cli import CONFIG_KEYS, build_config


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help=f"override a pipeline setting ({', '.join(CONFIG_KEYS)})")
    ap.add_argument("--worst", type=int, default=5)
    args = ap.parse_args()
    cfg = build_config(dict(kv.split("=", 1) for kv in args.set))
    t0 = time.perf_counter()
    rep = corpus_accuracy(args.n, args.seed, cfg)
    dt = time.perf_counter() - t0
    print(f"cards {rep.n_cards}  chars {rep.n_truth}  correct {rep.n_correct}  "
          f"accuracy {rep.accuracy:.4f}  ({dt:.1f} s)")
    worst = sorted(range(rep.n_cards), key=lambda i: rep.per_card[i].accuracy)[:args.worst]
    for i in worst:
        s = rep.per_card[i]
        print(f"  card seed {args.seed + i}: {s.n_correct}/{s.n_truth} ({s.accuracy:.3f}), {s.n_pred} boxes")


if __name__ == "__main__":
    main()
