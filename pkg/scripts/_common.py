import argparse
from pathlib import Path

RESULTS = Path(__file__).resolve().parent.parent / "results"


def parser(description, replicates=200):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--replicates", type=int, default=replicates)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=None,
                    help="output CSV, or a directory (no suffix) for multi-file scripts")
    return ap


def out_path(args, name):
    if args.out is None:
        path = RESULTS / name
    elif args.out.suffix:
        path = args.out
    else:
        path = args.out / name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path
