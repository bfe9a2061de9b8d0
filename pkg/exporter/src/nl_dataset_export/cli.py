import argparse
import sys

from .export import DATASET_NAMES, export_dataset


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nl-export",
        description="Export a benchmark graph to nodes.csv/edges.csv + manifest.txt",
    )
    parser.add_argument("--dataset", required=True,
                        help=f"one of: {', '.join(DATASET_NAMES)}")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--cache", default=None,
                        help="download/cache directory for the source distributions")
    args = parser.parse_args(argv)
    try:
        manifest = export_dataset(args.dataset, args.out, cache_dir=args.cache)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(manifest.to_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
