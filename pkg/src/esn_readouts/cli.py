"""Command line interface: ``esn-readouts {gen,fetch-jv,run,report,bench}``."""

import argparse
import logging
import shutil
import sys
import tempfile
import urllib.request
from pathlib import Path

from . import data as D
from . import harness as H

log = logging.getLogger("esn_readouts")

UCI_BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases/JapaneseVowels-mld/"
JV_FILES = ("ae.train", "ae.test", "size_ae.train", "size_ae.test")

# SHA-256 of the parsed contents (see data.content_digest), not of the raw
# bytes, so any faithful copy of the dataset verifies.
JV_DIGESTS = {
    "train": "51fd1936bd84ac60432aacbbd85a90e405351b467660f8fcd23bc4abdc10f118",
    "test": "397128f5014fb6ce2ee9b456d04b92691d1f2ac48b97022881b89203bc186764",
}


class CLIError(Exception):
    pass


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _names(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def cmd_gen(args):
    ds = D.gen_sine_square(D.SineSquareConfig(args.period, args.segments, args.seed))
    if args.sigma:
        ds = D.add_noise(ds, D.NoiseSpec(args.sigma, args.noise_seed))
    D.write_sine_square_csv(ds, args.output)
    print(f"wrote {len(ds)} segments to {args.output}")
    return 0


def verify_jv(root):
    root = Path(root)
    train, test = D.load_japanese_vowels(root / "ae.train", root / "ae.test")
    got = {"train": D.content_digest(train), "test": D.content_digest(test)}
    for part, digest in got.items():
        if digest != JV_DIGESTS[part]:
            raise CLIError(
                f"checksum mismatch for {part} set in {root}: got {digest}, "
                f"expected {JV_DIGESTS[part]}"
            )
    return train, test


def cmd_fetch_jv(args):
    dest = Path(args.dest) if args.dest else H.data_dir() / "japanese_vowels"
    if not args.verify_only:
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            if args.from_ts:
                src = Path(args.from_ts)
                for part, name in (("train", "TRAIN"), ("test", "TEST")):
                    ts = src / f"JapaneseVowels_{name}.ts"
                    if not ts.exists():
                        raise CLIError(f"{ts} not found")
                    D.ts_to_blocks(ts, tmp / f"ae.{part}", tmp / f"size_ae.{part}")
            else:
                for name in JV_FILES:
                    url = args.url_base.rstrip("/") + "/" + name
                    log.info("downloading %s", url)
                    try:
                        with urllib.request.urlopen(url, timeout=60) as resp:
                            (tmp / name).write_bytes(resp.read())
                    except OSError as exc:
                        raise CLIError(
                            f"could not download {url}: {exc}. Without network access, "
                            "convert a local copy with --from-ts DIR"
                        ) from None
            verify_jv(tmp)
            dest.mkdir(parents=True, exist_ok=True)
            for name in JV_FILES:
                shutil.copyfile(tmp / name, dest / name)
    train, test = verify_jv(dest)
    print(f"Japanese vowels OK in {dest}: {len(train)} train / {len(test)} test utterances")
    return 0


def cmd_run(args):
    overrides = {
        "dataset": args.dataset,
        "sizes": args.sizes,
        "sigmas": args.sigmas,
        "methods": args.methods,
        "simulations": args.simulations,
        "base_seed": args.seed,
        "output": args.output,
        "workers": args.workers,
        "jv_dir": args.jv_dir,
    }
    if args.plan:
        plan = H.ExperimentPlan.from_file(args.plan, **overrides)
    else:
        dataset = args.dataset or "sine_square"
        if args.sigmas is None:
            overrides["sigmas"] = H.SINE_SQUARE_SIGMAS if dataset == "sine_square" else H.JV_SIGMAS
        plan = H.ExperimentPlan.from_mapping({}, **overrides)
    table = H.run_plan(plan)
    table.write_csv(plan.output)
    print(f"wrote {len(table.rows)} rows to {plan.output}")
    return 0


def cmd_report(args):
    table = H.ResultTable.read_csv(args.results)
    best = H.best_methods(table)
    winners = {(r.dataset, r.N, r.sigma, r.method) for r in best.values()}
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        out.write(H.CSV_HEADER + ",best\n")
        for r in table.sorted().rows:
            mark = "1" if (r.dataset, r.N, r.sigma, r.method) in winners else "0"
            out.write(",".join(r.csv_fields() + [mark]) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    if args.output:
        for (ds, n, s), r in best.items():
            print(f"{ds} N={n} sigma={s:g}: {r.method} ({r.mean_acc:.2f})")
    return 0


def cmd_bench(args):
    from .benchmark import main as bench_main

    return bench_main(["--repeat", str(args.repeat)])


def build_parser():
    p = argparse.ArgumentParser(prog="esn-readouts", description=__doc__)
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a synthetic sine/square dataset as CSV")
    g.add_argument("--period", type=int, default=10)
    g.add_argument("--segments", type=int, default=500)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--sigma", type=float, default=0.0, help="optional additive noise")
    g.add_argument("--noise-seed", type=int, default=1)
    g.add_argument("-o", "--output", default="sine_square.csv")
    g.set_defaults(func=cmd_gen)

    f = sub.add_parser("fetch-jv", help="download and verify the Japanese vowels files")
    f.add_argument("--dest", help="target directory (default: cache dir)")
    f.add_argument("--url-base", default=UCI_BASE)
    f.add_argument("--from-ts", metavar="DIR", help="convert JapaneseVowels_{TRAIN,TEST}.ts from DIR")
    f.add_argument("--verify-only", action="store_true")
    f.set_defaults(func=cmd_fetch_jv)

    r = sub.add_parser("run", help="run an experiment plan and write a results CSV")
    r.add_argument("plan", nargs="?", help="plan file (key = value lines)")
    r.add_argument("--dataset", choices=H.DATASETS)
    r.add_argument("--sizes", type=_ints)
    r.add_argument("--sigmas", type=_floats)
    r.add_argument("--methods", type=_names)
    r.add_argument("--simulations", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--workers", type=int)
    r.add_argument("--jv-dir")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("report", help="mark the best method per (N, sigma)")
    s.add_argument("results")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_report)

    b = sub.add_parser("bench", help="compare numba and numpy kernels")
    b.add_argument("--repeat", type=int, default=5)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (CLIError, H.PlanError, D.DataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
