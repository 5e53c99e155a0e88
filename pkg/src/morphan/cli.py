"""``morphan`` command line.

Settings come from three layers, later ones winning: built-in defaults, a
JSON file given with ``--config`` (keys are the long flag names with dashes
turned into underscores), and flags on the command line. Every command that
writes files also writes the fully resolved settings next to its output.

Exit codes: 0 success, 1 bad usage or invalid input, 2 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

log = logging.getLogger("morphan")

EXIT_OK, EXIT_CONTRACT, EXIT_IO = 0, 1, 2
# options that steer the run but do not change its results
_NOT_ECHOED = {"config", "command", "handler", "quiet", "threads"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_CONTRACT)


# ---------------------------------------------------------------- helpers


def _load_quads(path, fmt: str, nfc: bool = False):
    from . import corpus

    path = Path(path)
    if fmt == "quads":
        return corpus.read_quadruples(path)
    if fmt == "sigmorphon":
        return corpus.extract_sigmorphon_analogies(corpus.parse_sigmorphon(path, nfc=nfc))
    if fmt == "pairs":
        pairs = corpus.parse_relation_dir(path, nfc=nfc) if path.is_dir() else corpus.parse_relation_pairs(path, nfc=nfc)
        return corpus.extract_pair_analogies(pairs)
    raise UsageError(f"unknown format {fmt!r}")


def _resolved(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in _NOT_ECHOED:
            continue
        out[k] = list(v) if isinstance(v, tuple) else v
    return out


def _echo_config(args, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes((json.dumps(_resolved(args), sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8"))
    return path


def _echo_beside(args, out_file) -> Path:
    out_file = Path(out_file)
    return _echo_config(args, out_file.with_name(out_file.name + ".config.json"))


def _write_text(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_bytes(text.encode("utf-8"))


# ---------------------------------------------------------------- commands


def cmd_extract(args):
    from . import corpus

    quads = _load_quads(args.input, args.format, args.nfc)
    quads = corpus.sample_quadruples(quads, args.sample, args.seed)
    corpus.write_quadruples(quads, args.out)
    _echo_beside(args, args.out)
    log.info("wrote %d analogies to %s", len(quads), args.out)


def cmd_augment(args):
    from . import augment, corpus

    quads = corpus.read_quadruples(args.input)
    out = []
    for q in quads:
        if args.mode == "train":
            out.extend(augment.augment_for_training(q, args.neg_forms, args.dedup_conflicts).examples)
        else:
            out.extend(augment.augment_for_eval(q, args.dedup_conflicts).examples)
    corpus.write_quadruples(out, args.out, with_label=True)
    _echo_beside(args, args.out)
    log.info("wrote %d labelled examples to %s", len(out), args.out)


def cmd_train(args):
    from .corpus import AnalogyDataset
    from .train import TrainConfig, save_checkpoint, train

    quads = _load_quads(args.data, args.format, args.nfc)
    config = TrainConfig(epochs=args.epochs, train_sample_size=args.sample, batch_size=args.batch_size,
                         learning_rate=args.lr, seed=args.seed, neg_forms_per_base=args.neg_forms,
                         dedup_conflicts=args.dedup_conflicts, m=args.m, language=args.lang)
    ckpt = train(AnalogyDataset(quads, args.lang, "train"), config)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(ckpt, args.out)
    _echo_beside(args, args.out)
    log.info("final loss %.5f; checkpoint written to %s", ckpt.final_loss, args.out)


def _test_quads(args):
    from .corpus import sample_quadruples

    return sample_quadruples(_load_quads(args.data, args.format, args.nfc), args.sample, args.seed)


def cmd_eval(args):
    from .eval import CNNDecider, emit_report, evaluate_classifier, metrics_table
    from .train import load_checkpoint

    ckpt = load_checkpoint(args.ckpt)
    lang = args.lang or ckpt.language
    m = evaluate_classifier(CNNDecider(ckpt.model, args.threshold), _test_quads(args), language=lang,
                            source=lang, target=lang, seed=args.seed)
    emit_report([m], args.out_dir)
    _echo_config(args, Path(args.out_dir) / "config.json")
    if not args.quiet:
        sys.stdout.write(metrics_table([m]))


def cmd_baseline(args):
    from .baselines import BaselineDecider, run_baseline, write_results
    from .eval import emit_report, evaluate_classifier, metrics_table

    quads = _test_quads(args)
    rows = run_baseline(quads, args.method, args.k, args.rho, args.seed)
    if args.out:
        write_results(rows, args.out)
        _echo_beside(args, args.out)
    else:
        import csv

        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["quadruple", "method", "k", "decision", "score"])
        w.writerows(rows)
    if args.metrics_dir:
        decider = BaselineDecider(args.method, args.k, args.rho, args.seed)
        m = evaluate_classifier(decider, quads, language=args.lang, source=args.lang, target=args.lang,
                                seed=args.seed)
        emit_report([m], args.metrics_dir)
        _echo_config(args, Path(args.metrics_dir) / "config.json")
        if not args.quiet:
            sys.stderr.write(metrics_table([m]))


def _find_test_file(test_dir: Path, lang: str):
    for name, fmt in ((f"{lang}.tsv", "quads"), (f"{lang}-test", "sigmorphon")):
        if (test_dir / name).is_file():
            return test_dir / name, fmt
    raise FileNotFoundError(f"no test data for {lang!r} in {test_dir} (looked for {lang}.tsv and {lang}-test)")


def cmd_transfer(args):
    from .corpus import sample_quadruples
    from .eval import emit_report, evaluate_classifier, CNNDecider, metrics_table, transfer_full, transfer_partial
    from .train import load_checkpoint

    ckpt_dir, test_dir = Path(args.ckpt_dir), Path(args.test_dir)
    ckpts = {p.name[:-len(".ckpt")]: load_checkpoint(p) for p in sorted(ckpt_dir.glob("*.ckpt"))}
    if not ckpts:
        raise UsageError(f"no *.ckpt files in {ckpt_dir}")
    tests = {}
    for lang in ckpts:
        path, fmt = _find_test_file(test_dir, lang)
        tests[lang] = sample_quadruples(_load_quads(path, fmt, args.nfc), args.sample, args.seed)
    modes = ("full", "partial") if args.mode == "both" else (args.mode,)
    metrics = []
    for src in ckpts:
        for tgt in ckpts:
            if src == tgt:
                metrics.append(evaluate_classifier(CNNDecider(ckpts[src].model), tests[tgt], language=tgt,
                                                   source=src, target=tgt, seed=args.seed))
                continue
            if "full" in modes:
                metrics.append(transfer_full(ckpts[src], tests[tgt], source=src, target=tgt, seed=args.seed))
            if "partial" in modes:
                metrics.append(transfer_partial(ckpts[src], ckpts[tgt], tests[tgt], source=src, target=tgt,
                                                seed=args.seed))
    emit_report(metrics, args.out_dir)
    _echo_config(args, Path(args.out_dir) / "config.json")
    if not args.quiet:
        sys.stdout.write(metrics_table(metrics))


def cmd_coverage(args):
    from .corpus import coverage

    target = _load_quads(args.target, args.format, args.nfc)
    reference = _load_quads(args.reference, args.format, args.nfc)
    print(f"{coverage(target, reference):.2f}")


def cmd_stats(args):
    from .corpus import analogy_words, parse_sigmorphon, word_stats

    if args.format == "sigmorphon":
        words = [w for t in parse_sigmorphon(args.input, nfc=args.nfc) for w in (t.lemma, t.form)]
    else:
        words = list(analogy_words(_load_quads(args.input, args.format, args.nfc)))
    if args.unique:
        words = sorted(set(words))
    print(word_stats(words).format())


def cmd_gradcheck(args):
    from . import verify

    seeds = range(args.seed, args.seed + args.count)
    results = verify.run_all(seeds, args.step)
    for name, err in results.items():
        log.info("%-20s %.3e", name, err)
    worst = max(results.values())
    print(f"max relative error {worst:.3e}")
    return EXIT_OK if worst < verify.TOLERANCE else EXIT_CONTRACT


def cmd_synth(args):
    from .synth import write_synth

    train_path, test_path = write_synth(args.out_dir, args.name or args.script, args.lemmas, args.script, args.seed,
                                        args.test_fraction)
    _echo_config(args, Path(args.out_dir) / f"{train_path.name[:-len('-train')]}.config.json")
    log.info("wrote %s and %s", train_path, test_path)


# ---------------------------------------------------------------- parser


def _common(p, data_formats=("sigmorphon", "quads", "pairs"), default_format="sigmorphon"):
    p.add_argument("--format", choices=data_formats, default=default_format, help="input file format")
    p.add_argument("--nfc", action="store_true", help="NFC-normalise words")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="morphan", description="Morphological analogy detection toolkit.")
    parser.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    parser.add_argument("--threads", type=int, default=None, help="cap BLAS worker threads")
    parser.add_argument("--config", default=None, help="JSON file of option defaults")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("extract", help="extract analogies from a dataset")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    _common(p)
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("augment", help="expand analogies into labelled examples")
    p.add_argument("--in", dest="input", required=True, help="quadruple file")
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=("train", "eval"), default="train")
    p.add_argument("--neg-forms", type=int, choices=(3, 8), default=3)
    p.add_argument("--dedup-conflicts", action="store_true")
    p.set_defaults(handler=cmd_augment)

    p = sub.add_parser("train", help="train the embedder and classifier")
    p.add_argument("--data", required=True)
    p.add_argument("--lang", default="")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--sample", type=int, default=50000)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--neg-forms", type=int, choices=(3, 8), default=3)
    p.add_argument("--dedup-conflicts", action="store_true")
    p.add_argument("--m", type=int, default=64, help="character embedding size")
    p.add_argument("--out", required=True)
    _common(p)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--lang", default="")
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out-dir", required=True)
    _common(p)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("baseline", help="run a symbolic baseline over quadruples")
    p.add_argument("--method", choices=("alea", "kolmo", "formal"), required=True)
    p.add_argument("--in", dest="data", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--rho", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--lang", default="")
    p.add_argument("--out", default=None, help="decisions CSV (default: stdout)")
    p.add_argument("--metrics-dir", default=None, help="also run the accuracy protocol and report here")
    _common(p, default_format="quads")
    p.set_defaults(handler=cmd_baseline)

    p = sub.add_parser("transfer", help="cross-language transfer matrices")
    p.add_argument("--ckpt-dir", required=True, help="directory of <lang>.ckpt files")
    p.add_argument("--test-dir", required=True, help="directory of <lang>.tsv or <lang>-test files")
    p.add_argument("--mode", choices=("full", "partial", "both"), default="both")
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nfc", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=cmd_transfer)

    p = sub.add_parser("coverage", help="percentage of target analogies present in a reference")
    p.add_argument("--target", required=True)
    p.add_argument("--reference", required=True)
    _common(p, default_format="quads")
    p.set_defaults(handler=cmd_coverage)

    p = sub.add_parser("stats", help="word length and repeated-letter statistics")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--unique", action="store_true", help="count each distinct word once")
    _common(p)
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("gradcheck", help="finite-difference gradient verification")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1, help="number of consecutive seeds")
    p.add_argument("--step", type=float, default=1e-5)
    p.set_defaults(handler=cmd_gradcheck)

    p = sub.add_parser("synth", help="generate a toy suffixing language")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--name", default="")
    p.add_argument("--lemmas", type=int, default=500)
    p.add_argument("--script", choices=("latin", "cyrillic"), default="latin")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.set_defaults(handler=cmd_synth)
    return parser


def _subparser(parser, command):
    for action in parser._subparsers._group_actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise KeyError(command)


def parse_args(argv=None, parser=None):
    """Parse ``argv`` applying the config file between built-in defaults and flags."""
    parser = parser or build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    # the config file must be applied before the full parse, which would
    # otherwise reject required options that the file supplies
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    pre.add_argument("--quiet", action="store_true")
    pre.add_argument("--threads", default=None)
    head, rest = pre.parse_known_args(argv)
    if head.config and rest and not rest[0].startswith("-"):
        try:
            cfg = json.loads(Path(head.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {head.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError(f"config {head.config} must hold a JSON object")
        try:
            sub = _subparser(parser, rest[0])
        except KeyError:
            return parser.parse_args(argv)
        known = {a.dest for a in sub._actions} - {"help"}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown keys for {rest[0]!r} in {head.config}: {unknown}")
        # config values become defaults, so explicit flags still win; required
        # options satisfied by the file are relaxed for the second parse
        for action in sub._actions:
            if action.dest in cfg:
                action.required = False
        sub.set_defaults(**cfg)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONTRACT
    except UsageError as exc:
        sys.stderr.write(f"morphan: error: {exc}\n")
        return EXIT_CONTRACT
    except OSError as exc:
        sys.stderr.write(f"morphan: error: {exc}\n")
        return EXIT_IO
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads is not None:
        if args.threads < 1:
            sys.stderr.write("morphan: error: --threads must be >= 1\n")
            return EXIT_CONTRACT
        # only effective when numpy has not been imported yet
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    try:
        code = args.handler(args)
    except OSError as exc:
        sys.stderr.write(f"morphan: error: {exc}\n")
        return EXIT_IO
    except (UsageError, ValueError, KeyError) as exc:
        sys.stderr.write(f"morphan: error: {exc}\n")
        return EXIT_CONTRACT
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
