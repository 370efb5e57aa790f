import argparse
from pathlib import Path
from typing import List, Optional

import numpy as np

from classifier import iscb
from classifier.quantize import binarize, gaussian_matrix
from data import generators
from data.fetch import fetch_mnist
from data.model_store import load_model, load_model_meta, save_model
from data.tables import score_frame, write_table
from utils.exceptions import (AcceptanceError, ConfigError, ConsistencyError, DownloadError, IdxFormatError,
                              IterScbError, ModelFormatError)
from utils.logger import Logger
from .config import EXPERIMENTS, THEORY_RUNS, ExperimentConfig
from .experiments import run_experiment
from .preprocess import run_preprocess
from .theory_runner import run_theory

logger = Logger.get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_ACCEPTANCE = 4


def exit_code(error: BaseException) -> int:
    if isinstance(error, AcceptanceError):
        return EXIT_ACCEPTANCE
    if isinstance(error, ConfigError):
        return EXIT_USAGE
    if isinstance(error, (OSError, IdxFormatError, ModelFormatError, DownloadError, ConsistencyError)):
        return EXIT_IO
    return EXIT_ERROR


def _gen_data(args) -> int:
    try:
        dataset = _generate(args)
    except ValueError as e:
        raise ConfigError(str(e))
    generators.write_csv(dataset, args.out)
    return EXIT_OK


def _generate(args) -> generators.LabeledDataset:
    if args.kind == "sandwich":
        dataset = generators.gen_sandwich(args.n_blue, args.n_red, args.seed)
    elif args.kind == "arcs":
        dataset = generators.gen_arcs(args.n, args.seed)
    elif args.kind == "symmetric":
        dataset = generators.gen_symmetric(args.n, args.spread, args.seed)
    elif args.kind == "point-mass":
        dataset = generators.gen_point_masses(args.count1, args.count2, args.angle12, args.seed)
    else:
        dataset, _, _ = generators.gen_wedges(args.a1, args.a2, args.a12, args.n, args.seed)
    return dataset


def _train(args) -> int:
    dataset = generators.read_dataset_csv(args.data)
    x_train, y_train = dataset.train()
    if x_train.shape[1] == 0:
        raise ConfigError(f"{args.data} has no training points")
    a = gaussian_matrix(args.m, dataset.n, args.seed, offsets_from=x_train if args.affine else None)
    model = iscb.train_iterative(binarize(a, x_train), y_train, dataset.G, args.L, args.K,
                                 seed=args.seed, variant=args.variant, measurement=a,
                                 reuse_measurement=args.reuse)
    save_model(model, args.out, meta={"seed": args.seed, "data": str(args.data), "affine": args.affine})
    return EXIT_OK


def _eval(args) -> int:
    dataset = generators.read_dataset_csv(args.data)
    model = load_model(args.model)
    a = model.layers[0].scb.measurement
    if a is None:
        raise ConfigError(f"{args.model} has no first-layer hyperplanes; it can only score sign codes")
    x_test, y_test = dataset.test()
    batches = iscb.score_layers(model, binarize(a, x_test))
    for k, batch in enumerate(batches, start=1):
        print(f"K={k}\taccuracy={np.mean(batch.predictions() == y_test):.4f}")
    if args.scores_out:
        write_table(score_frame(batches, y_test, variant_levels=model.variant == iscb.RHAT), args.scores_out)
    logger.debug(f"Model metadata: {load_model_meta(args.model)}")
    return EXIT_OK


def _config_from(args, name: str) -> ExperimentConfig:
    fields = {key: getattr(args, key) for key in ("m", "L", "K", "variant", "seed_base", "trials", "out_dir",
                                                 "workers", "check", "balanced", "train_per_class",
                                                 "test_per_class", "samples", "affine", "data_dir", "dataset",
                                                 "count1", "count2", "angle12")
              if getattr(args, key, None) is not None}
    return ExperimentConfig(name=name, **fields)


def _experiment(args) -> int:
    run_experiment(_config_from(args, args.name))
    return EXIT_OK


def _theory(args) -> int:
    run_theory(_config_from(args, args.name))
    return EXIT_OK


def _preprocess(args) -> int:
    run_preprocess(_config_from(args, "preprocess"))
    return EXIT_OK


def _fetch(args) -> int:
    fetch_mnist(args.dest)
    return EXIT_OK


def _add_run_args(parser: argparse.ArgumentParser, default_out: str):
    parser.add_argument("--seed-base", "--seed", dest="seed_base", type=int, default=0, help="trial t uses seed seed-base + t")
    parser.add_argument("--trials", type=int, help="number of independent trials")
    parser.add_argument("--workers", type=int, default=1, help="worker processes; 1 runs in-process")
    parser.add_argument("--out-dir", type=Path, default=Path(default_out), help="directory for CSV tables and summary.json")
    parser.add_argument("--check", action="store_true", help="exit with code 4 if an acceptance check fails")


def _add_model_args(parser: argparse.ArgumentParser):
    parser.add_argument("--m", type=int, help="measurements (hyperplane tuples) per level")
    parser.add_argument("--L", type=int, help="levels: longest hyperplane tuple")
    parser.add_argument("--K", type=int, help="number of stacked applications")
    parser.add_argument("--variant", choices=iscb.VARIANTS, default=iscb.RTILDE,
                        help="feature passed between applications")
    parser.add_argument("--affine", action="store_true", help="shift first-layer hyperplanes off the origin")


def build_parser() -> argparse.ArgumentParser:
    """Builds the parser for the command line arguments"""
    parser = argparse.ArgumentParser(prog="iterscb", description="""
        Iterated sign-pattern classification on one-bit measurements:
        dataset generation, training, evaluation, experiments and bound checks.
        """)
    parser.add_argument("--verbose", "-v", action="store_true", help="log DEBUG messages to the console")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen-data", help="write a synthetic dataset as CSV")
    gen.add_argument("kind", choices=("sandwich", "arcs", "symmetric", "point-mass", "wedges"))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, required=True)
    gen.add_argument("--n", type=int, default=200, help="points per class (arcs, symmetric, wedges)")
    gen.add_argument("--n-blue", type=int, default=200)
    gen.add_argument("--n-red", type=int, default=400)
    gen.add_argument("--spread", type=float, default=np.pi / 8)
    gen.add_argument("--count1", type=int, default=8)
    gen.add_argument("--count2", type=int, default=4)
    gen.add_argument("--angle12", type=float, default=np.pi / 6)
    gen.add_argument("--a1", type=float, default=np.pi / 8)
    gen.add_argument("--a2", type=float, default=np.pi / 8)
    gen.add_argument("--a12", type=float, default=np.pi / 8)
    gen.set_defaults(handler=_gen_data)

    train = commands.add_parser("train", help="train a model on a dataset CSV")
    train.add_argument("--data", type=Path, required=True)
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--out", type=Path, required=True, help="model file to write")
    train.add_argument("--reuse", action="store_true", help="reuse one re-measurement matrix for every layer")
    _add_model_args(train)
    train.set_defaults(handler=_train, m=100, L=1, K=1)

    evaluate = commands.add_parser("eval", help="per-layer test accuracy of a saved model")
    evaluate.add_argument("--data", type=Path, required=True)
    evaluate.add_argument("--model", type=Path, required=True)
    evaluate.add_argument("--scores-out", type=Path, help="CSV of every test point's scores per layer")
    evaluate.set_defaults(handler=_eval)

    experiment = commands.add_parser("experiment", help="multi-trial classification experiments")
    experiment.add_argument("name", choices=EXPERIMENTS)
    _add_model_args(experiment)
    _add_run_args(experiment, "results")
    experiment.add_argument("--balanced", action="store_true", help="sandwich with as many blue as red points")
    experiment.add_argument("--train-per-class", type=int)
    experiment.add_argument("--test-per-class", type=int)
    experiment.add_argument("--data-dir", type=Path, help="MNIST IDX directory")
    experiment.add_argument("--dataset", help="dataset CSV used instead of the generator (sandwich)")
    experiment.add_argument("--count1", type=int, help="copies of the class-1 point (point-mass)")
    experiment.add_argument("--count2", type=int, help="copies of the class-2 point (point-mass)")
    experiment.add_argument("--angle12", type=float, help="angle between the two points in radians (point-mass)")
    experiment.set_defaults(handler=_experiment)

    theory = commands.add_parser("theory", help="closed-form bounds against simulation")
    theory.add_argument("name", choices=THEORY_RUNS)
    theory.add_argument("--samples", type=int, help="Monte Carlo draws")
    _add_run_args(theory, "results")
    theory.set_defaults(handler=_theory)

    preprocess = commands.add_parser("preprocess", help="linear SVM on raw points vs on score features")
    preprocess.add_argument("--m", type=int)
    preprocess.add_argument("--L", type=int)
    _add_run_args(preprocess, "results")
    preprocess.set_defaults(handler=_preprocess)

    fetch = commands.add_parser("fetch-mnist", help="download the MNIST IDX files")
    fetch.add_argument("--dest", type=Path, help="target directory (default: $ITERSCB_DATA_DIR)")
    fetch.set_defaults(handler=_fetch)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run the command and map failures to exit codes"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logger_root = Logger.get_instance(verbose=args.verbose)
    try:
        logger_root.debug(f"Running {args.command}")
        return args.handler(args)
    except AcceptanceError as e:
        logger.error(str(e))
        return EXIT_ACCEPTANCE
    except (IterScbError, OSError) as e:
        logger.error(f"{args.command} failed: {str(e)}", exc_info=True)
        return exit_code(e)
