"""Command line interface.

Exit codes: 0 on success, 1 for runtime failures (missing files, bad data,
rows out of range, busy ports), 2 for usage errors (argparse's own exit).
"""

from __future__ import annotations

import argparse
import json
import os
import socket
import sys
import textwrap

import numpy as np

from trafficxai.dataset import DatasetError, feature_matrix, parse_csv, split, targets
from trafficxai.explanations import ExplanationMethod
from trafficxai.forest import (
    DEFAULT_MODEL_PATH,
    ForestConfig,
    ForestError,
    load_forest_file,
    save_forest_file,
    train,
    training_mse,
)
from trafficxai.render import item_description, render
from trafficxai.shapley import ShapConfig, explain_shap, sample_background, shap_variant
from trafficxai.surrogate import LimeConfig, explain_lime, lime_variant


class CliError(Exception):
    """Raised for expected failures; reported on stderr with exit code 1."""


def _load_dataset(path: str):
    try:
        with open(path, "rb") as fh:
            return parse_csv(fh, source_name=path)
    except FileNotFoundError as exc:
        raise CliError(f"data file not found: {path}") from exc
    except DatasetError as exc:
        raise CliError(f"cannot parse {path}: {exc}") from exc


def _load_model(path: str):
    try:
        return load_forest_file(path)
    except FileNotFoundError as exc:
        raise CliError(f"model file not found: {path}") from exc
    except ForestError as exc:
        raise CliError(f"cannot load model {path}: {exc}") from exc


def _fmt_mse(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.6g}"


def _cmd_train(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.data)
    train_set, test_set = split(dataset, args.split, args.seed)
    if len(train_set) == 0:
        raise CliError("training split is empty; raise --split or provide more rows")

    config = ForestConfig(n_trees=args.trees, bootstrap_seed=args.seed)
    try:
        forest = train(feature_matrix(train_set), targets(train_set), config)
    except ForestError as exc:
        raise CliError(str(exc)) from exc
    save_forest_file(forest, args.out)

    train_mse = training_mse(forest, feature_matrix(train_set), targets(train_set))
    test_mse = (
        training_mse(forest, feature_matrix(test_set), targets(test_set))
        if len(test_set) > 0
        else None
    )
    metrics = {
        "n_train": len(train_set),
        "n_test": len(test_set),
        "n_trees": config.n_trees,
        "seed": args.seed,
        "train_mse": train_mse,
        "test_mse": test_mse,
    }
    with open(args.out + ".metrics.json", "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(
        f"trained {args.out}: n_train={len(train_set)} n_test={len(test_set)} "
        f"train_mse={_fmt_mse(train_mse)} test_mse={_fmt_mse(test_mse)}"
    )
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    forest = _load_model(args.model)
    dataset = _load_dataset(args.data)
    preds = forest.predict_batch(feature_matrix(dataset))
    limit = len(dataset) if args.limit is None else min(args.limit, len(dataset))
    for i in range(limit):
        r = dataset.records[i]
        print(
            f"{i}: flow={preds[i]:.1f} city={r.city} detector={r.detid} "
            f"speed={r.speed:.6g} occ={r.occ:.6g}"
        )
    return 0


def _cmd_explain(args: argparse.Namespace) -> int:
    forest = _load_model(args.model)
    dataset = _load_dataset(args.data)
    if not 0 <= args.row < len(dataset):
        raise CliError(f"row {args.row} outside 0..{len(dataset) - 1}")

    method = ExplanationMethod.parse(args.method)
    x = np.asarray(dataset.records[args.row].features(), dtype=np.float64)
    if method.family == "lime":
        surrogate = explain_lime(
            forest, x, forest.training_stats, LimeConfig(), feature_names=forest.feature_names
        )
        explanation = lime_variant(surrogate, method)
    else:
        background = sample_background(feature_matrix(dataset), ShapConfig())
        explanation = shap_variant(explain_shap(forest, x, background, forest.feature_names), method)
    rendered = render(explanation, method)

    if args.format == "json":
        sys.stdout.write(rendered.to_json_bytes().decode("utf-8") + "\n")
        return 0
    # screen-reader hygiene: plain text, wrapped to 80 columns
    for line in textwrap.wrap(rendered.summary_text, width=80):
        print(line)
    for item in rendered.aria["item_descriptions"]:
        for line in textwrap.wrap(item, width=80, initial_indent="- ", subsequent_indent="  "):
            print(line)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from trafficxai.service import create_app

    port = args.port if args.port is not None else int(os.environ.get("PORT", "8080"))
    model_path = args.model or os.environ.get("MODEL_PATH", DEFAULT_MODEL_PATH)
    data_path = args.data or os.environ.get("DATA_PATH", "UTD19.csv")
    ui_dir = args.ui or os.environ.get("UI_DIR", "")

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, port))
    except OSError as exc:
        raise CliError(f"cannot bind {args.host}:{port}: {exc}") from exc
    finally:
        probe.close()

    app = create_app(model_path=model_path, data_path=data_path, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trafficxai", description="Traffic flow predictions with accessible explanations")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a forest and save the model artifact")
    p_train.add_argument("--data", required=True, help="training CSV")
    p_train.add_argument("--out", default=DEFAULT_MODEL_PATH, help="artifact path")
    p_train.add_argument("--trees", type=int, default=100)
    p_train.add_argument("--seed", type=int, default=42, help="drives both the split and the bootstrap")
    p_train.add_argument("--split", type=float, default=0.8, help="training fraction")
    p_train.set_defaults(run=_cmd_train)

    p_predict = sub.add_parser("predict", help="print the prediction table")
    p_predict.add_argument("--model", default=DEFAULT_MODEL_PATH)
    p_predict.add_argument("--data", required=True)
    p_predict.add_argument("--limit", type=int, default=None, help="print at most this many rows")
    p_predict.set_defaults(run=_cmd_predict)

    p_explain = sub.add_parser("explain", help="explain one row")
    p_explain.add_argument("--model", default=DEFAULT_MODEL_PATH)
    p_explain.add_argument("--data", required=True)
    p_explain.add_argument("--row", type=int, required=True)
    p_explain.add_argument(
        "--method",
        required=True,
        choices=[m.value for m in ExplanationMethod],
    )
    p_explain.add_argument("--format", choices=["text", "json"], default="text")
    p_explain.set_defaults(run=_cmd_explain)

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=None, help="overrides the PORT env var")
    p_serve.add_argument("--model", default="", help="overrides the MODEL_PATH env var")
    p_serve.add_argument("--data", default="", help="overrides the DATA_PATH env var")
    p_serve.add_argument("--ui", default="", help="static UI directory, overrides UI_DIR")
    p_serve.set_defaults(run=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
