"""
CLI de combigrad.

    combigrad gen|train|eval|compare --config cfg.json [--seed N] --out DIR
    combigrad landscape [--config lab.json] [--family sp --k 3] [--lambda 10] --out DIR|grid.csv
    combigrad serve [--host 0.0.0.0] [--port 8000]

Código de salida: 0 ok, 1 auditoría fallida, 2 error de dominio.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from combigrad import settings
from combigrad.errors import AuditError, CombigradError, InputError
from combigrad.harness.audit import audit_labels
from combigrad.harness.datasets import SyntheticDataset, derive_seed, load_dataset, make_splits, save_dataset
from combigrad.harness.experiments import compare_solvers, record_from
from combigrad.lab import random_problem, render_landscape, toy_three_region
from combigrad.learn.config import TrainConfig, load_config
from combigrad.learn.models import build_model
from combigrad.learn.train import evaluate, exact_solver_for, solver_for, train

logger = logging.getLogger("combigrad.cli")

TRAIN_FILE = "train.jsonl"
TEST_FILE = "test.jsonl"


def _write_json(path: Path, data: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2), encoding="utf-8")


def _load_train_config(args) -> TrainConfig:
    if not args.config:
        raise InputError(f"'{args.command}' needs --config")
    config = load_config(args.config)
    if args.seed is not None:
        config = load_config({**config.to_json_dict(), "seed": args.seed})
    return config


def _datasets(config: TrainConfig, data_dir: Optional[str]) -> Tuple[SyntheticDataset, SyntheticDataset]:
    if data_dir:
        return load_dataset(Path(data_dir) / TRAIN_FILE), load_dataset(Path(data_dir) / TEST_FILE)
    return make_splits(config)


# =========================
# Comandos
# =========================

def cmd_gen(args) -> Dict[str, Any]:
    config = _load_train_config(args)
    out = Path(args.out)
    train_set, test_set = make_splits(config)
    save_dataset(train_set, out / TRAIN_FILE)
    save_dataset(test_set, out / TEST_FILE)

    report = {
        "train": audit_labels(train_set, limit_issues=10),
        "test": audit_labels(test_set, limit_issues=10),
    }
    _write_json(out / "audit.json", report)
    if any(r["status"] != "ok" for r in report.values()):
        raise AuditError("label audit failed", out=str(out / "audit.json"))
    return {"train": len(train_set), "test": len(test_set), "audit": "ok", "out": str(out)}


def cmd_train(args) -> Dict[str, Any]:
    config = _load_train_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train_set, test_set = _datasets(config, args.data)

    metrics_path = out / "metrics.jsonl"
    with metrics_path.open("w", encoding="utf-8") as fh:
        def stream(record):
            fh.write(json.dumps(record.to_dict()) + "\n")
            fh.flush()

        result = train(config, train_set, test_set, on_epoch=stream)

    record = record_from(config, result, train_set)
    _write_json(out / "config.json", config.to_json_dict())
    _write_json(out / "model.json", record.model_state)
    _write_json(out / "summary.json", record.to_dict())

    if args.record:
        from combigrad.db import SessionLocal, init_db
        from combigrad.harness.registry import save_run

        init_db()
        db = SessionLocal()
        try:
            save_run(db, record)
        finally:
            db.close()

    return {"final": record.final, "wall_time": record.wall_time, "out": str(out)}


def cmd_eval(args) -> Dict[str, Any]:
    config = _load_train_config(args)
    if not args.model:
        raise InputError("'eval' needs --model (model.json written by 'train')")
    _, test_set = _datasets(config, args.data)
    if len(test_set) == 0:
        raise InputError("test set is empty")

    state = json.loads(Path(args.model).read_text(encoding="utf-8"))
    model = build_model(config, test_set.n_features, np.random.default_rng(derive_seed(config.seed, "train/init")))
    model.load_state_dict(state)

    loss, acc = evaluate(model, test_set, solver_for(config), exact_solver_for(config))
    result = {"family": config.family, "k": config.k, "size": len(test_set), "test_loss": loss, "test_acc": acc}
    _write_json(Path(args.out) / "eval.json", result)
    return result


def _landscape_options(args) -> Dict[str, Any]:
    opts = {"problem": "toy", "k": 4, "lambda": [10.0], "res": 128, "seed": 0}
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if "family" in data:
            data["problem"] = data.pop("family")
        opts.update(data)
    for key, value in (("problem", args.problem), ("k", args.k), ("res", args.res), ("seed", args.seed)):
        if value is not None:
            opts[key] = value
    if args.lam is not None:
        opts["lambda"] = args.lam
    if not isinstance(opts["lambda"], list):
        opts["lambda"] = [opts["lambda"]]
    return opts


def cmd_landscape(args) -> Dict[str, Any]:
    """
    Con `--out grid.csv` (un solo lambda) escribe la grilla en ese archivo;
    si no, `--out` es un directorio con un CSV por lambda y landscape.json.
    """
    opts = _landscape_options(args)
    out = Path(args.out)
    single_file = out.suffix.lower() == ".csv"
    if single_file and len(opts["lambda"]) != 1:
        raise InputError("--out as a .csv file takes exactly one --lambda", lambdas=opts["lambda"])
    (out.parent if single_file else out).mkdir(parents=True, exist_ok=True)

    summary: List[Dict[str, Any]] = []
    for lam in opts["lambda"]:
        if opts["problem"] == "toy":
            prob = toy_three_region()
        else:
            prob = random_problem(opts["problem"], int(opts["k"]), lam=float(lam), seed=int(opts["seed"]))
        slice_axes = prob.default_slice(np.random.default_rng(int(opts["seed"])))
        grid = render_landscape(prob.solver, prob.lin, slice_axes, float(lam), int(opts["res"]), extent=prob.extent)
        path = out if single_file else out / f"landscape_{prob.name}_lambda{float(lam):g}.csv"
        path.write_text(grid.to_csv(), encoding="utf-8")
        summary.append({"lambda": float(lam), "diff_fraction": grid.diff_fraction(), "csv": str(path)})

    if not single_file:
        _write_json(out / "landscape.json", {"problem": opts["problem"], "grids": summary})
    return {"grids": summary}


def cmd_compare(args) -> Dict[str, Any]:
    config = _load_train_config(args)
    table = compare_solvers(config)
    _write_json(Path(args.out) / "compare.json", table)
    return table


def cmd_serve(args) -> Dict[str, Any]:
    import uvicorn

    uvicorn.run("combigrad.main:app", host=args.host, port=args.port, workers=args.workers)
    return {}


COMMANDS = {
    "gen": cmd_gen,
    "train": cmd_train,
    "eval": cmd_eval,
    "landscape": cmd_landscape,
    "compare": cmd_compare,
    "serve": cmd_serve,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="combigrad", description="Gradientes a través de solvers combinatorios.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("gen", "train", "eval", "compare"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="Config JSON (acepta \"preset\": true)")
        p.add_argument("--seed", type=int, default=None, help="Pisa el seed del config")
        p.add_argument("--out", default="out", help="Directorio de salida")
        if name in ("train", "eval"):
            p.add_argument("--data", default=None, help="Directorio con train.jsonl/test.jsonl de 'gen'")
        if name == "train":
            p.add_argument("--record", action="store_true", help="Guardar la corrida en la base")
        if name == "eval":
            p.add_argument("--model", default=None, help="model.json escrito por 'train'")

    p = sub.add_parser("landscape")
    p.add_argument("--config", default=None, help="JSON con family, k, lambda, res, seed")
    p.add_argument("--family", "--problem", dest="problem", choices=["toy", "sp", "tsp", "pm"], default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, nargs="+", default=None)
    p.add_argument("--res", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="out")

    p = sub.add_parser("serve")
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=settings.LOG_LEVEL, format=settings.LOG_FORMAT)
    try:
        result = COMMANDS[args.command](args)
    except AuditError as e:
        logger.error("%s", e.message)
        print(json.dumps(e.to_detail()), file=sys.stderr)
        return 1
    except CombigradError as e:
        logger.error("%s", e.message)
        print(json.dumps(e.to_detail()), file=sys.stderr)
        return 2
    if result:
        print(json.dumps(result, indent=2, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
