"""End-to-end run: ingest -> perturb -> audit -> estimate -> sweep.

Uses a real ``list_attr_celeba.txt`` if given, otherwise synthetic labels.
All artifacts land in ``--out-dir``.

    python scripts/run_experiment.py --out-dir runs/demo
    python scripts/run_experiment.py --annotations list_attr_celeba.txt --p-w 0.9
"""

import argparse
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from facedp.cli import main as facedp
from facedp.synthetic import PAPER_ATTRIBUTES, celeba_text, random_database


@dataclass
class ExperimentConfig:
    out_dir: Path = Path("runs/demo")
    annotations: Path | None = None
    synthetic_n: int = 10_000
    attributes: list[str] = field(default_factory=lambda: list(PAPER_ATTRIBUTES))
    p_w: float = 0.8
    sweep_pw: tuple[float, ...] = (0.6, 0.7, 0.8, 0.9)
    trials: int = 10
    seed: int = 42
    slack: float = 0.15


def run(cfg: ExperimentConfig) -> dict:
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    source = cfg.annotations
    if source is None:
        source = out / "synthetic_attr.txt"
        source.write_text(celeba_text(random_database(cfg.synthetic_n, seed=cfg.seed)))

    db = out / "attributes.csv"
    config = out / "perturbation.json"
    config.write_text(json.dumps({
        "master_seed": cfg.seed,
        "attributes": {a: {"warner_pw": cfg.p_w} for a in cfg.attributes},
    }, indent=2))
    release = out / "release"
    pair = ["--original", str(db), "--perturbed", str(release / "perturbed.csv"), "--config", str(config)]

    codes = {
        "ingest": facedp(["ingest", str(source), "--format", "celeba", "--out", str(db)]),
        "perturb": facedp(["perturb", str(db), "--config", str(config), "--out-dir", str(release)]),
        "audit": facedp(["audit", *pair, "--slack", str(cfg.slack), "--out", str(out / "audit.json")]),
        "estimate": facedp(["estimate", *pair, "--out", str(out / "utility.csv")]),
        "sweep": facedp([
            "sweep", str(db),
            "--attributes", ",".join(cfg.attributes),
            "--pw", ",".join(map(str, cfg.sweep_pw)),
            "--trials", str(cfg.trials),
            "--seed", str(cfg.seed),
            "--out", str(out / "sweep.csv"),
        ]),
    }
    summary = {"config": {k: str(v) if isinstance(v, Path) else v for k, v in asdict(cfg).items()}, "exit_codes": codes}
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary


def parse_args() -> ExperimentConfig:
    d = ExperimentConfig()
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out-dir", type=Path, default=d.out_dir)
    p.add_argument("--annotations", type=Path)
    p.add_argument("-n", "--synthetic-n", type=int, default=d.synthetic_n)
    p.add_argument("--p-w", type=float, default=d.p_w)
    p.add_argument("--trials", type=int, default=d.trials)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--slack", type=float, default=d.slack)
    a = p.parse_args()
    return ExperimentConfig(out_dir=a.out_dir, annotations=a.annotations, synthetic_n=a.synthetic_n,
                            p_w=a.p_w, trials=a.trials, seed=a.seed, slack=a.slack)


if __name__ == "__main__":
    summary = run(parse_args())
    print(json.dumps(summary["exit_codes"]))
