"""Experiment controller: reproducible experiment bundles and their reports."""

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..errors import FormatError, InvalidParams, TooLarge, Undefined
from ..models.gnn import ModelKind
from ..models.graph import Graph
from ..models.oracles import (
    Sense,
    all_nodes_baseline,
    approx_ratio,
    check,
    matching_vc_baseline,
    min_dominating_set,
    min_vertex_cover,
)
from ..utils.file_utils import build_header, read_json, write_csv, write_json
from ..utils.generators import connected_graphs, path, random_bounded, random_suite, star
from .trainer import TrainConfig, TrainReport, train

logger = logging.getLogger(__name__)

RATIO_COLUMNS = (
    "index",
    "n",
    "m",
    "delta",
    "mds_opt",
    "mds_all_nodes",
    "mds_ratio",
    "mds_bound",
    "vc_opt",
    "vc_matching",
    "vc_ratio",
    "within_bounds",
)
CURVE_COLUMNS = ("trial", "iteration", "mean_reward")
SUMMARY_COLUMNS = ("kind", "successes", "trials")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything that determines an experiment's outputs.

    Attributes:
        name: Experiment name, used in file names
        seed: Master seed
        family: Graph family for ratio runs, e.g. `random_bounded:12:3`,
            `random_suite:4:16:1:4`, `star:2:8`, `path:2:9`, `atlas:5` or `empty`
        count: Number of graphs drawn from random families
        model_kinds: Model kinds trained by the single-leaf experiment
        train: Training configuration (its seed is replaced by `seed`)
        out_dir: Output directory
    """

    name: str = "experiment"
    seed: int = 0
    family: str = "random_bounded:12:3"
    count: int = 200
    model_kinds: Tuple[str, ...] = ("vvc", "mb", "sb")
    train: TrainConfig = field(default_factory=TrainConfig)
    out_dir: str = "results"

    def __post_init__(self) -> None:
        kinds = tuple(ModelKind(kind).value for kind in self.model_kinds)
        object.__setattr__(self, "model_kinds", kinds)
        if self.count < 0:
            raise InvalidParams(f"count must be >= 0, got {self.count}")
        if self.train.seed != self.seed:
            object.__setattr__(self, "train", replace(self.train, seed=self.seed))

    def parameters(self) -> Dict:
        """Output-determining parameters (the output directory excluded)."""
        return {
            "name": self.name,
            "seed": self.seed,
            "family": self.family,
            "count": self.count,
            "model_kinds": list(self.model_kinds),
            "train": self.train.to_dict(),
        }

    def to_dict(self) -> Dict:
        data = self.parameters()
        data["out_dir"] = self.out_dir
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "ExperimentSpec":
        try:
            known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
            if "train" in known:
                known["train"] = TrainConfig.from_dict(known["train"])
            if "model_kinds" in known:
                known["model_kinds"] = tuple(known["model_kinds"])
            return cls(**known)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidParams):
                raise
            raise FormatError(f"malformed experiment spec: {exc}") from exc

    @classmethod
    def from_file(cls, path: str) -> "ExperimentSpec":
        """Load a spec from a JSON file."""
        return cls.from_dict(read_json(path))


def _ints(parts: List[str], expected: int, family: str) -> List[int]:
    if len(parts) != expected:
        raise InvalidParams(f"family {family!r} needs {expected} integer parameter(s)")
    try:
        return [int(part) for part in parts]
    except ValueError as exc:
        raise InvalidParams(f"family {family!r} has a non-integer parameter") from exc


def family_graphs(family: str, count: int, seed: int) -> List[Graph]:
    """Graphs of a ratio-experiment family, in canonical order.

    Raises:
        InvalidParams: If the family string is malformed
    """
    name, *parts = family.split(":")
    if name == "empty":
        return []
    if name == "random_bounded":
        n, delta = _ints(parts, 2, family)
        children = np.random.SeedSequence(seed).spawn(count)
        return [random_bounded(n, delta, seed=np.random.default_rng(child)) for child in children]
    if name == "random_suite":
        n_min, n_max, d_min, d_max = _ints(parts, 4, family)
        return random_suite(count, (n_min, n_max), (d_min, d_max), seed)
    if name == "star":
        k_min, k_max = _ints(parts, 2, family)
        return [star(k) for k in range(k_min, k_max + 1)]
    if name == "path":
        n_min, n_max = _ints(parts, 2, family)
        return [path(n) for n in range(n_min, n_max + 1)]
    if name == "atlas":
        (max_n,) = _ints(parts, 1, family)
        return list(connected_graphs(max_n))
    raise InvalidParams(f"unknown graph family {family!r}")


@dataclass
class RatioSummary:
    """Aggregates of one ratio run."""

    graphs: int = 0
    skipped: int = 0
    violations: int = 0
    max_mds_ratio: Optional[Fraction] = None
    max_vc_ratio: Optional[Fraction] = None
    csv_path: Optional[Path] = None

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _larger(current: Optional[Fraction], value: Fraction) -> Fraction:
    return value if current is None else max(current, value)


def _vc_ratio(g: Graph, candidate: Tuple[int, ...], opt: Tuple[int, ...]) -> Fraction:
    try:
        return approx_ratio(len(candidate), len(opt), Sense.MIN).value
    except Undefined:
        # no edges: both covers are empty
        return Fraction(1)


class ExperimentController:
    """Runs experiment bundles and writes their report files."""

    def __init__(
        self,
        spec: ExperimentSpec,
        workers: int = 1,
        progress_callback: Optional[Callable[[int, int, str], None]] = None,
    ):
        """Initialize experiment controller.

        Args:
            spec: Experiment specification
            workers: Parallel training workers
            progress_callback: Callback function(current, total, label)
        """
        self.spec = spec
        self.workers = workers
        self.progress_callback = progress_callback
        self.out_dir = Path(spec.out_dir)

    def header(self) -> Dict:
        return build_header(self.spec.seed, self.spec.parameters())

    def run_singleleaf(self) -> Dict[str, TrainReport]:
        """Train every model kind on the single-leaf task and write reports.

        Files written under out_dir:
            <name>_<kind>.json            TrainReport
            <name>_<kind>_rewards.csv     trial, iteration, mean_reward
            <name>_summary.csv            kind, successes, trials
            checkpoints/<name>_<kind>_trial<k>.json

        Returns:
            Reports keyed by model kind value
        """
        spec = self.spec
        header = self.header()
        reports: Dict[str, TrainReport] = {}
        for kind_value in spec.model_kinds:
            kind = ModelKind(kind_value)
            logger.info("training %s: %d trials x %d iterations", kind.value, spec.train.trials, spec.train.iterations)
            report = train(spec.train, kind, self.workers, self.progress_callback)
            for result in report.trials:
                checkpoint_name = f"checkpoints/{spec.name}_{kind.value}_trial{result.trial}.json"
                write_json(self.out_dir / checkpoint_name, dict(result.checkpoint, header=header))
                result.checkpoint_file = checkpoint_name
            write_json(self.out_dir / f"{spec.name}_{kind.value}.json", dict(report.to_dict(), header=header))
            write_csv(
                self.out_dir / f"{spec.name}_{kind.value}_rewards.csv",
                CURVE_COLUMNS,
                report.curve_rows(),
                header,
            )
            reports[kind.value] = report
            logger.info("%s: %d/%d trials solved", kind.value, report.successes, len(report.trials))

        write_csv(
            self.out_dir / f"{spec.name}_summary.csv",
            SUMMARY_COLUMNS,
            [(kind, report.successes, len(report.trials)) for kind, report in reports.items()],
            header,
        )
        return reports

    def run_ratios(self) -> RatioSummary:
        """Compare baselines with exact optima on every graph of the family.

        Checks the all-nodes dominating set against Δ+1 and the
        matching-endpoint vertex cover against 2, with exact rationals.

        Returns:
            RatioSummary; the CSV is written to out_dir/<name>_ratios.csv
        """
        spec = self.spec
        graphs = family_graphs(spec.family, spec.count, spec.seed)
        summary = RatioSummary()
        rows = []
        for index, g in enumerate(graphs):
            if self.progress_callback:
                self.progress_callback(index, len(graphs), f"graph {index}")
            try:
                mds_opt = min_dominating_set(g)
                vc_opt = min_vertex_cover(g)
            except TooLarge as exc:
                logger.warning("skipping graph %d: %s", index, exc)
                summary.skipped += 1
                continue

            everything = all_nodes_baseline(g)
            cover = matching_vc_baseline(g)
            mds_ratio = approx_ratio(len(everything), len(mds_opt), Sense.MIN).value
            vc_ratio = _vc_ratio(g, cover, vc_opt)
            mds_bound = g.max_degree + 1
            within = (
                check("mds", g, everything)
                and check("mvc", g, cover)
                and mds_ratio <= mds_bound
                and vc_ratio <= 2
            )
            if not within:
                logger.error("graph %d breaks a ratio bound: mds %s, vc %s", index, mds_ratio, vc_ratio)
                summary.violations += 1

            summary.graphs += 1
            summary.max_mds_ratio = _larger(summary.max_mds_ratio, mds_ratio)
            summary.max_vc_ratio = _larger(summary.max_vc_ratio, vc_ratio)
            rows.append(
                (
                    index,
                    g.n,
                    g.m,
                    g.max_degree,
                    len(mds_opt),
                    len(everything),
                    str(mds_ratio),
                    mds_bound,
                    len(vc_opt),
                    len(cover),
                    str(vc_ratio),
                    int(within),
                )
            )

        summary.csv_path = write_csv(self.out_dir / f"{spec.name}_ratios.csv", RATIO_COLUMNS, rows, self.header())
        logger.info(
            "%d graphs, %d skipped, max mds ratio %s, max vc ratio %s",
            summary.graphs,
            summary.skipped,
            summary.max_mds_ratio,
            summary.max_vc_ratio,
        )
        return summary
