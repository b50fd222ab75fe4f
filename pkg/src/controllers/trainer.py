"""REINFORCE training of per-node label policies on the single-leaf task."""

import logging
import threading
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import torch

from ..errors import InvalidParams, NumericalError
from ..models.coloring import two_coloring, weak_two_coloring
from ..models.features import DEGREE, DEGREE_2COLOR, DEGREE_WEAK2, FEATURE_SPECS, node_features
from ..models.gnn import GNNModel, ModelKind, build_model
from ..models.graph import Graph
from ..models.node_program import Labeling
from ..models.port_numbering import PortNumbering, distinct_port_numberings, shuffled_port_numbering
from ..utils.generators import star
from .simulator import verify_single_leaf

logger = logging.getLogger(__name__)


@dataclass
class Policy:
    """Stochastic per-node policy: softmax of the readout vector / temperature."""

    model: GNNModel
    temperature: float = 1.0

    def __post_init__(self) -> None:
        if self.temperature <= 0:
            raise InvalidParams(f"temperature must be positive, got {self.temperature}")

    def logits(self, g: Graph, p: Optional[PortNumbering], x: torch.Tensor) -> torch.Tensor:
        """Readout vectors divided by the temperature."""
        return self.model(g, p, x) / self.temperature

    def probabilities(self, g: Graph, p: Optional[PortNumbering], x: torch.Tensor) -> torch.Tensor:
        """Per-node action distributions, rows sum to 1."""
        return torch.softmax(self.logits(g, p, x), dim=1)


OPTIMIZERS = ("adam", "sgd")
BASELINES = ("leave_one_out", "moving_average")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one training run (all trials share them).

    Each iteration samples samples_per_iteration labelings from one forward
    pass. The leave_one_out baseline scores every sample against the mean of
    the others in its batch; moving_average uses an EMA with baseline_decay.
    """

    iterations: int = 10000
    trials: int = 10
    learning_rate: float = 0.01
    baseline_decay: float = 0.99
    seed: int = 0
    star_leaves: int = 3
    layer_widths: Tuple[int, ...] = (16, 16)
    readout_hidden: Optional[int] = None
    init_scale: float = 0.1
    temperature: float = 1.0
    features: str = DEGREE
    eval_port_numberings: int = 5
    curve_every: int = 100
    optimizer: str = "adam"
    samples_per_iteration: int = 16
    baseline: str = "leave_one_out"

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise InvalidParams(f"iterations must be >= 0, got {self.iterations}")
        if self.trials < 1:
            raise InvalidParams(f"trials must be >= 1, got {self.trials}")
        if self.learning_rate <= 0:
            raise InvalidParams(f"learning rate must be > 0, got {self.learning_rate}")
        if not 0 <= self.baseline_decay < 1:
            raise InvalidParams(f"baseline decay must lie in [0, 1), got {self.baseline_decay}")
        if self.star_leaves < 2:
            raise InvalidParams("the single-leaf task needs a star with at least two leaves")
        if self.features not in FEATURE_SPECS:
            raise InvalidParams(f"unknown feature spec {self.features!r}")
        if self.eval_port_numberings < 1 or self.curve_every < 1:
            raise InvalidParams("eval_port_numberings and curve_every must be >= 1")
        if self.optimizer not in OPTIMIZERS:
            raise InvalidParams(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.baseline not in BASELINES:
            raise InvalidParams(f"baseline must be one of {BASELINES}, got {self.baseline!r}")
        if self.samples_per_iteration < 1:
            raise InvalidParams(f"samples_per_iteration must be >= 1, got {self.samples_per_iteration}")
        if self.baseline == "leave_one_out" and self.samples_per_iteration < 2:
            raise InvalidParams("the leave_one_out baseline needs at least two samples per iteration")
        object.__setattr__(self, "layer_widths", tuple(int(w) for w in self.layer_widths))

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["layer_widths"] = list(self.layer_widths)
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "TrainConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        if "layer_widths" in known:
            known["layer_widths"] = tuple(known["layer_widths"])
        return cls(**known)


class MovingAverageBaseline:
    """Exponential moving average of rewards."""

    def __init__(self, decay: float = 0.99, value: float = 0.0):
        self.decay = decay
        self.value = value

    def advantages(self, rewards: Sequence[float]) -> List[float]:
        return [r - self.value for r in rewards]

    def update(self, reward: float) -> float:
        self.value = self.decay * self.value + (1.0 - self.decay) * reward
        return self.value


class LeaveOneOutBaseline:
    """Each sample's baseline is the mean reward of the rest of its batch.

    value holds the last batch mean; a batch of one is scored against it.
    """

    def __init__(self, value: float = 0.0):
        self.value = value

    def advantages(self, rewards: Sequence[float]) -> List[float]:
        if len(rewards) == 1:
            return [rewards[0] - self.value]
        total = sum(rewards)
        others = len(rewards) - 1
        return [r - (total - r) / others for r in rewards]

    def update(self, reward: float) -> float:
        self.value = reward
        return self.value


Baseline = Union[MovingAverageBaseline, LeaveOneOutBaseline]


def make_baseline(cfg: TrainConfig) -> Baseline:
    if cfg.baseline == "moving_average":
        return MovingAverageBaseline(cfg.baseline_decay)
    return LeaveOneOutBaseline()


def make_optimizer(cfg: TrainConfig, model: GNNModel) -> torch.optim.Optimizer:
    params = [param for param in model.parameters() if param.requires_grad]
    if cfg.optimizer == "sgd":
        return torch.optim.SGD(params, lr=cfg.learning_rate)
    return torch.optim.Adam(params, lr=cfg.learning_rate)


@dataclass
class Episode:
    """One sampled labeling of one ported graph and its reward."""

    graph: Graph
    ports: Optional[PortNumbering]
    features: torch.Tensor
    labels: Tuple[int, ...]
    reward: float


@dataclass
class TrialResult:
    """Outcome of one seeded training trial.

    numberings is how many distinct port numberings the success check used.
    """

    trial: int
    seed: int
    success: bool
    reward_curve: List[Tuple[int, float]]
    checkpoint: Dict = field(repr=False)
    checkpoint_file: Optional[str] = None
    numberings: int = 0

    def to_dict(self) -> Dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "success": self.success,
            "numberings": self.numberings,
            "reward_curve": [[it, reward] for it, reward in self.reward_curve],
            "checkpoint_file": self.checkpoint_file,
        }


@dataclass
class TrainReport:
    """All trials of one model kind."""

    kind: ModelKind
    config: TrainConfig
    trials: List[TrialResult]

    @property
    def successes(self) -> int:
        return sum(1 for t in self.trials if t.success)

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind.value,
            "config": self.config.to_dict(),
            "successes": self.successes,
            "trials": [t.to_dict() for t in self.trials],
        }

    def curve_rows(self) -> List[Tuple[int, int, float]]:
        """(trial, iteration, mean_reward) rows."""
        return [(t.trial, it, reward) for t in self.trials for it, reward in t.reward_curve]


def sample_labelings(
    logits: torch.Tensor, rng: np.random.Generator, count: int
) -> List[Tuple[Tuple[int, ...], float]]:
    """count independent labelings, each one categorical draw per row of softmax(logits).

    Returns:
        (labels, log_prob) pairs, log_prob being the sum over rows
    """
    log_probs = torch.log_softmax(logits.detach(), dim=1).numpy()
    cdf = np.cumsum(np.exp(log_probs), axis=1)
    draws = rng.random((count, cdf.shape[0]))
    # inverse CDF: the label is the number of cumulative masses <= the draw
    picks = np.minimum((draws[:, :, None] >= cdf[None, :, :]).sum(axis=2), cdf.shape[1] - 1)
    rows = np.arange(cdf.shape[0])
    return [
        (tuple(int(label) for label in pick), float(log_probs[rows, pick].sum()))
        for pick in picks
    ]


def sample_from_logits(
    logits: torch.Tensor, rng: np.random.Generator
) -> Tuple[Tuple[int, ...], float]:
    """Independent categorical draws from softmax(logits), one per row.

    Returns:
        Labels and the sum of their log-probabilities
    """
    return sample_labelings(logits, rng, 1)[0]


def sample_actions(
    pol: Policy,
    g: Graph,
    p: Optional[PortNumbering],
    x: torch.Tensor,
    rng: np.random.Generator,
) -> Tuple[Tuple[int, ...], float]:
    """Sample one label per node from the policy.

    Returns:
        (labels, log_prob) with log_prob = Σ_v log π(label_v)
    """
    with torch.no_grad():
        logits = pol.logits(g, p, x)
    return sample_from_logits(logits, rng)


def log_prob(
    pol: Policy, g: Graph, p: Optional[PortNumbering], x: torch.Tensor, labels: Sequence[int]
) -> torch.Tensor:
    """Differentiable Σ_v log π(label_v)."""
    log_probs = torch.log_softmax(pol.logits(g, p, x), dim=1)
    index = torch.tensor(list(labels), dtype=torch.long).unsqueeze(1)
    return log_probs.gather(1, index).sum()


def reward_single_leaf(g: Graph, labels: Sequence[int]) -> float:
    """+1 iff exactly one leaf is selected, otherwise -1.

    Raises:
        NotAStar: If g is not a star
    """
    return 1.0 if verify_single_leaf(g, Labeling(labels)) else -1.0


def _episode_key(ep: Episode) -> Tuple[int, int, int]:
    return id(ep.graph), id(ep.ports), id(ep.features)


def reinforce_step(
    pol: Policy,
    episodes: Sequence[Episode],
    lr: float,
    baseline: Baseline,
    optimizer: Optional[torch.optim.Optimizer] = None,
    log_probs: Optional[torch.Tensor] = None,
) -> Policy:
    """One ascent step on Σ advantage · log_prob.

    Advantages come from baseline.advantages over the batch's rewards; the
    baseline then sees the batch's mean reward. Episodes sharing a graph,
    numbering and feature tensor share one forward pass.

    Args:
        pol: Policy updated in place
        episodes: Sampled labelings with rewards
        lr: Learning rate of the plain SGD step used when optimizer is None
        baseline: MovingAverageBaseline or LeaveOneOutBaseline
        optimizer: Persistent optimizer over pol's parameters
        log_probs: Log-softmax table, with gradients, already computed for
            the inputs of episodes[0]

    Raises:
        InvalidParams: If the batch is empty
        NumericalError: If a gradient is NaN or infinite
    """
    if not episodes:
        raise InvalidParams("reinforce_step needs at least one episode")
    params = [param for param in pol.model.parameters() if param.requires_grad]
    if optimizer is None:
        optimizer = torch.optim.SGD(params, lr=lr)
    optimizer.zero_grad()
    tables: Dict[Tuple[int, int, int], torch.Tensor] = {}
    if log_probs is not None:
        tables[_episode_key(episodes[0])] = log_probs
    rewards = [ep.reward for ep in episodes]
    objective = 0.0
    for ep, advantage in zip(episodes, baseline.advantages(rewards)):
        key = _episode_key(ep)
        if key not in tables:
            tables[key] = torch.log_softmax(pol.logits(ep.graph, ep.ports, ep.features), dim=1)
        index = torch.tensor(list(ep.labels), dtype=torch.long).unsqueeze(1)
        objective = objective + advantage * tables[key].gather(1, index).sum()
    (-objective).backward()
    for param in params:
        if param.grad is not None and not torch.isfinite(param.grad).all():
            raise NumericalError("non-finite policy gradient")
    optimizer.step()
    baseline.update(sum(rewards) / len(rewards))
    return pol


def finite_difference_error(pol: Policy, episode: Episode, h: float = 1e-5, floor: float = 1e-6) -> float:
    """Max relative error of the log-prob gradient against central differences.

    Args:
        pol: Policy whose parameters are probed (restored afterwards)
        episode: Fixed graph, ports, features and labels
        h: Finite-difference step
        floor: Lower bound on the denominator of the relative error

    Returns:
        max |analytic - numeric| / max(|analytic|, |numeric|, floor)
    """
    params = list(pol.model.parameters())
    for param in params:
        param.grad = None
    log_prob(pol, episode.graph, episode.ports, episode.features, episode.labels).backward()
    analytic = [param.grad.detach().clone() for param in params]

    def value() -> float:
        with torch.no_grad():
            return float(log_prob(pol, episode.graph, episode.ports, episode.features, episode.labels))

    worst = 0.0
    with torch.no_grad():
        for param, grad in zip(params, analytic):
            flat = param.view(-1)
            flat_grad = grad.view(-1)
            for k in range(flat.numel()):
                original = float(flat[k])
                flat[k] = original + h
                plus = value()
                flat[k] = original - h
                minus = value()
                flat[k] = original
                numeric = (plus - minus) / (2 * h)
                exact = float(flat_grad[k])
                error = abs(exact - numeric) / max(abs(exact), abs(numeric), floor)
                worst = max(worst, error)
    for param in params:
        param.grad = None
    return worst


def check_gradients(pol: Policy, episode: Episode, h: float = 1e-5, rtol: float = 1e-4) -> bool:
    """True iff finite_difference_error stays within rtol."""
    error = finite_difference_error(pol, episode, h)
    logger.debug("gradient check: max relative error %.3e", error)
    return error <= rtol


def _task_features(g: Graph, spec: str, delta: int) -> torch.Tensor:
    coloring = None
    if spec == DEGREE_WEAK2:
        coloring = weak_two_coloring(g)
    elif spec == DEGREE_2COLOR:
        coloring = two_coloring(g)
    return node_features(g, spec, delta, coloring)


def greedy_solves_single_leaf(
    model: GNNModel, g: Graph, x: torch.Tensor, numberings: Sequence[PortNumbering]
) -> bool:
    """Greedy labels pass verify_single_leaf under every given numbering."""
    return all(verify_single_leaf(g, Labeling(model.predict(g, p, x))) for p in numberings)


def train_trial(
    cfg: TrainConfig, kind: ModelKind, trial: int, stop_event: Optional[threading.Event] = None
) -> TrialResult:
    """Run one seeded trial on the star K_{1,cfg.star_leaves}.

    Weights start from uniform(-init_scale, init_scale); every iteration
    samples a fresh consistent port numbering, then samples_per_iteration
    labelings from one forward pass. Success is judged on a model rebuilt
    from the final checkpoint.
    """
    seed = cfg.seed + trial
    rng = np.random.default_rng(seed)
    g = star(cfg.star_leaves)
    delta = g.max_degree
    x = _task_features(g, cfg.features, delta)
    model = build_model(
        ModelKind(kind),
        delta,
        x.shape[1],
        rng,
        cfg.layer_widths,
        num_labels=2,
        readout_hidden=cfg.readout_hidden,
        features=cfg.features,
        init_scale=cfg.init_scale,
    )
    policy = Policy(model, cfg.temperature)
    baseline = make_baseline(cfg)
    optimizer = make_optimizer(cfg, model)

    curve: List[Tuple[int, float]] = []
    window: List[float] = []
    for iteration in range(1, cfg.iterations + 1):
        if stop_event is not None and stop_event.is_set():
            break
        p = shuffled_port_numbering(g, rng) if model.kind is ModelKind.VVC else None
        log_probs = torch.log_softmax(policy.logits(g, p, x), dim=1)
        episodes = [
            Episode(g, p, x, labels, reward_single_leaf(g, labels))
            for labels, _ in sample_labelings(log_probs, rng, cfg.samples_per_iteration)
        ]
        reinforce_step(policy, episodes, cfg.learning_rate, baseline, optimizer, log_probs)
        window.extend(ep.reward for ep in episodes)
        if iteration % cfg.curve_every == 0:
            curve.append((iteration, sum(window) / len(window)))
            logger.debug("%s trial %d iteration %d mean reward %.3f", model.kind.value, trial, iteration, curve[-1][1])
            window = []

    checkpoint = model.to_checkpoint()
    restored = GNNModel.from_checkpoint(checkpoint)
    numberings = distinct_port_numberings(g, cfg.eval_port_numberings, np.random.default_rng(seed))
    if len(numberings) < cfg.eval_port_numberings:
        logger.warning(
            "%s trial %d: only %d distinct port numberings of K_1,%d, %d requested",
            model.kind.value, trial, len(numberings), cfg.star_leaves, cfg.eval_port_numberings,
        )
    success = greedy_solves_single_leaf(restored, g, x, numberings)
    logger.info("%s trial %d (seed %d): %s", model.kind.value, trial, seed, "solved" if success else "failed")
    return TrialResult(trial, seed, success, curve, checkpoint, numberings=len(numberings))


def train(
    cfg: TrainConfig,
    model_kind: ModelKind,
    workers: int = 1,
    progress_callback: Optional[Callable[[int, int, str], None]] = None,
) -> TrainReport:
    """Run cfg.trials independent trials of one model kind.

    Args:
        cfg: Training configuration
        model_kind: VVC, MB or SB
        workers: Number of TrainWorker threads
        progress_callback: Callback function(finished, total, label)

    Returns:
        TrainReport with trials ordered by index
    """
    from .train_worker import TrainWorker

    kind = ModelKind(model_kind)
    trials = list(range(cfg.trials))
    count = max(1, min(int(workers), len(trials)))
    lock = threading.Lock()
    finished = [0]

    def on_trial(result: TrialResult) -> None:
        with lock:
            finished[0] += 1
            done = finished[0]
        if progress_callback:
            progress_callback(done, len(trials), f"{kind.value} trial {result.trial}")

    pool = [TrainWorker(cfg, kind, trials[k::count], trial_callback=on_trial) for k in range(count)]
    if count == 1:
        pool[0].run()
    else:
        for worker in pool:
            worker.start()
        for worker in pool:
            worker.join()

    results = sorted((r for worker in pool for r in worker.results), key=lambda r: r.trial)
    if len(results) != len(trials):
        errors = [worker.error for worker in pool if worker.error is not None]
        if errors:
            raise errors[0]
    return TrainReport(kind, cfg, results)
