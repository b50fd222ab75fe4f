"""Background thread running a share of the training trials."""

import logging
import threading
from typing import Callable, List, Optional, Sequence

from ..models.gnn import ModelKind
from .trainer import TrainConfig, TrialResult, train_trial

logger = logging.getLogger(__name__)


class TrainWorker(threading.Thread):
    """Thread-based runner for a fixed list of trial indices."""

    def __init__(
        self,
        cfg: TrainConfig,
        kind: ModelKind,
        trials: Sequence[int],
        trial_callback: Optional[Callable[[TrialResult], None]] = None,
    ):
        """Initialize the worker.

        Args:
            cfg: Shared training configuration
            kind: Model kind to train
            trials: Trial indices handled by this worker
            trial_callback: Callback function(result) after each trial
        """
        super().__init__(daemon=True)
        self.cfg = cfg
        self.kind = ModelKind(kind)
        self.trials = list(trials)
        self.trial_callback = trial_callback
        self.results: List[TrialResult] = []
        self.error: Optional[BaseException] = None
        self._stop_event = threading.Event()

    def stop(self) -> None:
        """Request the worker to stop after the current iteration."""
        self._stop_event.set()

    @property
    def stopped(self) -> bool:
        return self._stop_event.is_set()

    def run(self) -> None:
        """Train every assigned trial in order."""
        try:
            for trial in self.trials:
                if self.stopped:
                    break
                result = train_trial(self.cfg, self.kind, trial, self._stop_event)
                self.results.append(result)
                if self.trial_callback:
                    self.trial_callback(result)
        except Exception as exc:
            logger.error("%s worker failed: %s", self.kind.value, exc)
            self.error = exc
