"""Trial executors: in-process synthetic and external command."""

from .external import ExternalCommandExecutor, execute_trial_external
from .synthetic import SyntheticExecutor, synthetic_trial

__all__ = ["ExternalCommandExecutor", "execute_trial_external", "SyntheticExecutor", "synthetic_trial"]
