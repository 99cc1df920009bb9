"""Oracle-efficient online classification and equilibrium computation."""
from .config import Caps, CapExceeded, default_caps
from .oracles import FiniteConceptClass, InputError, LabeledExample, consistent_oracle, erm_oracle, value_oracle
from .online import LearnerConfig, HypothesisMixture, NotRealizableError, run_agnostic, run_realizable
from .games import MixedStrategy, MultiPlayerGame, ZeroSumGame, best_response, cce_matrix, finite_value, verify_cce, verify_nash
from .equilibria import EquilibriumCertificate, IterationCapExceeded, cce_multiplayer, finite_cce, nash_half_infinite, nash_zero_sum
from .transcript import SolveTranscript

__all__ = [
    "Caps", "CapExceeded", "default_caps",
    "FiniteConceptClass", "InputError", "LabeledExample", "consistent_oracle", "erm_oracle", "value_oracle",
    "LearnerConfig", "HypothesisMixture", "NotRealizableError", "run_agnostic", "run_realizable",
    "MixedStrategy", "MultiPlayerGame", "ZeroSumGame", "best_response", "cce_matrix", "finite_value",
    "verify_cce", "verify_nash",
    "EquilibriumCertificate", "IterationCapExceeded", "cce_multiplayer", "finite_cce", "nash_half_infinite",
    "nash_zero_sum", "SolveTranscript",
]
