"""Interactive coding over a binary channel with an unknown number of adversarial bit flips.

Modules: ``bitcodec`` (fingerprints, AMD and Reed-Solomon codes), ``protocol``
(the simulated protocol), ``channel`` (lockstep engine and cost ledger),
``bounded`` and ``iteration`` (party state machines), ``scheme`` (the
driver), ``adversary`` (strategies) and ``harness`` (runner and checks).
"""

from .harness import RunMetrics, RunSpec, exhaustive_oracle, run_experiment, run_one
from .params import Alg1Params, IterationParams, SchemeConfig, preset

__all__ = ["Alg1Params", "IterationParams", "RunMetrics", "RunSpec", "SchemeConfig",
           "exhaustive_oracle", "preset", "run_experiment", "run_one"]
__version__ = "0.1.0"
