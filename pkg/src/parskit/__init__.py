"""parskit: analysis of probabilistic abstract reduction systems.

Finite systems are :class:`Pars` values with exact rational probabilities;
countable ones are :class:`GeneratedPars` explored through finite windows.
"""

__version__ = "0.1.0"

from .ars import (  # noqa: E402
                  Decision,
                  Verdict,
                  check_confluence,
                  check_local_confluence,
                  check_normalizing,
                  check_termination,
                  check_unique_nf,
                  convertibility_classes,
                  nf_map,
                  star_closure,
)
from .certify import LyapunovCertificate, MarginReport, check_lyapunov, min_margin  # noqa: E402
from .model import (  # noqa: E402
                  ExploredSystem,
                  GeneratedPars,
                  Pars,
                  Rule,
                  ValidationReport,
                  explore,
                  load_system,
                  normal_forms,
                  serialize,
                  validate,
)
from .montecarlo import MonteCarloReport, monte_carlo  # noqa: E402
from .prob import (  # noqa: E402
                  Interval,
                  PnState,
                  ReachReport,
                  absorption_solve,
                  check_as_convergence,
                  check_as_local_convergence,
                  check_as_termination,
                  check_prob_normalizing,
                  divergence_bracket,
                  path_probability,
                  pn_iterate,
                  pn_trace,
                  reach_probability,
                  single_path_divergence_bounds,
)
from .transform import Conclusion, ConditionReport, TransformMapping, check_conditions, conclude  # noqa: E402

__all__ = [name for name in dir() if not name.startswith("_")]
