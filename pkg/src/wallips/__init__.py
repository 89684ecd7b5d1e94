"""wallips: ergodicity criterion and wall simulations for one-sided
interacting particle systems.

The package splits into rule algebra (model), shared-randomness simulation
under the canonical coupling (streams, sim), the bounding random walks and
their drifts (walks), and a command-line harness emitting schema-versioned
CSV/PGM artifacts (harness, formats).
"""

from .model import (
    Alphabet,
    CriterionReport,
    MalformedRule,
    MAX_STATES,
    Region,
    RegionClass,
    SimpleParams,
    TransitionRule,
    ValidationReport,
    beta_delta,
    classify_simple,
    criterion,
    relabel,
    swap_states,
    time_scale,
    validate,
)
from .sim import (
    AgreementTime,
    BackgroundSampler,
    Configuration,
    CoupledTrajectories,
    TailEstimate,
    Trajectory,
    UnderResolved,
    WindowMismatch,
    WindowTooSmall,
    agreement_time,
    cone_sigma,
    cone_sigma_batch,
    couple,
    evolve,
    pi_tail,
)
from .streams import EventStream, gen_events
from .walks import (
    AgreementInterval,
    AgreementSets,
    DriftReport,
    ParameterOrder,
    Violation,
    WalkPath,
    agreement_sets,
    containment_check,
    drift_closed_form,
    drift_estimate,
    prob_in_A,
    run_walks,
    walk_tau_batch,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "AgreementInterval",
    "AgreementSets",
    "AgreementTime",
    "BackgroundSampler",
    "Configuration",
    "CoupledTrajectories",
    "CriterionReport",
    "DriftReport",
    "EventStream",
    "MalformedRule",
    "MAX_STATES",
    "ParameterOrder",
    "Region",
    "RegionClass",
    "SimpleParams",
    "TailEstimate",
    "Trajectory",
    "TransitionRule",
    "UnderResolved",
    "ValidationReport",
    "Violation",
    "WalkPath",
    "WindowMismatch",
    "WindowTooSmall",
    "agreement_sets",
    "agreement_time",
    "beta_delta",
    "classify_simple",
    "cone_sigma",
    "cone_sigma_batch",
    "containment_check",
    "couple",
    "criterion",
    "drift_closed_form",
    "drift_estimate",
    "evolve",
    "gen_events",
    "pi_tail",
    "prob_in_A",
    "relabel",
    "run_walks",
    "swap_states",
    "time_scale",
    "validate",
    "walk_tau_batch",
    "__version__",
]
