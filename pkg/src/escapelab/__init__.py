"""escapelab: simulate and predict a stochastic two-prey/one-predator
model of intrahost immune escape at three fidelities (exact birth-death,
diffusion SDE, deterministic ODE) and cross-validate the simulations
against closed-form asymptotic predictions."""

from .params import (
    DimensionalParams,
    Equilibria,
    ModelParams,
    ParamError,
    Scales,
    SystemState,
    drift,
    equilibria,
    initial_state,
    nondimensionalize,
)
from .rng import RngStream
from .ode import OdeTrajectory, StiffnessError, integrate_ode
from .stages import StageTimes, damping_check, detect_stages
from .predictors import (
    Stage,
    StagePrediction,
    predict_stage_I,
    predict_stage_II,
    predict_stage_III,
    predict_stage_IV,
)
from .sde import SdePath, integrate_sde
from .bd import BdPath, Genealogy, simulate_bd
from .outcomes import Outcome, OutcomeLabel, classify_outcome
from .feller import (
    FellerSample,
    absorption_prob,
    sample_path_integral,
    sample_transition,
    sample_transition_values,
)
from .asymptotics import (
    BottleneckScale,
    OutcomeProbabilities,
    Regime,
    epsilon_of_V,
    outcome_probs,
    p_failed,
    p_failed_branching,
    p_failed_diffusion,
    phi_lim,
    psi_lim,
    solve_H,
    solve_fhat,
    t_genetic,
    t_mutant,
    t_wild,
    xi_II,
    xi_IV,
)
from .coalescent import (
    KingmanResult,
    LineagePartition,
    bd_genealogy,
    birth_weighted_factor,
    kingman_sample,
    predict_partition,
    track_lineages,
)
from .harness import CampaignSummary, CompareReport, ExperimentSpec, compare, run_campaign

__version__ = "0.1.0"
