"""1-bit analogue pre/post-coding design for point-to-point MIMO.

Spin-domain SNR maximization: an exhaustive benchmark, SVD sign quantization,
Rayleigh-quotient alternation heuristics, and a QUBO-based alternating design
with pluggable samplers, plus a Monte-Carlo evaluation harness.
"""

from spinbeam.bridge import (
    BridgeEndpoint,
    BridgeEnergyMismatch,
    BridgeError,
    BridgeProtocolError,
    BridgeRemoteError,
    BridgeSampler,
    BridgeTransportError,
    bridge_client_sample,
)
from spinbeam.campaign import (
    METHODS,
    CampaignReport,
    ExperimentConfig,
    MethodSummary,
    TrialRow,
    render_csv,
    run_campaign,
)
from spinbeam.designers import (
    DesignBreakdown,
    DesignResult,
    IterControl,
    SizeGuardExceeded,
    exhaustive_search,
    rq_design,
    rqm_design,
    svd_sign_design,
)
from spinbeam.qa import QaControl, qa_design
from spinbeam.reports import (
    AnnealDistribution,
    AnnealRow,
    TimingTable,
    report_anneal_distribution,
    report_timing,
)
from spinbeam.linalg import (
    ConvergenceError,
    SingularTriplet,
    leading_triplet,
    rank1_top_eigvec,
)
from spinbeam.model import (
    ChannelMatrix,
    CodingPair,
    DimensionMismatch,
    SpinVector,
    SystemParams,
    enumerate_spins,
    evaluate_snr,
    generate_channel,
    objective_gram_f,
    objective_gram_g,
    relaxed_snr,
    spin_signs,
)
from spinbeam.qubo import (
    ExactSampler,
    QuboInstance,
    Sample,
    SampleSet,
    Sampler,
    SamplerConfig,
    SaSampler,
    binary_to_spin,
    build_qubo_from_gram,
    check_sample_energies,
    energy_to_spin_objective,
    solve_exact,
    solve_sa,
    spin_objective_to_energy,
    spin_to_binary,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "METHODS",
    "AnnealDistribution",
    "AnnealRow",
    "BridgeEndpoint",
    "BridgeEnergyMismatch",
    "BridgeError",
    "BridgeProtocolError",
    "BridgeRemoteError",
    "BridgeSampler",
    "BridgeTransportError",
    "CampaignReport",
    "ChannelMatrix",
    "CodingPair",
    "ConvergenceError",
    "DesignBreakdown",
    "DesignResult",
    "DimensionMismatch",
    "ExactSampler",
    "ExperimentConfig",
    "IterControl",
    "MethodSummary",
    "QaControl",
    "QuboInstance",
    "Sample",
    "SampleSet",
    "Sampler",
    "SamplerConfig",
    "SaSampler",
    "SingularTriplet",
    "SizeGuardExceeded",
    "SpinVector",
    "SystemParams",
    "TimingTable",
    "TrialRow",
    "binary_to_spin",
    "bridge_client_sample",
    "build_qubo_from_gram",
    "check_sample_energies",
    "energy_to_spin_objective",
    "enumerate_spins",
    "evaluate_snr",
    "exhaustive_search",
    "generate_channel",
    "leading_triplet",
    "objective_gram_f",
    "objective_gram_g",
    "qa_design",
    "rank1_top_eigvec",
    "relaxed_snr",
    "render_csv",
    "report_anneal_distribution",
    "report_timing",
    "rq_design",
    "rqm_design",
    "run_campaign",
    "solve_exact",
    "solve_sa",
    "spin_objective_to_energy",
    "spin_signs",
    "spin_to_binary",
    "svd_sign_design",
]
