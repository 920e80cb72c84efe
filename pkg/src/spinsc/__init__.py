"""MTJ-based stochastic-computing Bayesian inference simulator.

Layers, bottom to top: device (stochastic MTJ switching), sbg (bitstream
generators with energy accounting), stochastic (bitstream arithmetic and
correlation), logic (gate DAGs and conflict analysis), allocator (generator
sharing over a switch matrix), fusion (grid target locating with an exact
Bayesian oracle), cost (architecture-level comparisons), cli (orchestration).
"""

from .device import (
    InstanceFactors,
    MtjInstance,
    MtjParams,
    MtjState,
    PulseSpec,
    TargetUnreachable,
    WriteDirection,
    apply_write,
    base_switching_time,
    calibrate_voltage,
    make_instance,
    read_state,
    sample_process_variation,
    switch_probability,
)
from .stochastic import Bitstream, LengthMismatch, sc_and, sc_mux, sc_not, scc, value
from .logic import (
    CyclicNetlist,
    GateKind,
    Product,
    ScNetlist,
    cluster_terminals,
    evaluate_on_streams,
    evaluate_products,
    expand_products,
    extract_conflict_sets,
)
from .sbg import (
    SbgArraySpec,
    SbgMode,
    SbgUnit,
    build_array,
    energy_of,
    generate,
    generate_self_control,
    generate_simple,
    make_unit,
)
from .allocator import (
    CapacityExceeded,
    SwitchMatrix,
    UnknownLevel,
    allocate,
    cost_metrics,
    quantize_assignment,
    route,
    size_array,
    verify_allocation,
)
from .fusion import (
    FusionPipeline,
    FusionProblem,
    PosteriorGrid,
    SensorReading,
    ShapeMismatch,
    exact_posterior,
    kl_divergence,
    likelihoods,
    make_problem,
    sc_posterior,
)
from .cost import CostProfile, compare, simulated_profile, totals
from .config import ConfigError, RunConfig, load_config

__version__ = "0.1.0"
