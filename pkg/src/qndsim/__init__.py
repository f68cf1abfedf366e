"""Gaussian-state simulator of the parallel nonlocal QND sum gate."""

from .entanglement import (
    NegativityResult,
    TwoModeCovariance,
    is_physical,
    log_negativity,
    qnd_negativity_analytic,
    symplectic_eigenvalues,
)
from .gaussian import (
    GaussianState,
    SqueezingSpec,
    SymplecticTransform,
    UnphysicalStateError,
    apply,
    beamsplitter,
    coherent,
    displace,
    homodyne,
    loss_channel,
    power_db,
    qnd_sum,
    squeezed_vacuum,
    squeezer,
    vacuum,
)
from .protocol import (
    ImperfectionConfig,
    LocalityViolation,
    ProtocolResult,
    ResourceLedger,
    compare_schemes,
    make_epr,
    parallel_gate,
    sequential_gate,
    undo_local_squeezing,
)

__version__ = "0.1.0"
