"""Market-graph bipartition portfolios via Pauli-correlation-encoded max-cut."""

from .errors import ContractError, DataError, ResourceError
from .market import (
    MarketGraph,
    PriceTable,
    ReturnsMatrix,
    build_graph,
    compute_returns,
    covariance_matrix,
    graph_stats,
    load_prices,
    pearson_matrix,
)
from .optimize import (
    ObjectiveHandle,
    OptResult,
    brute_force_maxcut,
    local_search_cut,
    minimize,
    umda_maxcut,
)
from .partition import (
    ClusterLabels,
    CutSolverHandle,
    PartitionTree,
    cut_value,
    export_dendrogram,
    load_dendrogram,
    recursive_bipartition,
)
from .pce import (
    PauliAssignment,
    PceConfig,
    Sizing,
    bipartition_pce,
    build_hea,
    compute_sizing,
    decode_signs,
    enumerate_pauli_strings,
    pce_loss,
)
from .portfolio import (
    BacktestResult,
    Portfolio,
    SplitSpec,
    backtest,
    baseline_backtest,
    select_representatives,
    sharpe_ratio,
    split_train_test,
)
from .qaoa import QaoaConfig, qaoa_gate_count, solve_qaoa
from .solvers import make_solver
from .statevector import (
    Circuit,
    Gate,
    PauliString,
    StateVector,
    apply_circuit,
    expectation,
    zero_state,
)

__version__ = "0.1.0"

SAMPLE_PRICES = "data/sample_prices.csv"


def sample_prices_path() -> str:
    """Filesystem path of the bundled synthetic price fixture."""
    from importlib.resources import files

    return str(files(__package__) / SAMPLE_PRICES)
