"""flustack: vintage-aware ensemble nowcasting of weekly ILI activity.

Weekly %ILI estimates from several independent data sources are combined
by machine-learning ensembles (non-negative lasso, epsilon-SVR, boosted
regression trees) inside an expanding-window backtest that only ever
reads data as it was available at each issue week.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .backtest import (
    BacktestConfig,
    DesignMatrix,
    HorizonSpec,
    PredictionLedger,
    PredictionRecord,
    build_design_matrix,
    build_weak_ledger,
    default_config,
    default_sources,
    run_backtest,
    run_issue,
)
from .epiweek import EpiWeek, from_date, from_label, iter_weeks, weeks_in_year
from .metrics import (
    MetricsReport,
    RelativeErrorSeries,
    evaluate_ledger,
    hit_rate,
    mape_max,
    pearson,
    rmse,
    rmspe,
)
from .synth import BiasEpisode, SynthConfig, generate_panel
from .vintages import Snapshot, VintagedObservation, VintagedSeries
from .weak import SourceSpec, WeakEstimate, weak_nowcast

__version__ = "0.1.0"
