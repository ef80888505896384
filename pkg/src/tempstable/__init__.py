"""Analytics for tempered stable distributions and processes."""

from .core import (
    cf,
    cgf,
    cgf_one_sided,
    convolve,
    cumulant,
    cumulant_vector,
    log_cf,
    marginal,
    moment_stats,
    scale,
    third_moment_one_sided,
)
from .density import (
    DensityEvaluator,
    DensityGrid,
    InversionSettings,
    ModeBracket,
    cdf,
    density_grid,
    mode,
    mode_bracket,
    mode_fixed_point,
    pdf,
    small_x_log_asymptote,
    tail_constant,
    tail_constant_one_sided,
)
from .errors import (
    ConvergenceError,
    DomainError,
    InfeasibleCumulantsError,
    NoMartingaleMeasureError,
    TempStableError,
)
from .estimate import (
    FitResult,
    SampleCumulants,
    alpha_from_jump_counts,
    fit_one_sided,
    fit_two_sided,
    lambda_given_alpha_beta,
    multistart_fit_two_sided,
    sample_cumulants,
    two_sided_G,
    two_sided_jacobian,
)
from .limits import (
    BERRY_ESSEEN_C,
    BerryEsseenReport,
    alpha_pair_for_moments,
    berry_esseen_bound,
    clt_min_index,
    clt_sequence,
)
from .measure import (
    EsscherPair,
    MartingaleSolve,
    MinimalMartingaleResult,
    bilateral_esscher,
    curve_point,
    density_process_log,
    esscher_f,
    esscher_martingale,
    locally_equivalent,
    martingale_curve_phi,
    minimal_martingale,
    phi_domain,
)
from .params import (
    CumulantVector,
    MomentStats,
    OneSidedParams,
    TemperedStableParams,
    load_params,
    params_from_dict,
    params_to_dict,
    save_params,
)
from .pricing import (
    MarketConfig,
    OptionSpec,
    call_price_fourier,
    default_contour,
    mc_call_price,
    put_price,
)
from .simulate import (
    PathConfig,
    SamplePath,
    bg_index,
    empirical_p_variation,
    jump_bin_counts,
    jump_intensity_above,
    sample_one_sided,
    simulate_path,
    size_band_edge,
)

__version__ = "0.1.0"
