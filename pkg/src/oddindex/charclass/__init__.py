from .lefschetz import (
    GLOBAL_SIGN,
    SINE_UNIT,
    FixedPointData,
    ahat_factor,
    beta_integral,
    calibrate_circle,
    chern_coefficient,
    circle_fixed_point_data,
    density_pfaffian_form,
    density_product_form,
    fixed_point_from_json,
    jv_factor,
    lefschetz_contribution,
    lefschetz_number,
    load_fixed_points,
    odd_chern_character,
    prefactor,
    sin_normal_factor,
)
from .pfaffian import pfaffian
from .series import FormAlgebra, FormSeries, divide_series, series_arith, series_reciprocal
