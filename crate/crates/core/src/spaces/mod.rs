//! Data model for asymptotic functions: grids and remainder fields, the
//! radial cutoff, asymptotic charts, weighted norms and file formats.

mod chart;
mod cutoff;
mod field;
mod io;
mod norms;

pub use crate::sphere::SphereFunction;
pub use chart::{chart_on_grid, eval_asymptotic, n_star, AsymptoticChart, AsymptoticFunction, ChartSampler};
pub use cutoff::{cutoff_eval, CutoffKind, CutoffSpec};
pub use field::{ComplexField, Grid, RemainderField};
pub use io::{
    chart_json, deserialize_field, load_asymptotic, read_chart, save_asymptotic, serialize_field,
    write_chart, FieldHeader, FIELD_FORMAT,
};
pub use norms::{
    asymptotic_norm, bracket, default_gamma0, j_delta, weight_inequality_check, weighted_lp,
    weighted_norm, NormFamily, NormSpec, MAX_NORM_ORDER,
};
