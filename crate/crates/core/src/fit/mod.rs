//! Best isometries: minimax `d^H` fitting, normalization, the vertical
//! adjustment, and the full proximity measurement over a John domain.

mod dh;
mod full;
mod normalize;
mod sed;

pub use dh::{cancel_vertical, fit_dh, fit_dh_with, Branch, DHFitResult, FitOptions};
pub use full::{full_fit, vertical_adjust, FitRecord, FullFitOptions, FullFitResult, VerticalAdjust};
pub use normalize::{normalize, normalizer, Normalizer};
pub use sed::{smallest_enclosing_disk, Disk};
