//! From transition curves back to the spectrum: peaks, calibration, momentum inversion,
//! the admissible measurement time, noise studies and Bloch-function deconvolution.

mod bloch;
mod calibrate;
mod invert;
mod noise;
mod peaks;
mod pipeline;
mod window;

pub use bloch::{bloch_reconstruct, periodize, BlochFunction, REGULARIZATION};
pub use calibrate::{calibrate_ratio, match_peaks, Calibration, CalibrationMode, MIN_MATCHED};
pub use invert::{invert_1d, invert_1d_clipped, invert_2d, invert_2d_clipped, snap_1d, snap_2d, GeometryForm, RANGE_TOLERANCE};
pub use noise::inject_noise;
pub(crate) use peaks::golden_min;
pub use peaks::{detect_peaks, fit_amplitudes, measure_at, merge_radius, DetectOptions, Peak, PeakSet};
pub use pipeline::{
    collect_peaks, reconstruct_dispersion, reconstruct_from_peaks, DispersionPoint, NoiseSpec, ReconstructOptions,
    ReconstructedDispersion, UnassignedPeak,
};
pub use window::{measurement_window, MeasurementWindow, WindowConvention};
