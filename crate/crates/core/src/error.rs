use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The point lies on or beyond the horizon line of the ground plane.
    #[error("degenerate projection: homogeneous scale {w:e} is not positive")]
    DegenerateProjection { w: f64 },

    #[error("no image row maps within {max_dist} m on the centerline")]
    HorizonNotInFrame { max_dist: f64 },

    #[error("invalid calibration: {0}")]
    InvalidCalibration(String),

    #[error("crop row {row} leaves fewer than two rows of a {height}-row image")]
    InvalidCrop { row: u32, height: u32 },

    #[error("label {label} not present (image has {count} regions)")]
    UnknownLabel { label: u32, count: u32 },

    #[error("moment matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("frame {frame} does not follow previous frame {previous}")]
    NonMonotonicFrame { frame: u64, previous: u64 },

    #[error("lane pose heading {theta} rad is outside (-pi/2, pi/2)")]
    InvalidPose { theta: f64 },

    #[error("prediction and truth frame indices differ: {0}")]
    FrameMismatch(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("frame is {got_w}x{got_h} but the camera expects {want_w}x{want_h}")]
    FrameSize {
        got_w: u32,
        got_h: u32,
        want_w: u32,
        want_h: u32,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),
}

impl Error {
    /// Errors caused by bad input or configuration, as opposed to violated internal invariants.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::NotPsd(_))
    }
}
