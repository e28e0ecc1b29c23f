use std::path::Path;

use kunie_core::analysis::AnalysisError;
use kunie_core::chaos::ChaosError;
use kunie_core::cipher::CipherError;
use kunie_core::gru::GruError;
use kunie_core::image::ImageError;
use kunie_core::metrics::MetricsError;
use kunie_core::nist::NistError;
use kunie_core::scan::ScanError;

pub const USAGE: u8 = 2;
pub const IO: u8 = 3;
pub const FORMAT: u8 = 4;
pub const NUMERIC: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub type Outcome<T> = Result<T, Failure>;

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(USAGE, message)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new(IO, format!("{}: {e}", path.display()))
    }
}

impl From<ChaosError> for Failure {
    fn from(e: ChaosError) -> Self {
        let code = match e {
            ChaosError::Key(_) => FORMAT,
            _ => NUMERIC,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ImageError> for Failure {
    fn from(e: ImageError) -> Self {
        let code = match e {
            ImageError::Io(_) => IO,
            _ => FORMAT,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<CipherError> for Failure {
    fn from(e: CipherError) -> Self {
        match e {
            CipherError::Chaos(c) => c.into(),
            CipherError::Container(_) | CipherError::Length { .. } => Failure::new(FORMAT, e.to_string()),
            _ => Failure::new(NUMERIC, e.to_string()),
        }
    }
}

impl From<ScanError> for Failure {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::Metrics(m) => (*m).into(),
            ScanError::Config(_) => Failure::usage(e.to_string()),
            _ => Failure::new(NUMERIC, e.to_string()),
        }
    }
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::Cipher(c) => c.into(),
            MetricsError::Shape(_) => Failure::new(FORMAT, e.to_string()),
            _ => Failure::new(NUMERIC, e.to_string()),
        }
    }
}

impl From<NistError> for Failure {
    fn from(e: NistError) -> Self {
        match e {
            NistError::Chaos(c) => c.into(),
            NistError::TooShort { .. } | NistError::Param(_) | NistError::Suite(_) => Failure::usage(e.to_string()),
            _ => Failure::new(NUMERIC, e.to_string()),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Param(_) => Failure::usage(e.to_string()),
            _ => Failure::new(NUMERIC, e.to_string()),
        }
    }
}

impl From<GruError> for Failure {
    fn from(e: GruError) -> Self {
        let code = match e {
            GruError::Io(_) => IO,
            GruError::Checkpoint(_) | GruError::Shape { .. } => FORMAT,
            GruError::Config(_) => USAGE,
            GruError::Chaos(ChaosError::Key(_)) => FORMAT,
            GruError::Diverged { .. } | GruError::Data(_) | GruError::Chaos(_) => NUMERIC,
        };
        Failure::new(code, e.to_string())
    }
}
