//! Built-in registrars with known behaviour, for exercising the harness.
//!
//! They run as ordinary external commands (`regbench mock <kind> ...`), so
//! they go through the same spawn/timeout/extract path as real methods.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::thread;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{AdapterError, AdapterSpec, PreprocessMode, Result};
use crate::dataset::{parse_landmark_file, write_landmark_file, LandmarkSet, Point, RegistrationCase};

/// Output file written by every mock, relative to the case workspace.
pub const MOCK_OUTPUT: &str = "warped-landmarks.csv";

#[derive(Debug, Clone, PartialEq)]
pub enum MockKind {
    /// Returns the moving landmarks unchanged.
    Identity,
    /// Returns the fixed landmarks.
    Oracle,
    /// Fixed landmarks plus isotropic Gaussian noise with this std (pixels).
    Jitter { sigma: f64 },
    /// Applies `matrix` (row-major 2x2) and `translation` to the moving
    /// landmarks.
    Affine { matrix: [f64; 4], translation: [f64; 2] },
    /// Exits with this nonzero code without output.
    Crash { code: i32 },
    /// Never finishes.
    Hang,
}

impl fmt::Display for MockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MockKind::Identity => write!(f, "identity"),
            MockKind::Oracle => write!(f, "oracle"),
            MockKind::Jitter { sigma } => write!(f, "jitter:{sigma}"),
            MockKind::Affine { matrix: m, translation: t } => {
                write!(f, "affine:{},{},{},{},{},{}", m[0], m[1], m[2], m[3], t[0], t[1])
            }
            MockKind::Crash { code } => write!(f, "crash:{code}"),
            MockKind::Hang => write!(f, "hang"),
        }
    }
}

impl FromStr for MockKind {
    type Err = AdapterError;

    fn from_str(s: &str) -> Result<Self> {
        let invalid = || AdapterError::InvalidMock(s.to_string());
        let (name, arg) = s.split_once(':').map_or((s, None), |(n, a)| (n, Some(a)));
        let numbers = |a: &str| -> Result<Vec<f64>> {
            a.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| invalid()))
                .collect()
        };
        match (name, arg) {
            ("identity", None) => Ok(MockKind::Identity),
            ("oracle", None) => Ok(MockKind::Oracle),
            ("hang", None) => Ok(MockKind::Hang),
            ("crash", None) => Ok(MockKind::Crash { code: 1 }),
            ("crash", Some(a)) => match a.parse::<i32>() {
                Ok(code) if code != 0 => Ok(MockKind::Crash { code }),
                _ => Err(invalid()),
            },
            ("jitter", Some(a)) => match numbers(a)?.as_slice() {
                &[sigma] if sigma >= 0.0 => Ok(MockKind::Jitter { sigma }),
                _ => Err(invalid()),
            },
            ("affine", Some(a)) => match numbers(a)?.as_slice() {
                &[a11, a12, a21, a22, tx, ty] => Ok(MockKind::Affine {
                    matrix: [a11, a12, a21, a22],
                    translation: [tx, ty],
                }),
                _ => Err(invalid()),
            },
            _ => Err(invalid()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MockRequest {
    pub fixed_landmarks: Option<PathBuf>,
    pub moving_landmarks: Option<PathBuf>,
    pub output: PathBuf,
    pub case_id: usize,
    pub seed: u64,
    /// Simulated work before producing output.
    pub delay: Duration,
}

impl MockRequest {
    pub fn for_case(case: &RegistrationCase, workspace: &Path) -> Self {
        MockRequest {
            fixed_landmarks: case.fixed_landmarks.clone(),
            moving_landmarks: case.moving_landmarks.clone(),
            output: workspace.join(MOCK_OUTPUT),
            case_id: case.case_id,
            seed: 0,
            delay: Duration::ZERO,
        }
    }

    fn load(path: &Option<PathBuf>, what: &str) -> Result<LandmarkSet> {
        let path = path.as_ref().ok_or_else(|| {
            AdapterError::InvalidMock(format!("{what} landmarks are required for this mock"))
        })?;
        Ok(parse_landmark_file(path)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MockExit {
    Success,
    Crash(i32),
}

/// Performs the mock's behaviour. `Hang` blocks forever.
pub fn run_mock(kind: &MockKind, req: &MockRequest) -> Result<MockExit> {
    if !req.delay.is_zero() {
        thread::sleep(req.delay);
    }
    let warped = match kind {
        MockKind::Identity => MockRequest::load(&req.moving_landmarks, "moving")?,
        MockKind::Oracle => MockRequest::load(&req.fixed_landmarks, "fixed")?,
        MockKind::Jitter { sigma } => {
            let fixed = MockRequest::load(&req.fixed_landmarks, "fixed")?;
            let noise = Normal::new(0.0, *sigma)
                .map_err(|_| AdapterError::InvalidMock(kind.to_string()))?;
            // one stream per case keeps the output independent of scheduling
            let mut rng = ChaCha8Rng::seed_from_u64(
                req.seed ^ (req.case_id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            );
            fixed.map(|p| Point::new(p.x + noise.sample(&mut rng), p.y + noise.sample(&mut rng)))
        }
        MockKind::Affine { matrix: m, translation: t } => {
            let moving = MockRequest::load(&req.moving_landmarks, "moving")?;
            moving.map(|p| Point::new(m[0] * p.x + m[1] * p.y + t[0], m[2] * p.x + m[3] * p.y + t[1]))
        }
        MockKind::Crash { code } => return Ok(MockExit::Crash(*code)),
        MockKind::Hang => loop {
            thread::sleep(Duration::from_secs(3600));
        },
    };
    write_landmark_file(&warped, &req.output)?;
    Ok(MockExit::Success)
}

/// Adapter spec that runs `exe mock <kind>` for every case; `exe` is the
/// `regbench` binary or any program that forwards to the mock entry point.
pub fn mock_adapter_spec(exe: &Path, kind: &MockKind, seed: u64, delay_ms: u64) -> AdapterSpec {
    let args = [
        exe.display().to_string(),
        "mock".into(),
        kind.to_string(),
        "--fixed".into(),
        "{fixed_landmarks}".into(),
        "--moving".into(),
        "{moving_landmarks}".into(),
        "--out".into(),
        format!("{{workspace}}/{MOCK_OUTPUT}"),
        "--case-id".into(),
        "{case_id}".into(),
        "--seed".into(),
        seed.to_string(),
        "--delay-ms".into(),
        delay_ms.to_string(),
    ];
    let name = match kind {
        MockKind::Jitter { .. } => "mock-jitter".to_string(),
        MockKind::Affine { .. } => "mock-affine".to_string(),
        MockKind::Crash { .. } => "mock-crash".to_string(),
        other => format!("mock-{other}"),
    };
    AdapterSpec {
        method_name: name,
        prepare_commands: Vec::new(),
        execute_commands: vec![args.to_vec()],
        warped_landmarks_path_template: format!("{{workspace}}/{MOCK_OUTPUT}"),
        cleanup_globs: Vec::new(),
        environment_overrides: Default::default(),
        preprocessing: PreprocessMode::None,
        method_config: None,
    }
}
