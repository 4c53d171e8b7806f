use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::protocol::{ProtocolKind, ProtocolTranscript};
use crate::secrecy::{rational, SecurityReport};

/// Communication cost of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Costs {
    pub upload_bits: u64,
    pub download_qubits: u64,
    pub download_cbits: u64,
    /// Qubits plus classical bits, one each.
    pub download_qubit_equivalents: u64,
}

impl Costs {
    pub fn of(t: &ProtocolTranscript) -> Self {
        Costs {
            upload_bits: t.uploaded_bits,
            download_qubits: t.downloaded_qubits,
            download_cbits: t.downloaded_cbits,
            download_qubit_equivalents: t.download_qubit_equivalents,
        }
    }

    /// `2ℓ` retrieved bits per downloaded qubit-equivalent.
    pub fn rate(&self, blocks: usize) -> BigRational {
        ratio(2 * blocks as u64, self.download_qubit_equivalents)
    }

    /// `log2 U / log2 D` with `U = 2^{upload}`, `D = 2^{download}`.
    pub fn theta(&self) -> BigRational {
        ratio(self.upload_bits, self.download_qubit_equivalents)
    }
}

pub fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `⌈N/2⌉⁻¹`.
pub fn quantum_rate(n: usize) -> BigRational {
    ratio(1, n.div_ceil(2) as u64)
}

/// `1/N`.
pub fn classical_rate(n: usize) -> BigRational {
    ratio(1, n as u64)
}

/// Expected qubit-equivalents per run.
pub fn expected_download(protocol: ProtocolKind, n: usize, blocks: usize) -> u64 {
    let (n, l) = (n as u64, blocks as u64);
    match protocol {
        ProtocolKind::Classical => 2 * n * l,
        _ if n % 2 == 0 => n * l,
        _ => (n + 1) * l,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RawDownload {
    pub qubits: u64,
    pub cbits: u64,
}

/// Everything measured for one `(N, F, ℓ)` cell.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub n: usize,
    pub f: usize,
    pub blocks: usize,
    pub alpha: Option<f64>,
    pub alpha_exact: Option<String>,
    pub beta_bits: Option<f64>,
    pub gamma_bits: Option<f64>,
    pub gamma_exact: Option<String>,
    pub lemma1_max_distance: Option<f64>,
    pub upload_bits: u64,
    pub download_qubit_equivalents: u64,
    pub raw_download: RawDownload,
    /// Reduced, e.g. `1/2`.
    pub rate: String,
    /// Retrieved bits over qubit-equivalents as counted, e.g. `2/4`.
    pub rate_fraction: String,
    pub rate_decimal: f64,
    pub theta_ratio: f64,
    pub theta_exact: String,
    /// Transcripts produced over all query indices.
    pub transcripts: u64,
    pub all_correct: bool,
    pub security: Option<SecurityReport>,
}

impl MetricsReport {
    pub fn new(n: usize, f: usize, blocks: usize, costs: Costs) -> Self {
        let rate = costs.rate(blocks);
        let theta = costs.theta();
        MetricsReport {
            n,
            f,
            blocks,
            alpha: None,
            alpha_exact: None,
            beta_bits: None,
            gamma_bits: None,
            gamma_exact: None,
            lemma1_max_distance: None,
            upload_bits: costs.upload_bits,
            download_qubit_equivalents: costs.download_qubit_equivalents,
            raw_download: RawDownload {
                qubits: costs.download_qubits,
                cbits: costs.download_cbits,
            },
            rate: rational(&rate),
            rate_fraction: format!("{}/{}", 2 * blocks, costs.download_qubit_equivalents),
            rate_decimal: to_f64(&rate),
            theta_ratio: to_f64(&theta),
            theta_exact: rational(&theta),
            transcripts: 0,
            all_correct: true,
            security: None,
        }
    }

    pub fn with_security(mut self, s: SecurityReport) -> Self {
        self.alpha = s.alpha;
        self.alpha_exact = s.alpha_exact.clone();
        self.beta_bits = s.beta;
        self.gamma_bits = s.gamma;
        self.gamma_exact = s.gamma_exact.clone();
        self.lemma1_max_distance = s.lemma1_max_distance;
        self.security = Some(s);
        self
    }
}
