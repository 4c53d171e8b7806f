use num_rational::BigRational;
use serde::Serialize;

use super::cell::Cell;
use super::error_measure::error_measure;
use super::lemma1::lemma1_check;
use super::server::server_secrecy;
use super::user::user_secrecy;
use crate::protocol::Backend;
use crate::Result;

/// Decimal rendering with 12 significant digits.
pub fn decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let digits = 11 - x.abs().log10().floor() as i32;
    let s = format!("{:.*}", digits.max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Debug, Clone, Serialize)]
pub struct PairValue {
    pub i: usize,
    pub k: usize,
    pub bits: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ServerValue {
    pub server: usize,
    pub bits: f64,
    pub exact: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Value {
    pub server: usize,
    pub k: usize,
    pub distance: f64,
}

/// Every measured quantity of one cell. Unmeasured ones are `None`.
#[derive(Debug, Clone, Serialize)]
pub struct SecurityReport {
    pub cell: Cell,
    pub alpha: Option<f64>,
    pub alpha_exact: Option<String>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_exact: Option<String>,
    pub per_pair_beta: Vec<PairValue>,
    pub per_server_gamma: Vec<ServerValue>,
    pub lemma1_max_distance: Option<f64>,
    pub lemma1: Vec<Lemma1Value>,
}

/// Which quantities to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Checks {
    pub error: bool,
    pub user: bool,
    pub server: bool,
    pub lemma1: bool,
}

impl Checks {
    pub const ALL: Checks = Checks {
        error: true,
        user: true,
        server: true,
        lemma1: true,
    };
}

impl SecurityReport {
    pub fn empty(cell: Cell) -> Self {
        SecurityReport {
            cell,
            alpha: None,
            alpha_exact: None,
            beta: None,
            gamma: None,
            gamma_exact: None,
            per_pair_beta: Vec::new(),
            per_server_gamma: Vec::new(),
            lemma1_max_distance: None,
            lemma1: Vec::new(),
        }
    }

    pub fn measure(cell: &Cell, checks: Checks, backend: Backend) -> Result<Self> {
        let mut r = SecurityReport::empty(*cell);
        if checks.error {
            let e = error_measure(cell, backend)?;
            r.alpha = Some(e.alpha);
            r.alpha_exact = e.alpha_exact.as_ref().map(rational);
        }
        if checks.user {
            let u = user_secrecy(cell)?;
            r.gamma = Some(u.gamma_bits);
            r.gamma_exact = u.gamma_exact;
            r.per_server_gamma = u
                .per_server
                .into_iter()
                .map(|g| ServerValue {
                    server: g.server,
                    bits: g.bits,
                    exact: g.exact,
                })
                .collect();
        }
        if checks.server {
            let s = server_secrecy(cell)?;
            r.beta = Some(s.beta_bits);
            r.per_pair_beta = s
                .per_pair
                .into_iter()
                .map(|b| PairValue {
                    i: b.i,
                    k: b.k,
                    bits: b.bits,
                })
                .collect();
        }
        if checks.lemma1 {
            let l = lemma1_check(cell)?;
            r.lemma1_max_distance = Some(l.max_distance);
            r.lemma1 = l
                .entries
                .into_iter()
                .map(|e| Lemma1Value {
                    server: e.server,
                    k: e.k,
                    distance: e.distance,
                })
                .collect();
        }
        Ok(r)
    }
}
