//! Truncated expansions and the enclosures they certify.
//!
//! | kind              | function                                   | term j                     |
//! |-------------------|--------------------------------------------|----------------------------|
//! | `BinetJ`          | J(z) = ln Γ(z) - (z-½)ln z + z - ½ln 2π    | (-1)^j β_j / z^{2j+1}      |
//! | `CentralBinomial` | J̃(z) = ln Γ̃(z) - ln(4^z / √(πz))          | (-1)^{j+1} β̃_j / z^{2j+1}  |
//! | `GammaHalf`       | ln Γ(z+½) - (z ln z - z + ½ln 2π)          | (-1)^{j+1} β̂_j / z^{2j+1}  |
//! | `DeMoivre`        | `GammaHalf` at z = n + ½                   | (-1)^{j+1} β̂_j / (n+½)^{2j+1} |
//!
//! For real z > 0 every one of these series strictly envelops its function:
//! after summing terms `0..k` the remainder has the sign of term `k` and is
//! smaller than it in magnitude, for every k.
//!
//! Rounding: sums are formed with 32 guard bits and every returned endpoint
//! or bound is widened by 2^-(P-32) times the magnitude of the quantities
//! summed, then rounded outward to P bits.

use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::Rational;

use crate::coeffs::Family;
use crate::{check_precision, rounding_slop, Error, Real, Result, DEFAULT_PRECISION, GUARD_BITS};

/// Upper limit on the number of terms scanned while looking for the
/// smallest term. The minimum sits near index π·z, so this covers z up to
/// roughly 300.
pub const TERM_LIMIT: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    BinetJ,
    CentralBinomial,
    GammaHalf,
    DeMoivre,
}

impl SeriesKind {
    pub const ALL: [SeriesKind; 4] = [
        SeriesKind::BinetJ,
        SeriesKind::CentralBinomial,
        SeriesKind::GammaHalf,
        SeriesKind::DeMoivre,
    ];

    pub fn family(self) -> Family {
        match self {
            SeriesKind::BinetJ => Family::Beta,
            SeriesKind::CentralBinomial => Family::BetaTilde,
            SeriesKind::GammaHalf | SeriesKind::DeMoivre => Family::BetaHat,
        }
    }

    /// Sign of term `j`.
    pub fn term_sign(self, j: usize) -> Sign {
        let even = j.is_multiple_of(2);
        match (self, even) {
            (SeriesKind::BinetJ, true) => Sign::Plus,
            (SeriesKind::BinetJ, false) => Sign::Minus,
            (_, true) => Sign::Minus,
            (_, false) => Sign::Plus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::BinetJ => "binet",
            SeriesKind::CentralBinomial => "central-binom",
            SeriesKind::GammaHalf => "gamma-half",
            SeriesKind::DeMoivre => "demoivre",
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn of(x: &Real) -> Option<Sign> {
        match x.cmp0()? {
            Ordering::Greater => Some(Sign::Plus),
            Ordering::Less => Some(Sign::Minus),
            Ordering::Equal => None,
        }
    }

    fn apply(self, x: Real) -> Real {
        match self {
            Sign::Plus => x,
            Sign::Minus => -x,
        }
    }

    // Rounding direction that moves a value toward this sign.
    fn toward(self) -> Round {
        match self {
            Sign::Plus => Round::Up,
            Sign::Minus => Round::Down,
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Enclosure `[lo, hi]` of the series part of a function, built from two
/// consecutive partial sums.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeInterval {
    pub lo: Real,
    pub hi: Real,
    /// Number of terms summed for the nearer endpoint.
    pub k_used: usize,
    /// |term k|, the first omitted term.
    pub bound: Real,
}

impl EnvelopeInterval {
    pub fn contains(&self, x: &Real) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn width(&self) -> Real {
        Real::with_val(self.lo.prec(), &self.hi - &self.lo)
    }

    /// `self ⊆ other`
    pub fn is_within(&self, other: &EnvelopeInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

/// A truncated expansion together with its one-sided error bound: the true
/// value lies between `value` and `value + error_sign * error_bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedValue {
    pub value: Real,
    pub error_bound: Real,
    pub error_sign: Sign,
    pub k_used: usize,
}

impl CertifiedValue {
    pub fn lo(&self) -> Real {
        match self.error_sign {
            Sign::Plus => self.value.clone(),
            Sign::Minus => sub_round(&self.value, &self.error_bound, Round::Down),
        }
    }

    pub fn hi(&self) -> Real {
        match self.error_sign {
            Sign::Plus => add_round(&self.value, &self.error_bound, Round::Up),
            Sign::Minus => self.value.clone(),
        }
    }

    pub fn contains(&self, x: &Real) -> bool {
        self.lo() <= *x && *x <= self.hi()
    }
}

fn add_round(a: &Real, b: &Real, round: Round) -> Real {
    Real::with_val_round(a.prec(), a + b, round).0
}

fn sub_round(a: &Real, b: &Real, round: Round) -> Real {
    Real::with_val_round(a.prec(), a - b, round).0
}

/// How many terms to sum.
#[derive(Debug, Clone, PartialEq)]
pub enum Truncation {
    /// Fewest terms whose first omitted term is at most this tolerance.
    Tolerance(Real),
    /// Exactly this many terms, whatever the resulting bound.
    Terms(usize),
}

/// Evaluates the expansions at a fixed working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluator {
    precision: u32,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator {
            precision: DEFAULT_PRECISION,
        }
    }
}

// A partial sum at guard precision with the total magnitude of its terms.
struct Sum {
    value: Real,
    magnitude: Real,
}

impl Evaluator {
    pub fn new(precision: u32) -> Result<Self> {
        Ok(Evaluator {
            precision: check_precision(precision)?,
        })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    fn work(&self) -> u32 {
        self.precision + GUARD_BITS
    }

    fn slop(&self) -> Real {
        rounding_slop(self.precision)
    }

    // The point the series is expanded at: z itself, or z + ½ for DeMoivre.
    fn argument(&self, kind: SeriesKind, z: &Real) -> Result<Real> {
        check_positive(z, "z")?;
        let prec = self.work().max(z.prec() + 2);
        let mut x = Real::with_val(prec, z);
        if kind == SeriesKind::DeMoivre {
            x += 0.5;
        }
        Ok(x)
    }

    fn magnitude_at(&self, kind: SeriesKind, j: usize, x: &Real) -> Real {
        let c = Real::with_val(self.work(), &kind.family().coefficient(j));
        c / x.clone().pow(2 * j as u32 + 1)
    }

    fn sum(&self, kind: SeriesKind, x: &Real, k: usize) -> Sum {
        let mut value = Real::with_val(self.work(), 0);
        let mut magnitude = Real::with_val(self.work(), 0);
        for j in 0..k {
            let m = self.magnitude_at(kind, j, x);
            magnitude += &m;
            value += kind.term_sign(j).apply(m);
        }
        Sum { value, magnitude }
    }

    /// The signed j-th term at working precision.
    pub fn term(&self, kind: SeriesKind, j: usize, z: &Real) -> Result<Real> {
        let x = self.argument(kind, z)?;
        let t = kind.term_sign(j).apply(self.magnitude_at(kind, j, &x));
        Ok(Real::with_val(self.precision, t))
    }

    /// Sum of terms `0..k`; the empty sum is zero.
    pub fn partial_sum(&self, kind: SeriesKind, z: &Real, k: usize) -> Result<Real> {
        let x = self.argument(kind, z)?;
        Ok(Real::with_val(self.precision, self.sum(kind, &x, k).value))
    }

    /// Enclosure of the series part between partial sums `k` and `k + 1`.
    pub fn envelope_interval(&self, kind: SeriesKind, z: &Real, k: usize) -> Result<EnvelopeInterval> {
        let x = self.argument(kind, z)?;
        let sum = self.sum(kind, &x, k);
        let next = self.magnitude_at(kind, k, &x);
        let other = Real::with_val(self.work(), &sum.value + kind.term_sign(k).apply(next.clone()));
        // The empty sum is exactly zero and needs no widening.
        let near_margin = self.slop() * &sum.magnitude;
        let far_margin = self.slop() * (sum.magnitude + &next);
        let (lo, hi) = match kind.term_sign(k) {
            Sign::Plus => (sum.value - near_margin, other + far_margin),
            Sign::Minus => (other - far_margin, sum.value + near_margin),
        };
        Ok(EnvelopeInterval {
            lo: Real::with_val_round(self.precision, lo, Round::Down).0,
            hi: Real::with_val_round(self.precision, hi, Round::Up).0,
            k_used: k,
            bound: Real::with_val_round(self.precision, next, Round::Up).0,
        })
    }

    /// Smallest k with |term(k+1)| ≥ |term(k)|, decided in exact arithmetic.
    /// Ties resolve to the earlier index.
    pub fn min_term_index(&self, kind: SeriesKind, z: &Real) -> Result<usize> {
        let x = self.argument(kind, z)?;
        let x2 = exact(&x).square();
        let family = kind.family();
        let mut current = family.coefficient(0);
        for k in 0..TERM_LIMIT {
            let next = family.coefficient(k + 1);
            if next >= Rational::from(&current * &x2) {
                return Ok(k);
            }
            current = next;
        }
        Err(Error::TermLimitExceeded { limit: TERM_LIMIT })
    }

    /// Smallest k not beyond the minimum-term index whose first omitted term
    /// |term(k)| is at most `tol`, with that term's magnitude (rounded up).
    pub fn auto_truncate(&self, kind: SeriesKind, z: &Real, tol: &Real) -> Result<(usize, Real)> {
        check_positive(tol, "tol")?;
        let x = self.argument(kind, z)?;
        let x = exact(&x);
        let x2 = Rational::from(x.square_ref());
        let tol_exact = exact(tol);
        let family = kind.family();
        let mut coefficient = family.coefficient(0);
        let mut magnitude = Rational::from(&coefficient / &x);
        for k in 0..TERM_LIMIT {
            if magnitude <= tol_exact {
                return Ok((k, self.round_up(&magnitude)));
            }
            let next = family.coefficient(k + 1);
            if next >= Rational::from(&coefficient * &x2) {
                return Err(Error::ToleranceUnattainable {
                    tol: tol.clone(),
                    best_bound: self.round_up(&magnitude),
                    k,
                });
            }
            magnitude = magnitude * &next / &coefficient / &x2;
            coefficient = next;
        }
        Err(Error::TermLimitExceeded { limit: TERM_LIMIT })
    }

    fn round_up(&self, q: &Rational) -> Real {
        Real::with_val_round(self.precision, q, Round::Up).0
    }

    fn resolve(&self, kind: SeriesKind, z: &Real, truncation: &Truncation) -> Result<usize> {
        match truncation {
            Truncation::Terms(k) => {
                check_positive(z, "z")?;
                Ok(*k)
            }
            Truncation::Tolerance(tol) => self.auto_truncate(kind, z, tol).map(|(k, _)| k),
        }
    }

    // value = prefix + S_k, certified with the sign and size of term k.
    fn certify(&self, kind: SeriesKind, x: &Real, k: usize, prefix: Real, prefix_mag: Real) -> CertifiedValue {
        let sum = self.sum(kind, x, k);
        let next = self.magnitude_at(kind, k, x);
        let margin = self.slop() * (prefix_mag + sum.magnitude + &next);
        let sign = kind.term_sign(k);
        // Nudge the value away from the side the truth lies on so the
        // one-sided enclosure survives rounding.
        let raw = prefix + sum.value;
        let nudged = Real::with_val(self.work(), &raw - sign.apply(margin.clone()));
        let value = Real::with_val_round(self.precision, nudged, (-sign).toward()).0;
        let bound = Real::with_val(self.work(), next + margin * 2u32);
        CertifiedValue {
            value,
            error_bound: Real::with_val_round(self.precision, bound, Round::Up).0,
            error_sign: sign,
            k_used: k,
        }
    }

    fn half_ln_two_pi(&self) -> Real {
        let two_pi = Real::with_val(self.work(), Constant::Pi) * 2u32;
        two_pi.ln() / 2u32
    }

    /// ln Γ(z) = (z - ½) ln z - z + ½ ln 2π + J(z).
    pub fn ln_gamma(&self, z: &Real, truncation: &Truncation) -> Result<CertifiedValue> {
        let kind = SeriesKind::BinetJ;
        let k = self.resolve(kind, z, truncation)?;
        let x = self.argument(kind, z)?;
        let ln_x = Real::with_val(self.work(), x.ln_ref());
        let a = Real::with_val(self.work(), &x - 0.5) * &ln_x;
        let c = self.half_ln_two_pi();
        let mag = Real::with_val(self.work(), a.clone().abs() + x.clone().abs()) + &c;
        let prefix = a - &x + c;
        Ok(self.certify(kind, &x, k, prefix, mag))
    }

    /// ln C(2n, n) = n ln 4 - ½ ln(π n) + J̃(n).
    pub fn ln_central_binomial(&self, n: u64, truncation: &Truncation) -> Result<CertifiedValue> {
        if n == 0 {
            return Err(Error::Domain("n must be a positive integer".into()));
        }
        let kind = SeriesKind::CentralBinomial;
        let z = Real::with_val(self.work().max(64), n);
        let k = self.resolve(kind, &z, truncation)?;
        let x = self.argument(kind, &z)?;
        let ln4 = Real::with_val(self.work(), 4).ln();
        let pi = Real::with_val(self.work(), Constant::Pi);
        let a = ln4 * &x;
        let b = Real::with_val(self.work(), pi * &x).ln() / 2u32;
        let mag = Real::with_val(self.work(), a.clone().abs() + b.clone().abs());
        let prefix = a - b;
        Ok(self.certify(kind, &x, k, prefix, mag))
    }

    /// ln Γ(z + ½) = z ln z - z + ½ ln 2π + Σ (-1)^{j+1} β̂_j / z^{2j+1} + r̂_k(z).
    pub fn ln_gamma_plus_half(&self, z: &Real, truncation: &Truncation) -> Result<CertifiedValue> {
        let kind = SeriesKind::GammaHalf;
        let k = self.resolve(kind, z, truncation)?;
        let x = self.argument(kind, z)?;
        self.gamma_half_at(&x, k)
    }

    fn gamma_half_at(&self, x: &Real, k: usize) -> Result<CertifiedValue> {
        let a = Real::with_val(self.work(), x.ln_ref()) * x;
        let c = self.half_ln_two_pi();
        let mag = Real::with_val(self.work(), a.clone().abs() + x.clone().abs()) + &c;
        let prefix = a - x + c;
        Ok(self.certify(SeriesKind::GammaHalf, x, k, prefix, mag))
    }

    /// ln n! through de Moivre's series in powers of n + ½.
    pub fn ln_factorial_demoivre(&self, n: u64, truncation: &Truncation) -> Result<CertifiedValue> {
        if n == 0 {
            return Err(Error::Domain("n must be a positive integer".into()));
        }
        let kind = SeriesKind::DeMoivre;
        let z = Real::with_val(self.work().max(64), n);
        let k = self.resolve(kind, &z, truncation)?;
        let x = self.argument(kind, &z)?;
        self.gamma_half_at(&x, k)
    }
}

fn check_positive(x: &Real, name: &str) -> Result<()> {
    if x.is_finite() && x.cmp0() == Some(Ordering::Greater) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and positive, got {}", x.to_f64())))
    }
}

// Finite floats are dyadic rationals; callers have already checked finiteness.
fn exact(x: &Real) -> Rational {
    x.to_rational().expect("finite value")
}
