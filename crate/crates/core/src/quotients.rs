//! Congruence quotients `G_n = G / St_G(n)` as permutation groups on the
//! `m^n` level-`n` vertices, their base-`m` logarithmic orders and the
//! sequence `s_n(G) = m log|St_G(n-1):St_G(n)| - log|St_G(n):St_G(n+1)|`.

use std::fmt;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::perm::{PermGroup, Permutation};
use crate::tree::{LevelActions, SelfSimilarGroup, TreeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("level {level} outside the computed range 0..={n_max}")]
    OutOfRange { level: usize, n_max: usize },
    #[error("the s-sequence needs at least two levels")]
    TooFewLevels,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A base-`m` logarithm. Exact when every order involved is a power of the
/// prime `p` with `m = p^a`; otherwise a floating approximation.
#[derive(Clone, Debug, PartialEq)]
pub enum LogValue {
    Exact(BigRational),
    Approx(f64),
}

impl LogValue {
    pub fn zero() -> Self {
        LogValue::Exact(BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        LogValue::Exact(BigRational::from_integer(n.into()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, LogValue::Exact(_))
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            LogValue::Exact(q) => Some(q),
            LogValue::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            LogValue::Exact(q) => rational_to_f64(q),
            LogValue::Approx(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LogValue::Exact(q) => q.is_zero(),
            LogValue::Approx(x) => x.abs() < APPROX_TOLERANCE,
        }
    }

    fn combine(
        &self,
        other: &LogValue,
        exact: impl Fn(&BigRational, &BigRational) -> BigRational,
        approx: impl Fn(f64, f64) -> f64,
    ) -> LogValue {
        match (self, other) {
            (LogValue::Exact(a), LogValue::Exact(b)) => LogValue::Exact(exact(a, b)),
            _ => LogValue::Approx(approx(self.to_f64(), other.to_f64())),
        }
    }

    pub fn add(&self, other: &LogValue) -> LogValue {
        self.combine(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &LogValue) -> LogValue {
        self.combine(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, other: &LogValue) -> LogValue {
        self.combine(other, |a, b| a * b, |a, b| a * b)
    }

    pub fn div(&self, other: &LogValue) -> LogValue {
        self.combine(other, |a, b| a / b, |a, b| a / b)
    }

    pub fn scale(&self, q: &BigRational) -> LogValue {
        self.mul(&LogValue::Exact(q.clone()))
    }

    /// Equality: exact for exact values, within a relative tolerance otherwise.
    pub fn agrees_with(&self, other: &LogValue) -> bool {
        match (self, other) {
            (LogValue::Exact(a), LogValue::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                (a - b).abs() <= APPROX_TOLERANCE * a.abs().max(b.abs()).max(1.0)
            }
        }
    }

    /// `p/q` for exact values; `~x (approx, d digits)` otherwise.
    pub fn render(&self, digits: usize) -> String {
        match self {
            LogValue::Exact(q) => render_rational(q),
            LogValue::Approx(x) => format!("~{x:.digits$} (approx, {digits} digits)"),
        }
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(DEFAULT_DIGITS))
    }
}

/// Relative tolerance for comparisons in approximate mode.
pub const APPROX_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_DIGITS: usize = 12;

/// Lowest terms, `p` for integers.
pub fn render_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| big_ln(q.numer().magnitude()) - big_ln(q.denom().magnitude()))
}

/// Natural logarithm of a big integer, to double precision.
fn big_ln(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Writes `m = p^a` if `m` is a prime power.
pub fn prime_power(m: u64) -> Option<(u64, u32)> {
    if m < 2 {
        return None;
    }
    let mut p = m;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            p = d;
            break;
        }
        d += 1;
    }
    let mut a = 0;
    let mut r = m;
    while r.is_multiple_of(p) {
        r /= p;
        a += 1;
    }
    (r == 1).then_some((p, a))
}

/// `log_m(order)`; exact when `m = p^a` and `order = p^e`, giving `e/a`.
pub fn log_order(order: &BigUint, m: usize) -> LogValue {
    assert!(!order.is_zero(), "orders are positive");
    if let Some((p, a)) = prime_power(m as u64) {
        let p = BigUint::from(p);
        let mut r = order.clone();
        let mut e: u64 = 0;
        loop {
            let (q, rem) = r.div_rem(&p);
            if !rem.is_zero() {
                break;
            }
            r = q;
            e += 1;
        }
        if r.is_one() {
            return LogValue::Exact(BigRational::new(BigInt::from(e), BigInt::from(a)));
        }
    }
    LogValue::Approx(big_ln(order) / (m as f64).ln())
}

/// The level-`n` congruence quotient, generated by the level actions of the
/// group's generators.
pub fn level_quotient(group: &SelfSimilarGroup, n: usize) -> Result<PermGroup, TreeError> {
    let acts = group.level_actions(n)?;
    quotient_from_actions(group, &acts, n)
}

fn quotient_from_actions(
    group: &SelfSimilarGroup,
    acts: &LevelActions,
    n: usize,
) -> Result<PermGroup, TreeError> {
    let size = group.level_size(n)?;
    Ok(PermGroup::new(size, acts.generators(n).to_vec())?)
}

/// For each 0-based level-`n` index, the 0-based index of its level-`k`
/// ancestor (`1 <= k <= n`).
pub fn block_points(m: usize, n: usize, k: usize) -> Vec<usize> {
    assert!(1 <= k && k <= n, "need 1 <= k <= n");
    let width = m.pow((n - k) as u32);
    (0..m.pow(n as u32)).map(|i| i / width).collect()
}

/// `St_{G_n}(k)`, the elements of a level-`n` quotient fixing every level-`k`
/// vertex. The quotient is extended by its induced action on level `k` and
/// the pointwise stabilizer of those extra points is taken.
pub fn level_stabilizer(quotient: &PermGroup, m: usize, n: usize, k: usize) -> PermGroup {
    let leaves = quotient.degree();
    assert_eq!(leaves, m.pow(n as u32), "quotient is not a level-{n} action");
    if k == 0 {
        return quotient.clone();
    }
    if k >= n {
        return PermGroup::trivial(leaves);
    }
    let ancestors = block_points(m, n, k);
    let width = m.pow((n - k) as u32);
    let vertices = m.pow(k as u32);
    let extended: Vec<Permutation> = quotient
        .generators()
        .iter()
        .map(|g| {
            let mut images: Vec<u32> = g.images().to_vec();
            for v in 0..vertices {
                images.push((leaves + ancestors[g.image(v * width)]) as u32);
            }
            Permutation::from_images(images).expect("level actions preserve blocks")
        })
        .collect();
    let big = PermGroup::new(leaves + vertices, extended).expect("uniform degree");
    let points: Vec<usize> = (leaves..leaves + vertices).collect();
    let stab = big.pointwise_stabilizer(&points).expect("points in range");
    let gens = stab.generators().iter().map(|g| g.restrict_to(leaves)).collect();
    PermGroup::new(leaves, gens).expect("uniform degree")
}

/// Orders and logarithmic orders of `G_1, .., G_{n_max}`, computed once per
/// level and cached.
#[derive(Clone, Debug)]
pub struct QuotientTable {
    group: SelfSimilarGroup,
    quotients: Vec<PermGroup>,
    orders: Vec<BigUint>,
}

impl QuotientTable {
    pub fn new(group: SelfSimilarGroup) -> Self {
        QuotientTable { group, quotients: Vec::new(), orders: Vec::new() }
    }

    /// Computes a table through level `n`.
    pub fn compute(group: SelfSimilarGroup, n: usize) -> Result<Self, QuotientError> {
        let mut t = QuotientTable::new(group);
        t.extend_to(n)?;
        Ok(t)
    }

    pub fn group(&self) -> &SelfSimilarGroup {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }

    pub fn n_max(&self) -> usize {
        self.orders.len()
    }

    /// Computes missing levels up to `n`; already computed levels are kept.
    pub fn extend_to(&mut self, n: usize) -> Result<(), QuotientError> {
        if n <= self.n_max() {
            return Ok(());
        }
        let acts = self.group.level_actions(n)?;
        for level in self.n_max() + 1..=n {
            let q = quotient_from_actions(&self.group, &acts, level)?;
            self.orders.push(q.order());
            self.quotients.push(q);
        }
        Ok(())
    }

    fn check(&self, level: usize) -> Result<(), QuotientError> {
        if level > self.n_max() {
            return Err(QuotientError::OutOfRange { level, n_max: self.n_max() });
        }
        Ok(())
    }

    /// `G_n` for `1 <= n <= n_max`.
    pub fn quotient(&self, n: usize) -> Result<&PermGroup, QuotientError> {
        if n == 0 {
            return Err(QuotientError::OutOfRange { level: 0, n_max: self.n_max() });
        }
        self.check(n)?;
        Ok(&self.quotients[n - 1])
    }

    /// `|G_n|`, with `|G_0| = 1`.
    pub fn order(&self, n: usize) -> Result<BigUint, QuotientError> {
        self.check(n)?;
        Ok(if n == 0 { BigUint::one() } else { self.orders[n - 1].clone() })
    }

    pub fn orders(&self) -> &[BigUint] {
        &self.orders
    }

    /// `L_n = log_m |G_n|`, with `L_0 = 0`.
    pub fn log(&self, n: usize) -> Result<LogValue, QuotientError> {
        Ok(log_order(&self.order(n)?, self.degree()))
    }

    /// `L_1, .., L_{n_max}`.
    pub fn logs(&self) -> Vec<LogValue> {
        (1..=self.n_max()).map(|n| self.log(n).expect("in range")).collect()
    }

    /// True when every computed order gives an exact logarithm.
    pub fn is_exact(&self) -> bool {
        self.logs().iter().all(LogValue::is_exact)
    }

    /// `log|St_G(n-1) : St_G(n)| = L_n - L_{n-1}`.
    pub fn stabilizer_quotient_log(&self, n: usize) -> Result<LogValue, QuotientError> {
        if n == 0 {
            return Err(QuotientError::OutOfRange { level: 0, n_max: self.n_max() });
        }
        self.check(n)?;
        // |G_n| / |G_{n-1}| is an integer, so the log of the quotient is taken
        // directly rather than subtracting two approximations.
        let ratio = self.order(n)? / self.order(n - 1)?;
        Ok(log_order(&ratio, self.degree()))
    }

    /// `s_n = m (L_n - L_{n-1}) - (L_{n+1} - L_n)` for `1 <= n < n_max`.
    pub fn s(&self, n: usize) -> Result<LogValue, QuotientError> {
        if n == 0 || n + 1 > self.n_max() {
            return Err(QuotientError::OutOfRange { level: n + 1, n_max: self.n_max() });
        }
        let m = LogValue::from_integer(self.degree() as i64);
        let lower = self.stabilizer_quotient_log(n)?;
        let upper = self.stabilizer_quotient_log(n + 1)?;
        Ok(m.mul(&lower).sub(&upper))
    }

    /// `s_1, .., s_{n_max - 1}`.
    pub fn s_sequence(&self) -> Result<Vec<LogValue>, QuotientError> {
        if self.n_max() < 2 {
            return Err(QuotientError::TooFewLevels);
        }
        (1..self.n_max()).map(|n| self.s(n)).collect()
    }

    /// `St_{G_n}(k)` realised inside `G_n`.
    pub fn level_stabilizer(&self, n: usize, k: usize) -> Result<PermGroup, QuotientError> {
        let q = self.quotient(n)?;
        Ok(level_stabilizer(q, self.degree(), n, k))
    }

    /// `s_n` from the orders of `St_{G_{n+1}}(n-1)` and `St_{G_{n+1}}(n)`
    /// computed as subgroups of `G_{n+1}`, independently of the quotient
    /// orders used by [`QuotientTable::s`].
    pub fn s_via_stabilizers(&self, n: usize) -> Result<LogValue, QuotientError> {
        if n == 0 {
            return Err(QuotientError::OutOfRange { level: 0, n_max: self.n_max() });
        }
        let outer = n + 1;
        let st_prev = self.level_stabilizer(outer, n - 1)?.order();
        let st_n = self.level_stabilizer(outer, n)?.order();
        let m = self.degree();
        let lower = log_order(&(&st_prev / &st_n), m);
        let upper = log_order(&st_n, m);
        Ok(LogValue::from_integer(m as i64).mul(&lower).sub(&upper))
    }

    /// CSV rows `n,order,L_n,s_n`; `s_n` is blank where it needs a level
    /// beyond the table.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("n,order,log,s\n");
        for n in 1..=self.n_max() {
            let s = self.s(n).map(|v| v.render(digits)).unwrap_or_default();
            let _ = writeln!(
                out,
                "{n},{},{},{s}",
                self.orders[n - 1],
                self.log(n).expect("in range").render(digits)
            );
        }
        out
    }
}
