//! Hausdorff dimension of the closure of a regular branch group in `W_H`
//! from a branch structure `(G, K)`.
//!
//! With `t = Omega(|G:K|)` (or a witness level `k` with `K >= St_G(k)`), the
//! closure is regular branch over its `t`-th level stabilizer, so `s_n = 0`
//! for `n > t` and
//!
//! ```text
//! hdim = (L_1 - sum_{n=1}^{t} s_n / m^n) / log_m |H|
//! L_n  = alpha m^n + beta                       for n >= t
//! alpha = hdim log_m|H| / (m - 1),  beta = (sum s_n - L_1) / (m - 1)
//! ```

pub mod factor;

use std::fmt;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::perm::PermGroup;
use crate::quotients::{log_order, LogValue, QuotientError, QuotientTable, DEFAULT_DIGITS};
use crate::tree::{TreeError, TreeWord};

pub use factor::{factorize, omega, FactorConfig, FactorError, Factorization};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HausdorffError {
    #[error("explicit index must be at least 1")]
    ZeroIndex,
    #[error("witness level must be at least 1")]
    ZeroWitness,
    #[error("lower central term gamma_{0} needs c >= 2")]
    BadLowerCentral(usize),
    #[error(
        "subgroup given by explicit generators is not asserted normal; \
         supply an explicit index or assert normality"
    )]
    NotNormal,
    #[error("witness level {k} refuted: St_G({k}) is not contained in K at level {level}")]
    WitnessRefuted { k: usize, level: usize },
    #[error("index |G_n : K_n| did not stabilise by level {0}")]
    NoStabilisation(usize),
    #[error("growth law fails at level {level}: L = {found}, alpha m^n + beta = {expected}; not a branch structure")]
    GrowthLawFailed { level: usize, found: String, expected: String },
    #[error("dimension {0} outside [0, 1]; not a branch structure")]
    OutOfRange(String),
    #[error("partial sums need exact s-values")]
    Inexact,
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
}

impl From<TreeError> for HausdorffError {
    fn from(e: TreeError) -> Self {
        HausdorffError::Quotient(QuotientError::Tree(e))
    }
}

/// How the image of a normal subgroup `K` in a congruence quotient is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normality {
    /// The caller asserts `K` is normal; its image is generated by the images
    /// of the given words.
    Asserted,
    /// The normal closure of the words' images inside each `G_n` is used.
    Closure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubgroupSpec {
    Whole,
    Derived,
    /// `gamma_c(G)`, `c >= 2`.
    LowerCentral(usize),
    Words { words: Vec<TreeWord>, normality: Normality },
}

impl fmt::Display for SubgroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupSpec::Whole => f.write_str("G"),
            SubgroupSpec::Derived => f.write_str("G'"),
            SubgroupSpec::LowerCentral(c) => write!(f, "gamma_{c}(G)"),
            SubgroupSpec::Words { words, normality } => {
                let tag = match normality {
                    Normality::Asserted => "normality asserted",
                    Normality::Closure => "normal closure",
                };
                write!(f, "<{} words> ({tag})", words.len())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexData {
    /// `|G : K|` supplied by the caller.
    Explicit(BigUint),
    /// `K >= St_G(k)` asserted by the caller.
    Witness(usize),
    /// Stabilisation of `|G_n : K_n|` over two consecutive levels, searched up
    /// to `max_level`. Heuristic.
    Auto { max_level: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchStructure {
    pub subgroup: SubgroupSpec,
    pub index: IndexData,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    Index,
    Witness,
    Heuristic,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Index => "index",
            Tier::Witness => "witness",
            Tier::Heuristic => "heuristic",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedIndex {
    pub index: BigUint,
    pub witness_level: Option<usize>,
    pub tier: Tier,
    pub provenance: Vec<String>,
}

/// Image of `K` in the level-`n` quotient.
pub fn subgroup_image(
    table: &QuotientTable,
    spec: &SubgroupSpec,
    n: usize,
) -> Result<PermGroup, HausdorffError> {
    let q = table.quotient(n)?;
    Ok(match spec {
        SubgroupSpec::Whole => q.clone(),
        SubgroupSpec::Derived => q.derived_subgroup(),
        SubgroupSpec::LowerCentral(c) => {
            if *c < 2 {
                return Err(HausdorffError::BadLowerCentral(*c));
            }
            q.lower_central(*c)
        }
        SubgroupSpec::Words { words, normality } => {
            let acts = table.group().level_actions(n)?;
            let images = words
                .iter()
                .map(|w| acts.word(w, n))
                .collect::<Result<Vec<_>, _>>()?;
            match normality {
                Normality::Asserted => {
                    PermGroup::new(q.degree(), images).map_err(TreeError::from)?
                }
                Normality::Closure => q.normal_closure(&images).map_err(TreeError::from)?,
            }
        }
    })
}

/// `|G_n : K_n|`.
pub fn quotient_index(
    table: &QuotientTable,
    spec: &SubgroupSpec,
    n: usize,
) -> Result<BigUint, HausdorffError> {
    let k = subgroup_image(table, spec, n)?;
    Ok(table.order(n)? / k.order())
}

/// Finite-level necessary condition for `K >= St_G(k)`:
/// `St_{G_n}(k) <= K_n`.
pub fn stabilizer_contained(
    table: &QuotientTable,
    spec: &SubgroupSpec,
    k: usize,
    n: usize,
) -> Result<bool, HausdorffError> {
    let st = table.level_stabilizer(n, k)?;
    let image = subgroup_image(table, spec, n)?;
    Ok(st.is_subgroup_of(&image).map_err(TreeError::from)?)
}

pub fn resolve_index(
    table: &mut QuotientTable,
    bs: &BranchStructure,
) -> Result<ResolvedIndex, HausdorffError> {
    if let SubgroupSpec::LowerCentral(c) = bs.subgroup {
        if c < 2 {
            return Err(HausdorffError::BadLowerCentral(c));
        }
    }
    let words_not_normal = matches!(
        bs.subgroup,
        SubgroupSpec::Words { normality: Normality::Closure, .. }
    );
    match &bs.index {
        IndexData::Explicit(index) => {
            if index.is_zero() {
                return Err(HausdorffError::ZeroIndex);
            }
            Ok(ResolvedIndex {
                index: index.clone(),
                witness_level: None,
                tier: Tier::Index,
                provenance: vec![format!("|G:K| = {index} supplied by the caller")],
            })
        }
        IndexData::Witness(k) => {
            let k = *k;
            if k == 0 {
                return Err(HausdorffError::ZeroWitness);
            }
            if words_not_normal {
                return Err(HausdorffError::NotNormal);
            }
            table.extend_to(k)?;
            let index = quotient_index(table, &bs.subgroup, k)?;
            let mut provenance = vec![format!(
                "|G:K| = |G_{k} : K St_G({k})/St_G({k})| = {index}, given K >= St_G({k})"
            )];
            let check = k + 1;
            match table.extend_to(check) {
                Ok(()) => {
                    if !stabilizer_contained(table, &bs.subgroup, k, check)? {
                        return Err(HausdorffError::WitnessRefuted { k, level: check });
                    }
                    provenance.push(format!("St_G({k}) <= K checked in G_{check}"));
                }
                Err(QuotientError::Tree(TreeError::DegreeCapExceeded { .. })) => {
                    provenance.push(format!("St_G({k}) <= K not checked: G_{check} above degree cap"));
                }
                Err(e) => return Err(e.into()),
            }
            Ok(ResolvedIndex { index, witness_level: Some(k), tier: Tier::Witness, provenance })
        }
        IndexData::Auto { max_level } => {
            if words_not_normal {
                return Err(HausdorffError::NotNormal);
            }
            let mut prev: Option<BigUint> = None;
            for n in 1..=*max_level {
                table.extend_to(n)?;
                let index = quotient_index(table, &bs.subgroup, n)?;
                if prev.as_ref() == Some(&index) {
                    return Ok(ResolvedIndex {
                        index,
                        witness_level: None,
                        tier: Tier::Heuristic,
                        provenance: vec![format!(
                            "|G_n : K_n| constant at levels {} and {n} (heuristic)",
                            n - 1
                        )],
                    });
                }
                prev = Some(index);
            }
            Err(HausdorffError::NoStabilisation(*max_level))
        }
    }
}

/// `sum_n s_n m^{-n}` over the supplied terms (`s_1` first).
pub fn s_partial_sum(s: &[LogValue], m: usize) -> Result<BigRational, HausdorffError> {
    let mut total = BigRational::zero();
    let mut weight = BigRational::one();
    let inv_m = BigRational::new(BigInt::one(), BigInt::from(m));
    for v in s {
        weight *= &inv_m;
        let q = v.exact().ok_or(HausdorffError::Inexact)?;
        total += q * &weight;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HausdorffResult {
    pub group: String,
    pub subgroup: String,
    pub degree: usize,
    pub hdim: LogValue,
    pub tier: Tier,
    pub index: BigUint,
    /// The branching level `t` of the closure.
    pub omega: usize,
    pub logs: Vec<LogValue>,
    pub s_used: Vec<LogValue>,
    pub log_h: LogValue,
    pub alpha: LogValue,
    pub beta: LogValue,
    pub caveats: Vec<String>,
}

impl HausdorffResult {
    pub fn is_exact(&self) -> bool {
        self.hdim.is_exact()
    }

    /// Line-oriented `key=value` record.
    pub fn to_record(&self, digits: usize) -> String {
        let join = |v: &[LogValue]| v.iter().map(|x| x.render(digits)).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let _ = writeln!(out, "group={}", self.group);
        let _ = writeln!(out, "subgroup={}", self.subgroup);
        let _ = writeln!(out, "hdim={}", self.hdim.render(digits));
        let _ = writeln!(out, "mode={}", if self.is_exact() { "exact" } else { "approximate" });
        let _ = writeln!(out, "tier={}", self.tier);
        let _ = writeln!(out, "index={}", self.index);
        let _ = writeln!(out, "omega={}", self.omega);
        let _ = writeln!(out, "logs={}", join(&self.logs));
        let _ = writeln!(out, "s={}", join(&self.s_used));
        let _ = writeln!(out, "log_h={}", self.log_h.render(digits));
        let _ = writeln!(out, "alpha={}", self.alpha.render(digits));
        let _ = writeln!(out, "beta={}", self.beta.render(digits));
        let _ = writeln!(out, "caveats={}", self.caveats.join("; "));
        out
    }
}

impl fmt::Display for HausdorffResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_record(DEFAULT_DIGITS))
    }
}

#[derive(Clone, Debug)]
pub struct HausdorffOptions {
    /// The growth law at `n = t, t+1` holds identically once `alpha` and
    /// `beta` are formed; the check at `n = t+2` (equivalently
    /// `s_{t+1} = 0`) is what can reject a wrong branch structure. It runs
    /// when level `t+2` has at most this many vertices.
    pub extra_check_points: usize,
}

impl Default for HausdorffOptions {
    fn default() -> Self {
        HausdorffOptions { extra_check_points: 1024 }
    }
}

/// Runs the whole pipeline on a table (extended as needed).
pub fn hausdorff_dimension(
    table: &mut QuotientTable,
    bs: &BranchStructure,
) -> Result<HausdorffResult, HausdorffError> {
    hausdorff_dimension_with(table, bs, &HausdorffOptions::default())
}

pub fn hausdorff_dimension_with(
    table: &mut QuotientTable,
    bs: &BranchStructure,
    options: &HausdorffOptions,
) -> Result<HausdorffResult, HausdorffError> {
    let resolved = resolve_index(table, bs)?;
    let mut caveats = Vec::new();
    let t = match resolved.witness_level {
        Some(k) => k,
        None => {
            let f = factorize(&resolved.index, &FactorConfig::default())?;
            if !f.probable_primes.is_empty() {
                caveats.push("Omega uses strong probable-prime tests for factors above 2^64".into());
            }
            f.omega() as usize
        }
    };
    table.extend_to(t + 1)?;
    let m = table.degree();
    let m_big = BigInt::from(m);
    let ambient = table.group().ambient_group();
    let log_h = log_order(&ambient.order(), m);

    let l1 = table.log(1)?;
    let s_used: Vec<LogValue> = (1..=t).map(|n| table.s(n)).collect::<Result<_, _>>()?;
    let mut weighted = LogValue::zero();
    let mut s_total = LogValue::zero();
    let mut m_pow = BigRational::one();
    for s in &s_used {
        m_pow *= &m_big;
        weighted = weighted.add(&s.scale(&m_pow.recip()));
        s_total = s_total.add(s);
    }
    let hdim = l1.sub(&weighted).div(&log_h);
    let m_minus_1 = BigRational::from_integer(BigInt::from(m - 1)).recip();
    let alpha = hdim.mul(&log_h).scale(&m_minus_1);
    let beta = s_total.sub(&l1).scale(&m_minus_1);

    let extra = t + 2;
    let extra_fits = table
        .group()
        .level_size(extra)
        .is_ok_and(|size| size <= options.extra_check_points);
    let mut check_levels = vec![t, t + 1];
    if extra_fits {
        table.extend_to(extra)?;
        check_levels.push(extra);
    }
    for n in check_levels {
        let found = table.log(n)?;
        let m_n = BigRational::from_integer(num_traits::pow(m_big.clone(), n));
        let expected = alpha.scale(&m_n).add(&beta);
        if !found.agrees_with(&expected) {
            return Err(HausdorffError::GrowthLawFailed {
                level: n,
                found: found.to_string(),
                expected: expected.to_string(),
            });
        }
    }
    let in_range = match &hdim {
        LogValue::Exact(q) => !q.is_negative() && q <= &BigRational::one(),
        LogValue::Approx(x) => (-1e-9..=1.0 + 1e-9).contains(x),
    };
    if !in_range {
        return Err(HausdorffError::OutOfRange(hdim.to_string()));
    }

    if resolved.tier == Tier::Heuristic {
        caveats.push("index found by stabilisation of finite quotients; result is heuristic".into());
    }
    caveats.extend(resolved.provenance.iter().cloned());
    if extra_fits {
        caveats.push(format!("growth law verified at n = {t}, {}, {extra} only", t + 1));
    } else {
        caveats.push(format!(
            "growth law verified at n = {t} and n = {} only; level {extra} above the check budget",
            t + 1
        ));
    }
    if !hdim.is_exact() {
        caveats.push("orders are not powers of the prime underlying m; values are approximate".into());
    }

    let group = table.group();
    Ok(HausdorffResult {
        group: group.name().unwrap_or("unnamed group").to_string(),
        subgroup: bs.subgroup.to_string(),
        degree: m,
        hdim,
        tier: resolved.tier,
        index: resolved.index,
        omega: t,
        logs: table.logs()[..=t].to_vec(),
        s_used,
        log_h,
        alpha,
        beta,
        caveats,
    })
}
