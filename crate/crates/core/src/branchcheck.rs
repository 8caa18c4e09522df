//! Refuting claimed branch structures from finite congruence quotients.
//!
//! Every check here is one-sided: a failure refutes the hypothesis, a pass
//! is evidence up to the levels examined and never a proof.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::hausdorff::{subgroup_image, HausdorffError, Normality, SubgroupSpec};
use crate::perm::Permutation;
use crate::quotients::{LogValue, QuotientTable, DEFAULT_DIGITS};
use crate::tree::TreeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BranchError {
    #[error("empty check range: horizon {horizon} must exceed witness level {k}")]
    EmptyRange { k: usize, horizon: usize },
    #[error("test level {n} must exceed stabilizer level {k}")]
    LevelOrder { k: usize, n: usize },
    #[error("branching check needs level n >= 2, got {0}")]
    LevelTooLow(usize),
    #[error(transparent)]
    Hausdorff(#[from] HausdorffError),
}

impl From<crate::quotients::QuotientError> for BranchError {
    fn from(e: crate::quotients::QuotientError) -> Self {
        BranchError::Hausdorff(e.into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// A nonzero `s_n` beyond the witness level.
    SValue { n: usize, s: LogValue },
    /// An element that should lie in the subgroup at `level` but does not.
    Element { level: usize, description: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Refuted,
    /// Consistent with the hypothesis at every level up to the bound.
    ConsistentUpTo(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchVerdict {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub levels_checked: usize,
    pub notes: Vec<String>,
}

impl BranchVerdict {
    pub fn is_refuted(&self) -> bool {
        self.verdict == Verdict::Refuted
    }

    fn refuted(witness: Witness, levels_checked: usize, notes: Vec<String>) -> Self {
        BranchVerdict { verdict: Verdict::Refuted, witness: Some(witness), levels_checked, notes }
    }

    fn consistent(level: usize, notes: Vec<String>) -> Self {
        BranchVerdict {
            verdict: Verdict::ConsistentUpTo(level),
            witness: None,
            levels_checked: level,
            notes,
        }
    }

    /// `verdict=`, `witness=`, `levels_checked=`, `notes=` lines.
    pub fn to_record(&self, digits: usize) -> String {
        let mut out = String::new();
        let verdict = match self.verdict {
            Verdict::Refuted => "refuted".to_string(),
            Verdict::ConsistentUpTo(n) => format!("consistent-up-to-level-{n}"),
        };
        let _ = writeln!(out, "verdict={verdict}");
        let _ = writeln!(out, "witness={}", self.witness.as_ref().map_or(String::new(), |w| render_witness(w, digits)));
        let _ = writeln!(out, "levels_checked={}", self.levels_checked);
        let _ = writeln!(out, "notes={}", self.notes.join("; "));
        out
    }
}

fn render_witness(w: &Witness, digits: usize) -> String {
    match w {
        Witness::SValue { n, s } => format!("s_{n} = {}", s.render(digits)),
        Witness::Element { level, description } => format!("level {level}: {description}"),
    }
}

impl fmt::Display for BranchVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.verdict, &self.witness) {
            (Verdict::Refuted, Some(w)) => write!(f, "refuted: {}", render_witness(w, DEFAULT_DIGITS)),
            (Verdict::Refuted, None) => f.write_str("refuted"),
            (Verdict::ConsistentUpTo(n), _) => {
                write!(f, "consistent up to level {n} (finite evidence only)")
            }
        }
    }
}

/// If `K >= St_G(k)` and `G` branches over `K` then `s_n = 0` for all `n > k`;
/// a nonzero `s_n` with `k < n <= horizon` refutes the branch structure.
pub fn discard_by_s(
    table: &mut QuotientTable,
    k: usize,
    horizon: usize,
) -> Result<BranchVerdict, BranchError> {
    if horizon <= k {
        return Err(BranchError::EmptyRange { k, horizon });
    }
    table.extend_to(horizon + 1)?;
    for n in k + 1..=horizon {
        let s = table.s(n)?;
        if !s.is_zero() {
            return Ok(BranchVerdict::refuted(
                Witness::SValue { n, s },
                n,
                vec![format!("s_n must vanish for n > {k} under the claimed structure")],
            ));
        }
    }
    Ok(BranchVerdict::consistent(horizon, vec![format!("s_n = 0 for {} <= n <= {horizon}", k + 1)]))
}

fn normality_note(spec: &SubgroupSpec) -> Vec<String> {
    match spec {
        SubgroupSpec::Words { normality: Normality::Asserted, .. } => {
            vec!["K taken as generated by the given words (normality asserted)".into()]
        }
        SubgroupSpec::Words { normality: Normality::Closure, .. } => {
            vec!["K replaced by the normal closure of the given words in each quotient".into()]
        }
        _ => Vec::new(),
    }
}

/// Tests the necessary condition `St_{G_n}(k) <= K_n` for `K >= St_G(k)`.
pub fn verify_stabilizer_containment(
    table: &mut QuotientTable,
    spec: &SubgroupSpec,
    k: usize,
    n: usize,
) -> Result<BranchVerdict, BranchError> {
    if n <= k {
        return Err(BranchError::LevelOrder { k, n });
    }
    table.extend_to(n)?;
    let st = table.level_stabilizer(n, k)?;
    let image = subgroup_image(table, spec, n)?;
    let mut notes = normality_note(spec);
    for g in st.generators() {
        if !image.contains(g).map_err(TreeError::from).map_err(HausdorffError::from)? {
            notes.push(format!("hence K does not contain St_G({k})"));
            return Ok(BranchVerdict::refuted(
                Witness::Element {
                    level: n,
                    description: format!("element of St_G({k}) outside K: {g}"),
                },
                n,
                notes,
            ));
        }
    }
    notes.push(format!("St_G({k}) <= K holds at level {n}"));
    Ok(BranchVerdict::consistent(n, notes))
}

/// For each generator of `K_{n-1}` and each first-level vertex `i`, the
/// element acting as that generator below `i` and trivially elsewhere must
/// lie in `K_n` if `psi(K) >= K x .. x K`.
pub fn branching_necessary_check(
    table: &mut QuotientTable,
    spec: &SubgroupSpec,
    n: usize,
) -> Result<BranchVerdict, BranchError> {
    if n < 2 {
        return Err(BranchError::LevelTooLow(n));
    }
    table.extend_to(n)?;
    let m = table.degree();
    let lower = subgroup_image(table, spec, n - 1)?;
    let upper = subgroup_image(table, spec, n)?;
    let width = lower.degree();
    let mut notes = normality_note(spec);
    for (j, kappa) in lower.generators().iter().enumerate() {
        for i in 0..m {
            let mut images: Vec<u32> = (0..(m * width) as u32).collect();
            for (r, &t) in kappa.images().iter().enumerate() {
                images[i * width + r] = (i * width) as u32 + t;
            }
            let placed = Permutation::from_images(images).expect("block permutation");
            if !upper.contains(&placed).map_err(TreeError::from).map_err(HausdorffError::from)? {
                notes.push("psi(K) does not contain K x .. x K".into());
                return Ok(BranchVerdict::refuted(
                    Witness::Element {
                        level: n,
                        description: format!(
                            "generator {} of K_{} ({kappa}) placed below vertex {} is not in K_{n}",
                            j + 1,
                            n - 1,
                            i + 1
                        ),
                    },
                    n,
                    notes,
                ));
            }
        }
    }
    notes.push(format!("all {} placed generators lie in K_{n}", lower.generators().len() * m));
    Ok(BranchVerdict::consistent(n, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{preset, second_grigorchuk};
    use crate::tree::TreeWord;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn second_grigorchuk_not_branching_over_derived() {
        let mut t = QuotientTable::new(second_grigorchuk());
        let v = discard_by_s(&mut t, 2, 3).unwrap();
        assert!(v.is_refuted());
        assert_eq!(
            v.witness,
            Some(Witness::SValue { n: 3, s: LogValue::Exact(BigRational::new(BigInt::from(1), BigInt::from(2))) })
        );
        assert_eq!(v.to_string(), "refuted: s_3 = 1/2");
        assert!(v.to_record(6).starts_with("verdict=refuted\nwitness=s_3 = 1/2\n"));
    }

    #[test]
    fn empty_ranges() {
        let mut t = QuotientTable::new(second_grigorchuk());
        assert!(matches!(discard_by_s(&mut t, 3, 3), Err(BranchError::EmptyRange { .. })));
        assert!(matches!(
            verify_stabilizer_containment(&mut t, &SubgroupSpec::Derived, 2, 2),
            Err(BranchError::LevelOrder { .. })
        ));
        assert!(matches!(
            branching_necessary_check(&mut t, &SubgroupSpec::Derived, 1),
            Err(BranchError::LevelTooLow(1))
        ));
    }

    #[test]
    fn stabilizer_containment() {
        let mut t = QuotientTable::new(second_grigorchuk());
        let v = verify_stabilizer_containment(&mut t, &SubgroupSpec::Derived, 2, 3).unwrap();
        assert_eq!(v.verdict, Verdict::ConsistentUpTo(3));
        assert!(!v.to_string().contains("proved"));
        let trivial = SubgroupSpec::Words { words: vec![], normality: Normality::Asserted };
        let v = verify_stabilizer_containment(&mut t, &trivial, 1, 2).unwrap();
        assert!(v.is_refuted());
    }

    #[test]
    fn branching_checks() {
        let mut t = QuotientTable::new(preset("ggs:4:1,0,0").unwrap());
        let v = branching_necessary_check(&mut t, &SubgroupSpec::Derived, 3).unwrap();
        assert_eq!(v.verdict, Verdict::ConsistentUpTo(3));
        let a = SubgroupSpec::Words { words: vec![TreeWord::generator(0)], normality: Normality::Asserted };
        let v = branching_necessary_check(&mut t, &a, 2).unwrap();
        assert!(v.is_refuted());
        let trivial = SubgroupSpec::Words { words: vec![], normality: Normality::Asserted };
        assert!(!branching_necessary_check(&mut t, &trivial, 3).unwrap().is_refuted());
    }
}
