//! Named tensor factors and the index arithmetic that goes with them.
//!
//! Basis indices are row-major: the first factor is the most significant digit,
//! matching `a.kronecker(b)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the total dimension of any operator.
pub const MAX_TOTAL_DIM: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Factor>", into = "Vec<Factor>")]
pub struct RegisterLayout {
    factors: Vec<Factor>,
}

impl TryFrom<Vec<Factor>> for RegisterLayout {
    type Error = Error;
    fn try_from(factors: Vec<Factor>) -> Result<Self> {
        RegisterLayout::from_factors(factors)
    }
}

impl From<RegisterLayout> for Vec<Factor> {
    fn from(l: RegisterLayout) -> Self {
        l.factors
    }
}

impl RegisterLayout {
    pub fn from_factors(factors: Vec<Factor>) -> Result<Self> {
        for (i, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return Err(Error::Layout(format!("register {} has dimension 0", f.label)));
            }
            if f.label.is_empty() {
                return Err(Error::Layout("empty register label".into()));
            }
            if factors[..i].iter().any(|g| g.label == f.label) {
                return Err(Error::Layout(format!("duplicate register label {}", f.label)));
            }
        }
        let mut total: usize = 1;
        for f in &factors {
            total = total
                .checked_mul(f.dim)
                .ok_or_else(|| Error::Layout("dimension overflow".into()))?;
        }
        Ok(RegisterLayout { factors })
    }

    /// `RegisterLayout::new(&[("A", 2), ("B", 3)])`.
    pub fn new(spec: &[(&str, usize)]) -> Result<Self> {
        Self::from_factors(
            spec.iter()
                .map(|(l, d)| Factor {
                    label: l.to_string(),
                    dim: *d,
                })
                .collect(),
        )
    }

    /// Layout with no factors (dimension 1).
    pub fn trivial() -> Self {
        RegisterLayout { factors: vec![] }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.label.as_str()).collect()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.label == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|p| self.factors[p].dim)
            .ok_or_else(|| Error::Layout(format!("unknown register {label}")))
    }

    pub fn check_labels(&self, labels: &[&str]) -> Result<()> {
        for (i, l) in labels.iter().enumerate() {
            if !self.contains(l) {
                return Err(Error::Layout(format!("unknown register {l}")));
            }
            if labels[..i].contains(l) {
                return Err(Error::Layout(format!("register {l} listed twice")));
            }
        }
        Ok(())
    }

    /// Factors whose labels are in `labels`, in this layout's order.
    pub fn select(&self, labels: &[&str]) -> Result<RegisterLayout> {
        self.check_labels(labels)?;
        Ok(RegisterLayout {
            factors: self
                .factors
                .iter()
                .filter(|f| labels.contains(&f.label.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// Factors whose labels are not in `labels`, in this layout's order.
    pub fn complement(&self, labels: &[&str]) -> Result<RegisterLayout> {
        self.check_labels(labels)?;
        Ok(RegisterLayout {
            factors: self
                .factors
                .iter()
                .filter(|f| !labels.contains(&f.label.as_str()))
                .cloned()
                .collect(),
        })
    }

    pub fn concat(&self, other: &RegisterLayout) -> Result<RegisterLayout> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self::from_factors(factors)
    }

    /// Same factors, labels sorted lexicographically.
    pub fn canonical(&self) -> RegisterLayout {
        let mut factors = self.factors.clone();
        factors.sort_by(|a, b| a.label.cmp(&b.label));
        RegisterLayout { factors }
    }

    /// True when both layouts hold the same (label, dim) pairs in any order.
    pub fn same_registers(&self, other: &RegisterLayout) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }

    /// Digits of a flat index, one per factor.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut d = vec![0; self.len()];
        for k in (0..self.len()).rev() {
            d[k] = index % self.factors[k].dim;
            index /= self.factors[k].dim;
        }
        d
    }

    pub fn flat(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.factors).fold(0, |acc, (d, f)| acc * f.dim + d)
    }

    /// For each flat index of `target` (same registers, other order), the flat index in `self`.
    pub fn permutation_to(&self, target: &RegisterLayout) -> Result<Vec<usize>> {
        if !self.same_registers(target) {
            return Err(Error::Layout(format!(
                "layouts {:?} and {:?} hold different registers",
                self.labels(),
                target.labels()
            )));
        }
        let pos: Vec<usize> = target.factors.iter().map(|f| self.position(&f.label).unwrap()).collect();
        let n = self.total_dim();
        let mut map = vec![0; n];
        let mut src = vec![0; self.len()];
        for (i, slot) in map.iter_mut().enumerate() {
            let t = target.digits(i);
            for (k, &p) in pos.iter().enumerate() {
                src[p] = t[k];
            }
            *slot = self.flat(&src);
        }
        Ok(map)
    }

    /// Split each flat index into (index within `sub`, index within the rest).
    pub fn split_indices(&self, sub: &[&str]) -> Result<(Vec<usize>, Vec<usize>)> {
        self.check_labels(sub)?;
        let sub_layout = self.select(sub)?;
        let rest_layout = self.complement(sub)?;
        let n = self.total_dim();
        let mut s = Vec::with_capacity(n);
        let mut r = Vec::with_capacity(n);
        let mut sd = Vec::new();
        let mut rd = Vec::new();
        for i in 0..n {
            sd.clear();
            rd.clear();
            for (k, d) in self.digits(i).into_iter().enumerate() {
                if sub.contains(&self.factors[k].label.as_str()) {
                    sd.push(d);
                } else {
                    rd.push(d);
                }
            }
            s.push(sub_layout.flat(&sd));
            r.push(rest_layout.flat(&rd));
        }
        Ok((s, r))
    }

    /// New layout with one factor relabelled.
    pub fn relabel(&self, from: &str, to: &str) -> Result<RegisterLayout> {
        let p = self
            .position(from)
            .ok_or_else(|| Error::Layout(format!("unknown register {from}")))?;
        let mut factors = self.factors.clone();
        factors[p].label = to.to_string();
        Self::from_factors(factors)
    }
}

impl std::fmt::Display for RegisterLayout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| format!("{}:{}", x.label, x.dim)).collect();
        write!(f, "[{}]", parts.join(","))
    }
}
