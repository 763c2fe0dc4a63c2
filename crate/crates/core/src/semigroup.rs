//! Marking semigroups modelled as free commutative monoids `N^k`.
//!
//! Classes of vertices live in `N^k`; homomorphisms between such monoids
//! are non-negative integer matrices, and numerical data attached to a
//! target variety (canonical class, ample class) are integer linear forms.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of the free commutative monoid `N^k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonoidElement(Vec<u64>);

impl MonoidElement {
    pub fn new(coords: Vec<u64>) -> Self {
        MonoidElement(coords)
    }

    pub fn zero(rank: usize) -> Self {
        MonoidElement(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn checked_add(&self, other: &MonoidElement) -> Result<MonoidElement> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: other.rank(),
            });
        }
        Ok(MonoidElement(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// Coordinatewise `self - other`, if `other <= self`.
    pub fn checked_sub(&self, other: &MonoidElement) -> Option<MonoidElement> {
        if self.rank() != other.rank() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MonoidElement)
    }

    /// Coordinatewise partial order.
    pub fn le(&self, other: &MonoidElement) -> bool {
        self.rank() == other.rank() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// All pairs `(b1, b2)` with `b1 + b2 = self`, ordered lexicographically on `b1`.
    ///
    /// The list has exactly `prod_j (b_j + 1)` entries and no repeats.
    pub fn pair_decompositions(&self) -> Vec<(MonoidElement, MonoidElement)> {
        let mut out = Vec::new();
        let mut first = vec![0u64; self.rank()];
        loop {
            let second: Vec<u64> = self.0.iter().zip(&first).map(|(b, x)| b - x).collect();
            out.push((MonoidElement(first.clone()), MonoidElement(second)));
            // odometer, last coordinate fastest, which yields lexicographic order
            let mut pos = self.rank();
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                if first[pos] < self.0[pos] {
                    first[pos] += 1;
                    for later in first.iter_mut().skip(pos + 1) {
                        *later = 0;
                    }
                    break;
                }
            }
        }
    }
}

impl Add for &MonoidElement {
    type Output = MonoidElement;

    /// Panics on rank mismatch; use [`MonoidElement::checked_add`] for fallible addition.
    fn add(self, rhs: &MonoidElement) -> MonoidElement {
        self.checked_add(rhs).expect("monoid rank mismatch")
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn add(a: &MonoidElement, b: &MonoidElement) -> Result<MonoidElement> {
    a.checked_add(b)
}

pub fn enumerate_pair_decompositions(b: &MonoidElement) -> Vec<(MonoidElement, MonoidElement)> {
    b.pair_decompositions()
}

/// A monoid homomorphism `N^k -> N^m`, stored as an `m x k` matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonoidHom {
    source_rank: usize,
    rows: Vec<Vec<u64>>,
}

impl MonoidHom {
    pub fn from_rows(source_rank: usize, rows: Vec<Vec<u64>>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != source_rank) {
            return Err(Error::RankMismatch {
                expected: source_rank,
                found: bad.len(),
            });
        }
        Ok(MonoidHom { source_rank, rows })
    }

    pub fn identity(rank: usize) -> Self {
        let rows = (0..rank)
            .map(|i| (0..rank).map(|j| u64::from(i == j)).collect())
            .collect();
        MonoidHom {
            source_rank: rank,
            rows,
        }
    }

    /// The unique map to the trivial monoid.
    pub fn to_trivial(source_rank: usize) -> Self {
        MonoidHom {
            source_rank,
            rows: Vec::new(),
        }
    }

    pub fn zero(source_rank: usize, target_rank: usize) -> Self {
        MonoidHom {
            source_rank,
            rows: vec![vec![0; source_rank]; target_rank],
        }
    }

    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    pub fn target_rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn is_identity(&self) -> bool {
        *self == MonoidHom::identity(self.source_rank)
    }

    pub fn apply(&self, a: &MonoidElement) -> Result<MonoidElement> {
        if a.rank() != self.source_rank {
            return Err(Error::RankMismatch {
                expected: self.source_rank,
                found: a.rank(),
            });
        }
        Ok(MonoidElement(
            self.rows
                .iter()
                .map(|row| row.iter().zip(a.coords()).map(|(m, x)| m * x).sum())
                .collect(),
        ))
    }

    /// `self ∘ inner`: first apply `inner`, then `self`.
    pub fn compose(&self, inner: &MonoidHom) -> Result<MonoidHom> {
        if inner.target_rank() != self.source_rank {
            return Err(Error::RankMismatch {
                expected: self.source_rank,
                found: inner.target_rank(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                (0..inner.source_rank)
                    .map(|j| {
                        row.iter()
                            .zip(&inner.rows)
                            .map(|(a, inner_row)| a * inner_row[j])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Ok(MonoidHom {
            source_rank: inner.source_rank,
            rows,
        })
    }
}

pub fn apply_hom(h: &MonoidHom, a: &MonoidElement) -> Result<MonoidElement> {
    h.apply(a)
}

/// An integer-valued additive form on `N^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearForm(Vec<i64>);

impl LinearForm {
    pub fn new(coeffs: Vec<i64>) -> Self {
        LinearForm(coeffs)
    }

    pub fn zero(rank: usize) -> Self {
        LinearForm(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn eval(&self, a: &MonoidElement) -> Result<i64> {
        if a.rank() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: a.rank(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(a.coords())
            .map(|(c, x)| c * *x as i64)
            .sum())
    }

    /// Positive on every non-zero element of `N^k`.
    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&c| c > 0)
    }
}

pub fn eval_form(f: &LinearForm, a: &MonoidElement) -> Result<i64> {
    f.eval(a)
}

// JSON form of a hom is the bare row array; the source rank is recovered from
// the rows, so a hom into the trivial monoid carries it separately.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum HomRepr {
    Rows(Vec<Vec<u64>>),
    Trivial { source_rank: usize, rows: Vec<Vec<u64>> },
}

impl Serialize for MonoidHom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.rows.is_empty() && self.source_rank > 0 {
            HomRepr::Trivial {
                source_rank: self.source_rank,
                rows: Vec::new(),
            }
            .serialize(s)
        } else {
            HomRepr::Rows(self.rows.clone()).serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for MonoidHom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (source_rank, rows) = match HomRepr::deserialize(d)? {
            HomRepr::Rows(rows) => (rows.first().map_or(0, Vec::len), rows),
            HomRepr::Trivial { source_rank, rows } => (source_rank, rows),
        };
        MonoidHom::from_rows(source_rank, rows).map_err(serde::de::Error::custom)
    }
}
