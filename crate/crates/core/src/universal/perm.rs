use std::fmt;

use serde::{Deserialize, Serialize};

use super::UniversalError;

/// A permutation of `{0, …, n−1}` stored as its image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Perm(Vec<u32>);

impl TryFrom<Vec<u32>> for Perm {
    type Error = UniversalError;

    fn try_from(table: Vec<u32>) -> Result<Self, Self::Error> {
        Perm::from_table(table)
    }
}

impl From<Perm> for Vec<u32> {
    fn from(p: Perm) -> Self {
        p.0
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Perm {
    pub fn identity(n: u32) -> Self {
        Perm((0..n).collect())
    }

    pub fn from_table(table: Vec<u32>) -> Result<Self, UniversalError> {
        let mut seen = vec![false; table.len()];
        for &x in &table {
            match seen.get_mut(x as usize) {
                Some(s) if !*s => *s = true,
                _ => return Err(UniversalError::NotAPermutation(table)),
            }
        }
        Ok(Perm(table))
    }

    /// `x ↦ x + shift mod n`
    pub fn rotation(n: u32, shift: u32) -> Self {
        Perm((0..n).map(|x| (x + shift) % n).collect())
    }

    /// The transposition of `a` and `b`.
    pub fn swap(n: u32, a: u32, b: u32) -> Self {
        let mut t: Vec<u32> = (0..n).collect();
        t.swap(a as usize, b as usize);
        Perm(t)
    }

    pub fn degree(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn table(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn after(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    pub fn fixes(&self, x: u32) -> bool {
        self.apply(x) == x
    }

    /// The componentwise action on `X × Y`, indexed `x·|Y| + y`.
    pub fn product(&self, other: &Perm) -> Perm {
        let m2 = other.degree();
        let mut t = Vec::with_capacity((self.degree() * m2) as usize);
        for x in 0..self.degree() {
            for y in 0..m2 {
                t.push(self.apply(x) * m2 + other.apply(y));
            }
        }
        Perm(t)
    }

    /// Inverse of [`Perm::product`]; `None` unless `self` acts componentwise on
    /// an `m1 × m2` grid.
    pub fn split(&self, m1: u32, m2: u32) -> Option<(Perm, Perm)> {
        if m1 * m2 != self.degree() {
            return None;
        }
        let first: Vec<u32> = (0..m1).map(|x| self.apply(x * m2) / m2).collect();
        let second: Vec<u32> = (0..m2).map(|y| self.apply(y) % m2).collect();
        let (a, b) = (Perm::from_table(first).ok()?, Perm::from_table(second).ok()?);
        (a.product(&b) == *self).then_some((a, b))
    }
}
