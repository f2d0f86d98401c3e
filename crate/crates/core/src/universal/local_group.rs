use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::perm::Perm;

/// Groups larger than this are rejected rather than materialized.
pub const DEFAULT_ELEMENT_LIMIT: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalGroupError {
    #[error("generator {index} acts on {got} points, expected {expected}")]
    GeneratorDegree { index: usize, got: u32, expected: u32 },
    #[error("group generated exceeds {limit} elements")]
    TooLarge { limit: usize },
    #[error("colour {0} is outside the domain of size {1}")]
    OutOfDomain(u32, u32),
    #[error("group {0} is not transitive")]
    NotTransitive(String),
    #[error("a local group needs at least 2 points, got {0}")]
    Degenerate(u32),
}

/// How a local group is described in configuration files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalGroupSpec {
    /// The full symmetric group.
    Sym,
    /// The regular cyclic group `⟨x ↦ x+1⟩`.
    Cyclic,
    /// The closure of explicit image tables.
    Generators(Vec<Vec<u32>>),
}

impl LocalGroupSpec {
    pub fn build(&self, degree: u32) -> Result<LocalGroup, LocalGroupError> {
        match self {
            LocalGroupSpec::Sym => LocalGroup::sym(degree),
            LocalGroupSpec::Cyclic => LocalGroup::cyclic(degree),
            LocalGroupSpec::Generators(tables) => {
                let mut gens = Vec::with_capacity(tables.len());
                for (index, t) in tables.iter().enumerate() {
                    if t.len() as u32 != degree {
                        return Err(LocalGroupError::GeneratorDegree { index, got: t.len() as u32, expected: degree });
                    }
                    let p = Perm::from_table(t.clone())
                        .map_err(|_| LocalGroupError::GeneratorDegree { index, got: t.len() as u32, expected: degree })?;
                    gens.push(p);
                }
                LocalGroup::generated(format!("⟨{} gens⟩", gens.len()), degree, gens, DEFAULT_ELEMENT_LIMIT)
            }
        }
    }
}

/// A finite permutation group on a colour alphabet, materialized.
#[derive(Clone)]
pub struct LocalGroup {
    name: String,
    degree: u32,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    members: HashSet<Perm>,
    factors: Option<Box<(LocalGroup, LocalGroup)>>,
    /// `t(x)`, the transporter from 0 to `x`, when transitive
    sections: Option<Vec<Perm>>,
    sections_inv: Option<Vec<Perm>>,
}

impl fmt::Debug for LocalGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalGroup")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("order", &self.elements.len())
            .field("transitive", &self.is_transitive())
            .finish()
    }
}

impl LocalGroup {
    pub fn generated(name: impl Into<String>, degree: u32, generators: Vec<Perm>, limit: usize) -> Result<Self, LocalGroupError> {
        if degree < 2 {
            return Err(LocalGroupError::Degenerate(degree));
        }
        for (index, g) in generators.iter().enumerate() {
            if g.degree() != degree {
                return Err(LocalGroupError::GeneratorDegree { index, got: g.degree(), expected: degree });
            }
        }
        let id = Perm::identity(degree);
        let mut members = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(e) = queue.pop_front() {
            for s in &generators {
                let next = s.after(&e);
                if members.insert(next.clone()) {
                    if members.len() > limit {
                        return Err(LocalGroupError::TooLarge { limit });
                    }
                    queue.push_back(next);
                }
            }
        }
        let mut elements: Vec<Perm> = members.iter().cloned().collect();
        elements.sort();
        let mut group = LocalGroup {
            name: name.into(),
            degree,
            generators,
            elements,
            members,
            factors: None,
            sections: None,
            sections_inv: None,
        };
        let sections: Option<Vec<Perm>> = (0..degree).map(|x| group.bfs_transporter(0, x)).collect();
        group.sections_inv = sections.as_ref().map(|s| s.iter().map(Perm::inverse).collect());
        group.sections = sections;
        Ok(group)
    }

    /// `Sym(n)`, generated by the `n`-cycle and the transposition `(0 1)`.
    pub fn sym(n: u32) -> Result<Self, LocalGroupError> {
        Self::generated(format!("Sym({n})"), n, vec![Perm::rotation(n, 1), Perm::swap(n, 0, 1)], DEFAULT_ELEMENT_LIMIT)
    }

    pub fn cyclic(n: u32) -> Result<Self, LocalGroupError> {
        Self::generated(format!("C{n}"), n, vec![Perm::rotation(n, 1)], DEFAULT_ELEMENT_LIMIT)
    }

    /// `F₁ × F₂` acting componentwise on `X₁ × X₂`, generated by the
    /// `(g, id)` followed by the `(id, h)`.
    pub fn product(a: &LocalGroup, b: &LocalGroup) -> Result<Self, LocalGroupError> {
        let ida = Perm::identity(a.degree);
        let idb = Perm::identity(b.degree);
        let gens = a
            .generators
            .iter()
            .map(|g| g.product(&idb))
            .chain(b.generators.iter().map(|h| ida.product(h)))
            .collect();
        let limit = DEFAULT_ELEMENT_LIMIT.max(a.order() * b.order());
        let mut group = Self::generated(format!("{}×{}", a.name, b.name), a.degree * b.degree, gens, limit)?;
        group.factors = Some(Box::new((a.clone(), b.clone())));
        Ok(group)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// All elements, sorted by image table.
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn factors(&self) -> Option<(&LocalGroup, &LocalGroup)> {
        self.factors.as_deref().map(|(a, b)| (a, b))
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.members.contains(p)
    }

    pub fn is_transitive(&self) -> bool {
        self.sections.is_some()
    }

    /// For a product group, the two components of `p` when `p` is a member.
    pub fn split(&self, p: &Perm) -> Option<(Perm, Perm)> {
        let (a, b) = self.factors()?;
        let (x, y) = p.split(a.degree, b.degree)?;
        (a.contains(&x) && b.contains(&y)).then_some((x, y))
    }

    fn check_point(&self, x: u32) -> Result<(), LocalGroupError> {
        if x >= self.degree {
            return Err(LocalGroupError::OutOfDomain(x, self.degree));
        }
        Ok(())
    }

    /// Breadth-first search of the Schreier graph from `x`, generators in
    /// listed order; the product of the first word reaching `y`.
    fn bfs_transporter(&self, x: u32, y: u32) -> Option<Perm> {
        let mut word: HashMap<u32, Perm> = HashMap::from([(x, Perm::identity(self.degree))]);
        let mut queue = VecDeque::from([x]);
        while let Some(p) = queue.pop_front() {
            if p == y {
                return word.remove(&p);
            }
            for s in &self.generators {
                let q = s.apply(p);
                if !word.contains_key(&q) {
                    let w = s.after(&word[&p]);
                    word.insert(q, w);
                    queue.push_back(q);
                }
            }
        }
        None
    }

    /// A deterministic element mapping `x` to `y`.
    pub fn transporter(&self, x: u32, y: u32) -> Result<Perm, LocalGroupError> {
        self.check_point(x)?;
        self.check_point(y)?;
        self.bfs_transporter(x, y).ok_or_else(|| LocalGroupError::NotTransitive(self.name.clone()))
    }

    /// `τ(x, y) = t(y) ∘ t(x)⁻¹` where `t(z)` is the transporter from 0 to
    /// `z`. Unlike the raw transporter these satisfy `τ(y,z)∘τ(x,y) = τ(x,z)`.
    pub fn tau(&self, x: u32, y: u32) -> Result<Perm, LocalGroupError> {
        self.check_point(x)?;
        self.check_point(y)?;
        let (t, ti) = self.sections()?;
        Ok(t[y as usize].after(&ti[x as usize]))
    }

    /// `τ(x, y)(z)` without building the permutation.
    #[inline]
    pub(crate) fn tau_apply(&self, x: u32, y: u32, z: u32) -> u32 {
        let (t, ti) = (self.sections.as_ref().unwrap(), self.sections_inv.as_ref().unwrap());
        t[y as usize].apply(ti[x as usize].apply(z))
    }

    /// `τ(x, y)⁻¹(z)`.
    #[inline]
    pub(crate) fn tau_inv_apply(&self, x: u32, y: u32, z: u32) -> u32 {
        let (t, ti) = (self.sections.as_ref().unwrap(), self.sections_inv.as_ref().unwrap());
        t[x as usize].apply(ti[y as usize].apply(z))
    }

    fn sections(&self) -> Result<(&[Perm], &[Perm]), LocalGroupError> {
        match (&self.sections, &self.sections_inv) {
            (Some(t), Some(ti)) => Ok((t, ti)),
            _ => Err(LocalGroupError::NotTransitive(self.name.clone())),
        }
    }

    /// Every element fixing `x`.
    pub fn stabilizer(&self, x: u32) -> Vec<Perm> {
        self.elements.iter().filter(|p| p.fixes(x)).cloned().collect()
    }

    /// The generators corrected into the stabilizer of `x`:
    /// `τ(x, s(x))⁻¹ ∘ s`, deduplicated, identity dropped, in generator order.
    pub fn stabilizer_generators(&self, x: u32) -> Result<Vec<Perm>, LocalGroupError> {
        let mut out: Vec<Perm> = Vec::new();
        for s in &self.generators {
            let d = self.tau(x, s.apply(x))?.inverse().after(s);
            if !d.is_identity() && !out.contains(&d) {
                out.push(d);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(LocalGroup::sym(4).unwrap().order(), 24);
        assert_eq!(LocalGroup::cyclic(9).unwrap().order(), 9);
        let p = LocalGroup::product(&LocalGroup::sym(3).unwrap(), &LocalGroup::sym(3).unwrap()).unwrap();
        assert_eq!((p.degree(), p.order()), (9, 36));
        assert!(matches!(
            LocalGroup::generated("big", 9, vec![Perm::rotation(9, 1), Perm::swap(9, 0, 1)], 1000),
            Err(LocalGroupError::TooLarge { .. })
        ));
    }

    #[test]
    fn transporters() {
        let s = LocalGroup::sym(4).unwrap();
        assert_eq!(s.transporter(1, 3).unwrap().apply(1), 3);
        assert!(s.transporter(2, 2).unwrap().is_identity());
        let c = LocalGroup::cyclic(9).unwrap();
        assert_eq!(c.transporter(2, 5).unwrap(), Perm::rotation(9, 3));
        assert!(s.transporter(0, 4).is_err());
    }

    #[test]
    fn intransitive_group() {
        let g = LocalGroup::generated("swap", 4, vec![Perm::swap(4, 0, 1)], 10).unwrap();
        assert!(!g.is_transitive());
        assert!(matches!(g.transporter(0, 2), Err(LocalGroupError::NotTransitive(_))));
        assert!(g.tau(0, 1).is_err());
    }

    #[test]
    fn coherent_tau() {
        let p = LocalGroup::product(&LocalGroup::sym(4).unwrap(), &LocalGroup::cyclic(3).unwrap()).unwrap();
        for x in 0..12 {
            for y in 0..12 {
                let t = p.tau(x, y).unwrap();
                assert_eq!(t.apply(x), y);
                assert!(p.contains(&t));
                for z in 0..12 {
                    assert_eq!(p.tau(y, z).unwrap().after(&t), p.tau(x, z).unwrap());
                }
            }
        }
    }

    #[test]
    fn stabilizer_gens_fix_point() {
        let s = LocalGroup::sym(4).unwrap();
        let gens = s.stabilizer_generators(0).unwrap();
        assert!(!gens.is_empty());
        assert!(gens.iter().all(|g| g.fixes(0) && s.contains(g)));
        assert!(LocalGroup::cyclic(5).unwrap().stabilizer_generators(0).unwrap().is_empty());
    }

    #[test]
    fn spec_json() {
        let s: LocalGroupSpec = serde_json::from_str("\"sym\"").unwrap();
        assert_eq!(s, LocalGroupSpec::Sym);
        let g: LocalGroupSpec = serde_json::from_str(r#"{"generators": [[1,2,0]]}"#).unwrap();
        assert_eq!(g.build(3).unwrap().order(), 3);
        assert!(g.build(4).is_err());
    }
}
