//! The chamber bijection `ψ: Ch(Δ) → Ch(Δ̃)` between two buildings with
//! complementary thicknesses, and the `k`-colourings it induces.
//!
//! `ψ` works block by block on the free-product form of a chamber: an
//! `{i,j}`-block `x` of `Δ` becomes the `k̃`-block `a(x)` and a `k`-block `y`
//! becomes the `{ĩ,j̃}`-block `b(y)`. This swaps `k`-panels with
//! `{i,j}`-residues and therefore the two sides of the tree-wall trees.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::building::{verify_legal_colouring, BuildingError, BuildingSpec, Colouring, KColouring, LegalityViolation};
use crate::coxeter::{Block, ChamberWord, Gen};
use crate::treewall::{tw_vertices, TreeWallVertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorrespondenceError {
    #[error("thickness equation violated: q_i·q_j = {lhs} but q̃_k = {rhs}")]
    TildeKEquation { lhs: u32, rhs: u32 },
    #[error("thickness equation violated: q̃_i·q̃_j = {lhs} but q_k = {rhs}")]
    KEquation { lhs: u32, rhs: u32 },
    #[error("table `{table}` has {got} entries, expected {expected}")]
    TableSize { table: &'static str, got: usize, expected: usize },
    #[error("table `{table}` is not a bijection onto the non-identity colours")]
    NotBijective { table: &'static str },
    #[error("table `{table}` entry {entry:?} is out of range")]
    EntryOutOfRange { table: &'static str, entry: Vec<u32> },
    #[error("chamber {0} does not belong to the source building")]
    WrongBuilding(ChamberWord),
    #[error(transparent)]
    Building(#[from] BuildingError),
}

/// Which way `ψ` is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// `Δ → Δ̃`
    Forward,
    /// `Δ̃ → Δ`
    Backward,
}

/// A block of the alternating form: `A` blocks live in `X_i × X_j`, `B` blocks
/// in `X_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AltBlock {
    A(u32, u32),
    B(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AlternatingForm {
    pub blocks: Vec<AltBlock>,
}

impl fmt::Display for AlternatingForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (n, b) in self.blocks.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            match b {
                AltBlock::A(x, y) => write!(f, "A({x},{y})")?,
                AltBlock::B(z) => write!(f, "B({z})")?,
            }
        }
        f.write_str("]")
    }
}

pub fn alternating_form(c: &ChamberWord) -> AlternatingForm {
    AlternatingForm {
        blocks: c
            .blocks()
            .into_iter()
            .map(|b| match b {
                Block::Ij(x, y) => AltBlock::A(x, y),
                Block::K(z) => AltBlock::B(z),
            })
            .collect(),
    }
}

impl AlternatingForm {
    pub fn to_chamber(&self) -> Option<ChamberWord> {
        let blocks: Vec<Block> = self
            .blocks
            .iter()
            .map(|b| match *b {
                AltBlock::A(x, y) => Block::Ij(x, y),
                AltBlock::B(z) => Block::K(z),
            })
            .collect();
        ChamberWord::from_blocks(&blocks)
    }
}

/// The two buildings and the block bijections defining `ψ`.
///
/// `a[x]` for `x = α·q_j + β ≠ 0` is the `k̃`-colour of the `{i,j}`-block
/// `(α, β)`; `b[y]` for `y ≠ 0` is the index `α̃·q̃_j + β̃` of the
/// `{ĩ,j̃}`-block assigned to the `k`-block `y`. Index 0 maps to 0 in both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrespondenceConfig {
    delta: BuildingSpec,
    tilde: BuildingSpec,
    a: Vec<u32>,
    b: Vec<u32>,
    a_inv: Vec<u32>,
    b_inv: Vec<u32>,
}

fn invert_table(table: &[u32], name: &'static str) -> Result<Vec<u32>, CorrespondenceError> {
    let mut inv = vec![u32::MAX; table.len()];
    for (x, &y) in table.iter().enumerate() {
        let slot = inv
            .get_mut(y as usize)
            .ok_or_else(|| CorrespondenceError::EntryOutOfRange { table: name, entry: vec![x as u32, y] })?;
        if *slot != u32::MAX {
            return Err(CorrespondenceError::NotBijective { table: name });
        }
        *slot = x as u32;
    }
    if table.first() != Some(&0) {
        return Err(CorrespondenceError::NotBijective { table: name });
    }
    Ok(inv)
}

impl CorrespondenceConfig {
    /// Validates the thickness equations and uses the lexicographic block
    /// bijections.
    pub fn new(delta: BuildingSpec, tilde: BuildingSpec) -> Result<Self, CorrespondenceError> {
        Self::check_equations(&delta, &tilde)?;
        let a: Vec<u32> = (0..delta.q(Gen::I) * delta.q(Gen::J)).collect();
        let b: Vec<u32> = (0..delta.q(Gen::K)).collect();
        Self::with_tables(delta, tilde, a, b)
    }

    /// Explicit tables, indexed as described on the type. Entry 0 of each
    /// table must be 0.
    pub fn with_tables(delta: BuildingSpec, tilde: BuildingSpec, a: Vec<u32>, b: Vec<u32>) -> Result<Self, CorrespondenceError> {
        Self::check_equations(&delta, &tilde)?;
        let qa = (delta.q(Gen::I) * delta.q(Gen::J)) as usize;
        let qb = delta.q(Gen::K) as usize;
        if a.len() != qa {
            return Err(CorrespondenceError::TableSize { table: "a", got: a.len(), expected: qa });
        }
        if b.len() != qb {
            return Err(CorrespondenceError::TableSize { table: "b", got: b.len(), expected: qb });
        }
        let a_inv = invert_table(&a, "a")?;
        let b_inv = invert_table(&b, "b")?;
        Ok(CorrespondenceConfig { delta, tilde, a, b, a_inv, b_inv })
    }

    /// Builds the tables from explicit pair lists: `a` maps `(α, β) ↦ k̃`-colour,
    /// `b` maps `k`-colour `↦ (α̃, β̃)`. Identity entries may be omitted.
    pub fn from_pairs(
        delta: BuildingSpec,
        tilde: BuildingSpec,
        a_pairs: &[((u32, u32), u32)],
        b_pairs: &[(u32, (u32, u32))],
    ) -> Result<Self, CorrespondenceError> {
        Self::check_equations(&delta, &tilde)?;
        let (qi, qj) = (delta.q(Gen::I), delta.q(Gen::J));
        let (ti, tj) = (tilde.q(Gen::I), tilde.q(Gen::J));
        let mut a = vec![u32::MAX; (qi * qj) as usize];
        a[0] = 0;
        for &((x, y), z) in a_pairs {
            if x >= qi || y >= qj || z >= tilde.q(Gen::K) {
                return Err(CorrespondenceError::EntryOutOfRange { table: "a", entry: vec![x, y, z] });
            }
            a[(x * qj + y) as usize] = z;
        }
        let mut b = vec![u32::MAX; delta.q(Gen::K) as usize];
        b[0] = 0;
        for &(z, (x, y)) in b_pairs {
            if z >= delta.q(Gen::K) || x >= ti || y >= tj {
                return Err(CorrespondenceError::EntryOutOfRange { table: "b", entry: vec![z, x, y] });
            }
            b[z as usize] = x * tj + y;
        }
        if a.contains(&u32::MAX) {
            return Err(CorrespondenceError::NotBijective { table: "a" });
        }
        if b.contains(&u32::MAX) {
            return Err(CorrespondenceError::NotBijective { table: "b" });
        }
        Self::with_tables(delta, tilde, a, b)
    }

    fn check_equations(delta: &BuildingSpec, tilde: &BuildingSpec) -> Result<(), CorrespondenceError> {
        let lhs = delta.q(Gen::I) * delta.q(Gen::J);
        if lhs != tilde.q(Gen::K) {
            return Err(CorrespondenceError::TildeKEquation { lhs, rhs: tilde.q(Gen::K) });
        }
        let lhs = tilde.q(Gen::I) * tilde.q(Gen::J);
        if lhs != delta.q(Gen::K) {
            return Err(CorrespondenceError::KEquation { lhs, rhs: delta.q(Gen::K) });
        }
        Ok(())
    }

    pub fn delta(&self) -> &BuildingSpec {
        &self.delta
    }

    pub fn tilde(&self) -> &BuildingSpec {
        &self.tilde
    }

    pub fn source(&self, direction: Direction) -> &BuildingSpec {
        match direction {
            Direction::Forward => &self.delta,
            Direction::Backward => &self.tilde,
        }
    }

    /// `a((α, β))`.
    pub fn a(&self, alpha: u32, beta: u32) -> u32 {
        self.a[(alpha * self.delta.q(Gen::J) + beta) as usize]
    }

    /// `b(y)` as a pair in `X̃_i × X̃_j`.
    pub fn b(&self, y: u32) -> (u32, u32) {
        let tj = self.tilde.q(Gen::J);
        let idx = self.b[y as usize];
        (idx / tj, idx % tj)
    }

    pub fn a_table(&self) -> &[u32] {
        &self.a
    }

    pub fn b_table(&self) -> &[u32] {
        &self.b
    }

    /// Applies `ψ` (or `ψ⁻¹`). Rejects chambers outside the source building.
    pub fn psi(&self, c: &ChamberWord, direction: Direction) -> Result<ChamberWord, CorrespondenceError> {
        if !self.source(direction).contains(c) {
            return Err(CorrespondenceError::WrongBuilding(c.clone()));
        }
        Ok(self.psi_unchecked(c, direction))
    }

    pub(crate) fn psi_unchecked(&self, c: &ChamberWord, direction: Direction) -> ChamberWord {
        let (src, dst) = match direction {
            Direction::Forward => (&self.delta, &self.tilde),
            Direction::Backward => (&self.tilde, &self.delta),
        };
        let src_j = src.q(Gen::J);
        let dst_j = dst.q(Gen::J);
        let blocks: Vec<Block> = c
            .blocks()
            .into_iter()
            .map(|b| match (b, direction) {
                (Block::Ij(x, y), Direction::Forward) => Block::K(self.a[(x * src_j + y) as usize]),
                (Block::K(z), Direction::Forward) => {
                    let idx = self.b[z as usize];
                    Block::Ij(idx / dst_j, idx % dst_j)
                }
                (Block::Ij(x, y), Direction::Backward) => Block::K(self.b_inv[(x * src_j + y) as usize]),
                (Block::K(z), Direction::Backward) => {
                    let idx = self.a_inv[z as usize];
                    Block::Ij(idx / dst_j, idx % dst_j)
                }
            })
            .collect();
        ChamberWord::from_blocks(&blocks).expect("block substitution preserves alternation")
    }

    /// The `K_PANEL`/`IJ_RESIDUE` vertex of the image building that `ψ` maps
    /// `v` onto.
    pub fn psi_vertex(&self, v: &TreeWallVertex, direction: Direction) -> TreeWallVertex {
        TreeWallVertex::containing(&self.psi_unchecked(&v.rep, direction), v.side.opposite())
    }
}

/// `λ_k` of `Δ` (forward) or `λ̃_k` of `Δ̃` (backward), read through `ψ`:
/// `λ_k(c) = (λ̃_i(ψ(c)), λ̃_j(ψ(c)))`.
#[derive(Debug, Clone)]
pub struct DerivedK {
    config: Arc<CorrespondenceConfig>,
    direction: Direction,
}

impl DerivedK {
    pub fn new(config: Arc<CorrespondenceConfig>, direction: Direction) -> Self {
        DerivedK { config, direction }
    }

    fn target(&self) -> &BuildingSpec {
        match self.direction {
            Direction::Forward => &self.config.tilde,
            Direction::Backward => &self.config.delta,
        }
    }
}

impl KColouring for DerivedK {
    fn factors(&self) -> (u32, u32) {
        let t = self.target();
        (t.q(Gen::I), t.q(Gen::J))
    }

    fn k_colour(&self, c: &ChamberWord) -> (u32, u32) {
        let image = self.config.psi_unchecked(c, self.direction);
        let t = self.target();
        (t.syllable_sum(&image, Gen::I), t.syllable_sum(&image, Gen::J))
    }
}

/// `λ_k(c)` (`Direction::Forward`, `c` in `Δ`) or `λ̃_k(c)` (`Backward`).
pub fn derived_colouring(
    config: &Arc<CorrespondenceConfig>,
    c: &ChamberWord,
    direction: Direction,
) -> Result<(u32, u32), CorrespondenceError> {
    if !config.source(direction).contains(c) {
        return Err(CorrespondenceError::WrongBuilding(c.clone()));
    }
    Ok(DerivedK::new(config.clone(), direction).k_colour(c))
}

/// The legal colourings `λ` of `Δ` and `λ̃` of `Δ̃`.
pub fn colourings(config: &Arc<CorrespondenceConfig>) -> (Colouring, Colouring) {
    let delta = Colouring::with_k_rule(*config.delta(), Arc::new(DerivedK::new(config.clone(), Direction::Forward)))
        .expect("thickness equations give matching alphabets");
    let tilde = Colouring::with_k_rule(*config.tilde(), Arc::new(DerivedK::new(config.clone(), Direction::Backward)))
        .expect("thickness equations give matching alphabets");
    (delta, tilde)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CorrespondenceReport {
    pub radius: usize,
    pub chambers: usize,
    pub pairs_checked: usize,
    /// `c ∼_k d ⇔ ψ(c) ∈ Res_{i,j}(ψ(d))`
    pub k_to_residue: Vec<String>,
    /// `c ∈ Res_{i,j}(d) ⇔ ψ(c) ∼_k ψ(d)`
    pub residue_to_k: Vec<String>,
    pub injectivity: Vec<String>,
    pub round_trip: Vec<String>,
    pub tree_wall: Vec<String>,
    pub legality_delta: Vec<LegalityViolation>,
    pub legality_tilde: Vec<LegalityViolation>,
}

impl CorrespondenceReport {
    pub fn violation_count(&self) -> usize {
        self.k_to_residue.len()
            + self.residue_to_k.len()
            + self.injectivity.len()
            + self.round_trip.len()
            + self.tree_wall.len()
            + self.legality_delta.len()
            + self.legality_tilde.len()
    }

    pub fn is_ok(&self) -> bool {
        self.violation_count() == 0
    }
}

fn intern<T: std::hash::Hash + Eq>(ids: &mut HashMap<T, u32>, key: T) -> u32 {
    let next = ids.len() as u32;
    *ids.entry(key).or_insert(next)
}

/// Exhaustive check of the two adjacency equivalences over all pairs of
/// chambers in `ball(r)` of `Δ`, plus injectivity, round trips, side swapping
/// of tree-wall vertices, and legality of both derived colourings.
pub fn verify_correspondence(config: &Arc<CorrespondenceConfig>, r: usize) -> Result<CorrespondenceReport, CorrespondenceError> {
    let delta = config.delta();
    let tilde = config.tilde();
    let ball = delta.ball(r);
    let mut report = CorrespondenceReport { radius: r, chambers: ball.len(), ..Default::default() };

    let images: Vec<ChamberWord> = ball.iter().map(|c| config.psi_unchecked(c, Direction::Forward)).collect();
    let mut seen = HashMap::new();
    for (c, img) in ball.iter().zip(&images) {
        if let Some(prev) = seen.insert(img.clone(), c.clone()) {
            report.injectivity.push(format!("ψ({prev}) = ψ({c}) = {img}"));
        }
        let back = config.psi_unchecked(img, Direction::Backward);
        if &back != c {
            report.round_trip.push(format!("ψ⁻¹(ψ({c})) = {back}"));
        }
        let (k, ij) = tw_vertices(c);
        let (tk, tij) = tw_vertices(img);
        if config.psi_vertex(&k, Direction::Forward) != tij || config.psi_vertex(&ij, Direction::Forward) != tk {
            report.tree_wall.push(format!("tree-wall vertices of {c} not swapped by ψ"));
        }
    }

    // Panel and residue membership by their shortest chambers, interned so
    // the pairwise sweep is a comparison of integers.
    let mut k_ids = HashMap::new();
    let mut ij_ids = HashMap::new();
    let mut tk_ids = HashMap::new();
    let mut tij_ids = HashMap::new();
    let keys: Vec<[u32; 4]> = ball
        .iter()
        .zip(&images)
        .map(|(c, img)| {
            let k = delta.panel(c, Gen::K).into_iter().next().expect("panels are non-empty");
            let ij = delta.residue(c, &[Gen::I, Gen::J])?.into_iter().next().expect("residues are non-empty");
            let tk = tilde.panel(img, Gen::K).into_iter().next().expect("panels are non-empty");
            let tij = tilde.residue(img, &[Gen::I, Gen::J])?.into_iter().next().expect("residues are non-empty");
            Ok([
                intern(&mut k_ids, k),
                intern(&mut ij_ids, ij),
                intern(&mut tk_ids, tk),
                intern(&mut tij_ids, tij),
            ])
        })
        .collect::<Result<_, BuildingError>>()?;

    for (n, kc) in keys.iter().enumerate() {
        for (m, kd) in keys.iter().enumerate() {
            let c_k_d = kc[0] == kd[0];
            let c_res_d = kc[1] == kd[1];
            let pc_k_pd = kc[2] == kd[2];
            let pc_res_pd = kc[3] == kd[3];
            if c_k_d != pc_res_pd {
                report.k_to_residue.push(format!("c = {}, d = {}", ball[n], ball[m]));
            }
            if c_res_d != pc_k_pd {
                report.residue_to_k.push(format!("c = {}, d = {}", ball[n], ball[m]));
            }
        }
    }
    report.pairs_checked = keys.len() * keys.len();

    let (lambda, lambda_tilde) = colourings(config);
    report.legality_delta = verify_legal_colouring(&lambda, &ball)?.violations;
    report.legality_tilde = verify_legal_colouring(&lambda_tilde, &tilde.ball(r))?.violations;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::normalize;

    fn config() -> Arc<CorrespondenceConfig> {
        Arc::new(
            CorrespondenceConfig::new(
                BuildingSpec::from_triple(4, 3, 9).unwrap(),
                BuildingSpec::from_triple(3, 3, 12).unwrap(),
            )
            .unwrap(),
        )
    }

    fn w(raw: &[(Gen, u32)]) -> ChamberWord {
        normalize(raw.iter().copied(), BuildingSpec::from_triple(4, 3, 12).unwrap().thickness()).unwrap()
    }

    #[test]
    fn alternating_examples() {
        let f = alternating_form(&w(&[(Gen::I, 1), (Gen::J, 2), (Gen::K, 3)]));
        assert_eq!(f.blocks, vec![AltBlock::A(1, 2), AltBlock::B(3)]);
        assert!(alternating_form(&w(&[])).blocks.is_empty());
        let f = alternating_form(&w(&[(Gen::K, 2), (Gen::I, 1)]));
        assert_eq!(f.blocks, vec![AltBlock::B(2), AltBlock::A(1, 0)]);
        assert_eq!(f.to_chamber().unwrap(), w(&[(Gen::K, 2), (Gen::I, 1)]));
    }

    #[test]
    fn lexicographic_tables() {
        let cfg = config();
        assert_eq!(cfg.a(1, 0), 3);
        assert_eq!(cfg.b(2), (0, 2));
        assert_eq!(cfg.b(5), (1, 2));
    }

    #[test]
    fn psi_examples() {
        let cfg = config();
        assert_eq!(cfg.psi(&w(&[]), Direction::Forward).unwrap(), w(&[]));
        assert_eq!(
            cfg.psi(&w(&[(Gen::I, 1), (Gen::K, 2)]), Direction::Forward).unwrap(),
            w(&[(Gen::K, 3), (Gen::J, 2)])
        );
        assert_eq!(cfg.psi(&w(&[(Gen::K, 5)]), Direction::Forward).unwrap(), w(&[(Gen::I, 1), (Gen::J, 2)]));
        assert!(matches!(
            cfg.psi(&w(&[(Gen::K, 11)]), Direction::Forward),
            Err(CorrespondenceError::WrongBuilding(_))
        ));
        assert_eq!(cfg.psi(&w(&[(Gen::K, 11)]), Direction::Backward).unwrap(), w(&[(Gen::I, 3), (Gen::J, 2)]));
    }

    #[test]
    fn derived_examples() {
        let cfg = config();
        assert_eq!(derived_colouring(&cfg, &w(&[]), Direction::Forward).unwrap(), (0, 0));
        assert_eq!(derived_colouring(&cfg, &w(&[(Gen::I, 1), (Gen::K, 2)]), Direction::Forward).unwrap(), (0, 2));
        assert_eq!(cfg.psi(&w(&[(Gen::I, 1)]), Direction::Backward).unwrap(), w(&[(Gen::K, 3)]));
        assert_eq!(derived_colouring(&cfg, &w(&[(Gen::I, 1)]), Direction::Backward).unwrap(), (0, 0));
    }

    #[test]
    fn k_adjacent_pair_maps_into_residue() {
        let cfg = config();
        let c = w(&[(Gen::K, 2)]);
        let d = w(&[(Gen::K, 5)]);
        assert!(cfg.delta().adjacent(&c, &d, Gen::K).unwrap());
        let pc = cfg.psi(&c, Direction::Forward).unwrap();
        let pd = cfg.psi(&d, Direction::Forward).unwrap();
        let diff = cfg.tilde().multiply(&cfg.tilde().invert(&pc), &pd);
        assert_eq!(diff, w(&[(Gen::I, 1)]));
    }

    #[test]
    fn validation() {
        let d = BuildingSpec::from_triple(4, 3, 9).unwrap();
        let bad = BuildingSpec::from_triple(3, 3, 11).unwrap();
        assert!(matches!(CorrespondenceConfig::new(d, bad), Err(CorrespondenceError::TildeKEquation { .. })));
        let t = BuildingSpec::from_triple(3, 3, 12).unwrap();
        let mut b: Vec<u32> = (0..9).collect();
        b[2] = 1;
        assert_eq!(
            CorrespondenceConfig::with_tables(d, t, (0..12).collect(), b),
            Err(CorrespondenceError::NotBijective { table: "b" })
        );
    }

    #[test]
    fn small_radius_is_clean() {
        let report = verify_correspondence(&config(), 2).unwrap();
        assert!(report.is_ok(), "{report:?}");
        assert_eq!(report.pairs_checked, report.chambers * report.chambers);
    }
}
