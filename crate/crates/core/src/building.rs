//! The chamber system of the building: adjacency, panels, residues, balls,
//! and legal colourings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{self, ChamberWord, CoxeterError, Diagram, Gen, Thickness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildingError {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error("chamber {0} does not belong to a building of thickness {1}")]
    ForeignChamber(ChamberWord, Thickness),
    #[error("residue type {0:?} is not spherical")]
    NotSpherical(Vec<Gen>),
    #[error("no k-colouring rule attached")]
    MissingKRule,
    #[error("k-colouring alphabet {0}×{1} does not have q_k = {2} colours")]
    KAlphabetMismatch(u32, u32, u32),
}

/// A semiregular right-angled building of type `⟨i,j,k⟩` with prescribed
/// thickness. Colour alphabets are `X_g = {0, …, q_g − 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BuildingSpec {
    thickness: Thickness,
}

impl BuildingSpec {
    pub fn new(thickness: Thickness) -> Self {
        BuildingSpec { thickness }
    }

    pub fn from_triple(qi: u32, qj: u32, qk: u32) -> Result<Self, BuildingError> {
        Ok(BuildingSpec::new(Thickness::new(qi, qj, qk)?))
    }

    pub fn diagram(&self) -> Diagram {
        Diagram::standard()
    }

    pub fn thickness(&self) -> &Thickness {
        &self.thickness
    }

    pub fn q(&self, g: Gen) -> u32 {
        self.thickness.q(g)
    }

    /// Size of the colour alphabet `X_g`.
    pub fn alphabet_size(&self, g: Gen) -> u32 {
        self.q(g)
    }

    pub fn contains(&self, c: &ChamberWord) -> bool {
        c.fits(&self.thickness)
    }

    fn check(&self, c: &ChamberWord) -> Result<(), BuildingError> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(BuildingError::ForeignChamber(c.clone(), self.thickness))
        }
    }

    pub fn normalize<I>(&self, raw: I) -> Result<ChamberWord, BuildingError>
    where
        I: IntoIterator<Item = (Gen, u32)>,
    {
        Ok(coxeter::normalize(raw, &self.thickness)?)
    }

    pub fn multiply(&self, a: &ChamberWord, b: &ChamberWord) -> ChamberWord {
        coxeter::multiply_unchecked(a, b, &self.thickness)
    }

    pub fn invert(&self, a: &ChamberWord) -> ChamberWord {
        coxeter::invert(a, &self.thickness)
    }

    /// `c · g^colour`.
    pub fn step(&self, c: &ChamberWord, g: Gen, colour: u32) -> ChamberWord {
        coxeter::times_syllable(c, g, colour, &self.thickness)
    }

    pub fn syllable_sum(&self, c: &ChamberWord, g: Gen) -> u32 {
        coxeter::syllable_sum(c, g, &self.thickness)
    }

    /// `g`-adjacency, reflexive: `c⁻¹d` is trivial or a single `g`-syllable.
    pub fn adjacent(&self, c: &ChamberWord, d: &ChamberWord, g: Gen) -> Result<bool, BuildingError> {
        self.check(c)?;
        self.check(d)?;
        let diff = self.multiply(&self.invert(c), d);
        Ok(diff.is_empty() || (diff.len() == 1 && diff.syllables()[0].gen == g))
    }

    /// The `g`-panel `{c·g^a}` in canonical (shortlex) order.
    pub fn panel(&self, c: &ChamberWord, g: Gen) -> Vec<ChamberWord> {
        let mut out: Vec<_> = (0..self.q(g)).map(|a| self.step(c, g, a)).collect();
        out.sort();
        out
    }

    /// Shortest representative of the `g`-panel of `c`.
    pub fn panel_rep(&self, c: &ChamberWord, g: Gen) -> ChamberWord {
        c.strip_trailing(&[g])
    }

    /// The residue `c·⟨J⟩` for a spherical type `J`, fully enumerated.
    pub fn residue(&self, c: &ChamberWord, gens: &[Gen]) -> Result<Vec<ChamberWord>, BuildingError> {
        let mut gens: Vec<Gen> = gens.to_vec();
        gens.sort();
        gens.dedup();
        if !self.diagram().is_spherical(&gens) {
            return Err(BuildingError::NotSpherical(gens));
        }
        let mut out = vec![c.clone()];
        for &g in &gens {
            out = out
                .iter()
                .flat_map(|d| (0..self.q(g)).map(move |a| (d, a)))
                .map(|(d, a)| self.step(d, g, a))
                .collect();
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// All chambers at gallery distance at most `r` from the base chamber,
    /// in shortlex order. Gallery distance is the normal-form length.
    pub fn ball(&self, r: usize) -> Vec<ChamberWord> {
        let mut layer = vec![ChamberWord::base()];
        let mut out = layer.clone();
        for _ in 0..r {
            let mut next = Vec::new();
            for c in &layer {
                let last = c.last_gen();
                for g in Gen::ALL {
                    let allowed = match last {
                        None => true,
                        Some(l) => l != g && !(l == Gen::J && g == Gen::I),
                    };
                    if !allowed {
                        continue;
                    }
                    for a in 1..self.q(g) {
                        next.push(self.step(c, g, a));
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out.sort();
        out
    }
}

/// The `k` component of a legal colouring. Colours of `X_k` are pairs in a
/// product alphabet `m1 × m2` with `m1·m2 = q_k`; their index is `α·m2 + β`.
pub trait KColouring: Send + Sync + fmt::Debug {
    fn factors(&self) -> (u32, u32);
    fn k_colour(&self, c: &ChamberWord) -> (u32, u32);
}

/// `λ_k` given by the syllable sum of `k`, viewed in the alphabet `q_k × 1`.
#[derive(Debug, Clone, Copy)]
pub struct SyllableSumK {
    spec: BuildingSpec,
}

impl SyllableSumK {
    pub fn new(spec: BuildingSpec) -> Self {
        SyllableSumK { spec }
    }
}

impl KColouring for SyllableSumK {
    fn factors(&self) -> (u32, u32) {
        (self.spec.q(Gen::K), 1)
    }

    fn k_colour(&self, c: &ChamberWord) -> (u32, u32) {
        (self.spec.syllable_sum(c, Gen::K), 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ColourTuple {
    pub i: u32,
    pub j: u32,
    pub k: (u32, u32),
}

/// A colouring `λ = (λ_i, λ_j, λ_k)`; `λ_i` and `λ_j` are syllable sums,
/// `λ_k` is pluggable.
#[derive(Debug, Clone)]
pub struct Colouring {
    spec: BuildingSpec,
    k_rule: Option<Arc<dyn KColouring>>,
}

impl Colouring {
    pub fn new(spec: BuildingSpec) -> Self {
        Colouring { spec, k_rule: None }
    }

    pub fn with_k_rule(spec: BuildingSpec, rule: Arc<dyn KColouring>) -> Result<Self, BuildingError> {
        let (m1, m2) = rule.factors();
        if m1 * m2 != spec.q(Gen::K) {
            return Err(BuildingError::KAlphabetMismatch(m1, m2, spec.q(Gen::K)));
        }
        Ok(Colouring { spec, k_rule: Some(rule) })
    }

    pub fn spec(&self) -> &BuildingSpec {
        &self.spec
    }

    pub fn k_factors(&self) -> Result<(u32, u32), BuildingError> {
        self.k_rule.as_ref().map(|r| r.factors()).ok_or(BuildingError::MissingKRule)
    }

    pub fn colour(&self, c: &ChamberWord) -> Result<ColourTuple, BuildingError> {
        let rule = self.k_rule.as_ref().ok_or(BuildingError::MissingKRule)?;
        Ok(ColourTuple {
            i: self.spec.syllable_sum(c, Gen::I),
            j: self.spec.syllable_sum(c, Gen::J),
            k: rule.k_colour(c),
        })
    }

    /// `λ_g(c)` as an index into `X_g`.
    pub fn colour_index(&self, c: &ChamberWord, g: Gen) -> Result<u32, BuildingError> {
        match g {
            Gen::I | Gen::J => Ok(self.spec.syllable_sum(c, g)),
            Gen::K => {
                let rule = self.k_rule.as_ref().ok_or(BuildingError::MissingKRule)?;
                let (_, m2) = rule.factors();
                let (a, b) = rule.k_colour(c);
                Ok(a * m2 + b)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LegalityFault {
    /// The panel-type component does not hit every colour exactly once.
    NotBijective,
    /// Another component varies along the panel.
    NotConstant,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LegalityViolation {
    pub panel_type: Gen,
    /// Shortest chamber of the offending panel.
    pub panel: ChamberWord,
    pub component: Gen,
    pub fault: LegalityFault,
}

impl fmt::Display for LegalityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-panel of {}: λ_{} {:?}",
            self.panel_type, self.panel, self.component, self.fault
        )
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LegalityReport {
    pub panels_checked: usize,
    pub violations: Vec<LegalityViolation>,
}

impl LegalityReport {
    pub fn is_legal(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks legality on every panel meeting `chambers`. Panels are enumerated
/// in full even where they leave the set.
pub fn verify_legal_colouring(colouring: &Colouring, chambers: &[ChamberWord]) -> Result<LegalityReport, BuildingError> {
    let spec = colouring.spec();
    let mut panels: BTreeSet<(Gen, ChamberWord)> = BTreeSet::new();
    for c in chambers {
        for g in Gen::ALL {
            panels.insert((g, spec.panel_rep(c, g)));
        }
    }
    let mut report = LegalityReport::default();
    for (g, rep) in panels {
        let members = spec.panel(&rep, g);
        let mut values: BTreeMap<Gen, Vec<u32>> = BTreeMap::new();
        for c in &members {
            for h in Gen::ALL {
                values.entry(h).or_default().push(colouring.colour_index(c, h)?);
            }
        }
        for (h, vals) in values {
            let fault = if h == g {
                let distinct: BTreeSet<u32> = vals.iter().copied().collect();
                let onto = distinct.len() == vals.len()
                    && vals.len() == spec.alphabet_size(g) as usize
                    && distinct.iter().all(|&v| v < spec.alphabet_size(g));
                (!onto).then_some(LegalityFault::NotBijective)
            } else {
                vals.windows(2).any(|w| w[0] != w[1]).then_some(LegalityFault::NotConstant)
            };
            if let Some(fault) = fault {
                report.violations.push(LegalityViolation {
                    panel_type: g,
                    panel: rep.clone(),
                    component: h,
                    fault,
                });
            }
        }
        report.panels_checked += 1;
    }
    Ok(report)
}
