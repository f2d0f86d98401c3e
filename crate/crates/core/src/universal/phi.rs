use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::element::{vertices_within, BuildingTag, Element, UniversalGroup};
use super::local_group::LocalGroup;
use super::UniversalError;
use crate::correspondence::{colourings, CorrespondenceConfig, Direction};
use crate::coxeter::{ChamberWord, Gen};
use crate::treewall::{path_vertices, TreeWallVertex};

/// The configurable local groups: `F_i, F_j` for `Δ` and `F̃_i, F̃_j` for
/// `Δ̃`. The `k` groups are forced: `F_k = F̃_i × F̃_j`, `F̃_k = F_i × F_j`.
#[derive(Debug, Clone)]
pub struct LocalGroups {
    pub delta_i: LocalGroup,
    pub delta_j: LocalGroup,
    pub tilde_i: LocalGroup,
    pub tilde_j: LocalGroup,
}

impl LocalGroups {
    pub fn symmetric(config: &CorrespondenceConfig) -> Result<Self, UniversalError> {
        let (d, t) = (config.delta(), config.tilde());
        Ok(LocalGroups {
            delta_i: LocalGroup::sym(d.q(Gen::I))?,
            delta_j: LocalGroup::sym(d.q(Gen::J))?,
            tilde_i: LocalGroup::sym(t.q(Gen::I))?,
            tilde_j: LocalGroup::sym(t.q(Gen::J))?,
        })
    }

    pub fn cyclic(config: &CorrespondenceConfig) -> Result<Self, UniversalError> {
        let (d, t) = (config.delta(), config.tilde());
        Ok(LocalGroups {
            delta_i: LocalGroup::cyclic(d.q(Gen::I))?,
            delta_j: LocalGroup::cyclic(d.q(Gen::J))?,
            tilde_i: LocalGroup::cyclic(t.q(Gen::I))?,
            tilde_j: LocalGroup::cyclic(t.q(Gen::J))?,
        })
    }
}

/// The classes of check performed by [`Isomorphism::verify_phi`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CheckClass {
    /// `φ(g)(ψ(c)) = ψ(g(c))` and `φ(g)` is a type-preserving automorphism
    Conjugation,
    /// `σ_λ̃(φ(g), P̃) = pr σ_λ(g, Res_k(ψ⁻¹(P̃)))` on `ĩ`- and `j̃`-panels
    Projection,
    /// `φ(g)` has local actions in the `F̃` groups
    Membership,
    /// `φ(gh) = φ(g)φ(h)`
    Homomorphism,
    /// `φ⁻¹(φ(g)) = g`
    RoundTrip,
    /// `g` fixes `ψ⁻¹(D)` iff `φ(g)` fixes `D`
    Stabilizer,
}

impl CheckClass {
    pub const ALL: [CheckClass; 6] = [
        CheckClass::Conjugation,
        CheckClass::Projection,
        CheckClass::Membership,
        CheckClass::Homomorphism,
        CheckClass::RoundTrip,
        CheckClass::Stabilizer,
    ];
}

impl fmt::Display for CheckClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiViolation {
    pub class: CheckClass,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PhiReport {
    pub radius: usize,
    pub sample_size: usize,
    /// number of individual comparisons made per class
    pub checked: BTreeMap<CheckClass, usize>,
    pub violations: Vec<PhiViolation>,
}

impl PhiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn failed_classes(&self) -> Vec<CheckClass> {
        let mut out: Vec<CheckClass> = self.violations.iter().map(|v| v.class).collect();
        out.sort();
        out.dedup();
        out
    }

    fn fail(&mut self, class: CheckClass, detail: String) {
        self.violations.push(PhiViolation { class, detail });
    }

    fn count(&mut self, class: CheckClass, n: usize) {
        *self.checked.entry(class).or_default() += n;
    }
}

/// `φ: U → Ũ, g ↦ ψ g ψ⁻¹`.
#[derive(Debug, Clone)]
pub struct Isomorphism {
    config: Arc<CorrespondenceConfig>,
    delta: UniversalGroup,
    tilde: UniversalGroup,
}

impl Isomorphism {
    pub fn new(config: Arc<CorrespondenceConfig>, locals: &LocalGroups) -> Result<Self, UniversalError> {
        let (lambda, lambda_tilde) = colourings(&config);
        let f_k = LocalGroup::product(&locals.tilde_i, &locals.tilde_j)?;
        let f_k_tilde = LocalGroup::product(&locals.delta_i, &locals.delta_j)?;
        let delta = UniversalGroup::new(BuildingTag::Delta, lambda, locals.delta_i.clone(), locals.delta_j.clone(), f_k)?;
        let tilde = UniversalGroup::new(BuildingTag::Tilde, lambda_tilde, locals.tilde_i.clone(), locals.tilde_j.clone(), f_k_tilde)?;
        Ok(Isomorphism { config, delta, tilde })
    }

    pub fn config(&self) -> &Arc<CorrespondenceConfig> {
        &self.config
    }

    pub fn delta(&self) -> &UniversalGroup {
        &self.delta
    }

    pub fn tilde(&self) -> &UniversalGroup {
        &self.tilde
    }

    pub fn group(&self, tag: BuildingTag) -> &UniversalGroup {
        match tag {
            BuildingTag::Delta => &self.delta,
            BuildingTag::Tilde => &self.tilde,
        }
    }

    fn conjugate(&self, g: &Element, direction: Direction) -> Result<Element, UniversalError> {
        let (src, dst, back) = match direction {
            Direction::Forward => (&self.delta, &self.tilde, Direction::Backward),
            Direction::Backward => (&self.tilde, &self.delta, Direction::Forward),
        };
        if g.building() != src.tag() {
            return Err(UniversalError::BuildingMismatch { expected: src.tag(), got: g.building() });
        }
        let cfg = &self.config;
        let f = |c: &ChamberWord| cfg.psi_unchecked(&src.eval(g, &cfg.psi_unchecked(c, back)), direction);
        let mut candidates: Vec<TreeWallVertex> = g.decorations().keys().map(|v| cfg.psi_vertex(v, direction)).collect();
        candidates.extend(path_vertices(&cfg.psi_unchecked(g.target(), direction)));
        dst.canonicalize_on(&f, candidates)
    }

    pub fn phi(&self, g: &Element) -> Result<Element, UniversalError> {
        self.conjugate(g, Direction::Forward)
    }

    pub fn phi_inv(&self, g: &Element) -> Result<Element, UniversalError> {
        self.conjugate(g, Direction::Backward)
    }

    /// Single-decoration elements at every vertex of depth ≤ 1, decorated by
    /// the local-group generators corrected to fix the colour toward the base,
    /// followed by the witnesses to `ball(1)`. Duplicates are dropped.
    pub fn standard_sample(&self) -> Result<Vec<Element>, UniversalError> {
        let u = &self.delta;
        let mut out: Vec<Element> = Vec::new();
        for v in vertices_within(u.spec(), 1) {
            let x = u.label(&v.rep, v.side);
            for d in u.side_group(v.side).stabilizer_generators(x)? {
                let portrait = u.make_portrait(BTreeMap::from([(v.clone(), d)]))?;
                let e = u.element(ChamberWord::base(), portrait)?;
                if !out.contains(&e) {
                    out.push(e);
                }
            }
        }
        for d in u.spec().ball(1) {
            let e = u.witness(&d)?;
            if !out.contains(&e) {
                out.push(e);
            }
        }
        Ok(out)
    }

    /// The standard sample followed by `extra` products of two sample
    /// elements drawn with a seeded generator.
    pub fn seeded_sample(&self, seed: u64, extra: usize) -> Result<Vec<Element>, UniversalError> {
        let mut out = self.standard_sample()?;
        let base = out.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..extra {
            let g = &out[rng.random_range(0..base)];
            let h = &out[rng.random_range(0..base)];
            let gh = self.delta.compose(g, h)?;
            out.push(gh);
        }
        Ok(out)
    }

    /// All singletons of `ball(r)` of `Δ̃` and one 3-chamber set.
    pub fn stabilizer_family(&self, r: usize) -> Vec<Vec<ChamberWord>> {
        let ball = self.tilde.spec().ball(r);
        let mut family: Vec<Vec<ChamberWord>> = ball.iter().map(|c| vec![c.clone()]).collect();
        if ball.len() >= 3 {
            family.push(vec![ball[0].clone(), ball[1].clone(), ball[ball.len() - 1].clone()]);
        }
        family
    }

    /// Compares `σ_λ̃(φ(g), P̃)` on `ĩ`- and `j̃`-panels meeting `ball(r)` with
    /// the matching component of `σ_λ(g, ·)` on the `k`-panel of `ψ⁻¹(P̃)`.
    pub fn projection_mismatches(&self, g: &Element, phi_g: &Element, r: usize) -> (usize, Vec<String>) {
        let spec = self.tilde.spec();
        let (m1, m2) = (spec.q(Gen::I), spec.q(Gen::J));
        let mut panels = std::collections::BTreeSet::new();
        for c in spec.ball(r) {
            for gen in [Gen::I, Gen::J] {
                panels.insert((gen, spec.panel_rep(&c, gen)));
            }
        }
        let fg = |c: &ChamberWord| self.delta.eval(g, c);
        let fphi = |c: &ChamberWord| self.tilde.eval(phi_g, c);
        let mut bad = Vec::new();
        for (gen, p) in &panels {
            let lhs = self.tilde.local_action(&fphi, p, *gen);
            let pre = self.config.psi_unchecked(p, Direction::Backward);
            let rhs = self.delta.local_action(&fg, &pre, Gen::K).ok().and_then(|s| s.split(m1, m2));
            let rhs = rhs.map(|(a, b)| if *gen == Gen::I { a } else { b });
            match (lhs, rhs) {
                (Ok(l), Some(r)) if l == r => {}
                (l, r) => bad.push(format!("{gen}-panel of {p}: φ(g) acts by {l:?}, projection gives {r:?}")),
            }
        }
        (panels.len(), bad)
    }

    pub fn verify_phi(&self, sample: &[Element], r: usize) -> PhiReport {
        let cfg = self.config.clone();
        self.verify_phi_with_transport(sample, r, &move |c| cfg.psi_unchecked(c, Direction::Backward))
    }

    /// As [`Isomorphism::verify_phi`], but the stabilizer check pulls each
    /// test set back to `Δ` through `transport` instead of `ψ⁻¹`.
    pub fn verify_phi_with_transport(&self, sample: &[Element], r: usize, transport: &dyn Fn(&ChamberWord) -> ChamberWord) -> PhiReport {
        let mut report = PhiReport { radius: r, sample_size: sample.len(), ..Default::default() };
        let ball = self.delta.spec().ball(r);

        let mut images: Vec<Option<Element>> = Vec::with_capacity(sample.len());
        for (n, g) in sample.iter().enumerate() {
            report.count(CheckClass::Conjugation, 1);
            match self.phi(g) {
                Ok(e) => images.push(Some(e)),
                Err(e) => {
                    report.fail(CheckClass::Conjugation, format!("sample {n}: φ(g) is not an automorphism: {e}"));
                    images.push(None);
                }
            }
        }

        for (n, (g, img)) in sample.iter().zip(&images).enumerate() {
            let Some(pg) = img else { continue };
            // conjugation
            for c in &ball {
                let lhs = self.tilde.eval(pg, &self.config.psi_unchecked(c, Direction::Forward));
                let rhs = self.config.psi_unchecked(&self.delta.eval(g, c), Direction::Forward);
                if lhs != rhs {
                    report.fail(CheckClass::Conjugation, format!("sample {n} at {c}: φ(g)(ψ(c)) = {lhs}, ψ(g(c)) = {rhs}"));
                }
            }
            report.count(CheckClass::Conjugation, ball.len());
            let fphi = |c: &ChamberWord| self.tilde.eval(pg, c);
            for v in self.tilde.verify_automorphism(&fphi, r).violations {
                report.fail(CheckClass::Conjugation, format!("sample {n}: {v}"));
            }
            // projection
            let (checked, bad) = self.projection_mismatches(g, pg, r);
            report.count(CheckClass::Projection, checked);
            for b in bad {
                report.fail(CheckClass::Projection, format!("sample {n}: {b}"));
            }
            // membership
            let m = self.tilde.membership_check(&fphi, r);
            report.count(CheckClass::Membership, m.panels_checked);
            for v in m.violations {
                report.fail(CheckClass::Membership, format!("sample {n}: {}-panel of {} acts by {:?}", v.gen, v.panel, v.local_action));
            }
            // round trip
            report.count(CheckClass::RoundTrip, 1);
            match self.phi_inv(pg) {
                Ok(back) if back == *g => {}
                Ok(back) => report.fail(CheckClass::RoundTrip, format!("sample {n}: φ⁻¹(φ(g)) = {back:?}")),
                Err(e) => report.fail(CheckClass::RoundTrip, format!("sample {n}: φ⁻¹ failed: {e}")),
            }
        }

        // homomorphism over all ordered pairs
        for (a, (g, pg)) in sample.iter().zip(&images).enumerate() {
            for (b, (h, ph)) in sample.iter().zip(&images).enumerate() {
                let (Some(pg), Some(ph)) = (pg, ph) else { continue };
                report.count(CheckClass::Homomorphism, 1);
                let lhs = self.delta.compose(g, h).and_then(|gh| self.phi(&gh));
                let rhs = self.tilde.compose(pg, ph);
                match (lhs, rhs) {
                    (Ok(l), Ok(r)) if l == r => {}
                    (l, r) => report.fail(CheckClass::Homomorphism, format!("pair ({a}, {b}): φ(gh) = {l:?}, φ(g)φ(h) = {r:?}")),
                }
            }
        }

        // stabilizer correspondence
        for d in self.stabilizer_family(r) {
            let pulled: Vec<ChamberWord> = d.iter().map(transport).collect();
            for (n, (g, pg)) in sample.iter().zip(&images).enumerate() {
                let Some(pg) = pg else { continue };
                report.count(CheckClass::Stabilizer, 1);
                let fixes_pre = pulled.iter().all(|c| self.delta.spec().contains(c)) && self.delta.fixes_pointwise(g, &pulled);
                let fixes_img = self.tilde.fixes_pointwise(pg, &d);
                if fixes_pre != fixes_img {
                    report.fail(
                        CheckClass::Stabilizer,
                        format!("sample {n}, D = {d:?}: fixes preimage {fixes_pre}, image fixes D {fixes_img}"),
                    );
                }
            }
        }
        report
    }
}
