use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::local_group::LocalGroup;
use super::perm::Perm;
use super::UniversalError;
use crate::building::{BuildingSpec, Colouring};
use crate::coxeter::{Block, ChamberWord, Gen};
use crate::treewall::{edge_path, path_vertices, Side, TreeWallVertex};

/// Which of the two buildings an element acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BuildingTag {
    #[default]
    Delta,
    Tilde,
}

/// Decorations of the tree-wall tree. The decoration `δ_v` at a vertex fixes
/// the colour of the edge from `v` toward the base edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Portrait {
    decorations: BTreeMap<TreeWallVertex, Perm>,
}

impl Portrait {
    pub fn identity() -> Self {
        Portrait::default()
    }

    pub fn decorations(&self) -> &BTreeMap<TreeWallVertex, Perm> {
        &self.decorations
    }

    pub fn support(&self) -> impl Iterator<Item = &TreeWallVertex> {
        self.decorations.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.decorations.is_empty()
    }
}

/// A universal-group element: the image of the base chamber and a finite
/// portrait. At each vertex `v` the element permutes colours by
/// `τ(L(rep_v), L(g(rep_v))) ∘ δ_v`, where `δ_v` is the decoration (identity
/// when absent).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct Element {
    building: BuildingTag,
    target: ChamberWord,
    portrait: Portrait,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    #[serde(default)]
    building: BuildingTag,
    target: ChamberWord,
    decorations: Vec<(Side, ChamberWord, Perm)>,
}

impl From<Element> for ElementRepr {
    fn from(e: Element) -> Self {
        ElementRepr {
            building: e.building,
            target: e.target,
            decorations: e.portrait.decorations.into_iter().map(|(v, p)| (v.side, v.rep, p)).collect(),
        }
    }
}

impl TryFrom<ElementRepr> for Element {
    type Error = UniversalError;

    fn try_from(r: ElementRepr) -> Result<Self, Self::Error> {
        let mut decorations = BTreeMap::new();
        for (side, rep, perm) in r.decorations {
            let v = TreeWallVertex { side, rep };
            if !v.is_canonical() {
                return Err(UniversalError::NonCanonicalVertex(v));
            }
            if decorations.insert(v.clone(), perm).is_some() {
                return Err(UniversalError::DuplicateDecoration(v));
            }
        }
        Ok(Element { building: r.building, target: r.target, portrait: Portrait { decorations } })
    }
}

impl Element {
    /// Assembles an element without validating decorations against any local
    /// group. Only for building deliberately broken elements.
    pub fn from_parts_unchecked(building: BuildingTag, target: ChamberWord, decorations: BTreeMap<TreeWallVertex, Perm>) -> Self {
        Element { building, target, portrait: Portrait { decorations } }
    }

    pub fn building(&self) -> BuildingTag {
        self.building
    }

    pub fn target(&self) -> &ChamberWord {
        &self.target
    }

    pub fn portrait(&self) -> &Portrait {
        &self.portrait
    }

    pub fn decorations(&self) -> &BTreeMap<TreeWallVertex, Perm> {
        &self.portrait.decorations
    }

    pub fn decoration(&self, v: &TreeWallVertex) -> Option<&Perm> {
        self.portrait.decorations.get(v)
    }

    /// Largest depth of a decorated vertex, `None` for an empty portrait.
    pub fn support_radius(&self) -> Option<usize> {
        self.portrait.support().map(|v| v.depth()).max()
    }

    pub fn is_identity(&self) -> bool {
        self.target.is_empty() && self.portrait.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipViolation {
    pub gen: Gen,
    /// shortest chamber of the panel
    pub panel: ChamberWord,
    pub local_action: Option<Perm>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MembershipReport {
    pub radius: usize,
    pub panels_checked: usize,
    pub violations: Vec<MembershipViolation>,
}

impl MembershipReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AutomorphismReport {
    pub radius: usize,
    pub chambers: usize,
    pub violations: Vec<String>,
}

impl AutomorphismReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `U((F_g))` on one building, with its legal colouring.
#[derive(Debug, Clone)]
pub struct UniversalGroup {
    tag: BuildingTag,
    colouring: Colouring,
    f_i: LocalGroup,
    f_j: LocalGroup,
    f_k: LocalGroup,
    f_ij: LocalGroup,
}

impl UniversalGroup {
    /// `f_k` must be a product group matching the `k`-colour factors of the
    /// colouring. All local groups must be transitive.
    pub fn new(tag: BuildingTag, colouring: Colouring, f_i: LocalGroup, f_j: LocalGroup, f_k: LocalGroup) -> Result<Self, UniversalError> {
        let spec = *colouring.spec();
        let (m1, m2) = colouring.k_factors()?;
        for (g, f, expected) in [(Gen::I, &f_i, spec.q(Gen::I)), (Gen::J, &f_j, spec.q(Gen::J)), (Gen::K, &f_k, spec.q(Gen::K))] {
            if f.degree() != expected {
                return Err(UniversalError::DegreeMismatch { gen: g, expected, got: f.degree() });
            }
            if !f.is_transitive() {
                return Err(UniversalError::NotTransitive(g));
            }
        }
        match f_k.factors() {
            Some((a, b)) if a.degree() == m1 && b.degree() == m2 => {}
            _ => return Err(UniversalError::KNotProduct),
        }
        let f_ij = LocalGroup::product(&f_i, &f_j)?;
        Ok(UniversalGroup { tag, colouring, f_i, f_j, f_k, f_ij })
    }

    pub fn tag(&self) -> BuildingTag {
        self.tag
    }

    pub fn spec(&self) -> &BuildingSpec {
        self.colouring.spec()
    }

    pub fn colouring(&self) -> &Colouring {
        &self.colouring
    }

    pub fn local_group(&self, g: Gen) -> &LocalGroup {
        match g {
            Gen::I => &self.f_i,
            Gen::J => &self.f_j,
            Gen::K => &self.f_k,
        }
    }

    /// The group acting on the star of a vertex: `F_k` on `K_PANEL` vertices,
    /// `F_i × F_j` on `IJ_RESIDUE` vertices.
    pub fn side_group(&self, side: Side) -> &LocalGroup {
        match side {
            Side::KPanel => &self.f_k,
            Side::IjResidue => &self.f_ij,
        }
    }

    /// Colour of edge `c` as seen from its vertex on `side`.
    pub fn label(&self, c: &ChamberWord, side: Side) -> u32 {
        let spec = self.spec();
        match side {
            Side::KPanel => self.colouring.colour_index(c, Gen::K).expect("k rule present"),
            Side::IjResidue => spec.syllable_sum(c, Gen::I) * spec.q(Gen::J) + spec.syllable_sum(c, Gen::J),
        }
    }

    /// The edge at `v` with the given label.
    fn star_lookup(&self, v: &TreeWallVertex, label: u32) -> ChamberWord {
        let spec = self.spec();
        match v.side {
            Side::IjResidue => {
                let (qi, qj) = (spec.q(Gen::I), spec.q(Gen::J));
                let a = (label / qj + qi - spec.syllable_sum(&v.rep, Gen::I)) % qi;
                let b = (label % qj + qj - spec.syllable_sum(&v.rep, Gen::J)) % qj;
                spec.step(&spec.step(&v.rep, Gen::I, a), Gen::J, b)
            }
            Side::KPanel => (0..spec.q(Gen::K))
                .map(|g| spec.step(&v.rep, Gen::K, g))
                .find(|c| self.label(c, Side::KPanel) == label)
                .expect("legal colouring is bijective on panels"),
        }
    }

    fn check_element(&self, g: &Element) -> Result<(), UniversalError> {
        if g.building != self.tag {
            return Err(UniversalError::BuildingMismatch { expected: self.tag, got: g.building });
        }
        Ok(())
    }

    fn check_chamber(&self, c: &ChamberWord) -> Result<(), UniversalError> {
        if !self.spec().contains(c) {
            return Err(UniversalError::ForeignChamber(c.clone()));
        }
        Ok(())
    }

    pub fn identity(&self) -> Element {
        Element { building: self.tag, target: ChamberWord::base(), portrait: Portrait::identity() }
    }

    /// Validates decorations: canonical vertices, members of the side group,
    /// fixing the label of the edge toward the base.
    pub fn make_portrait(&self, decorations: BTreeMap<TreeWallVertex, Perm>) -> Result<Portrait, UniversalError> {
        let mut kept = BTreeMap::new();
        for (v, p) in decorations {
            if !v.is_canonical() || !self.spec().contains(&v.rep) {
                return Err(UniversalError::NonCanonicalVertex(v));
            }
            let f = self.side_group(v.side);
            if p.degree() != f.degree() || !f.contains(&p) {
                return Err(UniversalError::NotInLocalGroup(v));
            }
            let x = self.label(&v.rep, v.side);
            if !p.fixes(x) {
                return Err(UniversalError::MovesRootwardColour { vertex: v, colour: x });
            }
            if !p.is_identity() {
                kept.insert(v, p);
            }
        }
        Ok(Portrait { decorations: kept })
    }

    pub fn element(&self, target: ChamberWord, portrait: Portrait) -> Result<Element, UniversalError> {
        self.check_chamber(&target)?;
        Ok(Element { building: self.tag, target, portrait })
    }

    /// The canonical element moving the base chamber to `d`: the empty
    /// portrait, so every vertex acts by the coherent transporter.
    pub fn witness(&self, d: &ChamberWord) -> Result<Element, UniversalError> {
        self.element(d.clone(), Portrait::identity())
    }

    /// `σ_v(x)` given `g(rep_v)`.
    fn sigma_apply(&self, g: &Element, v: &TreeWallVertex, g_rep: &ChamberWord, x: u32) -> u32 {
        let f = self.side_group(v.side);
        let d = g.decoration(v).map_or(x, |p| p.apply(x));
        f.tau_apply(self.label(&v.rep, v.side), self.label(g_rep, v.side), d)
    }

    fn sigma_inv_apply(&self, g: &Element, v: &TreeWallVertex, g_rep: &ChamberWord, y: u32) -> u32 {
        let f = self.side_group(v.side);
        let d = f.tau_inv_apply(self.label(&v.rep, v.side), self.label(g_rep, v.side), y);
        g.decoration(v).map_or(d, |p| p.inverse().apply(d))
    }

    /// The permutation of star labels induced by `g` at `v`.
    pub fn vertex_action(&self, g: &Element, v: &TreeWallVertex) -> Result<Perm, UniversalError> {
        self.check_element(g)?;
        let g_rep = self.eval(g, &v.rep);
        let n = self.side_group(v.side).degree();
        Perm::from_table((0..n).map(|x| self.sigma_apply(g, v, &g_rep, x)).collect())
    }

    pub(crate) fn eval(&self, g: &Element, c: &ChamberWord) -> ChamberWord {
        let mut prefix: Vec<Block> = Vec::new();
        let mut src = ChamberWord::base();
        let mut img = g.target.clone();
        for b in c.blocks() {
            let side = Side::of_block(&b);
            prefix.push(b);
            let next = ChamberWord::from_blocks(&prefix).expect("prefix of an alternating form");
            let v = TreeWallVertex { side, rep: src };
            let y = self.sigma_apply(g, &v, &img, self.label(&next, side));
            img = self.star_lookup(&TreeWallVertex::containing(&img, side), y);
            src = next;
        }
        img
    }

    pub(crate) fn eval_inverse(&self, g: &Element, c: &ChamberWord) -> ChamberWord {
        let mut src = ChamberWord::base();
        for step in edge_path(&g.target, c) {
            let side = step.vertex.side;
            let v = TreeWallVertex::containing(&src, side);
            let g_rep = self.eval(g, &v.rep);
            let x = self.sigma_inv_apply(g, &v, &g_rep, self.label(&step.next, side));
            src = self.star_lookup(&v, x);
        }
        src
    }

    pub fn evaluate(&self, g: &Element, c: &ChamberWord) -> Result<ChamberWord, UniversalError> {
        self.check_element(g)?;
        self.check_chamber(c)?;
        Ok(self.eval(g, c))
    }

    pub fn evaluate_inverse(&self, g: &Element, c: &ChamberWord) -> Result<ChamberWord, UniversalError> {
        self.check_element(g)?;
        self.check_chamber(c)?;
        Ok(self.eval_inverse(g, c))
    }

    /// Reads the decoration at `v` off a chamber map.
    fn read_off(&self, f: &dyn Fn(&ChamberWord) -> ChamberWord, v: &TreeWallVertex) -> Result<Option<Perm>, UniversalError> {
        let spec = self.spec();
        let star = v.star(spec);
        let images: Vec<ChamberWord> = star.iter().map(f).collect();
        let w = TreeWallVertex::containing(&images[0], v.side);
        let n = self.side_group(v.side).degree();
        let mut table = vec![u32::MAX; n as usize];
        for (c, img) in star.iter().zip(&images) {
            if TreeWallVertex::containing(img, v.side) != w {
                return Err(UniversalError::NonAutomorphism(format!("star of {v} is not mapped into a single vertex")));
            }
            table[self.label(c, v.side) as usize] = self.label(img, v.side);
        }
        let sigma = Perm::from_table(table)
            .map_err(|_| UniversalError::NonAutomorphism(format!("star of {v} is not mapped bijectively")))?;
        if v.side == Side::IjResidue && sigma.split(spec.q(Gen::I), spec.q(Gen::J)).is_none() {
            return Err(UniversalError::NonAutomorphism(format!("{v} is mapped without preserving i- and j-panels")));
        }
        let x = self.label(&v.rep, v.side);
        let y = self.label(&images[0], v.side);
        let delta = self.side_group(v.side).tau(x, y)?.inverse().after(&sigma);
        Ok((!delta.is_identity()).then_some(delta))
    }

    /// Canonical form of a chamber map whose decorations lie among the
    /// `candidates`; vertices outside are assumed undecorated.
    pub fn canonicalize_on<I>(&self, f: &dyn Fn(&ChamberWord) -> ChamberWord, candidates: I) -> Result<Element, UniversalError>
    where
        I: IntoIterator<Item = TreeWallVertex>,
    {
        let target = f(&ChamberWord::base());
        self.check_chamber(&target)?;
        let mut decorations = BTreeMap::new();
        let unique: BTreeSet<TreeWallVertex> = candidates.into_iter().collect();
        for v in unique {
            if let Some(p) = self.read_off(f, &v)? {
                decorations.insert(v, p);
            }
        }
        Ok(Element { building: self.tag, target, portrait: Portrait { decorations } })
    }

    /// Canonical form of a chamber map, reading every vertex within depth `r`.
    pub fn canonicalize(&self, f: &dyn Fn(&ChamberWord) -> ChamberWord, r: usize) -> Result<Element, UniversalError> {
        self.canonicalize_on(f, vertices_within(self.spec(), r))
    }

    /// `g ∘ h`
    pub fn compose(&self, g: &Element, h: &Element) -> Result<Element, UniversalError> {
        self.check_element(g)?;
        self.check_element(h)?;
        let mut candidates: Vec<TreeWallVertex> = h.portrait.support().cloned().collect();
        for w in g.portrait.support().cloned().chain(path_vertices(&h.target)) {
            candidates.push(TreeWallVertex::containing(&self.eval_inverse(h, &w.rep), w.side));
        }
        let f = |c: &ChamberWord| self.eval(g, &self.eval(h, c));
        self.canonicalize_on(&f, candidates)
    }

    pub fn invert(&self, g: &Element) -> Result<Element, UniversalError> {
        self.check_element(g)?;
        let mut candidates: Vec<TreeWallVertex> = path_vertices(&g.target);
        for v in g.portrait.support() {
            candidates.push(TreeWallVertex::containing(&self.eval(g, &v.rep), v.side));
        }
        let f = |c: &ChamberWord| self.eval_inverse(g, c);
        self.canonicalize_on(&f, candidates)
    }

    /// `σ_λ(f, P)` for the `gen`-panel `P` of `c`.
    pub fn local_action(&self, f: &dyn Fn(&ChamberWord) -> ChamberWord, c: &ChamberWord, gen: Gen) -> Result<Perm, UniversalError> {
        let spec = self.spec();
        let panel = spec.panel(c, gen);
        let images: Vec<ChamberWord> = panel.iter().map(f).collect();
        let target = spec.panel_rep(&images[0], gen);
        let mut table = vec![u32::MAX; spec.q(gen) as usize];
        for (x, y) in panel.iter().zip(&images) {
            if spec.panel_rep(y, gen) != target {
                return Err(UniversalError::NonAutomorphism(format!("{gen}-panel of {c} is split")));
            }
            table[self.colouring.colour_index(x, gen)? as usize] = self.colouring.colour_index(y, gen)?;
        }
        Perm::from_table(table).map_err(|_| UniversalError::NonAutomorphism(format!("{gen}-panel of {c} is not mapped bijectively")))
    }

    /// Every panel meeting `ball(r)` has its local action in the prescribed
    /// local group.
    pub fn membership_check(&self, f: &dyn Fn(&ChamberWord) -> ChamberWord, r: usize) -> MembershipReport {
        let spec = self.spec();
        let mut panels = BTreeSet::new();
        for c in spec.ball(r) {
            for g in Gen::ALL {
                panels.insert((g, spec.panel_rep(&c, g)));
            }
        }
        let mut report = MembershipReport { radius: r, panels_checked: panels.len(), violations: Vec::new() };
        for (gen, panel) in panels {
            match self.local_action(f, &panel, gen) {
                Ok(p) if self.local_group(gen).contains(&p) => {}
                Ok(p) => report.violations.push(MembershipViolation { gen, panel, local_action: Some(p) }),
                Err(_) => report.violations.push(MembershipViolation { gen, panel, local_action: None }),
            }
        }
        report
    }

    /// Injectivity on `ball(r)` and preservation of `g`-adjacency for every
    /// generator along every panel meeting it.
    pub fn verify_automorphism(&self, f: &dyn Fn(&ChamberWord) -> ChamberWord, r: usize) -> AutomorphismReport {
        let spec = self.spec();
        let ball = spec.ball(r);
        let mut report = AutomorphismReport { radius: r, chambers: ball.len(), violations: Vec::new() };
        let mut seen = HashSet::new();
        for c in &ball {
            let fc = f(c);
            if !spec.contains(&fc) {
                report.violations.push(format!("{c} is mapped outside the building"));
                continue;
            }
            if !seen.insert(fc.clone()) {
                report.violations.push(format!("{c} collides with another chamber at {fc}"));
            }
            for g in Gen::ALL {
                for a in 1..spec.q(g) {
                    let d = spec.step(c, g, a);
                    let fd = f(&d);
                    if fd == fc || !spec.adjacent(&fc, &fd, g).unwrap_or(false) {
                        report.violations.push(format!("{g}-adjacency of {c} and {d} is not preserved"));
                    }
                }
            }
        }
        report
    }

    pub fn fixes_pointwise(&self, g: &Element, chambers: &[ChamberWord]) -> bool {
        chambers.iter().all(|c| self.eval(g, c) == *c)
    }

    /// Closure of `{c}` under `gens` and their inverses, stopping once
    /// `bound` chambers are reached. The flag reports truncation.
    pub fn orbit(&self, gens: &[Element], c: &ChamberWord, bound: usize) -> Result<(BTreeSet<ChamberWord>, bool), UniversalError> {
        self.check_chamber(c)?;
        for g in gens {
            self.check_element(g)?;
        }
        let mut seen = BTreeSet::from([c.clone()]);
        let mut queue = VecDeque::from([c.clone()]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                for y in [self.eval(g, &x), self.eval_inverse(g, &x)] {
                    if seen.contains(&y) {
                        continue;
                    }
                    if seen.len() >= bound {
                        return Ok((seen, true));
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok((seen, false))
    }

    /// A nontrivial element fixing `ball(r)` pointwise: one decoration at a
    /// vertex of depth `r + 1`, fixing the colour toward the base. `None` when
    /// every point stabilizer of both side groups is trivial.
    pub fn nondiscreteness_witness(&self, r: usize) -> Option<Element> {
        for side in [Side::KPanel, Side::IjResidue] {
            // the rep is r+1 single-syllable blocks ending on the other side
            let mut blocks = Vec::with_capacity(r + 1);
            let mut s = side.opposite();
            for _ in 0..=r {
                blocks.push(match s {
                    Side::KPanel => Block::K(1),
                    Side::IjResidue => Block::Ij(1, 0),
                });
                s = s.opposite();
            }
            blocks.reverse();
            let rep = ChamberWord::from_blocks(&blocks).expect("alternating by construction");
            let v = TreeWallVertex { side, rep };
            let x = self.label(&v.rep, side);
            let stab: Vec<Perm> = self.side_group(side).stabilizer(x).into_iter().filter(|p| !p.is_identity()).collect();
            // prefer a decoration that moves an edge one syllable past the rep
            let near = |p: &Perm| {
                v.star(self.spec())
                    .iter()
                    .filter(|c| c.len() == v.rep.len() + 1)
                    .any(|c| !p.fixes(self.label(c, side)))
            };
            let chosen = stab.iter().find(|p| near(p)).or(stab.first());
            if let Some(p) = chosen {
                let decorations = BTreeMap::from([(v, p.clone())]);
                return Some(Element { building: self.tag, target: ChamberWord::base(), portrait: Portrait { decorations } });
            }
        }
        None
    }
}

/// Every tree-wall vertex whose rep has at most `r` blocks.
pub fn vertices_within(spec: &BuildingSpec, r: usize) -> Vec<TreeWallVertex> {
    let mut out = vec![TreeWallVertex::base(Side::KPanel), TreeWallVertex::base(Side::IjResidue)];
    let mut layer = vec![ChamberWord::base()];
    for _ in 0..r {
        let mut next = Vec::new();
        for rep in &layer {
            let last = rep.blocks().last().map(Side::of_block);
            for side in [Side::KPanel, Side::IjResidue] {
                if last == Some(side) {
                    continue;
                }
                let v = TreeWallVertex { side, rep: rep.clone() };
                for e in v.star(spec).into_iter().skip(1) {
                    out.push(TreeWallVertex { side: side.opposite(), rep: e.clone() });
                    next.push(e);
                }
            }
        }
        layer = next;
    }
    out.sort();
    out
}
