use std::collections::BTreeSet;
use std::fmt::Write as _;

use anyhow::Result;
use rabuild::building::verify_legal_colouring;
use rabuild::correspondence::{colourings, verify_correspondence};
use rabuild::treewall::verify_treewall;
use rabuild::universal::UniversalGroup;
use rabuild::{ChamberWord, Gen, Side};
use serde::Serialize;

use crate::config::Loaded;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub statement: &'static str,
    pub passed: bool,
    pub violations: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub radius: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn violation_count(&self) -> usize {
        self.checks.iter().map(|c| c.violations + usize::from(!c.passed && c.violations == 0)).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "{} {:<24} {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
            let _ = writeln!(out, "     {}", c.statement);
        }
        let _ = writeln!(out, "radius {}, {} violations", self.radius, self.violation_count());
        out
    }
}

fn check(name: &'static str, statement: &'static str, violations: usize, extra_ok: bool, detail: String) -> CheckResult {
    CheckResult { name, statement, passed: violations == 0 && extra_ok, violations, detail }
}

fn transitivity(u: &UniversalGroup, r: usize) -> Result<CheckResult> {
    let ball = u.spec().ball(r);
    let mut reached = BTreeSet::new();
    let mut bad = 0;
    for d in &ball {
        let g = u.witness(d)?;
        reached.insert(u.evaluate(&g, &ChamberWord::base())?);
        let f = |c: &ChamberWord| u.evaluate(&g, c).expect("chamber of the building");
        bad += u.membership_check(&f, r).violations.len();
    }
    let all: BTreeSet<ChamberWord> = ball.into_iter().collect();
    bad += all.symmetric_difference(&reached).count();
    Ok(check(
        "transitivity",
        "the universal group acts chamber-transitively: witnesses in U reach every chamber",
        bad,
        true,
        format!("{:?}: {} of {} chambers of ball({r}) reached", u.tag(), reached.len(), all.len()),
    ))
}

fn nondiscreteness(u: &UniversalGroup, r: usize) -> CheckResult {
    let has_stabilizer = |side: Side| {
        let f = u.side_group(side);
        (0..f.degree()).any(|x| f.stabilizer(x).len() > 1)
    };
    let expect = has_stabilizer(Side::KPanel) || has_stabilizer(Side::IjResidue);
    let statement = "with a nontrivial point stabilizer, some nontrivial element fixes ball(r) pointwise";
    match u.nondiscreteness_witness(r) {
        Some(g) => {
            let fixes = u.fixes_pointwise(&g, &u.spec().ball(r));
            let moves = !u.fixes_pointwise(&g, &u.spec().ball(r + 2));
            check(
                "non-discreteness",
                statement,
                usize::from(!fixes) + usize::from(!moves) + usize::from(!expect),
                true,
                format!("{:?}: witness fixes ball({r}) {fixes}, moves ball({}) {moves}", u.tag(), r + 2),
            )
        }
        None => check(
            "non-discreteness",
            statement,
            usize::from(expect),
            true,
            format!("{:?}: no witness; local groups act freely", u.tag()),
        ),
    }
}

pub fn run(loaded: &Loaded, radius: usize, seed: u64) -> Result<VerifyReport> {
    let cfg = &loaded.correspondence;
    let iso = &loaded.isomorphism;
    let mut checks = Vec::new();

    let (l, lt) = colourings(cfg);
    for (name, col) in [("legal colouring Δ", &l), ("legal colouring Δ̃", &lt)] {
        let rep = verify_legal_colouring(col, &col.spec().ball(radius))?;
        checks.push(check(
            name,
            "λ is bijective on own-type panels and constant in every other component",
            rep.violations.len(),
            true,
            format!("{} panels", rep.panels_checked),
        ));
    }

    for (name, spec) in [("tree-wall tree Δ", cfg.delta()), ("tree-wall tree Δ̃", cfg.tilde())] {
        let rep = verify_treewall(spec, radius);
        let expected: BTreeSet<u32> = [spec.q(Gen::K), spec.q(Gen::I) * spec.q(Gen::J)].into();
        let ok = rep.is_tree() && (radius < 2 || rep.interior_degrees == expected);
        checks.push(check(
            name,
            "the k-tree-wall tree is a (q_k, q_i q_j)-biregular tree",
            rep.violations.len(),
            ok,
            format!("|V| = {}, |E| = {}, interior degrees {:?}", rep.vertices, rep.edges, rep.interior_degrees),
        ));
    }

    let rep = verify_correspondence(cfg, radius)?;
    checks.push(check(
        "correspondence ψ",
        "c ~k d iff ψ(c) ∈ Res_ij(ψ(d)), and c ∈ Res_ij(d) iff ψ(c) ~k ψ(d)",
        rep.violation_count(),
        true,
        format!("{} chamber pairs", rep.pairs_checked),
    ));

    let sample = iso.seeded_sample(seed, loaded.config.sampled_elements)?;
    let rep = iso.verify_phi(&sample, radius);
    let failed: Vec<String> = rep.failed_classes().iter().map(|c| c.to_string()).collect();
    checks.push(check(
        "isomorphism φ",
        "φ(g) = ψgψ⁻¹ lies in Ũ and φ is a bijective homomorphism matching pointwise stabilizers",
        rep.violations.len(),
        true,
        format!("{} elements at radius {radius}; failing classes {:?}", sample.len(), failed),
    ));

    for u in [iso.delta(), iso.tilde()] {
        checks.push(transitivity(u, radius.min(2))?);
        checks.push(nondiscreteness(u, radius.min(2)));
    }

    Ok(VerifyReport { radius, seed, checks })
}
