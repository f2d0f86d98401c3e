//! Acceptance gate: one PASS/FAIL line per criterion. All criteria are exact
//! combinatorial comparisons; the only tolerances are the wall-clock budgets
//! below, which are reported but not enforced as failures.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rabuild::building::verify_legal_colouring;
use rabuild::correspondence::{colourings, verify_correspondence, CorrespondenceConfig, CorrespondenceError, Direction};
use rabuild::coxeter::{Block, ChamberWord, Gen};
use rabuild::treewall::{verify_treewall, Side, TreeWallVertex};
use rabuild::universal::{CheckClass, Element, Isomorphism, LocalGroups, Perm};
use rabuild::BuildingSpec;

const DELTA: (u32, u32, u32) = (4, 3, 9);
const TILDE: (u32, u32, u32) = (3, 3, 12);

/// Wall-clock budgets per criterion, in seconds.
const BUDGET: [u64; 10] = [10, 30, 10, 60, 60, 30, 30, 30, 10, 10];

struct Outcome {
    pass: bool,
    detail: String,
}

fn spec(t: (u32, u32, u32)) -> BuildingSpec {
    BuildingSpec::from_triple(t.0, t.1, t.2).unwrap()
}

fn config() -> Arc<CorrespondenceConfig> {
    Arc::new(CorrespondenceConfig::new(spec(DELTA), spec(TILDE)).unwrap())
}

fn sym() -> Isomorphism {
    let cfg = config();
    let locals = LocalGroups::symmetric(&cfg).unwrap();
    Isomorphism::new(cfg, &locals).unwrap()
}

/// Breadth-first ball in the chamber graph, built only from single-syllable
/// steps and set membership: an independent count of chambers.
fn bfs_ball(s: &BuildingSpec, r: usize) -> BTreeSet<ChamberWord> {
    let mut seen = BTreeSet::from([ChamberWord::base()]);
    let mut frontier = vec![ChamberWord::base()];
    for _ in 0..r {
        let mut next = Vec::new();
        for c in &frontier {
            for g in Gen::ALL {
                for a in 1..s.q(g) {
                    let d = s.step(c, g, a);
                    if seen.insert(d.clone()) {
                        next.push(d);
                    }
                }
            }
        }
        frontier = next;
    }
    seen
}

fn c1_cardinalities() -> Outcome {
    let mut bad = Vec::new();
    let mut counted = 0;
    for (t, res) in [(DELTA, 12), (TILDE, 9)] {
        let s = spec(t);
        let ball = s.ball(3);
        let oracle = bfs_ball(&s, 3);
        if ball.iter().cloned().collect::<BTreeSet<_>>() != oracle {
            bad.push(format!("{t:?}: ball(3) differs from the breadth-first oracle"));
        }
        for c in &ball {
            for (g, q) in [(Gen::I, t.0), (Gen::J, t.1), (Gen::K, t.2)] {
                let p = s.panel(c, g);
                let distinct: HashSet<_> = p.iter().collect();
                if p.len() != q as usize || distinct.len() != q as usize || !p.contains(c) {
                    bad.push(format!("{t:?}: {g}-panel of {c} has {} chambers", distinct.len()));
                }
            }
            let r = s.residue(c, &[Gen::I, Gen::J]).unwrap();
            if r.len() != res {
                bad.push(format!("{t:?}: {{i,j}}-residue of {c} has {}", r.len()));
            }
            counted += 1;
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{counted} chambers, {} violations", bad.len()) }
}

fn c2_legality() -> Outcome {
    let cfg = config();
    let (l, lt) = colourings(&cfg);
    let a = verify_legal_colouring(&l, &cfg.delta().ball(3)).unwrap();
    let b = verify_legal_colouring(&lt, &cfg.tilde().ball(3)).unwrap();
    Outcome {
        pass: a.is_legal() && b.is_legal() && a.panels_checked > 0 && b.panels_checked > 0,
        detail: format!(
            "Δ: {} panels, {} violations; Δ̃: {} panels, {} violations",
            a.panels_checked,
            a.violations.len(),
            b.panels_checked,
            b.violations.len()
        ),
    }
}

fn c3_treewall() -> Outcome {
    let r = verify_treewall(&spec(DELTA), 3);
    let degrees: Vec<u32> = r.interior_degrees.iter().copied().collect();
    Outcome {
        pass: r.connected && r.acyclic && r.bipartite && degrees == [9, 12] && r.violations.is_empty(),
        detail: format!(
            "|V| = {}, |E| = {}, connected {}, acyclic {}, bipartite {}, interior degrees {:?}",
            r.vertices, r.edges, r.connected, r.acyclic, r.bipartite, degrees
        ),
    }
}

fn c4_psi() -> Outcome {
    let cfg = config();
    let r = verify_correspondence(&cfg, 3).unwrap();
    // second route through explicit adjacency tests on a slice of pairs
    let ball = cfg.delta().ball(3);
    let (d, t) = (cfg.delta(), cfg.tilde());
    let mut bad = 0;
    for c in ball.iter().step_by(17) {
        let pc = cfg.psi(c, Direction::Forward).unwrap();
        for e in &ball {
            let pe = cfg.psi(e, Direction::Forward).unwrap();
            let k_adj = d.adjacent(c, e, Gen::K).unwrap();
            let in_res = t.residue(&pc, &[Gen::I, Gen::J]).unwrap().contains(&pe);
            let res = d.residue(c, &[Gen::I, Gen::J]).unwrap().contains(e);
            let tk_adj = t.adjacent(&pc, &pe, Gen::K).unwrap();
            if k_adj != in_res || res != tk_adj {
                bad += 1;
            }
        }
    }
    Outcome {
        pass: r.is_ok() && bad == 0 && r.pairs_checked == ball.len() * ball.len(),
        detail: format!("{} pairs, {} violations, {} cross-check mismatches", r.pairs_checked, r.violation_count(), bad),
    }
}

fn projection_and_membership(iso: &Isomorphism, sample: &[Element]) -> Outcome {
    let mut bad = 0;
    let mut panels = 0;
    let mut member_panels = 0;
    for g in sample {
        let pg = match iso.phi(g) {
            Ok(p) => p,
            Err(_) => {
                bad += 1;
                continue;
            }
        };
        let f = |c: &ChamberWord| iso.tilde().evaluate(&pg, c).unwrap();
        let m = iso.tilde().membership_check(&f, 2);
        member_panels += m.panels_checked;
        bad += m.violations.len();
        let (n, mismatches) = iso.projection_mismatches(g, &pg, 2);
        panels += n;
        bad += mismatches.len();
    }
    Outcome {
        pass: bad == 0 && panels > 0,
        detail: format!(
            "{} elements, {member_panels} membership panels, {panels} projection panels, {bad} violations",
            sample.len()
        ),
    }
}

fn c6_homomorphism(iso: &Isomorphism, sample: &[Element]) -> Outcome {
    let mut bad = 0;
    let images: Vec<Element> = sample.iter().map(|g| iso.phi(g).unwrap()).collect();
    for (g, pg) in sample.iter().zip(&images) {
        if iso.phi_inv(pg).ok().as_ref() != Some(g) {
            bad += 1;
        }
        for (h, ph) in sample.iter().zip(&images) {
            let lhs = iso.phi(&iso.delta().compose(g, h).unwrap()).unwrap();
            let rhs = iso.tilde().compose(pg, ph).unwrap();
            if lhs != rhs {
                bad += 1;
            }
        }
    }
    let distinct: HashSet<&Element> = images.iter().collect();
    Outcome {
        pass: bad == 0 && distinct.len() == sample.len(),
        detail: format!("{} pairs, {} distinct images, {bad} violations", sample.len() * sample.len(), distinct.len()),
    }
}

fn c7_topology(iso: &Isomorphism, sample: &[Element]) -> Outcome {
    let images: Vec<Element> = sample.iter().map(|g| iso.phi(g).unwrap()).collect();
    let family = iso.stabilizer_family(2);
    let mut bad = 0;
    let mut fixing = 0;
    for d in &family {
        let pre: Vec<ChamberWord> = d.iter().map(|c| iso.config().psi(c, Direction::Backward).unwrap()).collect();
        for (g, pg) in sample.iter().zip(&images) {
            let a = iso.delta().fixes_pointwise(g, &pre);
            let b = iso.tilde().fixes_pointwise(pg, d);
            fixing += a as usize;
            if a != b {
                bad += 1;
            }
        }
    }
    Outcome {
        pass: bad == 0 && fixing > 0 && fixing < family.len() * sample.len(),
        detail: format!("{} sets × {} elements, {fixing} fixing, {bad} violations", family.len(), sample.len()),
    }
}

fn c8_transitivity(iso: &Isomorphism) -> Outcome {
    let u = iso.delta();
    let ball = u.spec().ball(2);
    let mut reached = BTreeSet::new();
    let mut bad = 0;
    for d in &ball {
        let g = u.witness(d).unwrap();
        reached.insert(u.evaluate(&g, &ChamberWord::base()).unwrap());
        let f = |c: &ChamberWord| u.evaluate(&g, c).unwrap();
        bad += u.membership_check(&f, 2).violations.len();
    }
    let all: BTreeSet<_> = ball.iter().cloned().collect();
    Outcome {
        pass: reached == all && bad == 0,
        detail: format!("{} of {} chambers reached, {bad} membership violations", reached.len(), all.len()),
    }
}

fn c9_nondiscrete(iso: &Isomorphism) -> Outcome {
    let u = iso.delta();
    let cfg = config();
    let cyc = Isomorphism::new(cfg.clone(), &LocalGroups::cyclic(&cfg).unwrap()).unwrap();
    let found = u.nondiscreteness_witness(2);
    let (fixes, moves) = match &found {
        Some(g) => (u.fixes_pointwise(g, &u.spec().ball(2)), !u.fixes_pointwise(g, &u.spec().ball(4))),
        None => (false, false),
    };
    let absent = cyc.delta().nondiscreteness_witness(2).is_none() && cyc.tilde().nondiscreteness_witness(2).is_none();
    Outcome {
        pass: found.as_ref().is_some_and(|g| !g.is_identity()) && fixes && moves && absent,
        detail: format!("symmetric: fixes ball(2) {fixes}, moves ball(4) {moves}; cyclic: absent {absent}"),
    }
}

fn c10_negative(iso: &Isomorphism, sample: &[Element]) -> Outcome {
    let u = iso.delta();
    // (a) a non-product permutation of X_k fixing (0,0)
    let bad = Element::from_parts_unchecked(
        u.tag(),
        ChamberWord::base(),
        BTreeMap::from([(TreeWallVertex::base(Side::KPanel), Perm::swap(9, 1, 3))]),
    );
    let f = |c: &ChamberWord| u.evaluate(&bad, c).unwrap();
    let a_ok = !u.membership_check(&f, 1).passed() && u.verify_automorphism(&f, 2).passed();

    // (b) a non-bijective b table
    let mut b: Vec<u32> = (0..9).collect();
    b[4] = 3;
    let res = CorrespondenceConfig::with_tables(spec(DELTA), spec(TILDE), (0..12).collect(), b);
    let b_ok = matches!(res, Err(CorrespondenceError::NotBijective { table: "b" }));

    // (c) ψ⁻¹ with b-values 1 and 3 swapped on the first block only
    let cfg = iso.config().clone();
    let corrupted = move |c: &ChamberWord| {
        let mut blocks = cfg.psi(c, Direction::Backward).unwrap().blocks();
        if let Some(Block::K(y)) = blocks.first_mut() {
            *y = match *y {
                1 => 3,
                3 => 1,
                other => other,
            };
        }
        ChamberWord::from_blocks(&blocks).unwrap()
    };
    let report = iso.verify_phi_with_transport(sample, 2, &corrupted);
    let c_classes = report.failed_classes();
    let c_ok = c_classes == [CheckClass::Stabilizer];
    Outcome {
        pass: a_ok && b_ok && c_ok,
        detail: format!("outside F_k caught by membership only: {a_ok}; bad b table: {b_ok}; bad ψ fails {c_classes:?}"),
    }
}

fn main() -> ExitCode {
    let names = [
        "panel and residue cardinalities on ball(3)",
        "legal colourings on ball(3) of both buildings",
        "tree-wall tree is a (9,12)-biregular tree",
        "ψ equivalences, injectivity and round trip on ball(3)",
        "membership and projection identity for φ of the standard sample",
        "homomorphism and round trip over sample pairs",
        "stabilizer correspondence for singletons and a 3-set",
        "witnesses reach ball(2) and pass membership",
        "non-discreteness witness and its cyclic absence",
        "negative controls caught by their own check only",
    ];
    let iso = sym();
    let sample = iso.standard_sample().unwrap();
    println!("standard sample: {} elements", sample.len());
    let runs: Vec<Box<dyn Fn() -> Outcome + '_>> = vec![
        Box::new(c1_cardinalities),
        Box::new(c2_legality),
        Box::new(c3_treewall),
        Box::new(c4_psi),
        Box::new(|| projection_and_membership(&iso, &sample)),
        Box::new(|| c6_homomorphism(&iso, &sample)),
        Box::new(|| c7_topology(&iso, &sample)),
        Box::new(|| c8_transitivity(&iso)),
        Box::new(|| c9_nondiscrete(&iso)),
        Box::new(|| c10_negative(&iso, &sample)),
    ];
    let mut failures = 0;
    for (n, run) in runs.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let over = if took > Duration::from_secs(BUDGET[n]) { " (over budget)" } else { "" };
        println!(
            "criterion {:>2}: {} {} [{:.2}s{}] {}",
            n + 1,
            if out.pass { "PASS" } else { "FAIL" },
            names[n],
            took.as_secs_f64(),
            over,
            out.detail
        );
        failures += usize::from(!out.pass);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
