//! The `k`-tree-wall tree: vertices are `k`-panels and `{i,j}`-residues,
//! edges are chambers. The tree is infinite and only ever queried locally or
//! truncated to a ball.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use petgraph::algo::{connected_components, is_cyclic_undirected};
use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};

use crate::building::BuildingSpec;
use crate::coxeter::{Block, ChamberWord, Gen};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "K_PANEL")]
    KPanel,
    #[serde(rename = "IJ_RESIDUE")]
    IjResidue,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::KPanel => Side::IjResidue,
            Side::IjResidue => Side::KPanel,
        }
    }

    pub fn gens(self) -> &'static [Gen] {
        match self {
            Side::KPanel => &[Gen::K],
            Side::IjResidue => &[Gen::I, Gen::J],
        }
    }

    /// The side of the vertex joining a chamber to its extension by `block`.
    pub fn of_block(block: &Block) -> Side {
        if block.is_ij() {
            Side::IjResidue
        } else {
            Side::KPanel
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::KPanel => "K_PANEL",
            Side::IjResidue => "IJ_RESIDUE",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A vertex of the tree-wall tree, identified by its side and the shortest
/// chamber of the coset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TreeWallVertex {
    pub side: Side,
    pub rep: ChamberWord,
}

impl fmt::Display for TreeWallVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.side, self.rep)
    }
}

impl TreeWallVertex {
    /// The vertex of the given side incident to edge `c`.
    pub fn containing(c: &ChamberWord, side: Side) -> Self {
        TreeWallVertex { side, rep: c.strip_trailing(side.gens()) }
    }

    pub fn base(side: Side) -> Self {
        TreeWallVertex { side, rep: ChamberWord::base() }
    }

    /// A rep is canonical when it has no trailing block of its own side.
    pub fn is_canonical(&self) -> bool {
        match self.rep.blocks().last() {
            None => true,
            Some(b) => Side::of_block(b) != self.side,
        }
    }

    /// Distance from the base edge, counted in blocks of the rep.
    pub fn depth(&self) -> usize {
        self.rep.block_count()
    }

    /// Edges at this vertex, the rep (the edge toward the base) first.
    pub fn star(&self, spec: &BuildingSpec) -> Vec<ChamberWord> {
        match self.side {
            Side::KPanel => (0..spec.q(Gen::K)).map(|a| spec.step(&self.rep, Gen::K, a)).collect(),
            Side::IjResidue => {
                let mut out = Vec::with_capacity((spec.q(Gen::I) * spec.q(Gen::J)) as usize);
                for a in 0..spec.q(Gen::I) {
                    let row = spec.step(&self.rep, Gen::I, a);
                    for b in 0..spec.q(Gen::J) {
                        out.push(spec.step(&row, Gen::J, b));
                    }
                }
                out
            }
        }
    }

    pub fn valency(&self, spec: &BuildingSpec) -> u32 {
        match self.side {
            Side::KPanel => spec.q(Gen::K),
            Side::IjResidue => spec.q(Gen::I) * spec.q(Gen::J),
        }
    }
}

/// The `(K_PANEL, IJ_RESIDUE)` endpoints of edge `c`.
pub fn tw_vertices(c: &ChamberWord) -> (TreeWallVertex, TreeWallVertex) {
    (
        TreeWallVertex::containing(c, Side::KPanel),
        TreeWallVertex::containing(c, Side::IjResidue),
    )
}

/// Every edge at `v` together with the vertex on its other side.
pub fn tw_neighbours(v: &TreeWallVertex, spec: &BuildingSpec) -> Vec<(ChamberWord, TreeWallVertex)> {
    v.star(spec)
        .into_iter()
        .map(|e| {
            let opposite = TreeWallVertex::containing(&e, v.side.opposite());
            (e, opposite)
        })
        .collect()
}

/// One step of a walk between edges: cross `vertex` and arrive on `next`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStep {
    pub vertex: TreeWallVertex,
    pub next: ChamberWord,
}

fn prefix(blocks: &[Block], n: usize) -> ChamberWord {
    ChamberWord::from_blocks(&blocks[..n]).expect("prefix of an alternating form")
}

/// The geodesic from edge `from` to edge `to`, as the sequence of vertices
/// crossed. Its length is the tree distance between the two edges.
pub fn edge_path(from: &ChamberWord, to: &ChamberWord) -> Vec<PathStep> {
    let ub = from.blocks();
    let cb = to.blocks();
    let m = ub.iter().zip(&cb).take_while(|(a, b)| a == b).count();

    let mut steps = Vec::new();
    // back from `from` to the common prefix
    for t in (m + 1..=ub.len()).rev() {
        steps.push(PathStep {
            vertex: TreeWallVertex { side: Side::of_block(&ub[t - 1]), rep: prefix(&ub, t - 1) },
            next: prefix(&ub, t - 1),
        });
    }
    let mut forward: Vec<PathStep> = (m + 1..=cb.len())
        .map(|t| PathStep {
            vertex: TreeWallVertex { side: Side::of_block(&cb[t - 1]), rep: prefix(&cb, t - 1) },
            next: prefix(&cb, t),
        })
        .collect();
    // both continue through the same vertex: skip the shared prefix edge
    if let (Some(last), Some(first)) = (steps.last(), forward.first()) {
        if last.vertex == first.vertex {
            steps.pop();
        }
    }
    steps.append(&mut forward);
    steps
}

/// Vertices crossed on the way from the base edge to `c`.
pub fn path_vertices(c: &ChamberWord) -> Vec<TreeWallVertex> {
    edge_path(&ChamberWord::base(), c).into_iter().map(|s| s.vertex).collect()
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TreeWallReport {
    pub radius: usize,
    pub edges: usize,
    pub vertices: usize,
    pub connected: bool,
    pub acyclic: bool,
    pub bipartite: bool,
    /// Degrees of vertices whose whole star lies in the truncation.
    pub interior_degrees: BTreeSet<u32>,
    pub violations: Vec<String>,
}

impl TreeWallReport {
    pub fn is_tree(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The truncation of the tree-wall tree to the edges in a ball.
#[derive(Debug, Clone)]
pub struct TreeWallTruncation {
    pub vertices: Vec<TreeWallVertex>,
    /// `(edge, K_PANEL index, IJ_RESIDUE index)`
    pub edges: Vec<(ChamberWord, usize, usize)>,
}

impl TreeWallTruncation {
    pub fn build(spec: &BuildingSpec, r: usize) -> Self {
        let mut index: BTreeMap<TreeWallVertex, usize> = BTreeMap::new();
        let mut vertices = Vec::new();
        let mut intern = |v: TreeWallVertex| {
            *index.entry(v.clone()).or_insert_with(|| {
                vertices.push(v);
                vertices.len() - 1
            })
        };
        let mut edges = Vec::new();
        for c in spec.ball(r) {
            let (kv, ijv) = tw_vertices(&c);
            let (a, b) = (intern(kv), intern(ijv));
            edges.push((c, a, b));
        }
        TreeWallTruncation { vertices, edges }
    }

    fn graph(&self) -> UnGraph<(), ()> {
        let mut g = UnGraph::<(), ()>::with_capacity(self.vertices.len(), self.edges.len());
        let nodes: Vec<_> = self.vertices.iter().map(|_| g.add_node(())).collect();
        for (_, a, b) in &self.edges {
            g.add_edge(nodes[*a], nodes[*b], ());
        }
        g
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.vertices.len()];
        for (_, a, b) in &self.edges {
            deg[*a] += 1;
            deg[*b] += 1;
        }
        deg
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph treewall {\n");
        for (n, v) in self.vertices.iter().enumerate() {
            let shape = match v.side {
                Side::KPanel => "circle",
                Side::IjResidue => "diamond",
            };
            let _ = writeln!(out, "  v{n} [shape={shape}, label=\"{v}\"];");
        }
        for (c, a, b) in &self.edges {
            let _ = writeln!(out, "  v{a} -- v{b} [label=\"{c}\"];");
        }
        out.push_str("}\n");
        out
    }

    pub fn adjacency(&self) -> Vec<AdjacencyEntry> {
        let mut lists: Vec<Vec<(ChamberWord, TreeWallVertex)>> = vec![Vec::new(); self.vertices.len()];
        for (c, a, b) in &self.edges {
            lists[*a].push((c.clone(), self.vertices[*b].clone()));
            lists[*b].push((c.clone(), self.vertices[*a].clone()));
        }
        self.vertices
            .iter()
            .cloned()
            .zip(lists)
            .map(|(vertex, neighbours)| AdjacencyEntry { vertex, neighbours })
            .collect()
    }
}

/// One line of the JSON adjacency dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyEntry {
    pub vertex: TreeWallVertex,
    pub neighbours: Vec<(ChamberWord, TreeWallVertex)>,
}

/// Checks that the truncation to `ball(r)` is a tree, bipartite by side,
/// with interior degrees `q_k` and `q_i·q_j`.
pub fn verify_treewall(spec: &BuildingSpec, r: usize) -> TreeWallReport {
    let t = TreeWallTruncation::build(spec, r);
    let g = t.graph();
    let mut report = TreeWallReport {
        radius: r,
        edges: t.edges.len(),
        vertices: t.vertices.len(),
        ..Default::default()
    };

    report.connected = connected_components(&g) == 1;
    if !report.connected {
        report.violations.push("truncation is disconnected".into());
    }
    report.acyclic = !is_cyclic_undirected(&g) && t.vertices.len() == t.edges.len() + 1;
    if !report.acyclic {
        report
            .violations
            .push(format!("cycle found: |V| = {}, |E| = {}", t.vertices.len(), t.edges.len()));
    }
    report.bipartite = t
        .edges
        .iter()
        .all(|(_, a, b)| t.vertices[*a].side == Side::KPanel && t.vertices[*b].side == Side::IjResidue);
    if !report.bipartite {
        report.violations.push("edge inside one side".into());
    }

    let edge_set: BTreeSet<&ChamberWord> = t.edges.iter().map(|(c, _, _)| c).collect();
    for (v, deg) in t.vertices.iter().zip(t.degrees()) {
        let star = v.star(spec);
        let opposite: BTreeSet<TreeWallVertex> = star
            .iter()
            .map(|e| TreeWallVertex::containing(e, v.side.opposite()))
            .collect();
        if opposite.len() != star.len() {
            report.violations.push(format!("{v}: repeated neighbour"));
        }
        if star.iter().all(|e| edge_set.contains(e)) {
            if deg != v.valency(spec) {
                report.violations.push(format!("{v}: interior degree {deg} ≠ {}", v.valency(spec)));
            }
            report.interior_degrees.insert(deg);
        } else if deg >= v.valency(spec) {
            report.violations.push(format!("{v}: boundary degree {deg} too large"));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::normalize;

    fn spec() -> BuildingSpec {
        BuildingSpec::from_triple(4, 3, 9).unwrap()
    }

    fn w(raw: &[(Gen, u32)]) -> ChamberWord {
        normalize(raw.iter().copied(), spec().thickness()).unwrap()
    }

    fn kv(raw: &[(Gen, u32)]) -> TreeWallVertex {
        TreeWallVertex { side: Side::KPanel, rep: w(raw) }
    }

    fn ijv(raw: &[(Gen, u32)]) -> TreeWallVertex {
        TreeWallVertex { side: Side::IjResidue, rep: w(raw) }
    }

    #[test]
    fn vertex_examples() {
        assert_eq!(tw_vertices(&w(&[])), (kv(&[]), ijv(&[])));
        assert_eq!(
            tw_vertices(&w(&[(Gen::I, 1), (Gen::K, 2)])),
            (kv(&[(Gen::I, 1)]), ijv(&[(Gen::I, 1), (Gen::K, 2)]))
        );
        assert_eq!(tw_vertices(&w(&[(Gen::K, 3)])), (kv(&[]), ijv(&[(Gen::K, 3)])));
    }

    #[test]
    fn neighbour_examples() {
        let s = spec();
        let nk = tw_neighbours(&kv(&[]), &s);
        assert_eq!(nk.len(), 9);
        let nij = tw_neighbours(&ijv(&[]), &s);
        assert_eq!(nij.len(), 12);
        assert_eq!(nk[0], (ChamberWord::base(), ijv(&[])));
        let opp: BTreeSet<_> = nij.iter().map(|(_, v)| v.clone()).collect();
        assert_eq!(opp.len(), 12);
    }

    #[test]
    fn small_truncations() {
        let s = spec();
        let r0 = verify_treewall(&s, 0);
        assert!(r0.is_tree());
        assert_eq!((r0.edges, r0.vertices), (1, 2));
        let r2 = verify_treewall(&s, 2);
        assert!(r2.is_tree(), "{:?}", r2.violations);
        assert_eq!(r2.interior_degrees, BTreeSet::from([9, 12]));
    }

    #[test]
    fn geodesics() {
        let a = w(&[(Gen::I, 1)]);
        let b = w(&[(Gen::I, 2), (Gen::K, 3)]);
        let p = edge_path(&a, &b);
        // a and I2 share the base residue, then the k-panel of I2
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].vertex, ijv(&[]));
        assert_eq!(p[1].next, b);

        let c = w(&[(Gen::K, 1)]);
        let p = edge_path(&a, &c);
        assert_eq!(p.len(), 2);
        assert_eq!(p[0], PathStep { vertex: ijv(&[]), next: ChamberWord::base() });
        assert_eq!(p[1], PathStep { vertex: kv(&[]), next: c.clone() });

        assert!(edge_path(&c, &c).is_empty());
        assert_eq!(edge_path(&c, &ChamberWord::base()).len(), 1);
        assert_eq!(path_vertices(&b), vec![ijv(&[]), kv(&[(Gen::I, 2)])]);
    }

    #[test]
    fn canonical_reps() {
        assert!(kv(&[(Gen::I, 1)]).is_canonical());
        assert!(!kv(&[(Gen::K, 1)]).is_canonical());
        assert!(!ijv(&[(Gen::J, 1)]).is_canonical());
    }
}
