use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::Result;
use clap::ValueEnum;
use rabuild::treewall::{AdjacencyEntry, TreeWallTruncation};
use rabuild::{BuildingSpec, ChamberWord, Gen};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Ball,
    Treewall,
    Incidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dot,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallEdge {
    pub a: usize,
    pub b: usize,
    pub gen: Gen,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallGraph {
    pub radius: usize,
    pub chambers: Vec<ChamberWord>,
    pub edges: Vec<BallEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeWallGraph {
    pub radius: usize,
    pub adjacency: Vec<AdjacencyEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeClass {
    Chamber,
    IPanel,
    JPanel,
    KPanel,
    IjResidue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceNode {
    pub class: NodeClass,
    /// the shortest chamber of the panel or residue, or the chamber itself
    pub rep: ChamberWord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceGraph {
    pub radius: usize,
    pub nodes: Vec<IncidenceNode>,
    pub edges: Vec<(usize, usize)>,
}

pub fn ball_graph(spec: &BuildingSpec, r: usize) -> BallGraph {
    let chambers = spec.ball(r);
    let index: BTreeMap<&ChamberWord, usize> = chambers.iter().enumerate().map(|(n, c)| (c, n)).collect();
    let mut edges = Vec::new();
    for (a, c) in chambers.iter().enumerate() {
        for gen in Gen::ALL {
            for colour in 1..spec.q(gen) {
                let d = spec.step(c, gen, colour);
                if let Some(&b) = index.get(&d) {
                    if a < b {
                        edges.push(BallEdge { a, b, gen });
                    }
                }
            }
        }
    }
    BallGraph { radius: r, chambers, edges }
}

pub fn incidence_graph(spec: &BuildingSpec, r: usize) -> Result<IncidenceGraph> {
    let chambers = spec.ball(r);
    let mut nodes: Vec<IncidenceNode> = chambers.iter().map(|c| IncidenceNode { class: NodeClass::Chamber, rep: c.clone() }).collect();
    let mut index: BTreeMap<(NodeClass, ChamberWord), usize> = BTreeMap::new();
    let mut edges = Vec::new();
    for (n, c) in chambers.iter().enumerate() {
        let mut owners = vec![
            (NodeClass::IPanel, spec.panel_rep(c, Gen::I)),
            (NodeClass::JPanel, spec.panel_rep(c, Gen::J)),
            (NodeClass::KPanel, spec.panel_rep(c, Gen::K)),
        ];
        let res = spec.residue(c, &[Gen::I, Gen::J])?;
        owners.push((NodeClass::IjResidue, res[0].clone()));
        for key in owners {
            let id = *index.entry(key.clone()).or_insert_with(|| {
                nodes.push(IncidenceNode { class: key.0, rep: key.1.clone() });
                nodes.len() - 1
            });
            edges.push((n, id));
        }
    }
    Ok(IncidenceGraph { radius: r, nodes, edges })
}

fn ball_dot(g: &BallGraph) -> String {
    let mut out = String::from("graph ball {\n");
    for (n, c) in g.chambers.iter().enumerate() {
        let _ = writeln!(out, "  c{n} [label=\"{c}\"];");
    }
    for e in &g.edges {
        let _ = writeln!(out, "  c{} -- c{} [label=\"{}\"];", e.a, e.b, e.gen);
    }
    out.push_str("}\n");
    out
}

fn incidence_dot(g: &IncidenceGraph) -> String {
    let mut out = String::from("graph incidence {\n");
    for (n, node) in g.nodes.iter().enumerate() {
        let (class, shape, colour) = match node.class {
            NodeClass::Chamber => ("chamber", "point", "black"),
            NodeClass::IPanel => ("i_panel", "box", "red"),
            NodeClass::JPanel => ("j_panel", "box", "blue"),
            NodeClass::KPanel => ("k_panel", "box", "darkgreen"),
            NodeClass::IjResidue => ("ij_residue", "ellipse", "gray"),
        };
        let _ = writeln!(out, "  n{n} [class=\"{class}\", shape={shape}, color={colour}, label=\"{}\"];", node.rep);
    }
    for (a, b) in &g.edges {
        let _ = writeln!(out, "  n{a} -- n{b};");
    }
    out.push_str("}\n");
    out
}

pub fn render(spec: &BuildingSpec, target: Target, format: Format, r: usize) -> Result<String> {
    let text = match (target, format) {
        (Target::Ball, Format::Dot) => ball_dot(&ball_graph(spec, r)),
        (Target::Ball, Format::Json) => serde_json::to_string_pretty(&ball_graph(spec, r))?,
        (Target::Treewall, Format::Dot) => TreeWallTruncation::build(spec, r).to_dot(),
        (Target::Treewall, Format::Json) => {
            let t = TreeWallTruncation::build(spec, r);
            serde_json::to_string_pretty(&TreeWallGraph { radius: r, adjacency: t.adjacency() })?
        }
        (Target::Incidence, Format::Dot) => incidence_dot(&incidence_graph(spec, r)?),
        (Target::Incidence, Format::Json) => serde_json::to_string_pretty(&incidence_graph(spec, r)?)?,
    };
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> BuildingSpec {
        BuildingSpec::from_triple(4, 3, 9).unwrap()
    }

    #[test]
    fn ball_zero_is_a_point() {
        let g = ball_graph(&spec(), 0);
        assert_eq!((g.chambers.len(), g.edges.len()), (1, 0));
    }

    #[test]
    fn ball_one_edges() {
        // only the three base panels lie inside ball(1), each a clique
        let g = ball_graph(&spec(), 1);
        assert_eq!(g.chambers.len(), 14);
        assert_eq!(g.edges.len(), 6 + 3 + 36);
    }

    #[test]
    fn incidence_counts() {
        let g = incidence_graph(&spec(), 1).unwrap();
        let count = |c| g.nodes.iter().filter(|n| n.class == c).count();
        assert_eq!(count(NodeClass::Chamber), 14);
        assert_eq!(count(NodeClass::IjResidue), 9);
        assert_eq!(g.edges.len(), 14 * 4);
    }
}
