//! Implications between the finite-increment statements.
//!
//! Nodes are the nine statements; each arc records the argument that
//! justifies it. Equivalences are stored as two arcs. Nothing leaves `FCD`:
//! whether it implies anything else here is left open.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use petgraph::algo::{has_path_connecting, tarjan_scc};
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Statement {
    Iaf,
    IafPrime,
    Iafg,
    Maja,
    Svd,
    Fcd,
    Rolle,
    Taf,
    DarbouxAndSvd,
}

impl Statement {
    pub const ALL: [Statement; 9] = [
        Statement::Iaf,
        Statement::IafPrime,
        Statement::Iafg,
        Statement::Maja,
        Statement::Svd,
        Statement::Fcd,
        Statement::Rolle,
        Statement::Taf,
        Statement::DarbouxAndSvd,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Statement::Iaf => "IAF",
            Statement::IafPrime => "IAF'",
            Statement::Iafg => "IAFG",
            Statement::Maja => "MAJA",
            Statement::Svd => "SVD",
            Statement::Fcd => "FCD",
            Statement::Rolle => "Rolle",
            Statement::Taf => "TAF",
            Statement::DarbouxAndSvd => "DarbouxAndSVD",
        }
    }

    pub fn note(&self) -> &'static str {
        match self {
            Statement::Iaf => "|f'| <= k implies |f(b) - f(a)| <= k(b - a)",
            Statement::IafPrime => "m <= f' <= M implies m(b - a) <= f(b) - f(a) <= M(b - a)",
            Statement::Iafg => "|f'| <= g' implies |f(b) - f(a)| <= g(b) - g(a)",
            Statement::Maja => "f' <= M implies f(b) - f(a) <= M(b - a)",
            Statement::Svd => "f' >= 0 implies f nondecreasing",
            Statement::Fcd => "f' = 0 implies f constant",
            Statement::Rolle => "f(a) = f(b) implies f'(c) = 0 for some interior c",
            Statement::Taf => "f(b) - f(a) = f'(c)(b - a) for some interior c",
            Statement::DarbouxAndSvd => "derivatives have the intermediate value property, together with SVD",
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Statement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', '-', ' '], "");
        let found = match key.as_str() {
            "iaf" => Statement::Iaf,
            "iaf'" | "iafprime" | "iafp" => Statement::IafPrime,
            "iafg" => Statement::Iafg,
            "maja" => Statement::Maja,
            "svd" => Statement::Svd,
            "fcd" => Statement::Fcd,
            "rolle" => Statement::Rolle,
            "taf" | "mvt" => Statement::Taf,
            "darbouxandsvd" | "darboux+svd" | "darboux" => Statement::DarbouxAndSvd,
            _ => return Err(Error::UnknownStatement(s.to_string())),
        };
        Ok(found)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Implication {
    pub from: Statement,
    pub to: Statement,
    pub source: &'static str,
}

use Statement::*;

const EQUIVALENCES: &[(Statement, Statement, &str)] = &[
    (Iaf, IafPrime, "increments diagram: IAF' with m = -k, M = k; conversely IAF applied to f - mx and Mx - f"),
    (Iafg, Svd, "increments diagram: SVD applied to g - f and g + f; conversely IAFG with f = 0"),
    (Rolle, Taf, "Rolle/TAF/Darboux diagram: Rolle applied to the chord-corrected auxiliary"),
    (Taf, DarbouxAndSvd, "Rolle/TAF/Darboux diagram"),
    (Rolle, DarbouxAndSvd, "Rolle/TAF/Darboux diagram"),
];

const ARCS: &[(Statement, Statement, &str)] = &[
    (Iafg, Iaf, "increments diagram: IAFG with g = kx"),
    (Iafg, Maja, "increments remark (ii): IAFG applied to the pair (0, Mx - f)"),
    (Maja, Svd, "increments remark (iii): MAJA applied to the pair (-f, 0)"),
    (Svd, Iafg, "increments remark (iv): SVD applied to g - f and g + f"),
    (Maja, Iafg, "increments diagram: MAJA applied to f - g and -f - g"),
    (Svd, Maja, "increments diagram: SVD applied to Mx - f"),
    (Maja, Iaf, "increments diagram (*): MAJA applied to f and -f"),
    (Maja, IafPrime, "increments diagram (*): MAJA applied to f and -f"),
    (Svd, IafPrime, "increments diagram: SVD applied to f - mx and Mx - f"),
    (Iaf, Fcd, "increments diagram: IAF with k = 0"),
    (IafPrime, Fcd, "increments diagram (#): f' = 0 is both >= 0 and <= 0, so f is constant"),
    (Taf, Iaf, "TAF/FCD placement diagram: |f'(c)| <= k bounds the increment"),
    (Taf, Svd, "TAF/FCD placement diagram: f'(c) >= 0 gives f(b) >= f(a)"),
    (Taf, Maja, "first consequences of TAF: f'(c) <= M bounds the increment"),
    (Taf, Fcd, "TAF/FCD placement diagram (*): TAF applied to a pair with f(a) != f(b)"),
    (Svd, Fcd, "TAF/FCD placement diagram: f and -f both nondecreasing"),
];

/// All encoded arcs, equivalences expanded into both directions.
pub fn implications() -> Vec<Implication> {
    let mut out = Vec::new();
    for &(a, b, source) in EQUIVALENCES {
        out.push(Implication { from: a, to: b, source });
        out.push(Implication { from: b, to: a, source });
    }
    out.extend(ARCS.iter().map(|&(from, to, source)| Implication { from, to, source }));
    out
}

#[derive(Debug, Clone)]
pub struct TheoremGraph {
    graph: DiGraph<Statement, &'static str>,
    index: HashMap<Statement, NodeIndex>,
}

pub fn build_graph() -> TheoremGraph {
    let mut graph = DiGraph::new();
    let index: HashMap<_, _> = Statement::ALL.iter().map(|&s| (s, graph.add_node(s))).collect();
    for imp in implications() {
        graph.add_edge(index[&imp.from], index[&imp.to], imp.source);
    }
    TheoremGraph { graph, index }
}

impl TheoremGraph {
    pub fn edges(&self) -> Vec<Implication> {
        self.graph
            .edge_indices()
            .map(|e| {
                let (a, b) = self.graph.edge_endpoints(e).expect("edge exists");
                Implication { from: self.graph[a], to: self.graph[b], source: self.graph[e] }
            })
            .collect()
    }

    pub fn has_edge(&self, from: Statement, to: Statement) -> bool {
        self.graph.contains_edge(self.index[&from], self.index[&to])
    }

    /// Reachability; every statement implies itself.
    pub fn implies(&self, from: Statement, to: Statement) -> bool {
        has_path_connecting(&self.graph, self.index[&from], self.index[&to], None)
    }

    pub fn implies_by_name(&self, from: &str, to: &str) -> Result<bool> {
        Ok(self.implies(from.parse()?, to.parse()?))
    }

    /// Strongly connected components, each sorted, ordered by first member.
    pub fn equivalence_classes(&self) -> Vec<Vec<Statement>> {
        let mut classes: Vec<Vec<Statement>> = tarjan_scc(&self.graph)
            .into_iter()
            .map(|c| {
                let mut c: Vec<_> = c.into_iter().map(|i| self.graph[i]).collect();
                c.sort();
                c
            })
            .collect();
        classes.sort();
        classes
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph implications {\n");
        for s in Statement::ALL {
            out.push_str(&format!("  \"{}\" [tooltip=\"{}\"];\n", s.id(), s.note()));
        }
        for e in self.edges() {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                e.from.id(),
                e.to.id(),
                e.source.replace('"', "'")
            ));
        }
        out.push_str("}\n");
        out
    }
}
