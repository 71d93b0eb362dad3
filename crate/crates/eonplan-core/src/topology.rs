//! Physical topology: nodes, amplified fiber spans and directed links.
//!
//! Topology files list each adjacency once; the loader materializes both
//! directions because spectrum state is tracked per direction. A file link
//! with id `k` becomes directed links `2k` (from -> to) and `2k + 1`
//! (to -> from).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a node, unique within a topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

/// Identifier of a directed link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A network site with co-located data centers and internet exchange points.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub name: String,
    pub dc_count: u32,
    pub ixp_count: u32,
}

/// One amplified fiber span. The booster exactly compensates the span loss.
#[derive(Debug, Clone, PartialEq)]
pub struct Span {
    pub length_km: f64,
    pub loss_db_per_km: f64,
    pub nf_db: f64,
}

impl Span {
    pub fn loss_db(&self) -> f64 {
        self.length_km * self.loss_db_per_km
    }
}

/// A directed link made of consecutive spans.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: LinkId,
    pub from: NodeId,
    pub to: NodeId,
    pub spans: Vec<Span>,
}

impl Link {
    pub fn total_length_km(&self) -> f64 {
        self.spans.iter().map(|s| s.length_km).sum()
    }
}

/// A validated directed topology with an adjacency index.
#[derive(Debug, Clone)]
pub struct Topology {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
    out_links: BTreeMap<NodeId, Vec<LinkId>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TopologyFile {
    nodes: Vec<NodeFile>,
    links: Vec<LinkFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeFile {
    id: u32,
    name: String,
    dc_count: u32,
    ixp_count: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct LinkFile {
    id: u32,
    from: u32,
    to: u32,
    spans: Vec<SpanFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpanFile {
    length_km: f64,
    loss_db_per_km: f64,
    nf_db: f64,
}

const GERMANY17: &str = include_str!("../data/germany17.json");
const ABILENE12: &str = include_str!("../data/abilene12.json");

impl Topology {
    /// Builds the adjacency index and checks every structural invariant.
    pub fn new(nodes: Vec<Node>, links: Vec<Link>) -> Result<Self> {
        let mut topo = Topology {
            nodes,
            links,
            out_links: BTreeMap::new(),
        };
        topo.rebuild_index();
        topo.validate()?;
        Ok(topo)
    }

    /// Parses the JSON topology schema and materializes both link directions.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: TopologyFile =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let nodes = file
            .nodes
            .into_iter()
            .map(|n| Node {
                id: NodeId(n.id),
                name: n.name,
                dc_count: n.dc_count,
                ixp_count: n.ixp_count,
            })
            .collect();
        let mut links = Vec::new();
        for l in file.links {
            let spans: Vec<Span> = l
                .spans
                .iter()
                .map(|s| Span {
                    length_km: s.length_km,
                    loss_db_per_km: s.loss_db_per_km,
                    nf_db: s.nf_db,
                })
                .collect();
            links.push(Link {
                id: LinkId(2 * l.id),
                from: NodeId(l.from),
                to: NodeId(l.to),
                spans: spans.clone(),
            });
            links.push(Link {
                id: LinkId(2 * l.id + 1),
                from: NodeId(l.to),
                to: NodeId(l.from),
                spans,
            });
        }
        Topology::new(nodes, links)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// Bundled 17-node German core network.
    pub fn germany17() -> Self {
        Self::from_json_str(GERMANY17).expect("bundled germany17 is valid")
    }

    /// Bundled 12-node US Abilene network.
    pub fn us_abilene12() -> Self {
        Self::from_json_str(ABILENE12).expect("bundled abilene12 is valid")
    }

    /// Looks up a bundled topology by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "germany17" => Some(Self::germany17()),
            "abilene12" | "us-abilene12" => Some(Self::us_abilene12()),
            _ => None,
        }
    }

    /// Serializes back to the file schema (one entry per undirected
    /// adjacency, the lower-id direction of each pair).
    pub fn to_json_string(&self) -> String {
        let nodes = self
            .nodes
            .iter()
            .map(|n| NodeFile {
                id: n.id.0,
                name: n.name.clone(),
                dc_count: n.dc_count,
                ixp_count: n.ixp_count,
            })
            .collect();
        let links = self
            .links
            .iter()
            .filter(|l| l.id.0 % 2 == 0)
            .map(|l| LinkFile {
                id: l.id.0 / 2,
                from: l.from.0,
                to: l.to.0,
                spans: l
                    .spans
                    .iter()
                    .map(|s| SpanFile {
                        length_km: s.length_km,
                        loss_db_per_km: s.loss_db_per_km,
                        nf_db: s.nf_db,
                    })
                    .collect(),
            })
            .collect();
        serde_json::to_string_pretty(&TopologyFile { nodes, links }).expect("serializable")
    }

    fn rebuild_index(&mut self) {
        self.out_links.clear();
        for node in &self.nodes {
            self.out_links.insert(node.id, Vec::new());
        }
        for link in &self.links {
            self.out_links.entry(link.from).or_default().push(link.id);
        }
        for ids in self.out_links.values_mut() {
            ids.sort_unstable();
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::EmptyTopology);
        }
        let mut node_ids = BTreeSet::new();
        for node in &self.nodes {
            if !node_ids.insert(node.id) {
                return Err(Error::DuplicateNode(node.id.0));
            }
        }
        let mut link_ids = BTreeSet::new();
        for link in &self.links {
            if !link_ids.insert(link.id) {
                return Err(Error::DuplicateLink(link.id.0));
            }
            if link.from == link.to {
                return Err(Error::SelfLoop(link.id.0));
            }
            for endpoint in [link.from, link.to] {
                if !node_ids.contains(&endpoint) {
                    return Err(Error::DanglingEndpoint {
                        link: link.id.0,
                        node: endpoint.0,
                    });
                }
            }
            if link.spans.is_empty() {
                return Err(Error::EmptySpans(link.id.0));
            }
            if link
                .spans
                .iter()
                .any(|s| s.length_km <= 0.0 || s.loss_db_per_km <= 0.0)
            {
                return Err(Error::BadSpan(link.id.0));
            }
        }
        // connectivity over the undirected view
        let start = self.nodes[0].id;
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for link in self.links.iter().filter(|l| l.from == u || l.to == u) {
                let v = if link.from == u { link.to } else { link.from };
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        if seen.len() != self.nodes.len() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes
            .iter()
            .find(|n| n.id == id)
            .ok_or(Error::UnknownNode(id))
    }

    pub fn link(&self, id: LinkId) -> Option<&Link> {
        self.links.iter().find(|l| l.id == id)
    }

    pub fn out_links(&self, id: NodeId) -> &[LinkId] {
        self.out_links.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of undirected adjacencies incident to the node.
    pub fn node_degree(&self, id: NodeId) -> Result<usize> {
        self.node(id)?;
        Ok(self.out_links(id).len())
    }

    /// Mean undirected node degree over all nodes.
    pub fn avg_node_degree(&self) -> f64 {
        if self.nodes.is_empty() {
            return 0.0;
        }
        let total: usize = self.nodes.iter().map(|n| self.out_links(n.id).len()).sum();
        total as f64 / self.nodes.len() as f64
    }

    pub fn undirected_link_count(&self) -> usize {
        self.links.len() / 2
    }

    /// Spans of the given directed links, concatenated in path order.
    pub fn path_spans(&self, links: &[LinkId]) -> Vec<Span> {
        links
            .iter()
            .filter_map(|id| self.link(*id))
            .flat_map(|l| l.spans.iter().cloned())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(nodes: &[(u32, u32, u32)], links: &[(u32, u32, u32, f64)]) -> Result<Topology> {
        let nodes = nodes
            .iter()
            .map(|&(id, dc, ixp)| Node {
                id: NodeId(id),
                name: format!("n{id}"),
                dc_count: dc,
                ixp_count: ixp,
            })
            .collect();
        let mut directed = Vec::new();
        for &(id, from, to, km) in links {
            let span = Span {
                length_km: km,
                loss_db_per_km: 0.2,
                nf_db: 4.3,
            };
            directed.push(Link {
                id: LinkId(2 * id),
                from: NodeId(from),
                to: NodeId(to),
                spans: vec![span.clone()],
            });
            directed.push(Link {
                id: LinkId(2 * id + 1),
                from: NodeId(to),
                to: NodeId(from),
                spans: vec![span],
            });
        }
        Topology::new(nodes, directed)
    }

    #[test]
    fn germany17_counts() {
        let topo = Topology::germany17();
        assert_eq!(topo.nodes.len(), 17);
        assert_eq!(topo.undirected_link_count(), 26);
        assert_eq!(topo.links.len(), 52);
    }

    #[test]
    fn abilene12_counts() {
        let topo = Topology::us_abilene12();
        assert_eq!(topo.nodes.len(), 12);
        assert_eq!(topo.undirected_link_count(), 15);
    }

    #[test]
    fn germany17_degrees() {
        let topo = Topology::germany17();
        let degrees: Vec<usize> = topo
            .nodes
            .iter()
            .map(|n| topo.node_degree(n.id).unwrap())
            .collect();
        assert_eq!(degrees.iter().max(), Some(&6));
        assert_eq!(degrees.iter().min(), Some(&2));
        assert!((topo.avg_node_degree() - 3.05).abs() < 0.01);
    }

    #[test]
    fn abilene_degrees() {
        let topo = Topology::us_abilene12();
        let degrees: Vec<usize> = topo
            .nodes
            .iter()
            .map(|n| topo.node_degree(n.id).unwrap())
            .collect();
        assert_eq!(degrees.iter().max(), Some(&4));
        assert_eq!(degrees.iter().min(), Some(&1));
        assert!((topo.avg_node_degree() - 2.5).abs() < 0.01);
    }

    #[test]
    fn dangling_endpoint_rejected() {
        let err = tiny(&[(0, 1, 0), (1, 1, 0)], &[(0, 0, 1, 50.0), (1, 1, 9, 50.0)]).unwrap_err();
        assert!(matches!(err, Error::DanglingEndpoint { node: 9, .. }));
    }

    #[test]
    fn disconnected_rejected() {
        let err = tiny(
            &[(0, 1, 0), (1, 1, 0), (2, 1, 0), (3, 1, 0)],
            &[(0, 0, 1, 50.0), (1, 2, 3, 50.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Disconnected));
    }

    #[test]
    fn non_positive_span_rejected() {
        let nodes = vec![
            Node {
                id: NodeId(0),
                name: "a".into(),
                dc_count: 0,
                ixp_count: 0,
            },
            Node {
                id: NodeId(1),
                name: "b".into(),
                dc_count: 0,
                ixp_count: 0,
            },
        ];
        let links = vec![Link {
            id: LinkId(0),
            from: NodeId(0),
            to: NodeId(1),
            spans: vec![Span {
                length_km: -3.0,
                loss_db_per_km: 0.2,
                nf_db: 4.3,
            }],
        }];
        assert!(matches!(
            Topology::new(nodes, links).unwrap_err(),
            Error::BadSpan(0)
        ));
    }

    #[test]
    fn isolated_node_has_degree_zero() {
        // degree is a pure lookup; validation only runs in the constructors
        let mut topo = tiny(&[(0, 1, 0), (1, 1, 0)], &[(0, 0, 1, 50.0)]).unwrap();
        topo.nodes.push(Node {
            id: NodeId(7),
            name: "island".into(),
            dc_count: 0,
            ixp_count: 0,
        });
        topo.rebuild_index();
        assert_eq!(topo.node_degree(NodeId(7)).unwrap(), 0);
        assert!(matches!(
            topo.node_degree(NodeId(42)),
            Err(Error::UnknownNode(NodeId(42)))
        ));
    }

    #[test]
    fn triangle_avg_degree() {
        let topo = tiny(
            &[(0, 1, 0), (1, 1, 0), (2, 1, 0)],
            &[(0, 0, 1, 1.0), (1, 1, 2, 1.0), (2, 0, 2, 3.0)],
        )
        .unwrap();
        assert_eq!(topo.avg_node_degree(), 2.0);
    }

    #[test]
    fn json_round_trip() {
        let topo = Topology::germany17();
        let again = Topology::from_json_str(&topo.to_json_string()).unwrap();
        assert_eq!(topo.nodes, again.nodes);
        assert_eq!(topo.links, again.links);
    }

    #[test]
    fn bundled_spans_stay_in_their_documented_ranges() {
        for (topo, lo, hi) in [
            (Topology::germany17(), 30.0, 120.0),
            (Topology::us_abilene12(), 20.0, 100.0),
        ] {
            for link in &topo.links {
                for span in &link.spans {
                    assert!(
                        (lo..=hi).contains(&span.length_km),
                        "span {} km outside [{lo}, {hi}]",
                        span.length_km
                    );
                    assert_eq!(span.nf_db, 4.3);
                    assert_eq!(span.loss_db_per_km, 0.2);
                }
            }
        }
    }

    #[test]
    fn bad_json_is_schema_error() {
        assert!(matches!(
            Topology::from_json_str("{\"nodes\": 7}").unwrap_err(),
            Error::Schema(_)
        ));
    }
}
