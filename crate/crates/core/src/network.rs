//! Layered multicast network generators and structural transformations.
//!
//! All families are three-layer directed acyclic multigraphs: one source,
//! `r` middle nodes, and one receiver per subset of middle nodes, plus
//! family-specific parallel bundles and direct source-to-receiver links.
//! Edges carry an explicit multiplicity index so coding coefficients attach
//! unambiguously to parallel edges.
//!
//! Receivers are indexed by the lexicographic rank of their middle-node
//! subset; every report downstream cites that index.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("subset size s = {s} exceeds middle-layer size r = {r}")]
    SubsetTooLarge { s: usize, r: usize },
    #[error("parameter {name} must be at least {min}, got {got}")]
    ParameterTooSmall {
        name: &'static str,
        min: usize,
        got: usize,
    },
    #[error("receiver index {0} out of range ({1} receivers)")]
    UnknownReceiver(usize, usize),
    #[error("network json is inconsistent: {0}")]
    BadJson(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layer {
    Source,
    Middle,
    Relay,
    Receiver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// One edge per middle node, one receiver per s-subset.
    Combination,
    /// `ell` parallel edges per bundle, pair receivers, one direct link.
    Star,
    /// `ell` parallel edges per bundle, pair receivers, `ell - 1` direct links.
    Plus,
    /// Combination with s = h = 3 plus one direct link per receiver.
    Tilde,
}

/// Family descriptor; retained through transformations so reports can cite
/// provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub kind: FamilyKind,
    pub h: usize,
    pub r: usize,
    /// Receiver subset size (middle nodes watched per receiver).
    pub s: usize,
    /// Parallel-bundle width; 1 for combination/tilde.
    pub ell: usize,
    /// Direct source-to-receiver links per receiver.
    pub direct_links: usize,
    /// Applied structural transformations, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transforms: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    /// Index within a parallel bundle (0 for simple edges).
    pub mult: usize,
}

/// A receiver with its canonical in-edge order: middle-node bundles first
/// (subset order, multiplicity order), then direct links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Receiver {
    pub node: usize,
    pub in_edges: Vec<usize>,
    /// Indices into the middle-node list, ascending.
    pub middle_set: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Network {
    family: Family,
    h: usize,
    layers: Vec<Layer>,
    edges: Vec<Edge>,
    source: usize,
    middles: Vec<usize>,
    receivers: Vec<Receiver>,
}

impl Network {
    /// The combination network: a source, `r` middle nodes fed by one edge
    /// each, and one receiver per s-subset of middle nodes (lexicographic
    /// subset order), wired with one edge per watched node.
    pub fn combination(h: usize, r: usize, s: usize) -> Result<Network, NetworkError> {
        if s > r {
            return Err(NetworkError::SubsetTooLarge { s, r });
        }
        let family = Family {
            kind: FamilyKind::Combination,
            h,
            r,
            s,
            ell: 1,
            direct_links: 0,
            transforms: Vec::new(),
        };
        Ok(Self::build_three_layer(family))
    }

    /// The star variant for `h = 2 ell` messages: `ell` parallel edges from
    /// the source to each middle node, one receiver per pair of middle nodes
    /// with `ell` parallel edges per watched node, and one direct
    /// source-to-receiver link.
    pub fn star(ell: usize, r: usize) -> Result<Network, NetworkError> {
        if ell < 2 {
            return Err(NetworkError::ParameterTooSmall {
                name: "ell",
                min: 2,
                got: ell,
            });
        }
        if r < 2 {
            return Err(NetworkError::ParameterTooSmall {
                name: "r",
                min: 2,
                got: r,
            });
        }
        let family = Family {
            kind: FamilyKind::Star,
            h: 2 * ell,
            r,
            s: 2,
            ell,
            direct_links: 1,
            transforms: Vec::new(),
        };
        Ok(Self::build_three_layer(family))
    }

    /// As [`Network::star`], but with `ell - 1` direct links per receiver.
    /// For `ell = 2` the two families coincide.
    pub fn plus(ell: usize, r: usize) -> Result<Network, NetworkError> {
        if ell < 2 {
            return Err(NetworkError::ParameterTooSmall {
                name: "ell",
                min: 2,
                got: ell,
            });
        }
        if r < 2 {
            return Err(NetworkError::ParameterTooSmall {
                name: "r",
                min: 2,
                got: r,
            });
        }
        let family = Family {
            kind: FamilyKind::Plus,
            h: 2 * ell,
            r,
            s: 2,
            ell,
            direct_links: ell - 1,
            transforms: Vec::new(),
        };
        Ok(Self::build_three_layer(family))
    }

    /// The three-message variant: combination(3, r, 3) plus one direct
    /// source-to-receiver link, so every receiver has in-degree 4.
    pub fn tilde(r: usize) -> Result<Network, NetworkError> {
        if r < 3 {
            return Err(NetworkError::ParameterTooSmall {
                name: "r",
                min: 3,
                got: r,
            });
        }
        let family = Family {
            kind: FamilyKind::Tilde,
            h: 3,
            r,
            s: 3,
            ell: 1,
            direct_links: 1,
            transforms: Vec::new(),
        };
        Ok(Self::build_three_layer(family))
    }

    fn build_three_layer(family: Family) -> Network {
        let r = family.r;
        let s = family.s;
        let ell = family.ell;
        let mut layers = vec![Layer::Source];
        let source = 0usize;
        let middles: Vec<usize> = (0..r)
            .map(|_| {
                layers.push(Layer::Middle);
                layers.len() - 1
            })
            .collect();

        let mut edges: Vec<Edge> = Vec::new();
        // source -> middle bundles, middle index then multiplicity
        let mut middle_in: Vec<Vec<usize>> = vec![Vec::new(); r];
        for (mi, &mnode) in middles.iter().enumerate() {
            for mult in 0..ell {
                middle_in[mi].push(edges.len());
                edges.push(Edge {
                    tail: source,
                    head: mnode,
                    mult,
                });
            }
        }

        // one receiver per s-subset, lexicographic order
        let mut receivers = Vec::new();
        for subset in subsets(r, s) {
            layers.push(Layer::Receiver);
            let node = layers.len() - 1;
            let mut in_edges = Vec::with_capacity(s * ell + family.direct_links);
            for &mi in &subset {
                for mult in 0..ell {
                    in_edges.push(edges.len());
                    edges.push(Edge {
                        tail: middles[mi],
                        head: node,
                        mult,
                    });
                }
            }
            for mult in 0..family.direct_links {
                in_edges.push(edges.len());
                edges.push(Edge {
                    tail: source,
                    head: node,
                    mult,
                });
            }
            receivers.push(Receiver {
                node,
                in_edges,
                middle_set: subset,
            });
        }

        Network {
            h: family.h,
            family,
            layers,
            edges,
            source,
            middles,
            receivers,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Message count the receivers demand.
    pub fn h(&self) -> usize {
        self.h
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn node_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, node: usize) -> Layer {
        self.layers[node]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn middles(&self) -> &[usize] {
        &self.middles
    }

    pub fn receivers(&self) -> &[Receiver] {
        &self.receivers
    }

    /// Overrides the declared message count (used by the odd-message
    /// variants built with extra direct links).
    pub fn with_message_count(mut self, h: usize) -> Network {
        self.h = h;
        self.family.h = h;
        self
    }

    /// Adds `count` extra direct source-to-receiver edges to every receiver.
    /// The new edges sit after each receiver's existing in-edges, with
    /// multiplicity indices continuing the direct-link bundle.
    pub fn add_direct_links(&self, count: usize) -> Network {
        let mut out = self.clone();
        if count == 0 {
            return out;
        }
        for ridx in 0..out.receivers.len() {
            let node = out.receivers[ridx].node;
            for extra in 0..count {
                let id = out.edges.len();
                out.edges.push(Edge {
                    tail: out.source,
                    head: node,
                    mult: out.family.direct_links + extra,
                });
                out.receivers[ridx].in_edges.push(id);
            }
        }
        out.family.direct_links += count;
        out
    }

    /// In-edges of a node in edge-id order.
    pub fn in_edges(&self, node: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.head == node)
            .map(|(i, _)| i)
            .collect()
    }

    /// Out-edges of a node in edge-id order.
    pub fn out_edges(&self, node: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.tail == node)
            .map(|(i, _)| i)
            .collect()
    }

    /// Max-flow from the source to the given receiver with unit capacities.
    pub fn min_cut(&self, receiver: usize) -> Result<usize, NetworkError> {
        let rec = self
            .receivers
            .get(receiver)
            .ok_or(NetworkError::UnknownReceiver(receiver, self.receivers.len()))?;
        Ok(max_flow_unit(self.node_count(), &self.edges, self.source, rec.node))
    }

    /// Replaces every receiver by a relay chain that forces its min-cut down
    /// to the message count: the old receiver node becomes a relay feeding
    /// `h` fresh relays, each wired to a fresh receiver.
    pub fn normalize_min_cut(&self) -> Transform {
        let mut net = self.clone();
        let h = net.h;
        let mut edge_origin: Vec<EdgeOrigin> =
            (0..net.edges.len()).map(EdgeOrigin::Copied).collect();
        for ridx in 0..net.receivers.len() {
            let old_node = net.receivers[ridx].node;
            net.layers[old_node] = Layer::Relay;
            let mut new_in = Vec::with_capacity(h);
            let mut hops = Vec::with_capacity(h);
            for j in 0..h {
                net.layers.push(Layer::Relay);
                let hop = net.layers.len() - 1;
                hops.push(hop);
                edge_origin.push(EdgeOrigin::MessageBlock(j));
                net.edges.push(Edge {
                    tail: old_node,
                    head: hop,
                    mult: 0,
                });
            }
            net.layers.push(Layer::Receiver);
            let new_receiver = net.layers.len() - 1;
            for (j, &hop) in hops.iter().enumerate() {
                new_in.push(net.edges.len());
                edge_origin.push(EdgeOrigin::MessageBlock(j));
                net.edges.push(Edge {
                    tail: hop,
                    head: new_receiver,
                    mult: 0,
                });
            }
            let middle_set = net.receivers[ridx].middle_set.clone();
            net.receivers[ridx] = Receiver {
                node: new_receiver,
                in_edges: new_in,
                middle_set,
            };
        }
        net.family.transforms.push("normalize-min-cut".to_string());
        Transform {
            network: net,
            edge_origin,
        }
    }

    /// Replaces every parallel bundle by disjoint length-2 paths through
    /// fresh relay nodes, yielding a simple graph with the same min-cuts.
    pub fn remove_parallel_edges(&self) -> Transform {
        let mut layers = self.layers.clone();
        let mut new_edges: Vec<Edge> = Vec::new();
        let mut edge_origin: Vec<EdgeOrigin> = Vec::new();
        // edge id -> the id of its tail-half replacement (or copy)
        let mut replacement: Vec<usize> = vec![usize::MAX; self.edges.len()];

        // bundle width per (tail, head)
        let mut width: std::collections::HashMap<(usize, usize), usize> =
            std::collections::HashMap::new();
        for e in &self.edges {
            *width.entry((e.tail, e.head)).or_insert(0) += 1;
        }

        for (id, e) in self.edges.iter().enumerate() {
            if width[&(e.tail, e.head)] == 1 {
                replacement[id] = new_edges.len();
                edge_origin.push(EdgeOrigin::Copied(id));
                new_edges.push(Edge {
                    tail: e.tail,
                    head: e.head,
                    mult: 0,
                });
            } else {
                layers.push(Layer::Relay);
                let hop = layers.len() - 1;
                edge_origin.push(EdgeOrigin::Copied(id));
                new_edges.push(Edge {
                    tail: e.tail,
                    head: hop,
                    mult: 0,
                });
                replacement[id] = new_edges.len();
                edge_origin.push(EdgeOrigin::Copied(id));
                new_edges.push(Edge {
                    tail: hop,
                    head: e.head,
                    mult: 0,
                });
            }
        }

        let receivers = self
            .receivers
            .iter()
            .map(|r| Receiver {
                node: r.node,
                in_edges: r.in_edges.iter().map(|&e| replacement[e]).collect(),
                middle_set: r.middle_set.clone(),
            })
            .collect();

        let mut family = self.family.clone();
        family.transforms.push("remove-parallel-edges".to_string());
        Transform {
            network: Network {
                family,
                h: self.h,
                layers,
                edges: new_edges,
                source: self.source,
                middles: self.middles.clone(),
                receivers,
            },
            edge_origin,
        }
    }

    /// True when no two edges share both endpoints.
    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges.iter().all(|e| seen.insert((e.tail, e.head)))
    }

    /// Nodes in a topological order; `None` when the edge list has a cycle.
    pub fn try_topological_order(&self) -> Option<Vec<usize>> {
        let n = self.node_count();
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            indeg[e.head] += 1;
        }
        let mut queue: std::collections::VecDeque<usize> = (0..n)
            .filter(|&v| indeg[v] == 0)
            .collect();
        let mut order = Vec::with_capacity(n);
        let out_adj = {
            let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
            for e in &self.edges {
                adj[e.tail].push(e.head);
            }
            adj
        };
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &out_adj[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Nodes in a topological order (generated networks are layered DAGs).
    pub fn topological_order(&self) -> Vec<usize> {
        self.try_topological_order()
            .expect("network must be acyclic")
    }
}

/// Where each edge of a transformed network takes its coding matrix from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrigin {
    /// Same global coding matrix as the original edge.
    Copied(usize),
    /// Selects message block `j` (valid when the feeding relay can decode).
    MessageBlock(usize),
}

/// A transformed network together with the per-edge provenance needed to
/// map a network code across the transformation.
#[derive(Debug, Clone)]
pub struct Transform {
    pub network: Network,
    pub edge_origin: Vec<EdgeOrigin>,
}

/// All s-subsets of 0..n in lexicographic order.
fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if s > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..s).collect();
    loop {
        out.push(cur.clone());
        // advance
        let mut i = s;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] + 1 <= n - (s - i) {
                cur[i] += 1;
                for j in i + 1..s {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Dinic max-flow with unit edge capacities.
fn max_flow_unit(n: usize, edges: &[Edge], source: usize, sink: usize) -> usize {
    struct FlowEdge {
        to: usize,
        cap: i32,
        rev: usize,
    }
    let mut graph: Vec<Vec<FlowEdge>> = (0..n).map(|_| Vec::new()).collect();
    for e in edges {
        let a = graph[e.tail].len();
        let b = graph[e.head].len();
        graph[e.tail].push(FlowEdge {
            to: e.head,
            cap: 1,
            rev: b,
        });
        graph[e.head].push(FlowEdge {
            to: e.tail,
            cap: 0,
            rev: a,
        });
    }

    let mut flow = 0usize;
    loop {
        // BFS level graph
        let mut level = vec![usize::MAX; n];
        level[source] = 0;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for e in &graph[v] {
                if e.cap > 0 && level[e.to] == usize::MAX {
                    level[e.to] = level[v] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        if level[sink] == usize::MAX {
            return flow;
        }
        // DFS blocking flow
        let mut iter = vec![0usize; n];
        fn dfs(
            graph: &mut Vec<Vec<FlowEdge>>,
            level: &[usize],
            iter: &mut [usize],
            v: usize,
            sink: usize,
        ) -> bool {
            if v == sink {
                return true;
            }
            while iter[v] < graph[v].len() {
                let (to, cap, rev) = {
                    let e = &graph[v][iter[v]];
                    (e.to, e.cap, e.rev)
                };
                if cap > 0 && level[to] == level[v] + 1 && dfs(graph, level, iter, to, sink) {
                    graph[v][iter[v]].cap -= 1;
                    graph[to][rev].cap += 1;
                    return true;
                }
                iter[v] += 1;
            }
            false
        }
        while dfs(&mut graph, &level, &mut iter, source, sink) {
            flow += 1;
        }
    }
}

/// JSON shape: `{family, h, nodes, edges}`; receivers and bundles are
/// reconstructed from the edge list (in-edge order is edge-id order).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkJson {
    pub family: Family,
    pub h: usize,
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: usize,
    pub layer: Layer,
}

impl From<&Network> for NetworkJson {
    fn from(n: &Network) -> Self {
        NetworkJson {
            family: n.family.clone(),
            h: n.h,
            nodes: n
                .layers
                .iter()
                .enumerate()
                .map(|(id, &layer)| NodeJson { id, layer })
                .collect(),
            edges: n.edges.clone(),
        }
    }
}

impl NetworkJson {
    pub fn build(&self) -> Result<Network, NetworkError> {
        let n = self.nodes.len();
        for (i, nd) in self.nodes.iter().enumerate() {
            if nd.id != i {
                return Err(NetworkError::BadJson(format!(
                    "node ids must be dense, got {} at position {i}",
                    nd.id
                )));
            }
        }
        for e in &self.edges {
            if e.tail >= n || e.head >= n {
                return Err(NetworkError::BadJson("edge endpoint out of range".into()));
            }
        }
        let layers: Vec<Layer> = self.nodes.iter().map(|nd| nd.layer).collect();
        let source = layers
            .iter()
            .position(|&l| l == Layer::Source)
            .ok_or_else(|| NetworkError::BadJson("no source node".into()))?;
        if layers.iter().filter(|&&l| l == Layer::Source).count() != 1 {
            return Err(NetworkError::BadJson("multiple source nodes".into()));
        }
        let middles: Vec<usize> = layers
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == Layer::Middle)
            .map(|(i, _)| i)
            .collect();
        let middle_rank: std::collections::HashMap<usize, usize> = middles
            .iter()
            .enumerate()
            .map(|(rank, &node)| (node, rank))
            .collect();
        let receivers: Vec<Receiver> = layers
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == Layer::Receiver)
            .map(|(node, _)| {
                let in_edges: Vec<usize> = self
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.head == node)
                    .map(|(i, _)| i)
                    .collect();
                let mut middle_set: Vec<usize> = in_edges
                    .iter()
                    .filter_map(|&e| middle_rank.get(&self.edges[e].tail).copied())
                    .collect();
                middle_set.dedup();
                Receiver {
                    node,
                    in_edges,
                    middle_set,
                }
            })
            .collect();
        let net = Network {
            family: self.family.clone(),
            h: self.h,
            layers,
            edges: self.edges.clone(),
            source,
            middles,
            receivers,
        };
        if net.try_topological_order().is_none() {
            return Err(NetworkError::BadJson("edge list has a cycle".into()));
        }
        Ok(net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_shapes() {
        let n = Network::combination(2, 2, 2).unwrap();
        assert_eq!(n.receivers().len(), 1);
        assert_eq!(n.receivers()[0].in_edges.len(), 2);

        let n = Network::combination(3, 5, 3).unwrap();
        assert_eq!(n.receivers().len(), 10); // C(5,3)

        let n = Network::combination(4, 6, 4).unwrap();
        assert_eq!(n.receivers().len(), 15); // C(6,4)
        for r in n.receivers() {
            assert_eq!(r.in_edges.len(), 4);
        }
        assert!(Network::combination(2, 3, 4).is_err());
    }

    #[test]
    fn star_shapes_and_min_cut() {
        let n = Network::star(2, 3).unwrap();
        assert_eq!(n.h(), 4);
        assert_eq!(n.receivers().len(), 3);
        for (i, r) in n.receivers().iter().enumerate() {
            assert_eq!(r.in_edges.len(), 5); // 2 + 2 + 1
            assert_eq!(n.min_cut(i).unwrap(), 5); // h + 1
        }

        let n = Network::star(2, 16).unwrap();
        assert_eq!(n.receivers().len(), 120); // C(16,2)

        let n = Network::star(3, 4).unwrap();
        assert_eq!(n.receivers().len(), 6);
        for (i, r) in n.receivers().iter().enumerate() {
            assert_eq!(r.in_edges.len(), 7); // 3 + 3 + 1
            assert_eq!(n.min_cut(i).unwrap(), 7);
        }
    }

    #[test]
    fn plus_shapes() {
        // ell = 2: identical topology to star
        let s = Network::star(2, 4).unwrap();
        let p = Network::plus(2, 4).unwrap();
        assert_eq!(s.edges(), p.edges());

        let p = Network::plus(3, 4).unwrap();
        for r in p.receivers() {
            assert_eq!(r.in_edges.len(), 8); // 3 + 3 + 2
        }
        let p = Network::plus(4, 3).unwrap();
        assert_eq!(p.receivers().len(), 3);
        for r in p.receivers() {
            assert_eq!(r.in_edges.len(), 11); // 4 + 4 + 3
        }
    }

    #[test]
    fn tilde_shapes() {
        let n = Network::tilde(3).unwrap();
        assert_eq!(n.receivers().len(), 1);
        assert_eq!(n.receivers()[0].in_edges.len(), 4);

        let n = Network::tilde(5).unwrap();
        assert_eq!(n.receivers().len(), 10);

        let n = Network::tilde(43).unwrap();
        assert_eq!(n.receivers().len(), 12341); // C(43,3)
    }

    #[test]
    fn add_direct_links_grows_in_degree() {
        let n = Network::star(2, 4).unwrap();
        let same = n.add_direct_links(0);
        assert_eq!(same.edges().len(), n.edges().len());

        let odd = n.add_direct_links(1).with_message_count(5);
        assert_eq!(odd.h(), 5);
        for r in odd.receivers() {
            assert_eq!(r.in_edges.len(), 6);
        }

        // tilde is definitionally combination(3, r, 3) plus one link:
        // same in-edge tails per receiver (edge ids differ by insertion order)
        let t = Network::tilde(4).unwrap();
        let c = Network::combination(3, 4, 3).unwrap().add_direct_links(1);
        assert_eq!(t.edges().len(), c.edges().len());
        for (a, b) in t.receivers().iter().zip(c.receivers()) {
            let tails = |net: &Network, r: &Receiver| -> Vec<usize> {
                r.in_edges.iter().map(|&e| net.edges()[e].tail).collect()
            };
            assert_eq!(tails(&t, a), tails(&c, b));
        }
    }

    #[test]
    fn combination_min_cut_is_h() {
        let n = Network::combination(3, 5, 3).unwrap();
        for i in 0..n.receivers().len() {
            assert_eq!(n.min_cut(i).unwrap(), 3);
        }
    }

    #[test]
    fn normalize_min_cut_drops_to_h() {
        let n = Network::star(2, 5).unwrap();
        for i in 0..n.receivers().len() {
            assert_eq!(n.min_cut(i).unwrap(), 5);
        }
        let t = n.normalize_min_cut();
        for i in 0..t.network.receivers().len() {
            assert_eq!(t.network.min_cut(i).unwrap(), 4); // h
        }
        // (1 + h) nodes and 2h edges per receiver
        assert_eq!(
            t.network.node_count(),
            n.node_count() + n.receivers().len() * (1 + n.h())
        );
        assert_eq!(
            t.network.edges().len(),
            n.edges().len() + n.receivers().len() * 2 * n.h()
        );

        // combination already has min-cut h; it stays h
        let c = Network::combination(3, 5, 3).unwrap();
        let tc = c.normalize_min_cut();
        for i in 0..tc.network.receivers().len() {
            assert_eq!(tc.network.min_cut(i).unwrap(), 3);
        }
    }

    #[test]
    fn remove_parallel_edges_yields_simple_graph() {
        let n = Network::star(2, 3).unwrap();
        assert!(!n.is_simple());
        let t = n.remove_parallel_edges();
        assert!(t.network.is_simple());
        // min-cut preserved per receiver
        for i in 0..n.receivers().len() {
            assert_eq!(
                n.min_cut(i).unwrap(),
                t.network.min_cut(i).unwrap()
            );
        }

        // a simple network is unchanged
        let c = Network::combination(3, 4, 3).unwrap();
        let tc = c.remove_parallel_edges();
        assert_eq!(tc.network.edges().len(), c.edges().len());
        assert!(tc.network.is_simple());
    }

    #[test]
    fn min_cut_matches_brute_force_on_small_nets() {
        // independent oracle: minimum number of edges whose removal
        // disconnects source from receiver, by subset enumeration
        fn brute_min_cut(net: &Network, ridx: usize) -> usize {
            let sink = net.receivers()[ridx].node;
            let edges = net.edges();
            let relevant: Vec<usize> = (0..edges.len()).collect();
            assert!(relevant.len() <= 20, "too many edges for brute force");
            let mut best = usize::MAX;
            'outer: for mask in 0u32..(1 << relevant.len()) {
                let size = mask.count_ones() as usize;
                if size >= best {
                    continue;
                }
                // reachability without the removed edges
                let mut reach = vec![false; net.node_count()];
                reach[net.source()] = true;
                let mut changed = true;
                while changed {
                    changed = false;
                    for (i, e) in edges.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            continue;
                        }
                        if reach[e.tail] && !reach[e.head] {
                            reach[e.head] = true;
                            changed = true;
                        }
                    }
                }
                if !reach[sink] {
                    best = size;
                    if best == 0 {
                        break 'outer;
                    }
                }
            }
            best
        }

        let n = Network::combination(2, 3, 2).unwrap();
        for i in 0..n.receivers().len() {
            assert_eq!(n.min_cut(i).unwrap(), brute_min_cut(&n, i));
        }
        let n = Network::star(2, 2).unwrap();
        for i in 0..n.receivers().len() {
            assert_eq!(n.min_cut(i).unwrap(), brute_min_cut(&n, i));
        }
    }

    #[test]
    fn network_json_roundtrip() {
        let n = Network::star(2, 4).unwrap();
        let json = NetworkJson::from(&n);
        let text = serde_json::to_string(&json).unwrap();
        let parsed: NetworkJson = serde_json::from_str(&text).unwrap();
        let back = parsed.build().unwrap();
        assert_eq!(back.edges(), n.edges());
        assert_eq!(back.receivers(), n.receivers());
        assert_eq!(back.h(), n.h());
    }

    #[test]
    fn network_json_rejects_cycles_and_bad_nodes() {
        let n = Network::combination(2, 2, 2).unwrap();
        let mut json = NetworkJson::from(&n);
        json.edges.push(Edge {
            tail: json.edges[0].head,
            head: 0,
            mult: 0,
        });
        assert!(matches!(json.build(), Err(NetworkError::BadJson(_))));

        let mut json = NetworkJson::from(&n);
        json.edges[0].head = 999;
        assert!(matches!(json.build(), Err(NetworkError::BadJson(_))));
    }
}
