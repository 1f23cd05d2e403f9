use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{orient, GeometryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub a: NodeId,
    pub b: NodeId,
}

#[derive(Deserialize)]
struct RawLayout {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

/// A straight-line drawing of a simple undirected graph.
///
/// Construction validates general position: distinct node positions and no
/// node in the interior of a non-incident edge.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawLayout")]
pub struct GraphLayout {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    #[serde(skip)]
    node_index: HashMap<NodeId, usize>,
    #[serde(skip)]
    edge_index: HashMap<EdgeId, usize>,
}

impl TryFrom<RawLayout> for GraphLayout {
    type Error = GeometryError;

    fn try_from(raw: RawLayout) -> Result<Self, Self::Error> {
        GraphLayout::new(raw.nodes, raw.edges)
    }
}

impl GraphLayout {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, GeometryError> {
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if !(n.x.is_finite() && n.y.is_finite()) {
                return Err(GeometryError::NonFinite(n.id));
            }
            if node_index.insert(n.id, i).is_some() {
                return Err(GeometryError::DuplicateNode(n.id));
            }
        }
        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut pairs = HashSet::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id, i).is_some() {
                return Err(GeometryError::DuplicateEdge(e.id));
            }
            if e.a == e.b {
                return Err(GeometryError::SelfLoop(e.id));
            }
            for end in [e.a, e.b] {
                if !node_index.contains_key(&end) {
                    return Err(GeometryError::UnknownNode(e.id, end));
                }
            }
            if !pairs.insert((e.a.min(e.b), e.a.max(e.b))) {
                return Err(GeometryError::ParallelEdge(e.id));
            }
        }
        let layout = GraphLayout {
            nodes,
            edges,
            node_index,
            edge_index,
        };
        layout.check_general_position()?;
        Ok(layout)
    }

    fn check_general_position(&self) -> Result<(), GeometryError> {
        for (i, a) in self.nodes.iter().enumerate() {
            for b in &self.nodes[i + 1..] {
                if a.x == b.x && a.y == b.y {
                    return Err(GeometryError::CoincidentNodes(a.id, b.id));
                }
            }
        }
        for e in &self.edges {
            let (p, q) = self.endpoints(e.id);
            for n in &self.nodes {
                if n.id == e.a || n.id == e.b {
                    continue;
                }
                let r = (n.x, n.y);
                if orient(p, q, r) == 0.0 && strictly_between(p, q, r) {
                    return Err(GeometryError::NodeOnEdge(n.id, e.id));
                }
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edge_index.get(&id).map(|&i| &self.edges[i])
    }

    pub fn position(&self, id: NodeId) -> (f64, f64) {
        let n = &self.nodes[self.node_index[&id]];
        (n.x, n.y)
    }

    /// Endpoint positions `(p_a, p_b)` of an edge.
    pub fn endpoints(&self, id: EdgeId) -> ((f64, f64), (f64, f64)) {
        let e = &self.edges[self.edge_index[&id]];
        (self.position(e.a), self.position(e.b))
    }

    pub fn edge_length(&self, id: EdgeId) -> f64 {
        let ((x0, y0), (x1, y1)) = self.endpoints(id);
        (x1 - x0).hypot(y1 - y0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        serde_json::from_str(text).map_err(|e| GeometryError::Json(e.to_string()))
    }
}

fn strictly_between(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> bool {
    let inside = |a: f64, b: f64, v: f64| (a.min(b) < v && v < a.max(b)) || (a == b && a == v);
    inside(p.0, q.0, r.0) && inside(p.1, q.1, r.1)
}

/// Complete graph on `n` nodes equally spaced on a circle; node `i` sits at
/// angle `2πi/n` and edges are numbered in lexicographic `(i, j)` order.
pub fn generate_circle_layout(n: u32, radius: f64) -> Result<GraphLayout, GeometryError> {
    if n < 3 {
        return Err(GeometryError::TooFewNodes(n));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(GeometryError::BadRadius(radius));
    }
    let nodes = (0..n)
        .map(|i| {
            let angle = 2.0 * PI * f64::from(i) / f64::from(n);
            Node {
                id: NodeId(i),
                x: radius * angle.cos(),
                y: radius * angle.sin(),
            }
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push(Edge {
                id: EdgeId(edges.len() as u32),
                a: NodeId(i),
                b: NodeId(j),
            });
        }
    }
    GraphLayout::new(nodes, edges)
}

/// Random simple graph on `n` nodes placed uniformly in a square of side
/// `extent`, each pair joined with probability `edge_prob`. Placements that
/// break general position are redrawn.
pub fn generate_random_layout(
    n: u32,
    edge_prob: f64,
    extent: f64,
    seed: u64,
) -> Result<GraphLayout, GeometryError> {
    if n < 2 {
        return Err(GeometryError::TooFewNodes(n));
    }
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(GeometryError::BadRadius(extent));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let nodes: Vec<Node> = (0..n)
            .map(|i| Node {
                id: NodeId(i),
                x: (rng.gen::<f64>() * extent).round(),
                y: (rng.gen::<f64>() * extent).round(),
            })
            .collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(edge_prob.clamp(0.0, 1.0)) {
                    edges.push(Edge {
                        id: EdgeId(edges.len() as u32),
                        a: NodeId(i),
                        b: NodeId(j),
                    });
                }
            }
        }
        if let Ok(layout) = GraphLayout::new(nodes, edges) {
            if super::compute_intersections(&layout).is_ok() {
                return Ok(layout);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: u32, x: f64, y: f64) -> Node {
        Node {
            id: NodeId(id),
            x,
            y,
        }
    }

    fn edge(id: u32, a: u32, b: u32) -> Edge {
        Edge {
            id: EdgeId(id),
            a: NodeId(a),
            b: NodeId(b),
        }
    }

    #[test]
    fn circle_k4_positions() {
        let layout = generate_circle_layout(4, 200.0).unwrap();
        let expected = [(200.0, 0.0), (0.0, 200.0), (-200.0, 0.0), (0.0, -200.0)];
        for (n, (x, y)) in layout.nodes().iter().zip(expected) {
            assert!((n.x - x).abs() < 1e-9 && (n.y - y).abs() < 1e-9);
        }
        assert_eq!(layout.edges().len(), 6);
    }

    #[test]
    fn circle_edge_counts() {
        assert_eq!(generate_circle_layout(13, 200.0).unwrap().edges().len(), 78);
        assert_eq!(generate_circle_layout(7, 200.0).unwrap().edges().len(), 21);
        assert!(matches!(
            generate_circle_layout(2, 200.0),
            Err(GeometryError::TooFewNodes(2))
        ));
    }

    #[test]
    fn rejects_invalid_graphs() {
        let nodes = vec![node(0, 0.0, 0.0), node(1, 10.0, 0.0), node(2, 5.0, 5.0)];
        assert!(matches!(
            GraphLayout::new(nodes.clone(), vec![edge(0, 0, 0)]),
            Err(GeometryError::SelfLoop(_))
        ));
        assert!(matches!(
            GraphLayout::new(nodes.clone(), vec![edge(0, 0, 1), edge(1, 1, 0)]),
            Err(GeometryError::ParallelEdge(_))
        ));
        assert!(matches!(
            GraphLayout::new(nodes.clone(), vec![edge(0, 0, 9)]),
            Err(GeometryError::UnknownNode(..))
        ));
        let mut dup = nodes.clone();
        dup.push(node(3, 10.0, 0.0));
        assert!(matches!(
            GraphLayout::new(dup, vec![]),
            Err(GeometryError::CoincidentNodes(..))
        ));
    }

    #[test]
    fn rejects_node_inside_edge() {
        let nodes = vec![node(0, 0.0, 0.0), node(1, 10.0, 0.0), node(2, 5.0, 0.0)];
        assert!(matches!(
            GraphLayout::new(nodes, vec![edge(0, 0, 1)]),
            Err(GeometryError::NodeOnEdge(NodeId(2), EdgeId(0)))
        ));
    }

    #[test]
    fn random_layouts_are_reproducible() {
        let a = generate_random_layout(8, 0.5, 300.0, 11).unwrap();
        let b = generate_random_layout(8, 0.5, 300.0, 11).unwrap();
        assert_eq!(a.nodes(), b.nodes());
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.nodes().len(), 8);
    }

    #[test]
    fn json_round_trip() {
        let layout = generate_circle_layout(5, 100.0).unwrap();
        let back = GraphLayout::from_json(&layout.to_json()).unwrap();
        assert_eq!(back.nodes(), layout.nodes());
        assert_eq!(back.edges(), layout.edges());
        assert_eq!(back.edge_length(EdgeId(3)), layout.edge_length(EdgeId(3)));
    }
}
