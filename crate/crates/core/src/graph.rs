//! Undirected topology of a water network and degree centrality.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::inp::WaterNetwork;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("edge ({0}, {1}) is out of range or a self-loop")]
    InvalidEdge(usize, usize),
}

/// Sparse symmetric 0/1 adjacency. Neighbour lists are sorted and
/// deduplicated, so parallel links collapse into one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    ids: Vec<String>,
    neighbors: Vec<Vec<usize>>,
}

impl Adjacency {
    /// Builds an adjacency from node ids and an undirected edge list.
    pub fn from_edges<I>(ids: Vec<String>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = ids.len();
        if n < 2 {
            return Err(GraphError::TooFewNodes(n));
        }
        let mut neighbors = vec![Vec::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(GraphError::InvalidEdge(a, b));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Adjacency { ids, neighbors })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Iterates edges once each as `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }
}

/// Pumps and valves count as edges just like pipes.
pub fn build_adjacency(net: &WaterNetwork) -> Result<Adjacency, GraphError> {
    let ids = net.nodes.iter().map(|n| n.id.clone()).collect();
    Adjacency::from_edges(ids, net.links.iter().map(|l| (l.from, l.to)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    pub degree: Vec<usize>,
    pub centrality: Vec<f64>,
    /// Placement weight; equals `centrality` until flow weighting is applied.
    pub weight: Vec<f64>,
}

impl CentralityVector {
    pub fn len(&self) -> usize {
        self.degree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degree.is_empty()
    }
}

/// `c_i = d_i / (N - 1)`, normalised by the global node count even when the
/// graph is disconnected.
pub fn degree_centrality(adj: &Adjacency) -> CentralityVector {
    let denom = (adj.n() - 1) as f64;
    let degree: Vec<usize> = (0..adj.n()).map(|i| adj.degree(i)).collect();
    let centrality: Vec<f64> = degree.iter().map(|&d| d as f64 / denom).collect();
    CentralityVector { degree, weight: centrality.clone(), centrality }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
    pub components: usize,
}

pub fn graph_stats(adj: &Adjacency) -> GraphStats {
    let n = adj.n();
    let degrees = (0..n).map(|i| adj.degree(i));
    let edges = adj.edge_count();
    GraphStats {
        nodes: n,
        edges,
        min_degree: degrees.clone().min().unwrap_or(0),
        max_degree: degrees.max().unwrap_or(0),
        mean_degree: 2.0 * edges as f64 / n as f64,
        components: component_labels(adj).1,
    }
}

/// Breadth-first component labelling; labels follow node order.
pub fn component_labels(adj: &Adjacency) -> (Vec<usize>, usize) {
    let n = adj.n();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in adj.neighbors(u) {
                if label[v] == usize::MAX {
                    label[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// CSV with header `node_id,degree,centrality`.
pub fn write_centrality_csv<W: std::io::Write>(
    adj: &Adjacency,
    cv: &CentralityVector,
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "degree", "centrality"])?;
    for i in 0..adj.n() {
        w.write_record([adj.id(i), &cv.degree[i].to_string(), &cv.centrality[i].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("N{i}")).collect()
    }

    #[test]
    fn path_graph() {
        let adj = Adjacency::from_edges(ids(3), [(0, 1), (1, 2)]).unwrap();
        assert!(adj.has_edge(0, 1) && adj.has_edge(1, 0));
        assert!(!adj.has_edge(0, 2));
        let s = graph_stats(&adj);
        assert_eq!((s.edges, s.components, s.min_degree, s.max_degree), (2, 1, 1, 2));
    }

    #[test]
    fn parallel_links_saturate() {
        let adj = Adjacency::from_edges(ids(2), [(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(adj.edge_count(), 1);
        assert_eq!(adj.degree(0), 1);
    }

    #[test]
    fn star_centrality() {
        let adj = Adjacency::from_edges(ids(5), (1..5).map(|i| (0, i))).unwrap();
        let cv = degree_centrality(&adj);
        assert_eq!(cv.centrality, vec![1.0, 0.25, 0.25, 0.25, 0.25]);
        assert_eq!(cv.weight, cv.centrality);
    }

    #[test]
    fn cycle_centrality() {
        for n in 3..20 {
            let adj = Adjacency::from_edges(ids(n), (0..n).map(|i| (i, (i + 1) % n))).unwrap();
            let cv = degree_centrality(&adj);
            assert!(cv.centrality.iter().all(|&c| c == 2.0 / (n - 1) as f64));
        }
    }

    #[test]
    fn two_triangles() {
        let adj = Adjacency::from_edges(ids(6), [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert_eq!(graph_stats(&adj).components, 2);
        assert_eq!(component_labels(&adj).0, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn too_few_nodes() {
        assert_eq!(Adjacency::from_edges(ids(1), []), Err(GraphError::TooFewNodes(1)));
        assert!(matches!(Adjacency::from_edges(ids(3), [(1, 1)]), Err(GraphError::InvalidEdge(1, 1))));
    }

    #[test]
    fn csv_output() {
        let adj = Adjacency::from_edges(ids(3), [(0, 1), (1, 2)]).unwrap();
        let mut buf = Vec::new();
        write_centrality_csv(&adj, &degree_centrality(&adj), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "node_id,degree,centrality\nN0,1,0.5\nN1,2,1\nN2,1,0.5\n");
    }
}
