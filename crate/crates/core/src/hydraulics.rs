//! Hydraulic features: ingest of externally simulated node/link series, a
//! topology-only flow proxy when no results exist, and the blend of
//! centrality and flow into gateway placement weights.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Adjacency, CentralityVector};
use crate::inp::{LinkKind, WaterNetwork};

#[derive(Debug, Error)]
pub enum HydraulicError {
    #[error("{file}: unknown {kind} id '{id}' at row {row}")]
    UnknownId {
        file: &'static str,
        kind: &'static str,
        id: String,
        row: usize,
    },
    #[error("{file}: timestamps for '{id}' are not strictly increasing at row {row}")]
    NonMonotoneTimestamps { file: &'static str, id: String, row: usize },
    #[error("{file}: {reason}")]
    SchemaMismatch { file: &'static str, reason: String },
    #[error("network has no reservoir or tank to route demand from")]
    NoSource,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSample {
    pub time_s: f64,
    pub node: usize,
    pub pressure: f64,
    pub demand: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample {
    pub time_s: f64,
    pub link: usize,
    pub flow: f64,
}

/// Ingested hydraulic results. Rows keep their file order so that a
/// re-export reproduces the input.
#[derive(Debug, Clone, PartialEq)]
pub struct HydraulicSeries {
    /// Distinct sample times across both files, ascending.
    pub timestamps: Vec<f64>,
    pub node_rows: Vec<NodeSample>,
    pub link_rows: Vec<LinkSample>,
    /// Per node: mean over time of the summed absolute flow of incident
    /// links, halved (each link is shared by two endpoints).
    pub node_flow: Vec<f64>,
}

/// Which quantity stands in for "flow at a node".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeFlowMeasure {
    #[default]
    IncidentLinkMean,
    /// Time-mean of the absolute delivered demand.
    Demand,
}

fn column(headers: &csv::StringRecord, name: &str, file: &'static str) -> Result<usize, HydraulicError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| HydraulicError::SchemaMismatch { file, reason: format!("missing column '{name}'") })
}

fn field(rec: &csv::StringRecord, col: usize, file: &'static str, row: usize) -> Result<f64, HydraulicError> {
    let raw = rec.get(col).unwrap_or("").trim();
    raw.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| HydraulicError::SchemaMismatch {
        file,
        reason: format!("row {row}: '{raw}' is not a number"),
    })
}

fn check_monotone(
    last: &mut HashMap<usize, f64>,
    key: usize,
    time: f64,
    file: &'static str,
    id: &str,
    row: usize,
) -> Result<(), HydraulicError> {
    if let Some(&prev) = last.get(&key) {
        if time <= prev {
            return Err(HydraulicError::NonMonotoneTimestamps { file, id: id.to_owned(), row });
        }
    }
    last.insert(key, time);
    Ok(())
}

/// Reads the node file (`time_s,node_id,pressure,demand`) and link file
/// (`time_s,link_id,flow`) and resolves ids against `net`.
pub fn ingest_hydraulic_csv<N: Read, L: Read>(
    nodes: N,
    links: L,
    net: &WaterNetwork,
) -> Result<HydraulicSeries, HydraulicError> {
    const NODE_FILE: &str = "node file";
    const LINK_FILE: &str = "link file";

    let mut node_rows = Vec::new();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(nodes);
    let headers = rdr.headers()?.clone();
    let (c_t, c_id, c_p, c_d) = (
        column(&headers, "time_s", NODE_FILE)?,
        column(&headers, "node_id", NODE_FILE)?,
        column(&headers, "pressure", NODE_FILE)?,
        column(&headers, "demand", NODE_FILE)?,
    );
    let mut last = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let id = rec.get(c_id).unwrap_or("");
        let node = net.node_index(id).ok_or_else(|| HydraulicError::UnknownId {
            file: NODE_FILE,
            kind: "node",
            id: id.to_owned(),
            row,
        })?;
        let time_s = field(&rec, c_t, NODE_FILE, row)?;
        check_monotone(&mut last, node, time_s, NODE_FILE, id, row)?;
        node_rows.push(NodeSample {
            time_s,
            node,
            pressure: field(&rec, c_p, NODE_FILE, row)?,
            demand: field(&rec, c_d, NODE_FILE, row)?,
        });
    }

    let link_index: HashMap<&str, usize> = net.links.iter().enumerate().map(|(i, l)| (l.id.as_str(), i)).collect();
    let mut link_rows = Vec::new();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(links);
    let headers = rdr.headers()?.clone();
    let (c_t, c_id, c_q) = (
        column(&headers, "time_s", LINK_FILE)?,
        column(&headers, "link_id", LINK_FILE)?,
        column(&headers, "flow", LINK_FILE)?,
    );
    let mut last = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let id = rec.get(c_id).unwrap_or("");
        let link = *link_index.get(id).ok_or_else(|| HydraulicError::UnknownId {
            file: LINK_FILE,
            kind: "link",
            id: id.to_owned(),
            row,
        })?;
        let time_s = field(&rec, c_t, LINK_FILE, row)?;
        check_monotone(&mut last, link, time_s, LINK_FILE, id, row)?;
        link_rows.push(LinkSample { time_s, link, flow: field(&rec, c_q, LINK_FILE, row)? });
    }

    let mut timestamps: Vec<f64> = node_rows.iter().map(|r| r.time_s).chain(link_rows.iter().map(|r| r.time_s)).collect();
    timestamps.sort_by(f64::total_cmp);
    timestamps.dedup();

    let node_flow = incident_link_flow(net, &link_rows);
    Ok(HydraulicSeries { timestamps, node_rows, link_rows, node_flow })
}

fn incident_link_flow(net: &WaterNetwork, rows: &[LinkSample]) -> Vec<f64> {
    let mut sum = vec![0.0; net.links.len()];
    let mut count = vec![0usize; net.links.len()];
    for r in rows {
        sum[r.link] += r.flow.abs();
        count[r.link] += 1;
    }
    let mut node_flow = vec![0.0; net.node_count()];
    for (i, link) in net.links.iter().enumerate() {
        if count[i] == 0 {
            continue;
        }
        let half = sum[i] / count[i] as f64 / 2.0;
        node_flow[link.from] += half;
        node_flow[link.to] += half;
    }
    node_flow
}

impl HydraulicSeries {
    pub fn node_flow(&self, measure: NodeFlowMeasure) -> Vec<f64> {
        match measure {
            NodeFlowMeasure::IncidentLinkMean => self.node_flow.clone(),
            NodeFlowMeasure::Demand => {
                let n = self.node_flow.len();
                let mut sum = vec![0.0; n];
                let mut count = vec![0usize; n];
                for r in &self.node_rows {
                    sum[r.node] += r.demand.abs();
                    count[r.node] += 1;
                }
                sum.iter().zip(&count).map(|(&s, &c)| if c == 0 { 0.0 } else { s / c as f64 }).collect()
            }
        }
    }

    pub fn write_node_csv<W: Write>(&self, net: &WaterNetwork, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time_s", "node_id", "pressure", "demand"])?;
        for r in &self.node_rows {
            w.write_record([
                r.time_s.to_string(),
                net.nodes[r.node].id.clone(),
                r.pressure.to_string(),
                r.demand.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_link_csv<W: Write>(&self, net: &WaterNetwork, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time_s", "link_id", "flow"])?;
        for r in &self.link_rows {
            w.write_record([r.time_s.to_string(), net.links[r.link].id.clone(), r.flow.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Path metric used to route demand to its source in [`flow_proxy`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxyDistance {
    #[default]
    Hops,
    /// Pipe length; pumps and valves count as 1 length unit.
    PipeLength,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowProxy {
    /// Demand transiting each node, own demand included.
    pub flow: Vec<f64>,
    /// Serving source for every reachable node.
    pub source: Vec<Option<usize>>,
    /// Next hop towards the source.
    pub parent: Vec<Option<usize>>,
    /// Junctions with positive demand that cannot reach any source.
    pub unreachable: Vec<usize>,
}

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn edge_lengths(net: &WaterNetwork) -> HashMap<(usize, usize), f64> {
    let mut len = HashMap::new();
    for link in &net.links {
        let key = (link.from.min(link.to), link.from.max(link.to));
        let l = if link.kind == LinkKind::Pipe { link.length } else { 1.0 };
        len.entry(key).and_modify(|v: &mut f64| *v = v.min(l)).or_insert(l);
    }
    len
}

/// Routes every junction's base demand to its nearest source and
/// accumulates the demand passing through each node. Among equally short
/// routes the predecessor with the lowest node index wins.
pub fn flow_proxy(net: &WaterNetwork, adj: &Adjacency, metric: ProxyDistance) -> Result<FlowProxy, HydraulicError> {
    let n = adj.n();
    if n != net.node_count() {
        return Err(HydraulicError::InvalidInput("adjacency does not match network".into()));
    }
    let sources: Vec<usize> = (0..n).filter(|&i| net.nodes[i].kind.is_source()).collect();
    if sources.is_empty() {
        return Err(HydraulicError::NoSource);
    }

    let mut dist = vec![f64::INFINITY; n];
    let lengths;
    let weight: Box<dyn Fn(usize, usize) -> f64> = match metric {
        ProxyDistance::Hops => {
            let mut queue = VecDeque::new();
            for &s in &sources {
                dist[s] = 0.0;
                queue.push_back(s);
            }
            while let Some(u) = queue.pop_front() {
                for &v in adj.neighbors(u) {
                    if dist[v].is_infinite() {
                        dist[v] = dist[u] + 1.0;
                        queue.push_back(v);
                    }
                }
            }
            Box::new(|_, _| 1.0)
        }
        ProxyDistance::PipeLength => {
            lengths = edge_lengths(net);
            let w = |a: usize, b: usize| lengths[&(a.min(b), a.max(b))];
            let mut heap = BinaryHeap::new();
            for &s in &sources {
                dist[s] = 0.0;
                heap.push(Frontier(0.0, s));
            }
            while let Some(Frontier(d, u)) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &v in adj.neighbors(u) {
                    let nd = d + w(u, v);
                    if nd < dist[v] {
                        dist[v] = nd;
                        heap.push(Frontier(nd, v));
                    }
                }
            }
            Box::new(w)
        }
    };

    let mut parent = vec![None; n];
    for v in 0..n {
        if dist[v] > 0.0 && dist[v].is_finite() {
            parent[v] = adj.neighbors(v).iter().copied().find(|&u| dist[u] < dist[v] && dist[u] + weight(u, v) == dist[v]);
            debug_assert!(parent[v].is_some());
        }
    }

    let mut order: Vec<usize> = (0..n).filter(|&v| dist[v].is_finite()).collect();
    order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(b.cmp(&a)));

    let mut flow: Vec<f64> = (0..n)
        .map(|v| if dist[v].is_finite() { net.nodes[v].base_demand } else { 0.0 })
        .collect();
    for &v in &order {
        if let Some(p) = parent[v] {
            flow[p] += flow[v];
        }
    }

    let mut source = vec![None; n];
    for &v in order.iter().rev() {
        source[v] = match parent[v] {
            Some(p) => source[p],
            None => Some(v),
        };
    }

    let unreachable = (0..n)
        .filter(|&v| dist[v].is_infinite() && net.nodes[v].base_demand > 0.0)
        .collect();
    Ok(FlowProxy { flow, source, parent, unreachable })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowWeight {
    /// Flow normalised by its maximum, in `[0, 1]`.
    pub flow_norm: Vec<f64>,
    pub weight: Vec<f64>,
}

/// Blends max-normalised centrality and flow: `w = alpha * c^ + (1 - alpha) * f`.
/// The resulting weights are also written to `cv.weight`.
pub fn placement_weights(cv: &mut CentralityVector, flows: &[f64], alpha: f64) -> Result<FlowWeight, HydraulicError> {
    if flows.len() != cv.len() {
        return Err(HydraulicError::InvalidInput(format!(
            "{} flow values for {} nodes",
            flows.len(),
            cv.len()
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(HydraulicError::InvalidInput(format!("alpha {alpha} outside [0, 1]")));
    }
    if flows.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(HydraulicError::InvalidInput("flows must be finite and non-negative".into()));
    }
    let normalise = |v: &[f64]| -> Vec<f64> {
        let max = v.iter().copied().fold(0.0, f64::max);
        if max > 0.0 {
            v.iter().map(|x| x / max).collect()
        } else {
            vec![0.0; v.len()]
        }
    };
    let flow_norm = normalise(flows);
    let c_hat = normalise(&cv.centrality);
    let weight: Vec<f64> = c_hat
        .iter()
        .zip(&flow_norm)
        .map(|(c, f)| alpha * c + (1.0 - alpha) * f)
        .collect();
    cv.weight.clone_from(&weight);
    Ok(FlowWeight { flow_norm, weight })
}

pub fn write_weights_csv<W: Write>(
    adj: &Adjacency,
    cv: &CentralityVector,
    flows: &[f64],
    fw: &FlowWeight,
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "degree", "centrality", "flow", "flow_norm", "weight"])?;
    for i in 0..adj.n() {
        w.write_record([
            adj.id(i).to_owned(),
            cv.degree[i].to_string(),
            cv.centrality[i].to_string(),
            flows[i].to_string(),
            fw.flow_norm[i].to_string(),
            fw.weight[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
