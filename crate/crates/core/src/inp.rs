//! EPANET INP reader.
//!
//! Parsing happens in two passes: [`tokenize_inp`] splits the text into
//! sections of whitespace-separated rows, and [`build_network`] turns the
//! topology, demand and geometry sections into a validated [`WaterNetwork`].

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InpError {
    #[error("input is not valid UTF-8 (first bad byte at offset {0})")]
    UndecodableText(usize),
    #[error("line {0}: data found before the first [SECTION] header")]
    RowOutsideSection(usize),
    #[error("duplicate {kind} id '{id}'")]
    DuplicateId { kind: &'static str, id: String },
    #[error("link '{link}' references unknown node '{node}'")]
    DanglingEndpoint { link: String, node: String },
    #[error("node '{0}' has no [COORDINATES] entry")]
    MissingCoordinates(String),
    #[error("link '{0}' connects a node to itself")]
    SelfLoop(String),
    #[error("malformed row in [{section}] at line {line}: {reason}")]
    MalformedRow {
        section: String,
        line: usize,
        reason: String,
    },
    #[error("network is missing required section(s): {0}")]
    MissingSection(String),
}

/// One data row of an INP section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InpRow {
    /// 1-based source line.
    pub line: usize,
    pub tokens: Vec<String>,
}

/// Sectioned token view of an INP file. Section names are upper case and
/// appear in first-seen order; repeated headers append to the same section.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InpDocument {
    pub sections: IndexMap<String, Vec<InpRow>>,
}

impl InpDocument {
    pub fn section(&self, name: &str) -> &[InpRow] {
        self.sections.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn has_section(&self, name: &str) -> bool {
        self.sections.contains_key(name)
    }
}

pub fn tokenize_inp(bytes: &[u8]) -> Result<InpDocument, InpError> {
    let text = std::str::from_utf8(bytes).map_err(|e| InpError::UndecodableText(e.valid_up_to()))?;
    let mut doc = InpDocument::default();
    let mut current: Option<String> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find(';') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest.split(']').next().unwrap_or("").trim().to_ascii_uppercase();
            doc.sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let section = current.as_ref().ok_or(InpError::RowOutsideSection(line))?;
        let tokens = trimmed.split_whitespace().map(str::to_owned).collect();
        doc.sections
            .get_mut(section)
            .expect("section registered at header")
            .push(InpRow { line, tokens });
    }
    Ok(doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Junction,
    Reservoir,
    Tank,
}

impl NodeKind {
    pub fn is_source(self) -> bool {
        !matches!(self, NodeKind::Junction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Pipe,
    Pump,
    Valve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub id: String,
    pub kind: NodeKind,
    /// Elevation for junctions and tanks, total head for reservoirs.
    pub elevation: f64,
    /// Summed base demand; always zero for reservoirs and tanks.
    pub base_demand: f64,
    pub position: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkRecord {
    pub id: String,
    pub kind: LinkKind,
    /// Index into [`WaterNetwork::nodes`].
    pub from: usize,
    pub to: usize,
    /// Only meaningful for pipes.
    pub length: f64,
    pub diameter: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundingBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BoundingBox {
    pub fn from_points<I: IntoIterator<Item = (f64, f64)>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let (x, y) = it.next()?;
        let mut bb = BoundingBox { x_min: x, y_min: y, x_max: x, y_max: y };
        for (x, y) in it {
            bb.x_min = bb.x_min.min(x);
            bb.y_min = bb.y_min.min(y);
            bb.x_max = bb.x_max.max(x);
            bb.y_max = bb.y_max.max(y);
        }
        Some(bb)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, (x, y): (f64, f64)) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ElementCounts {
    pub junctions: usize,
    pub reservoirs: usize,
    pub tanks: usize,
    pub pipes: usize,
    pub pumps: usize,
    pub valves: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaterNetwork {
    pub title: Option<String>,
    pub nodes: Vec<NodeRecord>,
    pub links: Vec<LinkRecord>,
    pub bbox: BoundingBox,
    pub counts: ElementCounts,
    /// `[OPTIONS]` and `[TIMES]` entries, keyed `SECTION/KEY`.
    pub options: IndexMap<String, String>,
    pub warnings: Vec<String>,
    index: HashMap<String, usize>,
}

impl WaterNetwork {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn positions(&self) -> Vec<(f64, f64)> {
        self.nodes.iter().map(|n| n.position).collect()
    }

    /// Multiplies every coordinate (and the bounding box) by `factor`.
    pub fn scale_coordinates(&mut self, factor: f64) {
        for node in &mut self.nodes {
            node.position = (node.position.0 * factor, node.position.1 * factor);
        }
        self.bbox = BoundingBox::from_points(self.positions()).expect("network has nodes");
    }

    pub fn summary(&self) -> NetworkSummary {
        NetworkSummary {
            title: self.title.clone(),
            nodes: self.nodes.len(),
            links: self.links.len(),
            counts: self.counts,
            bbox: self.bbox,
            total_base_demand: self.nodes.iter().map(|n| n.base_demand).sum(),
            warnings: self.warnings.clone(),
        }
    }
}

/// JSON-friendly digest of a parsed network.
#[derive(Debug, Clone, Serialize)]
pub struct NetworkSummary {
    pub title: Option<String>,
    pub nodes: usize,
    pub links: usize,
    pub counts: ElementCounts,
    pub bbox: BoundingBox,
    pub total_base_demand: f64,
    pub warnings: Vec<String>,
}

const KNOWN_SECTIONS: &[&str] = &[
    "TITLE",
    "JUNCTIONS",
    "RESERVOIRS",
    "TANKS",
    "PIPES",
    "PUMPS",
    "VALVES",
    "DEMANDS",
    "COORDINATES",
    "OPTIONS",
    "TIMES",
    "END",
];

struct RowReader<'a> {
    section: &'static str,
    row: &'a InpRow,
}

impl<'a> RowReader<'a> {
    fn malformed(&self, reason: impl Into<String>) -> InpError {
        InpError::MalformedRow {
            section: self.section.to_owned(),
            line: self.row.line,
            reason: reason.into(),
        }
    }

    fn require(&self, min: usize) -> Result<(), InpError> {
        if self.row.tokens.len() < min {
            return Err(self.malformed(format!(
                "expected at least {min} fields, found {}",
                self.row.tokens.len()
            )));
        }
        Ok(())
    }

    fn str(&self, i: usize) -> &'a str {
        &self.row.tokens[i]
    }

    fn real(&self, i: usize, what: &str) -> Result<f64, InpError> {
        let tok = &self.row.tokens[i];
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.malformed(format!("{what} '{tok}' is not a finite number"))),
        }
    }

    fn real_or(&self, i: usize, what: &str, default: f64) -> Result<f64, InpError> {
        if i < self.row.tokens.len() {
            self.real(i, what)
        } else {
            Ok(default)
        }
    }
}

struct NetworkBuilder {
    nodes: Vec<NodeRecord>,
    links: Vec<LinkRecord>,
    node_index: HashMap<String, usize>,
    link_ids: HashMap<String, usize>,
    counts: ElementCounts,
}

impl NetworkBuilder {
    fn add_node(&mut self, id: &str, kind: NodeKind, elevation: f64, demand: f64) -> Result<(), InpError> {
        if self.node_index.contains_key(id) {
            return Err(InpError::DuplicateId { kind: "node", id: id.to_owned() });
        }
        self.node_index.insert(id.to_owned(), self.nodes.len());
        self.nodes.push(NodeRecord {
            id: id.to_owned(),
            kind,
            elevation,
            base_demand: demand,
            position: (f64::NAN, f64::NAN),
        });
        match kind {
            NodeKind::Junction => self.counts.junctions += 1,
            NodeKind::Reservoir => self.counts.reservoirs += 1,
            NodeKind::Tank => self.counts.tanks += 1,
        }
        Ok(())
    }

    fn add_link(&mut self, rr: &RowReader<'_>, kind: LinkKind, length: f64, diameter: f64) -> Result<(), InpError> {
        let id = rr.str(0);
        if self.link_ids.contains_key(id) {
            return Err(InpError::DuplicateId { kind: "link", id: id.to_owned() });
        }
        let resolve = |node: &str| {
            self.node_index.get(node).copied().ok_or_else(|| InpError::DanglingEndpoint {
                link: id.to_owned(),
                node: node.to_owned(),
            })
        };
        let from = resolve(rr.str(1))?;
        let to = resolve(rr.str(2))?;
        if from == to {
            return Err(InpError::SelfLoop(id.to_owned()));
        }
        self.link_ids.insert(id.to_owned(), self.links.len());
        self.links.push(LinkRecord { id: id.to_owned(), kind, from, to, length, diameter });
        match kind {
            LinkKind::Pipe => self.counts.pipes += 1,
            LinkKind::Pump => self.counts.pumps += 1,
            LinkKind::Valve => self.counts.valves += 1,
        }
        Ok(())
    }
}

pub fn build_network(doc: &InpDocument) -> Result<WaterNetwork, InpError> {
    let mut missing = Vec::new();
    if !doc.has_section("JUNCTIONS") && !doc.has_section("RESERVOIRS") {
        missing.push("JUNCTIONS or RESERVOIRS");
    }
    if !["PIPES", "PUMPS", "VALVES"].iter().any(|s| doc.has_section(s)) {
        missing.push("PIPES, PUMPS or VALVES");
    }
    if !doc.has_section("COORDINATES") {
        missing.push("COORDINATES");
    }
    if !missing.is_empty() {
        return Err(InpError::MissingSection(missing.join("; ")));
    }

    let mut warnings = Vec::new();
    for name in doc.sections.keys() {
        if !KNOWN_SECTIONS.contains(&name.as_str()) {
            warnings.push(format!("section [{name}] ignored"));
        }
    }

    let mut b = NetworkBuilder {
        nodes: Vec::new(),
        links: Vec::new(),
        node_index: HashMap::new(),
        link_ids: HashMap::new(),
        counts: ElementCounts::default(),
    };

    // Nodes first so that link sections can resolve endpoints regardless of
    // the order sections appear in the file. Within each pass, file order.
    for (name, rows) in &doc.sections {
        let (section, kind): (&'static str, NodeKind) = match name.as_str() {
            "JUNCTIONS" => ("JUNCTIONS", NodeKind::Junction),
            "RESERVOIRS" => ("RESERVOIRS", NodeKind::Reservoir),
            "TANKS" => ("TANKS", NodeKind::Tank),
            _ => continue,
        };
        for row in rows {
            let rr = RowReader { section, row };
            rr.require(1)?;
            let elevation = rr.real_or(1, "elevation", 0.0)?;
            let demand = match kind {
                NodeKind::Junction => rr.real_or(2, "demand", 0.0)?,
                _ => 0.0,
            };
            if demand < 0.0 {
                return Err(rr.malformed("negative base demand"));
            }
            b.add_node(rr.str(0), kind, elevation, demand)?;
        }
    }

    for (name, rows) in &doc.sections {
        for row in rows {
            match name.as_str() {
                "PIPES" => {
                    let rr = RowReader { section: "PIPES", row };
                    rr.require(5)?;
                    let length = rr.real(3, "length")?;
                    let diameter = rr.real(4, "diameter")?;
                    if length <= 0.0 || diameter <= 0.0 {
                        return Err(rr.malformed("pipe length and diameter must be positive"));
                    }
                    b.add_link(&rr, LinkKind::Pipe, length, diameter)?;
                }
                "PUMPS" => {
                    let rr = RowReader { section: "PUMPS", row };
                    rr.require(3)?;
                    b.add_link(&rr, LinkKind::Pump, 0.0, 0.0)?;
                }
                "VALVES" => {
                    let rr = RowReader { section: "VALVES", row };
                    rr.require(3)?;
                    let diameter = rr.real_or(3, "diameter", 0.0)?;
                    b.add_link(&rr, LinkKind::Valve, 0.0, diameter)?;
                }
                _ => break,
            }
        }
    }

    for row in doc.section("DEMANDS") {
        let rr = RowReader { section: "DEMANDS", row };
        rr.require(2)?;
        let demand = rr.real(1, "demand")?;
        if demand < 0.0 {
            return Err(rr.malformed("negative demand"));
        }
        match b.node_index.get(rr.str(0)).map(|&i| &mut b.nodes[i]) {
            Some(node) if node.kind == NodeKind::Junction => node.base_demand += demand,
            Some(_) => warnings.push(format!("line {}: demand on non-junction '{}' ignored", row.line, rr.str(0))),
            None => warnings.push(format!("line {}: demand for unknown node '{}' ignored", row.line, rr.str(0))),
        }
    }

    for row in doc.section("COORDINATES") {
        let rr = RowReader { section: "COORDINATES", row };
        rr.require(3)?;
        let x = rr.real(1, "x")?;
        let y = rr.real(2, "y")?;
        match b.node_index.get(rr.str(0)) {
            Some(&i) => b.nodes[i].position = (x, y),
            None => warnings.push(format!("line {}: coordinates for unknown node '{}' ignored", row.line, rr.str(0))),
        }
    }
    if let Some(node) = b.nodes.iter().find(|n| n.position.0.is_nan()) {
        return Err(InpError::MissingCoordinates(node.id.clone()));
    }

    let title = doc.sections.get("TITLE").map(|rows| {
        rows.iter()
            .map(|r| r.tokens.join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    });

    let mut options = IndexMap::new();
    for section in ["OPTIONS", "TIMES"] {
        for row in doc.section(section) {
            // Keys may be several words ("Hydraulic Timestep 1:00"); the last
            // token is the value.
            if let Some((value, key)) = row.tokens.split_last() {
                let key = if key.is_empty() { value.clone() } else { key.join(" ").to_ascii_uppercase() };
                options.insert(format!("{section}/{key}"), value.clone());
            }
        }
    }

    let bbox = BoundingBox::from_points(b.nodes.iter().map(|n| n.position))
        .ok_or_else(|| InpError::MissingSection("network has no nodes".into()))?;

    Ok(WaterNetwork {
        title,
        nodes: b.nodes,
        links: b.links,
        bbox,
        counts: b.counts,
        options,
        warnings,
        index: b.node_index,
    })
}

/// Tokenizes and builds in one step.
pub fn parse_inp(bytes: &[u8]) -> Result<WaterNetwork, InpError> {
    build_network(&tokenize_inp(bytes)?)
}
