//! Edge paths, the two elementary combinatorial deformations, and audited move logs.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, Embedding};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, GeometryCase, Plane, Vertex};

#[derive(Clone, Debug, PartialEq)]
pub struct EdgePath {
    vertices: Vec<Vertex>,
}

impl EdgePath {
    pub fn new(geo: &Geometry, vertices: Vec<Vertex>) -> Result<Self> {
        let p = EdgePath { vertices };
        p.validate(geo)?;
        Ok(p)
    }

    pub fn from_vertices_unchecked(vertices: Vec<Vertex>) -> Self {
        EdgePath { vertices }
    }

    pub fn single(v: Vertex) -> Self {
        EdgePath { vertices: vec![v] }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vertex> {
        self.vertices
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }

    pub fn first(&self) -> &Vertex {
        &self.vertices[0]
    }

    pub fn last(&self) -> &Vertex {
        self.vertices.last().expect("paths are nonempty")
    }

    pub fn has_planes(&self) -> bool {
        self.vertices.iter().any(Vertex::is_plane)
    }

    pub fn reversed(&self) -> Self {
        EdgePath { vertices: self.vertices.iter().rev().cloned().collect() }
    }

    /// Nonempty, one geometry case, consecutive vertices incident and distinct.
    pub fn validate(&self, geo: &Geometry) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::Precondition("empty edge path".into()));
        }
        for v in &self.vertices {
            if v.case() != geo.case {
                return Err(Error::CaseMismatch);
            }
        }
        for (i, w) in self.vertices.windows(2).enumerate() {
            if w[0].type_index() == w[1].type_index() {
                return Err(Error::Incidence(format!("vertices {i} and {} have the same type", i + 1)));
            }
            if !geo.incident(&w[0], &w[1])? {
                return Err(Error::Incidence(format!("vertices {i} and {} are not incident", i + 1)));
            }
        }
        Ok(())
    }

    pub fn approx_eq(&self, other: &EdgePath, geo: &Geometry) -> bool {
        self.vertices.len() == other.vertices.len()
            && self.vertices.iter().zip(&other.vertices).all(|(u, v)| geo.vertex_eq(u, v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    /// (u) → (u, v, u)
    InsertBacktrack,
    /// (u, v, u) → (u)
    RemoveBacktrack,
    /// (u, v) → (u, w, v) for a flag {u, v, w}
    ExpandEdge,
    /// (u, w, v) → (u, v) for a flag {u, v, w}
    ContractEdge,
}

impl MoveKind {
    pub fn inverse(self) -> Self {
        match self {
            MoveKind::InsertBacktrack => MoveKind::RemoveBacktrack,
            MoveKind::RemoveBacktrack => MoveKind::InsertBacktrack,
            MoveKind::ExpandEdge => MoveKind::ContractEdge,
            MoveKind::ContractEdge => MoveKind::ExpandEdge,
        }
    }
}

/// One elementary deformation at `position`; the witness is the vertex
/// inserted or removed.
#[derive(Clone, Debug, PartialEq)]
pub struct Move {
    pub kind: MoveKind,
    pub position: usize,
    pub witness: Vertex,
}

impl Move {
    pub fn inverse(&self) -> Move {
        Move { kind: self.kind.inverse(), position: self.position, witness: self.witness.clone() }
    }
}

fn is_flag(geo: &Geometry, vs: [&Vertex; 3]) -> Result<bool> {
    geo.is_flag(&vs)
}

fn out_of_range(m: &Move, len: usize) -> Error {
    Error::InvalidMove(format!("{:?} at position {} on a path with {len} vertices", m.kind, m.position))
}

/// Apply a move to a vertex list in place, checking its precondition.
pub fn apply_move_in_place(geo: &Geometry, path: &mut Vec<Vertex>, m: &Move) -> Result<()> {
    let p = m.position;
    let n = path.len();
    let w = &m.witness;
    match m.kind {
        MoveKind::InsertBacktrack => {
            if p >= n {
                return Err(out_of_range(m, n));
            }
            let u = &path[p];
            if u.type_index() == w.type_index() || !geo.incident(u, w)? {
                return Err(Error::InvalidMove("backtrack witness is not incident with the vertex".into()));
            }
            let u = u.clone();
            path.splice(p + 1..p + 1, [w.clone(), u]);
        }
        MoveKind::RemoveBacktrack => {
            if p + 2 >= n {
                return Err(out_of_range(m, n));
            }
            if !geo.vertex_eq(&path[p], &path[p + 2]) {
                return Err(Error::InvalidMove("subpath is not a backtrack".into()));
            }
            if !geo.vertex_eq(&path[p + 1], w) {
                return Err(Error::InvalidMove("backtrack witness does not match the path".into()));
            }
            path.drain(p + 1..p + 3);
        }
        MoveKind::ExpandEdge => {
            if p + 1 >= n {
                return Err(out_of_range(m, n));
            }
            if !is_flag(geo, [&path[p], w, &path[p + 1]])? {
                return Err(Error::InvalidMove("expansion witness does not form a flag".into()));
            }
            path.insert(p + 1, w.clone());
        }
        MoveKind::ContractEdge => {
            if p + 2 >= n {
                return Err(out_of_range(m, n));
            }
            if !geo.vertex_eq(&path[p + 1], w) {
                return Err(Error::InvalidMove("contraction witness does not match the path".into()));
            }
            if !is_flag(geo, [&path[p], &path[p + 1], &path[p + 2]])? {
                return Err(Error::InvalidMove("contracted subpath is not a flag".into()));
            }
            path.remove(p + 1);
        }
    }
    Ok(())
}

pub fn apply_move(geo: &Geometry, path: &EdgePath, m: &Move) -> Result<EdgePath> {
    let mut v = path.vertices.clone();
    apply_move_in_place(geo, &mut v, m)?;
    Ok(EdgePath { vertices: v })
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct MoveLog {
    pub moves: Vec<Move>,
    pub budget: Option<usize>,
}

impl MoveLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_budget(budget: usize) -> Self {
        MoveLog { moves: Vec::new(), budget: Some(budget) }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn push(&mut self, m: Move) {
        self.moves.push(m);
    }

    pub fn append(&mut self, other: &MoveLog) {
        self.moves.extend(other.moves.iter().cloned());
    }

    /// Inverse moves in reverse order.
    pub fn inverse(&self) -> MoveLog {
        MoveLog { moves: self.moves.iter().rev().map(Move::inverse).collect(), budget: self.budget }
    }

    pub fn check_budget(&self) -> Result<()> {
        match self.budget {
            Some(b) if self.moves.len() > b => Err(Error::BudgetExceeded { used: self.moves.len(), budget: b }),
            _ => Ok(()),
        }
    }

    /// Replay every move from `source`, validating each step.
    pub fn replay(&self, geo: &Geometry, source: &EdgePath) -> Result<EdgePath> {
        source.validate(geo)?;
        let mut v = source.vertices.clone();
        for (i, m) in self.moves.iter().enumerate() {
            apply_move_in_place(geo, &mut v, m).map_err(|e| Error::InvalidMove(format!("move {i}: {e}")))?;
        }
        let out = EdgePath { vertices: v };
        out.validate(geo)?;
        Ok(out)
    }

    /// Replay and compare with the expected target.
    pub fn verify(&self, geo: &Geometry, source: &EdgePath, target: &EdgePath) -> Result<()> {
        let out = self.replay(geo, source)?;
        if !out.approx_eq(target, geo) {
            return Err(Error::InvalidMove("replay does not reach the target path".into()));
        }
        Ok(())
    }

    /// One JSON record per line.
    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for m in &self.moves {
            let rec = MoveRecord { kind: m.kind, position: m.position, witness: VertexRecord::from_vertex(&m.witness) };
            s.push_str(&serde_json::to_string(&rec).expect("records serialize"));
            s.push('\n');
        }
        s
    }

    pub fn from_jsonl(geo: &Geometry, text: &str) -> Result<MoveLog> {
        let mut log = MoveLog::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: MoveRecord =
                serde_json::from_str(line).map_err(|e| Error::Io(format!("line {}: {e}", i + 1)))?;
            log.push(Move { kind: rec.kind, position: rec.position, witness: rec.witness.to_vertex(geo)? });
        }
        Ok(log)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    #[serde(rename = "type")]
    pub kind: String,
    pub case: String,
    pub coords: Vec<f64>,
}

impl VertexRecord {
    pub fn from_vertex(v: &Vertex) -> Self {
        let coords = match v {
            Vertex::Point(p) => p.rep().coeffs().to_vec(),
            Vertex::Line(l) => l.a().coeffs().iter().chain(l.b().coeffs()).copied().collect(),
            Vertex::Plane(pi) => pi.emb().basis_images().iter().flat_map(|x| x.coeffs().to_vec()).collect(),
        };
        VertexRecord { kind: v.kind_name().to_string(), case: v.case().name().to_string(), coords }
    }

    pub fn to_vertex(&self, geo: &Geometry) -> Result<Vertex> {
        if GeometryCase::parse(&self.case) != Some(geo.case) {
            return Err(Error::CaseMismatch);
        }
        let (ta, tb) = (geo.case.a(), geo.case.b());
        let (da, db) = (ta.dim(), tb.dim());
        match self.kind.as_str() {
            "point" => Ok(Vertex::Point(geo.point(&AlgebraElement::new(ta, &self.coords)?)?)),
            "line" => {
                if self.coords.len() != da + db {
                    return Err(Error::BadLength { got: self.coords.len(), expected: da + db });
                }
                let a = AlgebraElement::new(ta, &self.coords[..da])?;
                let b = AlgebraElement::new(tb, &self.coords[da..])?;
                Ok(Vertex::Line(geo.line(&a, &b)?))
            }
            "plane" => {
                if !self.coords.len().is_multiple_of(db) {
                    return Err(Error::BadLength { got: self.coords.len(), expected: db * geo.field().k_dim(ta) });
                }
                let images = self
                    .coords
                    .chunks(db)
                    .map(|c| AlgebraElement::new(tb, c))
                    .collect::<Result<Vec<_>>>()?;
                let emb = Embedding::from_images(geo.field(), ta, tb, images)?;
                Ok(Vertex::Plane(geo.plane(emb)?))
            }
            other => Err(Error::Io(format!("unknown vertex type {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct MoveRecord {
    kind: MoveKind,
    position: usize,
    witness: VertexRecord,
}

/// A path under transformation together with the log of applied moves.
#[derive(Clone, Debug)]
pub struct Worker<'g> {
    pub geo: &'g Geometry,
    pub path: Vec<Vertex>,
    pub log: MoveLog,
    /// Largest cost of a single (y, M, z) → (y, N, z) transformation so far.
    pub k_emp: usize,
    pub k_budget: Option<usize>,
}

impl<'g> Worker<'g> {
    pub fn new(geo: &'g Geometry, path: &EdgePath) -> Self {
        Worker { geo, path: path.vertices.clone(), log: MoveLog::new(), k_emp: 0, k_budget: None }
    }

    pub fn with_k_budget(mut self, k: usize) -> Self {
        self.k_budget = Some(k);
        self
    }

    /// Apply a log recorded on a standalone segment, shifted by `offset`.
    pub fn apply_shifted(&mut self, log: &MoveLog, offset: usize) -> Result<()> {
        for m in &log.moves {
            let mut m = m.clone();
            m.position += offset;
            self.apply(m)?;
        }
        Ok(())
    }

    pub fn edge_path(&self) -> EdgePath {
        EdgePath { vertices: self.path.clone() }
    }

    pub fn apply(&mut self, m: Move) -> Result<()> {
        apply_move_in_place(self.geo, &mut self.path, &m)?;
        self.log.push(m);
        Ok(())
    }

    pub fn apply_log(&mut self, log: &MoveLog) -> Result<()> {
        for m in &log.moves {
            self.apply(m.clone())?;
        }
        Ok(())
    }

    pub fn insert_backtrack(&mut self, pos: usize, v: Vertex) -> Result<()> {
        self.apply(Move { kind: MoveKind::InsertBacktrack, position: pos, witness: v })
    }

    pub fn remove_backtrack(&mut self, pos: usize) -> Result<()> {
        let w = self.path.get(pos + 1).cloned().ok_or_else(|| Error::InvalidMove("index out of range".into()))?;
        self.apply(Move { kind: MoveKind::RemoveBacktrack, position: pos, witness: w })
    }

    pub fn expand(&mut self, pos: usize, w: Vertex) -> Result<()> {
        self.apply(Move { kind: MoveKind::ExpandEdge, position: pos, witness: w })
    }

    /// Remove the vertex at pos + 1.
    pub fn contract(&mut self, pos: usize) -> Result<()> {
        let w = self.path.get(pos + 1).cloned().ok_or_else(|| Error::InvalidMove("index out of range".into()))?;
        self.apply(Move { kind: MoveKind::ContractEdge, position: pos, witness: w })
    }

    /// Replace the segment path[pos..=pos+m] by (path[pos], inner…, path[pos+m]),
    /// everything lying in the residue of π; costs m + inner.len() + 1 moves.
    pub fn residue_replace(&mut self, pos: usize, m: usize, inner: &[Vertex], pi: &Plane) -> Result<()> {
        if m == 0 || pos + m >= self.path.len() {
            return Err(Error::InvalidMove("residue segment out of range".into()));
        }
        let pv = Vertex::Plane(pi.clone());
        self.expand(pos, pv)?;
        for _ in 1..m {
            self.contract(pos + 1)?;
        }
        for (j, w) in inner.iter().enumerate() {
            self.expand(pos + j, w.clone())?;
        }
        self.contract(pos + inner.len())
    }

    /// Replace the plane at pos + 1 by the inner vertices (all in its residue);
    /// costs inner.len() + 1 moves.
    pub fn replace_plane(&mut self, pos: usize, inner: &[Vertex]) -> Result<()> {
        for (j, w) in inner.iter().enumerate() {
            self.expand(pos + j, w.clone())?;
        }
        self.contract(pos + inner.len())
    }
}
