//! JSON file formats: algebra spec files and reconstructed tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chiral::ModeTable;
use crate::conflie::{CLieRep, Gen};
use crate::error::{Error, Result};
use crate::exactnum::Scalar;
use crate::gradedlinalg::{BlockMap, GradedSpace, Matrix, WeightLabel};
use crate::reconstruct::{MuDTable, MuKey};

pub const SPEC_FORMAT: &str = "recon-spec/1";
pub const MUD_FORMAT: &str = "recon-mud/1";

/// A space with its conformal action and chiral products, as read from or written to a spec file.
#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    pub name: Option<String>,
    pub rep: CLieRep,
    pub table: ModeTable,
    /// Sources above this doubled degree are skipped by the general solver.
    pub source_cutoff2: Option<i64>,
}

impl AlgebraSpec {
    pub fn dim(&self) -> usize {
        self.rep.dim
    }
}

type Rows = Vec<Vec<Scalar>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    format: String,
    meta: Meta,
    space: SpaceSection,
    lie: BTreeMap<String, OpSection>,
    modes: ModesSection,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    dim: usize,
    cutoff2: i64,
    vacuum: usize,
    /// True if some basis vector is odd.
    odd_present: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source_cutoff2: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceSection {
    components: Vec<Component>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Component {
    delta2: i64,
    labels: Vec<Label>,
    gram: Rows,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Label {
    cartan: Vec<Scalar>,
    parity: u8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpSection {
    degree2: i64,
    #[serde(default)]
    parity: u8,
    /// Keyed by the doubled source degree.
    blocks: BTreeMap<String, Rows>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModesSection {
    translation: BTreeMap<String, Rows>,
    /// Keyed "(2Δ',2Δ'',n)".
    blocks: BTreeMap<String, Rows>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MudFile {
    format: String,
    provenance: Provenance,
    source_cutoff2: i64,
    instances: usize,
    half_integer_slots: usize,
    /// Keyed "(2Δ',2Δ'',n,m,σ)".
    blocks: BTreeMap<String, Rows>,
}

/// Header of a table file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub input_sha256: String,
    pub dim: usize,
    pub cutoff2: i64,
    pub solver: String,
}

fn rows_of(m: &Matrix) -> Rows {
    m.row_vecs()
}

fn matrix_of(rows: &Rows, r: usize, c: usize, what: &str) -> Result<Matrix> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Format(format!("{what}: expected a {r}x{c} matrix")));
    }
    if r == 0 {
        return Ok(Matrix::zeros(0, c));
    }
    Ok(Matrix::from_rows(rows.clone()))
}

fn parse_key(s: &str, n: usize, what: &str) -> Result<Vec<i64>> {
    let bad = || Error::Format(format!("{what}: bad key '{s}'"));
    let inner = s.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
    let v: Vec<i64> =
        inner.split(',').map(|x| x.trim().parse::<i64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    if v.len() != n {
        return Err(bad());
    }
    Ok(v)
}

fn parse_degree(s: &str, what: &str) -> Result<i64> {
    s.trim().parse::<i64>().map_err(|_| Error::Format(format!("{what}: bad degree key '{s}'")))
}

fn op_section(m: &BlockMap) -> OpSection {
    let blocks =
        m.blocks.iter().filter(|(_, b)| b.rows > 0 && b.cols > 0).map(|(s, b)| (s.to_string(), rows_of(b))).collect();
    OpSection { degree2: m.degree2, parity: m.parity, blocks }
}

fn blockmap_of(
    space: &GradedSpace,
    degree2: i64,
    parity: u8,
    blocks: &BTreeMap<String, Rows>,
    what: &str,
) -> Result<BlockMap> {
    let mut parsed = BTreeMap::new();
    for (k, rows) in blocks {
        let s = parse_degree(k, what)?;
        let t = s + degree2;
        if space.dim(s) == 0 {
            return Err(Error::Format(format!("{what}: block for absent component 2Δ={s}")));
        }
        if t > space.cutoff2 || space.dim(t) == 0 {
            return Err(Error::Format(format!("{what}: block at 2Δ={s} maps outside the space")));
        }
        parsed.insert(s, matrix_of(rows, space.dim(t), space.dim(s), &format!("{what} at 2Δ={s}"))?);
    }
    Ok(BlockMap::from_fn(space, degree2, parity, |s| {
        parsed.remove(&s).unwrap_or_else(|| Matrix::zeros(space.dim(s + degree2), space.dim(s)))
    }))
}

/// Spec file as canonical JSON.
pub fn spec_to_json(spec: &AlgebraSpec) -> Value {
    let space = &spec.rep.space;
    let components = space
        .components
        .iter()
        .map(|(&d, labels)| Component {
            delta2: d,
            labels: labels.iter().map(|l| Label { cartan: l.cartan.clone(), parity: l.parity }).collect(),
            gram: rows_of(&space.gram_of(d)),
        })
        .collect();
    let lie = spec.rep.action.iter().map(|(g, m)| (g.to_string(), op_section(m))).collect();
    let modes = ModesSection {
        translation: op_section(&spec.table.t).blocks,
        blocks: spec.table.blocks.iter().map(|(&(a, b, n), m)| (format!("({a},{b},{n})"), rows_of(m))).collect(),
    };
    let file = SpecFile {
        format: SPEC_FORMAT.into(),
        meta: Meta {
            dim: spec.rep.dim,
            cutoff2: space.cutoff2,
            vacuum: spec.table.vacuum,
            odd_present: space.components.values().flatten().any(|l| l.parity == 1),
            source_cutoff2: spec.source_cutoff2,
            name: spec.name.clone(),
        },
        space: SpaceSection { components },
        lie,
        modes,
    };
    serde_json::to_value(file).expect("spec serializes")
}

/// Parses and validates a spec file.
pub fn spec_from_json(v: &Value) -> Result<AlgebraSpec> {
    let file: SpecFile = serde_json::from_value(v.clone()).map_err(|e| Error::Format(format!("spec schema: {e}")))?;
    spec_from_file(file)
}

pub fn spec_from_str(s: &str) -> Result<AlgebraSpec> {
    let file: SpecFile = serde_json::from_str(s).map_err(|e| Error::Format(format!("spec schema: {e}")))?;
    spec_from_file(file)
}

fn spec_from_file(file: SpecFile) -> Result<AlgebraSpec> {
    if file.format != SPEC_FORMAT {
        return Err(Error::Format(format!("unsupported format '{}', expected '{SPEC_FORMAT}'", file.format)));
    }
    let meta = file.meta;
    if meta.dim == 0 {
        return Err(Error::Format("meta.dim must be positive".into()));
    }
    let mut components = BTreeMap::new();
    let mut gram = BTreeMap::new();
    let mut odd = false;
    for c in &file.space.components {
        if components.contains_key(&c.delta2) {
            return Err(Error::Format(format!("duplicate component 2Δ={}", c.delta2)));
        }
        let mut labels: Vec<WeightLabel> = Vec::with_capacity(c.labels.len());
        for l in &c.labels {
            if l.parity > 1 {
                return Err(Error::Format(format!("parity must be 0 or 1 at 2Δ={}", c.delta2)));
            }
            odd |= l.parity == 1;
            // multiplicity index within one weight
            let i = labels.iter().filter(|x| x.cartan == l.cartan).count();
            labels.push(WeightLabel::new(c.delta2, l.cartan.clone(), l.parity, i));
        }
        let n = labels.len();
        gram.insert(c.delta2, matrix_of(&c.gram, n, n, &format!("gram at 2Δ={}", c.delta2))?);
        components.insert(c.delta2, labels);
    }
    if odd != meta.odd_present {
        return Err(Error::Format("meta.odd_present disagrees with the labels".into()));
    }
    let space = GradedSpace::new(components, meta.cutoff2, gram).map_err(|e| Error::Format(e.to_string()))?;
    let mut action = BTreeMap::new();
    for (name, op) in &file.lie {
        let g: Gen = name.parse().map_err(|_| Error::Format(format!("unknown generator '{name}'")))?;
        if op.degree2 != g.degree2() {
            return Err(Error::Format(format!("{g}: degree2 {} should be {}", op.degree2, g.degree2())));
        }
        action.insert(g, blockmap_of(&space, op.degree2, op.parity, &op.blocks, &format!("lie.{name}"))?);
    }
    let rep = CLieRep::new(meta.dim, space.clone(), action).map_err(|e| Error::Format(e.to_string()))?;
    let t = blockmap_of(&space, 2, 0, &file.modes.translation, "modes.translation")?;
    let mut blocks = BTreeMap::new();
    for (k, rows) in &file.modes.blocks {
        let v = parse_key(k, 3, "modes.blocks")?;
        let (d1, d2, n) = (v[0], v[1], v[2]);
        let tg = d1 + d2 + 2 * n;
        if space.dim(d1) == 0 || space.dim(d2) == 0 || tg < 0 || tg > space.cutoff2 || space.dim(tg) == 0 {
            return Err(Error::Format(format!("modes.blocks: {k} refers to absent components")));
        }
        let m = matrix_of(rows, space.dim(tg), space.dim(d1) * space.dim(d2), &format!("modes.blocks {k}"))?;
        blocks.insert((d1, d2, n), m);
    }
    let table = ModeTable::new(space, meta.vacuum, t, blocks).map_err(|e| Error::Format(e.to_string()))?;
    Ok(AlgebraSpec { name: meta.name, rep, table, source_cutoff2: meta.source_cutoff2 })
}

/// Table file as canonical JSON.
pub fn mud_to_json(mud: &MuDTable, input_sha256: &str) -> Value {
    let file = MudFile {
        format: MUD_FORMAT.into(),
        provenance: Provenance {
            input_sha256: input_sha256.into(),
            dim: mud.dim,
            cutoff2: mud.cutoff2(),
            solver: mud.solver.clone(),
        },
        source_cutoff2: mud.source_cutoff2,
        instances: mud.instances,
        half_integer_slots: mud.half_integer_slots,
        blocks: mud.blocks.iter().map(|(&(a, b, n, m, s), x)| (format!("({a},{b},{n},{m},{s})"), rows_of(x))).collect(),
    };
    serde_json::to_value(file).expect("table serializes")
}

/// Parses a table file against the space it was built on.
pub fn mud_from_json(v: &Value, space: &GradedSpace) -> Result<(MuDTable, Provenance)> {
    let file: MudFile = serde_json::from_value(v.clone()).map_err(|e| Error::Format(format!("table schema: {e}")))?;
    if file.format != MUD_FORMAT {
        return Err(Error::Format(format!("unsupported format '{}', expected '{MUD_FORMAT}'", file.format)));
    }
    if file.provenance.cutoff2 != space.cutoff2 {
        return Err(Error::Format("table cutoff differs from the spec".into()));
    }
    let mut blocks: BTreeMap<MuKey, Matrix> = BTreeMap::new();
    for (k, rows) in &file.blocks {
        let v = parse_key(k, 5, "blocks")?;
        let (d1, d2, n) = (v[0], v[1], v[2]);
        if v[3] < 0 || v[4] < 1 {
            return Err(Error::Format(format!("blocks: bad harmonic label in {k}")));
        }
        let tg = d1 + d2 + 2 * n;
        if space.dim(d1) == 0 || space.dim(d2) == 0 || tg < 0 || tg > space.cutoff2 || space.dim(tg) == 0 {
            return Err(Error::Format(format!("blocks: {k} refers to absent components")));
        }
        let m = matrix_of(rows, space.dim(tg), space.dim(d1) * space.dim(d2), &format!("blocks {k}"))?;
        blocks.insert((d1, d2, n, v[3] as u32, v[4] as usize), m);
    }
    let mud = MuDTable {
        dim: file.provenance.dim,
        space: space.clone(),
        blocks,
        solver: file.provenance.solver.clone(),
        source_cutoff2: file.source_cutoff2,
        instances: file.instances,
        half_integer_slots: file.half_integer_slots,
    };
    Ok((mud, file.provenance))
}

fn truncate_map(m: &BlockMap, space: &GradedSpace) -> BlockMap {
    BlockMap::from_fn(space, m.degree2, m.parity, |s| {
        m.block(s).cloned().unwrap_or_else(|| Matrix::zeros(space.dim(s + m.degree2), space.dim(s)))
    })
}

impl AlgebraSpec {
    /// Restriction to components with 2Δ ≤ `cutoff2`.
    pub fn truncate(&self, cutoff2: i64) -> Result<AlgebraSpec> {
        let old = &self.rep.space;
        if cutoff2 > old.cutoff2 {
            return Err(Error::Precondition(format!("cutoff 2Δ={cutoff2} exceeds the spec cutoff {}", old.cutoff2)));
        }
        if cutoff2 == old.cutoff2 {
            return Ok(self.clone());
        }
        let components = old.components.range(..=cutoff2).map(|(k, v)| (*k, v.clone())).collect();
        let gram = old.gram.range(..=cutoff2).map(|(k, v)| (*k, v.clone())).collect();
        let space = GradedSpace::new(components, cutoff2, gram)?;
        let action = self.rep.action.iter().map(|(g, m)| (*g, truncate_map(m, &space))).collect();
        let rep = CLieRep::new(self.rep.dim, space.clone(), action)?;
        let blocks = self
            .table
            .blocks
            .iter()
            .filter(|(&(a, b, n), _)| a <= cutoff2 && b <= cutoff2 && a + b + 2 * n <= cutoff2)
            .map(|(k, m)| (*k, m.clone()))
            .collect();
        let table = ModeTable::new(space.clone(), self.table.vacuum, truncate_map(&self.table.t, &space), blocks)?;
        Ok(AlgebraSpec {
            name: self.name.clone(),
            rep,
            table,
            source_cutoff2: self.source_cutoff2.map(|s| s.min(cutoff2)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_tensor_2d;

    #[test]
    fn spec_round_trip_is_canonical() {
        let m = build_tensor_2d(2);
        let spec = AlgebraSpec {
            name: Some("tensor2d".into()),
            rep: m.rep.clone(),
            table: m.table.clone(),
            source_cutoff2: None,
        };
        let v = spec_to_json(&spec);
        let back = spec_from_json(&v).unwrap();
        assert_eq!(spec_to_json(&back), v);
        assert_eq!(back.table.t, m.table.t, "t");
        assert_eq!(back.table, m.table);
    }

    #[test]
    fn table_round_trip() {
        let m = build_tensor_2d(2);
        let mud = crate::reconstruct::reconstruct_d2(&m.table, &m.rep).unwrap();
        let v = mud_to_json(&mud, "ab");
        let (back, prov) = mud_from_json(&v, &m.space).unwrap();
        assert_eq!(prov.input_sha256, "ab");
        assert_eq!(crate::reconstruct::first_table_difference(&mud, &back), None);
        assert_eq!(mud_to_json(&back, "ab"), v);
    }

    #[test]
    fn truncation_matches_a_smaller_build() {
        let big = build_tensor_2d(3);
        let small = build_tensor_2d(2);
        let spec = AlgebraSpec { name: None, rep: big.rep, table: big.table, source_cutoff2: None };
        let t = spec.truncate(4).unwrap();
        let want = AlgebraSpec { name: None, rep: small.rep, table: small.table, source_cutoff2: None };
        assert_eq!(spec_to_json(&t), spec_to_json(&want));
    }

    #[test]
    fn rejects_wrong_format_and_shapes() {
        assert!(matches!(spec_from_str("{}"), Err(Error::Format(_))));
        assert!(matches!(spec_from_str(""), Err(Error::Format(_))));
        let m = build_tensor_2d(1);
        let spec = AlgebraSpec { name: None, rep: m.rep, table: m.table, source_cutoff2: None };
        let mut v = spec_to_json(&spec);
        v["lie"]["H"]["blocks"]["2"] = serde_json::json!([["1"]]);
        assert!(matches!(spec_from_json(&v), Err(Error::Format(_))));
    }
}
