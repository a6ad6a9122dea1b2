//! Relations over real-valued attributes, their loading from JSON and CSV,
//! and tuple identities.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Bound, Rect};

/// Position of an input tuple: relation index and row index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TupleId {
    pub rel: usize,
    pub row: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub name: String,
    /// Global attribute indices, in column order.
    pub attrs: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

/// Database instance: a global attribute list and one relation per table.
#[derive(Clone, Debug, PartialEq)]
pub struct Database {
    attrs: Vec<String>,
    relations: Vec<Relation>,
}

/// Allowed rows per relation. Selects a sub-database.
pub type Mask = Vec<Vec<bool>>;

pub(crate) fn key_bits(v: f64) -> u64 {
    // -0.0 and 0.0 join with each other.
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

impl Database {
    pub fn new(attrs: Vec<String>, relations: Vec<Relation>) -> Result<Database> {
        let d = attrs.len();
        if relations.is_empty() {
            return Err(Error::Malformed("database has no relations".into()));
        }
        if attrs.iter().collect::<HashSet<_>>().len() != d {
            return Err(Error::Malformed("duplicate attribute name".into()));
        }
        let mut covered = vec![false; d];
        for rel in &relations {
            if rel.attrs.is_empty() {
                return Err(Error::Malformed(format!("relation {} has no attributes", rel.name)));
            }
            if rel.attrs.iter().collect::<HashSet<_>>().len() != rel.attrs.len() {
                return Err(Error::Malformed(format!("relation {} repeats an attribute", rel.name)));
            }
            for &a in &rel.attrs {
                if a >= d {
                    return Err(Error::Index { what: format!("attributes of {}", rel.name), index: a });
                }
                covered[a] = true;
            }
            let mut seen = HashSet::new();
            for (i, row) in rel.rows.iter().enumerate() {
                if row.len() != rel.attrs.len() {
                    return Err(Error::Dimension {
                        record: format!("{} row {i}", rel.name),
                        detail: format!("expected {} values, got {}", rel.attrs.len(), row.len()),
                    });
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Malformed(format!("{} row {i} has a non-finite value", rel.name)));
                }
                if !seen.insert(row.iter().map(|&v| key_bits(v)).collect::<Vec<_>>()) {
                    return Err(Error::Malformed(format!("{} row {i} is a duplicate", rel.name)));
                }
            }
        }
        if let Some(a) = covered.iter().position(|&c| !c) {
            return Err(Error::Malformed(format!("attribute {} belongs to no relation", attrs[a])));
        }
        Ok(Database { attrs, relations })
    }

    pub fn attrs(&self) -> &[String] {
        &self.attrs
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, i: usize) -> &Relation {
        &self.relations[i]
    }

    /// Number of attributes, the dimension of join results.
    pub fn dim(&self) -> usize {
        self.attrs.len()
    }

    /// Total number of input tuples.
    pub fn size(&self) -> usize {
        self.relations.iter().map(|r| r.rows.len()).sum()
    }

    pub fn tuple(&self, id: TupleId) -> &[f64] {
        &self.relations[id.rel].rows[id.row]
    }

    pub fn tuple_ids(&self) -> impl Iterator<Item = TupleId> + '_ {
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(rel, r)| (0..r.rows.len()).map(move |row| TupleId { rel, row }))
    }

    pub fn full_mask(&self) -> Mask {
        self.relations.iter().map(|r| vec![true; r.rows.len()]).collect()
    }

    /// Mask with the given tuples removed.
    pub fn mask_without(&self, removed: &[TupleId]) -> Mask {
        let mut m = self.full_mask();
        for t in removed {
            m[t.rel][t.row] = false;
        }
        m
    }

    /// Degenerate rectangle fixing the tuple's own attributes; its
    /// intersection with the join result is exactly the results built from it.
    pub fn tuple_rect(&self, id: TupleId) -> Rect {
        let rel = &self.relations[id.rel];
        let mut r = Rect::full(self.dim());
        for (pos, &a) in rel.attrs.iter().enumerate() {
            let v = rel.rows[id.row][pos];
            r.lo[a] = Bound::Finite(v);
            r.hi[a] = Bound::Finite(v);
        }
        r
    }

    pub fn from_json(text: &str) -> Result<Database> {
        let f: DatabaseFile = serde_json::from_str(text)?;
        f.into_database(|_| Err(Error::Malformed("inline database needs rows for every relation".into())))
    }

    pub fn to_json(&self) -> String {
        let f = DatabaseFile {
            attributes: self.attrs.clone(),
            relations: self
                .relations
                .iter()
                .map(|r| RelationFile {
                    name: r.name.clone(),
                    attributes: r.attrs.iter().map(|&a| self.attrs[a].clone()).collect(),
                    rows: Some(r.rows.clone()),
                    file: None,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&f).expect("database serializes")
    }

    /// Loads a schema file whose relations either carry rows inline or name
    /// a CSV file (relative to the schema) with one header row of
    /// attribute names.
    pub fn load(path: &Path) -> Result<Database> {
        let f: DatabaseFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        f.into_database(|rf| {
            let file = rf.file.as_ref().ok_or_else(|| Error::Malformed(format!("relation {} has neither rows nor file", rf.name)))?;
            read_csv(&base.join(file), &rf.attributes)
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Reads a CSV relation, reordering columns to `attrs`.
pub fn read_csv(path: &Path, attrs: &[String]) -> Result<Vec<Vec<f64>>> {
    let mut rd = csv::Reader::from_path(path)?;
    let header: Vec<String> = rd.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let cols: Vec<usize> = attrs
        .iter()
        .map(|a| {
            header
                .iter()
                .position(|h| h == a)
                .ok_or_else(|| Error::Malformed(format!("{} lacks column {a}", path.display())))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let row = cols
            .iter()
            .map(|&c| {
                rec.get(c)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Malformed(format!("{}: bad value in column {c}", path.display())))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Serialize, Deserialize)]
struct RelationFile {
    name: String,
    attributes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rows: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    file: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct DatabaseFile {
    attributes: Vec<String>,
    relations: Vec<RelationFile>,
}

impl DatabaseFile {
    fn into_database<F: Fn(&RelationFile) -> Result<Vec<Vec<f64>>>>(self, fetch: F) -> Result<Database> {
        let mut rels = Vec::with_capacity(self.relations.len());
        for rf in &self.relations {
            let attrs = rf
                .attributes
                .iter()
                .map(|a| {
                    self.attributes
                        .iter()
                        .position(|x| x == a)
                        .ok_or_else(|| Error::Malformed(format!("relation {} uses unknown attribute {a}", rf.name)))
                })
                .collect::<Result<Vec<usize>>>()?;
            let rows = match &rf.rows {
                Some(r) => r.clone(),
                None => fetch(rf)?,
            };
            rels.push(Relation { name: rf.name.clone(), attrs, rows });
        }
        Database::new(self.attributes, rels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Database {
        Database::new(
            vec!["A".into(), "B".into()],
            vec![
                Relation { name: "R".into(), attrs: vec![0], rows: vec![vec![1.0]] },
                Relation { name: "S".into(), attrs: vec![0, 1], rows: vec![vec![1.0, 2.0], vec![1.0, 3.0]] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip() {
        let db = tiny();
        assert_eq!(Database::from_json(&db.to_json()).unwrap(), db);
    }

    #[test]
    fn duplicate_rows_rejected() {
        let r = Relation { name: "R".into(), attrs: vec![0], rows: vec![vec![1.0], vec![1.0]] };
        assert!(Database::new(vec!["A".into()], vec![r]).is_err());
    }

    #[test]
    fn uncovered_attribute_rejected() {
        let r = Relation { name: "R".into(), attrs: vec![0], rows: vec![] };
        assert!(Database::new(vec!["A".into(), "B".into()], vec![r]).is_err());
    }

    #[test]
    fn csv_columns_reordered() {
        let dir = std::env::temp_dir().join(format!("setout-csv-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("s.csv"), "B,A\n2,1\n3,1\n").unwrap();
        std::fs::write(
            dir.join("schema.json"),
            r#"{"attributes":["A","B"],"relations":[{"name":"R","attributes":["A"],"rows":[[1]]},{"name":"S","attributes":["A","B"],"file":"s.csv"}]}"#,
        )
        .unwrap();
        let db = Database::load(&dir.join("schema.json")).unwrap();
        assert_eq!(db, tiny());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn tuple_rect_fixes_own_attributes() {
        let db = tiny();
        let r = db.tuple_rect(TupleId { rel: 1, row: 1 });
        assert!(r.contains(&[1.0, 3.0]));
        assert!(!r.contains(&[1.0, 2.0]));
        let r0 = db.tuple_rect(TupleId { rel: 0, row: 0 });
        assert!(r0.contains(&[1.0, 99.0]));
    }
}
