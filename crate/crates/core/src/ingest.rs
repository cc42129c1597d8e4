//! Country registry and bilateral trade record loading.
//!
//! Trade files are UTF-8 CSV with the header
//! `year,exporter_iso3,importer_iso3,value_usd,category`, where `category`
//! is `aggregate` or `oil_gas`. Registry files use `index,iso3,name`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::TradeMatrix;

pub const TRADE_HEADER: [&str; 5] = [
    "year",
    "exporter_iso3",
    "importer_iso3",
    "value_usd",
    "category",
];
pub const REGISTRY_HEADER: [&str; 3] = ["index", "iso3", "name"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Country {
    pub index: usize,
    pub iso3: String,
    pub name: String,
}

/// Ordered set of countries; position in the list is the matrix index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountryRegistry {
    entries: Vec<Country>,
    by_iso3: HashMap<String, usize>,
}

impl CountryRegistry {
    /// Builds a registry from `(iso3, name)` pairs, assigning indices in order.
    pub fn from_pairs<I, S, T>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let entries = pairs
            .into_iter()
            .enumerate()
            .map(|(index, (iso3, name))| Country {
                index,
                iso3: iso3.into(),
                name: name.into(),
            })
            .collect();
        Self::from_entries(entries)
    }

    pub fn from_entries(mut entries: Vec<Country>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::Registry(format!(
                "need at least 2 countries, got {}",
                entries.len()
            )));
        }
        entries.sort_by_key(|c| c.index);
        let mut by_iso3 = HashMap::with_capacity(entries.len());
        for (expected, c) in entries.iter().enumerate() {
            if c.index != expected {
                return Err(Error::Registry(format!(
                    "indices must be contiguous from 0; expected {expected}, found {}",
                    c.index
                )));
            }
            if c.iso3.len() != 3 || !c.iso3.bytes().all(|b| b.is_ascii_alphanumeric()) {
                return Err(Error::Registry(format!("bad iso3 code `{}`", c.iso3)));
            }
            if by_iso3.insert(c.iso3.clone(), c.index).is_some() {
                return Err(Error::Registry(format!("duplicate iso3 code `{}`", c.iso3)));
            }
        }
        Ok(Self { entries, by_iso3 })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = open_csv(path, &REGISTRY_HEADER)?;
        let mut entries = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let row = i + 1;
            let rec = rec.map_err(|e| malformed(path, row, e.to_string()))?;
            if rec.len() != 3 {
                return Err(malformed(
                    path,
                    row,
                    format!("expected 3 columns, found {}", rec.len()),
                ));
            }
            let index = parse_field::<usize>(path, row, "index", &rec[0])?;
            entries.push(Country {
                index,
                iso3: rec[1].trim().to_string(),
                name: rec[2].trim().to_string(),
            });
        }
        Self::from_entries(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, iso3: &str) -> Option<usize> {
        self.by_iso3.get(iso3).copied()
    }

    pub fn iso3(&self, index: usize) -> &str {
        &self.entries[index].iso3
    }

    pub fn entries(&self) -> &[Country] {
        &self.entries
    }

    /// Resolves a list of codes, failing on the first unknown one.
    pub fn resolve_all<S: AsRef<str>>(&self, codes: &[S]) -> Result<Vec<usize>> {
        codes
            .iter()
            .map(|c| {
                self.index_of(c.as_ref())
                    .ok_or_else(|| Error::Registry(format!("unknown country code `{}`", c.as_ref())))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Aggregate,
    OilGas,
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "aggregate" => Ok(Category::Aggregate),
            "oil_gas" => Ok(Category::OilGas),
            other => Err(format!("unknown category `{other}`")),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Aggregate => "aggregate",
            Category::OilGas => "oil_gas",
        })
    }
}

/// One yearly flow from `exporter` to `importer`, both registry indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeRecord {
    pub year: i32,
    pub exporter: usize,
    pub importer: usize,
    pub value: f64,
    pub category: Category,
}

/// Multiplier applied to the `oil_gas` layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSpec {
    k: f64,
}

impl ScalingSpec {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "oil/gas factor must be positive and finite, got {k}"
            )));
        }
        Ok(Self { k })
    }

    pub fn identity() -> Self {
        Self { k: 1.0 }
    }

    pub fn factor(&self) -> f64 {
        self.k
    }
}

impl Default for ScalingSpec {
    fn default() -> Self {
        Self::identity()
    }
}

fn open_csv(path: &Path, header: &[&str]) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let found = reader.headers().map_err(|e| malformed(path, 0, e.to_string()))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(malformed(
            path,
            0,
            format!("expected header `{}`, found `{}`", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(reader)
}

fn malformed(path: &Path, row: usize, message: String) -> Error {
    Error::MalformedRow {
        path: path.to_path_buf(),
        row,
        message,
    }
}

fn parse_field<T: FromStr>(path: &Path, row: usize, name: &str, raw: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>()
        .map_err(|e| malformed(path, row, format!("bad {name} `{raw}`: {e}")))
}

/// Loads trade records, resolving country codes against `registry`.
///
/// Rows sharing `(year, exporter, importer, category)` are summed. Row numbers
/// in errors count data rows from 1. The result is sorted by that key.
pub fn load_trade_records(path: impl AsRef<Path>, registry: &CountryRegistry) -> Result<Vec<TradeRecord>> {
    let path = path.as_ref();
    let mut reader = open_csv(path, &TRADE_HEADER)?;
    let mut merged: BTreeMap<(i32, usize, usize, Category), f64> = BTreeMap::new();

    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| malformed(path, row, e.to_string()))?;
        if rec.len() != TRADE_HEADER.len() {
            return Err(malformed(
                path,
                row,
                format!("expected {} columns, found {}", TRADE_HEADER.len(), rec.len()),
            ));
        }
        let year = parse_field::<i32>(path, row, "year", &rec[0])?;
        let resolve = |code: &str| {
            registry.index_of(code).ok_or_else(|| Error::UnknownCountry {
                path: path.to_path_buf(),
                row,
                iso3: code.to_string(),
            })
        };
        let exporter = resolve(&rec[1])?;
        let importer = resolve(&rec[2])?;
        let value = parse_field::<f64>(path, row, "value_usd", &rec[3])?;
        let category = rec[4]
            .parse::<Category>()
            .map_err(|e| malformed(path, row, e))?;

        if !value.is_finite() {
            return Err(malformed(path, row, format!("non-finite value `{}`", &rec[3])));
        }
        if value < 0.0 {
            return Err(malformed(path, row, format!("negative value {value}")));
        }
        if exporter == importer {
            return Err(malformed(path, row, format!("self-loop for {}", &rec[1])));
        }
        *merged.entry((year, exporter, importer, category)).or_insert(0.0) += value;
    }

    Ok(merged
        .into_iter()
        .map(|((year, exporter, importer, category), value)| TradeRecord {
            year,
            exporter,
            importer,
            value,
            category,
        })
        .collect())
}

/// Years present in a record list, ascending.
pub fn years(records: &[TradeRecord]) -> Vec<i32> {
    let mut ys: Vec<i32> = records.iter().map(|r| r.year).collect();
    ys.sort_unstable();
    ys.dedup();
    ys
}

/// Sums one category for one year into an importer-by-exporter matrix.
pub fn category_layer(
    records: &[TradeRecord],
    year: i32,
    category: Category,
    registry: &CountryRegistry,
) -> DMatrix<f64> {
    let n = registry.len();
    let mut layer = DMatrix::zeros(n, n);
    for r in records
        .iter()
        .filter(|r| r.year == year && r.category == category)
    {
        layer[(r.importer, r.exporter)] += r.value;
    }
    layer
}

/// Builds the money matrix `M[importer, exporter]` for `year`, with the
/// oil/gas layer multiplied by the scaling factor.
pub fn aggregate_to_matrix(
    records: &[TradeRecord],
    year: i32,
    scaling: ScalingSpec,
    registry: &Arc<CountryRegistry>,
) -> Result<TradeMatrix> {
    if !records.iter().any(|r| r.year == year) {
        return Err(Error::YearAbsent(year));
    }
    let base = category_layer(records, year, Category::Aggregate, registry);
    let oil = category_layer(records, year, Category::OilGas, registry);
    let k = scaling.factor();
    let m = base.zip_map(&oil, |a, o| a + k * o);
    for (idx, v) in m.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                row: idx % m.nrows(),
                col: idx / m.nrows(),
            });
        }
    }
    TradeMatrix::new(year, m, Arc::clone(registry))
}
