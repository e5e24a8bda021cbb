//! Family sweeps: a worker pool runs one measurement cell per (family, n),
//! results land in an append-only run log (fsync per record, resumable), and
//! the final CSV is written in canonical order so output bytes do not depend
//! on worker count or scheduling.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;

use crate::budget::MemoryBudget;
use crate::construction;
use crate::energy::{energy, EnergyKind};
use crate::error::{Error, Result};
use crate::families::{generate_family, FamilyKind, FamilySpec};
use crate::scalar::ExactScalar;
use crate::set::{aa_plus_a, binary_op, BinaryOp, CombineOptions};

pub const CSV_SCHEMA: &str = "sumprod-sweep/1";
pub const CSV_COLUMNS: [&str; 16] = [
    "family",
    "n",
    "card_sum",
    "card_diff",
    "card_prod",
    "card_ratio",
    "card_aa_plus_a",
    "e_plus",
    "e_mult",
    "q",
    "m",
    "card_aa",
    "card_aa_plus_ma",
    "residues_hit",
    "normalized",
    "wall_ms",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measurement {
    Sum,
    Diff,
    Prod,
    Ratio,
    AaPlusA,
    EPlus,
    EMult,
    Construction,
}

impl Measurement {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sum" => Some(Measurement::Sum),
            "diff" => Some(Measurement::Diff),
            "prod" => Some(Measurement::Prod),
            "ratio" => Some(Measurement::Ratio),
            "aa_plus_a" => Some(Measurement::AaPlusA),
            "e_plus" => Some(Measurement::EPlus),
            "e_mult" => Some(Measurement::EMult),
            "construction" => Some(Measurement::Construction),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub families: Vec<FamilySpec>,
    pub sizes: Vec<u64>,
    pub measurements: Vec<Measurement>,
    pub workers: usize,
    pub record_timings: bool,
    pub budget: MemoryBudget,
}

/// One measurement cell of the output CSV.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cell {
    /// Not requested.
    Missing,
    Value(String),
    /// Resource limit hit; recorded in-row, not a crash.
    Limit,
}

impl Cell {
    fn render(&self) -> &str {
        match self {
            Cell::Missing => "",
            Cell::Value(s) => s,
            Cell::Limit => "limit",
        }
    }

    pub fn as_value(&self) -> Option<&str> {
        match self {
            Cell::Value(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub family: String,
    pub n: u64,
    pub card_sum: Cell,
    pub card_diff: Cell,
    pub card_prod: Cell,
    pub card_ratio: Cell,
    pub card_aa_plus_a: Cell,
    pub e_plus: Cell,
    pub e_mult: Cell,
    pub q: Cell,
    pub m: Cell,
    pub card_aa: Cell,
    pub card_aa_plus_ma: Cell,
    pub residues_hit: Cell,
    pub normalized: Cell,
    pub wall_ms: u64,
}

impl SweepRecord {
    fn empty(family: String, n: u64) -> Self {
        SweepRecord {
            family,
            n,
            card_sum: Cell::Missing,
            card_diff: Cell::Missing,
            card_prod: Cell::Missing,
            card_ratio: Cell::Missing,
            card_aa_plus_a: Cell::Missing,
            e_plus: Cell::Missing,
            e_mult: Cell::Missing,
            q: Cell::Missing,
            m: Cell::Missing,
            card_aa: Cell::Missing,
            card_aa_plus_ma: Cell::Missing,
            residues_hit: Cell::Missing,
            normalized: Cell::Missing,
            wall_ms: 0,
        }
    }

    pub fn to_csv_row(&self) -> String {
        let cells = [
            self.card_sum.render(),
            self.card_diff.render(),
            self.card_prod.render(),
            self.card_ratio.render(),
            self.card_aa_plus_a.render(),
            self.e_plus.render(),
            self.e_mult.render(),
            self.q.render(),
            self.m.render(),
            self.card_aa.render(),
            self.card_aa_plus_ma.render(),
            self.residues_hit.render(),
            self.normalized.render(),
        ];
        format!(
            "{},{},{},{}",
            self.family,
            self.n,
            cells.join(","),
            self.wall_ms
        )
    }
}

fn cell_from<T: ToString>(r: std::result::Result<T, Error>) -> Result<Cell> {
    match r {
        Ok(v) => Ok(Cell::Value(v.to_string())),
        Err(Error::ResourceLimit(_)) => Ok(Cell::Limit),
        Err(e) => Err(e),
    }
}

/// Runs every requested measurement for one (family, n) cell.
pub fn measure_cell(
    spec: &FamilySpec,
    n: u64,
    config: &SweepConfig,
) -> Result<SweepRecord> {
    let start = Instant::now();
    let set = generate_family(spec, n)?;
    let mut rec = SweepRecord::empty(spec.id.clone(), n);
    let opts = CombineOptions {
        budget: config.budget,
        count_only_fallback: true,
    };
    for m in &config.measurements {
        match m {
            Measurement::Sum => {
                rec.card_sum = cell_from(binary_op(BinaryOp::Sum, &set, &set).map(|s| s.len()))?;
            }
            Measurement::Diff => {
                rec.card_diff =
                    cell_from(binary_op(BinaryOp::Difference, &set, &set).map(|s| s.len()))?;
            }
            Measurement::Prod => {
                rec.card_prod =
                    cell_from(binary_op(BinaryOp::Product, &set, &set).map(|s| s.len()))?;
            }
            Measurement::Ratio => {
                rec.card_ratio =
                    cell_from(binary_op(BinaryOp::Ratio, &set, &set).map(|s| s.len()))?;
            }
            Measurement::AaPlusA => {
                rec.card_aa_plus_a = cell_from(aa_plus_a(&set, &opts).map(|c| c.cardinality()))?;
            }
            Measurement::EPlus => {
                rec.e_plus = cell_from(energy(EnergyKind::Additive, &set, &set))?;
            }
            Measurement::EMult => {
                rec.e_mult = cell_from(energy(EnergyKind::Multiplicative, &set, &set))?;
            }
            Measurement::Construction => {
                let params = construction::choose_parameters(n)?;
                rec.q = Cell::Value(params.q.to_string());
                rec.m = Cell::Value(params.m.to_string());
                let built = if matches!(spec.kind, FamilyKind::BalogConstruction) {
                    set.clone()
                } else {
                    construction::construct_set(&params, None)?
                };
                match construction::exact_measure(&built, params.m, &config.budget) {
                    Ok(sizes) => {
                        rec.card_aa = Cell::Value(sizes.size_aa.to_string());
                        rec.card_aa_plus_ma = Cell::Value(sizes.size_aa_plus_ma.to_string());
                        let normalized = ExactScalar::from_u64(sizes.size_aa_plus_ma)
                            .checked_div(&ExactScalar::from_u64(n * n))
                            .expect("n >= 1");
                        rec.normalized = Cell::Value(normalized.to_string());
                    }
                    Err(Error::ResourceLimit(_)) => {
                        rec.card_aa = Cell::Limit;
                        rec.card_aa_plus_ma = Cell::Limit;
                        rec.normalized = Cell::Limit;
                    }
                    Err(e) => return Err(e),
                }
                let (hits, _) = construction::residue_profile(&built, params.m)?;
                rec.residues_hit = Cell::Value(hits.to_string());
            }
        }
    }
    if config.record_timings {
        rec.wall_ms = start.elapsed().as_millis() as u64;
    }
    Ok(rec)
}

fn runlog_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".runlog");
    PathBuf::from(os)
}

fn load_runlog(path: &Path) -> Result<HashMap<(String, u64), String>> {
    let mut done = HashMap::new();
    if !path.exists() {
        return Ok(done);
    }
    let text = std::fs::read_to_string(path)?;
    for line in text.lines() {
        let mut fields = line.splitn(3, ',');
        if let (Some(fam), Some(n)) = (fields.next(), fields.next()) {
            if let Ok(n) = n.parse::<u64>() {
                done.insert((fam.to_string(), n), line.to_string());
            }
        }
    }
    Ok(done)
}

/// Runs the sweep and writes the CSV to `out`. Completed cells found in the
/// run log `<out>.runlog` are reused instead of recomputed; each newly
/// completed cell is appended to the log and fsynced before the final file
/// is assembled.
pub fn run_sweep(config: &SweepConfig, out: &Path) -> Result<()> {
    let log_path = runlog_path(out);
    let done = load_runlog(&log_path)?;

    let mut pending: Vec<(usize, u64)> = Vec::new();
    for (fi, spec) in config.families.iter().enumerate() {
        for &n in &config.sizes {
            if !done.contains_key(&(spec.id.clone(), n)) {
                pending.push((fi, n));
            }
        }
    }

    let log_file = Mutex::new(
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)?,
    );
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::ResourceLimit(format!("cannot build worker pool: {e}")))?;
    let computed: Vec<Result<(usize, u64, String)>> = pool.install(|| {
        pending
            .par_iter()
            .map(|&(fi, n)| {
                let rec = measure_cell(&config.families[fi], n, config)?;
                let row = rec.to_csv_row();
                {
                    let mut f = log_file.lock().expect("log file mutex");
                    writeln!(f, "{row}")?;
                    f.sync_data()?;
                }
                Ok((fi, n, row))
            })
            .collect()
    });

    let mut rows: HashMap<(String, u64), String> = done;
    for item in computed {
        let (fi, n, row) = item?;
        rows.insert((config.families[fi].id.clone(), n), row);
    }

    // Canonical order: families as configured, sizes ascending.
    let mut text = String::new();
    text.push_str(&format!("# schema: {CSV_SCHEMA}\n"));
    text.push_str(&CSV_COLUMNS.join(","));
    text.push('\n');
    let mut sizes = config.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    for spec in &config.families {
        for &n in &sizes {
            let row = rows
                .get(&(spec.id.clone(), n))
                .ok_or_else(|| Error::ResourceLimit(format!("missing cell {}/{n}", spec.id)))?;
            text.push_str(row);
            text.push('\n');
        }
    }
    let mut f = File::create(out)?;
    f.write_all(text.as_bytes())?;
    f.sync_data()?;
    Ok(())
}

/// A parsed sweep CSV.
#[derive(Clone, Debug)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// (x, y) pairs from two columns, keeping rows where both parse as
    /// positive numbers.
    pub fn numeric_pairs(&self, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
        let xi = self.column_index(x).ok_or_else(|| Error::InputFormat {
            line: 2,
            msg: format!("no column named {x:?}"),
        })?;
        let yi = self.column_index(y).ok_or_else(|| Error::InputFormat {
            line: 2,
            msg: format!("no column named {y:?}"),
        })?;
        Ok(self
            .rows
            .iter()
            .filter_map(|r| {
                let x: f64 = parse_number(r.get(xi)?)?;
                let y: f64 = parse_number(r.get(yi)?)?;
                Some((x, y))
            })
            .collect())
    }
}

/// Accepts integers, decimals and exact "p/q" cells.
fn parse_number(s: &str) -> Option<f64> {
    if s.is_empty() || s == "limit" {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.parse().ok()?;
        let q: f64 = q.parse().ok()?;
        return Some(p / q);
    }
    s.parse().ok()
}

/// Parses a sweep CSV, rejecting missing or mismatched schema versions.
pub fn parse_csv(text: &str) -> Result<CsvTable> {
    let mut lines = text.lines().enumerate();
    let (_, schema_line) = lines.next().ok_or(Error::InputFormat {
        line: 1,
        msg: "empty file".into(),
    })?;
    let expected = format!("# schema: {CSV_SCHEMA}");
    if schema_line.trim() != expected {
        return Err(Error::InputFormat {
            line: 1,
            msg: format!("schema mismatch: expected {expected:?}, got {schema_line:?}"),
        });
    }
    let (_, header) = lines.next().ok_or(Error::InputFormat {
        line: 2,
        msg: "missing header".into(),
    })?;
    let columns: Vec<String> = header.split(',').map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<String> = line.split(',').map(|s| s.to_string()).collect();
        if row.len() != columns.len() {
            return Err(Error::InputFormat {
                line: i + 1,
                msg: format!("expected {} fields, got {}", columns.len(), row.len()),
            });
        }
        rows.push(row);
    }
    Ok(CsvTable { columns, rows })
}

/// Parses the plain-text sectioned key-value sweep configuration.
///
/// ```text
/// [sweep]
/// sizes = 8,16,32
/// measurements = sum,prod,aa_plus_a
/// workers = 4
/// record_timings = false
/// budget_mb = 8192
///
/// [family interval]
/// kind = interval
///
/// [family gp2]
/// kind = geometric
/// ratio = 2
/// ```
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let mut sizes = Vec::new();
    let mut measurements = Vec::new();
    let mut workers = 1usize;
    let mut record_timings = false;
    let mut budget = MemoryBudget::default();
    let mut families: Vec<FamilySpec> = Vec::new();

    #[derive(PartialEq)]
    enum Section {
        None,
        Sweep,
        Family(usize),
    }
    let mut section = Section::None;
    let mut family_kv: Vec<HashMap<String, (usize, String)>> = Vec::new();
    let mut family_ids: Vec<String> = Vec::new();

    let err = |line: usize, msg: String| Error::InputFormat { line, msg };

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if name == "sweep" {
                section = Section::Sweep;
            } else if let Some(id) = name.strip_prefix("family ") {
                let id = id.trim().to_string();
                if id.is_empty() || id.contains(',') {
                    return Err(err(lineno, format!("bad family id {id:?}")));
                }
                if family_ids.contains(&id) {
                    return Err(err(lineno, format!("duplicate family id {id:?}")));
                }
                family_ids.push(id);
                family_kv.push(HashMap::new());
                section = Section::Family(family_kv.len() - 1);
            } else {
                return Err(err(lineno, format!("unknown section {name:?}")));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(lineno, format!("expected key = value, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        match section {
            Section::None => return Err(err(lineno, "key outside any section".into())),
            Section::Sweep => match key {
                "sizes" => {
                    for part in value.split(',') {
                        let n: u64 = part.trim().parse().map_err(|_| {
                            err(lineno, format!("bad size {part:?}"))
                        })?;
                        sizes.push(n);
                    }
                }
                "measurements" => {
                    for part in value.split(',') {
                        let m = Measurement::parse(part.trim()).ok_or_else(|| {
                            err(lineno, format!("unknown measurement {part:?}"))
                        })?;
                        measurements.push(m);
                    }
                }
                "workers" => {
                    workers = value
                        .parse()
                        .map_err(|_| err(lineno, format!("bad workers {value:?}")))?;
                }
                "record_timings" => {
                    record_timings = value
                        .parse()
                        .map_err(|_| err(lineno, format!("bad record_timings {value:?}")))?;
                }
                "budget_mb" => {
                    let mb: u64 = value
                        .parse()
                        .map_err(|_| err(lineno, format!("bad budget_mb {value:?}")))?;
                    budget = MemoryBudget::new(mb << 20);
                }
                _ => return Err(err(lineno, format!("unknown sweep key {key:?}"))),
            },
            Section::Family(fi) => {
                family_kv[fi].insert(key.to_string(), (lineno, value.to_string()));
            }
        }
    }

    for (fi, id) in family_ids.iter().enumerate() {
        let kv = &family_kv[fi];
        let get = |k: &str| kv.get(k).map(|(_, v)| v.as_str());
        let kind_name = get("kind").ok_or_else(|| Error::InputFormat {
            line: 0,
            msg: format!("family {id}: missing kind"),
        })?;
        let parse_scalar = |k: &str| -> Result<ExactScalar> {
            let (line, v) = kv.get(k).ok_or_else(|| Error::InputFormat {
                line: 0,
                msg: format!("family {id}: missing {k}"),
            })?;
            v.parse().map_err(|_| Error::InputFormat {
                line: *line,
                msg: format!("family {id}: bad {k} {v:?}"),
            })
        };
        let parse_u64 = |k: &str| -> Result<u64> {
            let (line, v) = kv.get(k).ok_or_else(|| Error::InputFormat {
                line: 0,
                msg: format!("family {id}: missing {k}"),
            })?;
            v.parse().map_err(|_| Error::InputFormat {
                line: *line,
                msg: format!("family {id}: bad {k} {v:?}"),
            })
        };
        let kind = match kind_name {
            "interval" => FamilyKind::Interval,
            "arithmetic" => FamilyKind::Arithmetic {
                start: parse_scalar("start")?,
                step: parse_scalar("step")?,
            },
            "geometric" => FamilyKind::Geometric {
                ratio: parse_scalar("ratio")?,
            },
            "convex_squares" => FamilyKind::ConvexSquares,
            "random_subset" => FamilyKind::RandomSubset {
                range: parse_u64("range")?,
                seed: parse_u64("seed")?,
            },
            "balog_construction" => FamilyKind::BalogConstruction,
            "file" => FamilyKind::File {
                path: PathBuf::from(get("path").ok_or_else(|| Error::InputFormat {
                    line: 0,
                    msg: format!("family {id}: missing path"),
                })?),
            },
            other => {
                return Err(Error::InputFormat {
                    line: 0,
                    msg: format!("family {id}: unknown kind {other:?}"),
                })
            }
        };
        families.push(FamilySpec::new(id.clone(), kind));
    }

    if families.is_empty() {
        return Err(Error::InputFormat {
            line: 0,
            msg: "config defines no families".into(),
        });
    }
    if sizes.is_empty() {
        return Err(Error::InputFormat {
            line: 0,
            msg: "config defines no sizes".into(),
        });
    }
    if measurements.is_empty() {
        return Err(Error::InputFormat {
            line: 0,
            msg: "config defines no measurements".into(),
        });
    }
    Ok(SweepConfig {
        families,
        sizes,
        measurements,
        workers,
        record_timings,
        budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONFIG: &str = "\
[sweep]
sizes = 4,8
measurements = sum,prod,aa_plus_a,e_plus
workers = 2

[family interval]
kind = interval

[family gp2]
kind = geometric
ratio = 2
";

    #[test]
    fn config_parses() {
        let c = parse_config(CONFIG).unwrap();
        assert_eq!(c.sizes, vec![4, 8]);
        assert_eq!(c.families.len(), 2);
        assert_eq!(c.measurements.len(), 4);
        assert_eq!(c.workers, 2);
        assert!(!c.record_timings);
    }

    #[test]
    fn config_rejects_junk() {
        assert!(parse_config("stray = 1\n").is_err());
        assert!(parse_config("[sweep]\nsizes = x\n").is_err());
        assert!(parse_config("[sweep]\nsizes = 4\nmeasurements = sum\n").is_err()); // no families
        assert!(parse_config(&format!("{CONFIG}[family gp2]\nkind = interval\n")).is_err());
    }

    #[test]
    fn sweep_writes_rows_and_resumes() {
        let dir = std::env::temp_dir().join(format!("sumprod-sweep-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let out = dir.join("out.csv");
        let _ = std::fs::remove_file(&out);
        let _ = std::fs::remove_file(runlog_path(&out));

        let config = parse_config(CONFIG).unwrap();
        run_sweep(&config, &out).unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        let table = parse_csv(&text).unwrap();
        assert_eq!(table.rows.len(), 4); // 2 families x 2 sizes

        // Interval n=4: |A+A| = 7; GP n=4: |AA| = 7, |AA+A| = 22.
        let idx = |name: &str| table.column_index(name).unwrap();
        let row = table
            .rows
            .iter()
            .find(|r| r[0] == "interval" && r[1] == "4")
            .unwrap();
        assert_eq!(row[idx("card_sum")], "7");
        let row = table.rows.iter().find(|r| r[0] == "gp2" && r[1] == "4").unwrap();
        assert_eq!(row[idx("card_prod")], "7");
        assert_eq!(row[idx("card_aa_plus_a")], "22");

        // Rerun resumes from the log and produces identical bytes.
        run_sweep(&config, &out).unwrap();
        assert_eq!(std::fs::read_to_string(&out).unwrap(), text);

        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn csv_schema_is_enforced() {
        assert!(parse_csv("# schema: other/9\nfamily,n\n").is_err());
        let ok = format!("# schema: {CSV_SCHEMA}\n{}\n", CSV_COLUMNS.join(","));
        assert!(parse_csv(&ok).unwrap().rows.is_empty());
    }
}
