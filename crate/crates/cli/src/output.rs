//! CSV formatting, the results schema and atomic file writes.
//!
//! Every CSV starts with a `# schema=<name>` comment line followed by the
//! header. Reals use 17 significant digits in scientific notation; lines end
//! in LF.

use std::io::Write;
use std::path::Path;

use heavyeig::{ResultRow, ResultTable};

use crate::error::{CliError, CliResult};

pub const RESULTS_SCHEMA: &str = "heavyeig.results.v1";
pub const COMPARE_SCHEMA: &str = "heavyeig.compare.v1";
pub const PLOTDATA_SCHEMA: &str = "heavyeig.plotdata.v1";
pub const LDCHECK_SCHEMA: &str = "heavyeig.ldcheck.v1";
pub const LIMITS_SCHEMA: &str = "heavyeig.limits.v1";

/// 17 significant digits, locale-free.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// In-memory CSV document with a schema line.
pub struct CsvDoc {
    writer: csv::Writer<Vec<u8>>,
}

impl CsvDoc {
    pub fn new(schema: &str, header: &[String]) -> Self {
        let mut buf = Vec::new();
        writeln!(buf, "# schema={schema}").expect("writing to memory");
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(buf);
        writer.write_record(header).expect("writing to memory");
        CsvDoc { writer }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.writer.write_record(fields).expect("writing to memory");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("flushing memory buffer")
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn results_schema(k: usize) -> String {
    format!("{RESULTS_SCHEMA} k={k}")
}

pub fn results_csv(table: &ResultTable) -> Vec<u8> {
    let mut doc = CsvDoc::new(&results_schema(table.k), &ResultTable::columns(table.k));
    for r in &table.rows {
        let mut f = vec![
            r.n.to_string(),
            r.p.to_string(),
            r.replication.to_string(),
            r.seed.to_string(),
            real(r.a_np),
            real(r.mu),
        ];
        f.extend(r.eigen.iter().map(|&v| real(v)));
        f.extend(r.diag.iter().map(|&v| real(v)));
        f.extend([real(r.offdiag), real(r.cross), real(r.trace)]);
        doc.row(&f);
    }
    doc.into_bytes()
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, path: &Path) -> CliResult<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::schema(path, format!("bad value in column {i}: {:?}", rec.get(i))))
}

/// Parses a results file written by [`results_csv`].
pub fn read_results(path: &Path) -> CliResult<ResultTable> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let (first, body) = text.split_once('\n').unwrap_or((&text, ""));
    let k: usize = first
        .strip_prefix("# schema=")
        .and_then(|s| s.strip_prefix(RESULTS_SCHEMA))
        .and_then(|s| s.trim().strip_prefix("k="))
        .and_then(|s| s.parse().ok())
        .filter(|&k| k >= 1)
        .ok_or_else(|| CliError::schema(path, format!("missing `{RESULTS_SCHEMA} k=<k>` schema line")))?;
    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::schema(path, e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    if header != ResultTable::columns(k) {
        return Err(CliError::schema(path, "column layout does not match the schema"));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::schema(path, e.to_string()))?;
        let reals = |from: usize, count: usize| -> CliResult<Vec<f64>> {
            (from..from + count).map(|i| field(&rec, i, path)).collect()
        };
        rows.push(ResultRow {
            n: field(&rec, 0, path)?,
            p: field(&rec, 1, path)?,
            replication: field(&rec, 2, path)?,
            seed: field(&rec, 3, path)?,
            a_np: field(&rec, 4, path)?,
            mu: field(&rec, 5, path)?,
            eigen: reals(6, k)?,
            diag: reals(6 + k, k)?,
            offdiag: field(&rec, 6 + 2 * k, path)?,
            cross: field(&rec, 7 + 2 * k, path)?,
            trace: field(&rec, 8 + 2 * k, path)?,
        });
    }
    Ok(ResultTable { k, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_keep_17_digits() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        assert_eq!(real(1.0), "1.0000000000000000e0");
        for x in [std::f64::consts::PI, 1e-300, -2.5e17, 7.0 / 3.0] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn results_round_trip() {
        let table = ResultTable {
            k: 2,
            rows: vec![ResultRow {
                n: 10,
                p: 4,
                replication: 0,
                seed: u64::MAX,
                a_np: 40.0,
                mu: 0.0,
                eigen: vec![3.5, 0.25],
                diag: vec![3.25, 0.125],
                offdiag: 0.5,
                cross: 0.1,
                trace: 4.0,
            }],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        write_atomic(&path, &results_csv(&table)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# schema=heavyeig.results.v1 k=2\nn,p,rep,seed,a_np,mu,lambda_1,lambda_2,diag_1,diag_2,offdiag_inf,cross_max,trace\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_results(&path).unwrap(), table);
    }

    #[test]
    fn schema_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "n,p\n1,2\n").unwrap();
        assert_eq!(read_results(&path).unwrap_err().exit_code(), 4);
        std::fs::write(&path, "# schema=heavyeig.results.v1 k=2\nn,p\n1,2\n").unwrap();
        assert_eq!(read_results(&path).unwrap_err().exit_code(), 4);
    }
}
