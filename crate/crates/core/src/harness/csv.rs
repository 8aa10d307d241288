//! Space-separated tables with a header line.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::trial::{BenchRecord, IoRecord};

/// One line of a timing table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub size: usize,
    pub time_ns: f64,
    pub norm: f64,
}

impl From<&BenchRecord> for BenchRow {
    fn from(r: &BenchRecord) -> Self {
        Self {
            size: r.size,
            time_ns: r.time_ns,
            norm: r.norm,
        }
    }
}

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: csv::Error },
}

const BENCH_HEADER: [&str; 3] = ["size", "time_ns", "norm"];
const IO_HEADER: [&str; 6] = ["size", "B", "M", "io", "ratio", "seed"];

fn write_table<W: Write, T: Serialize>(out: W, header: &[&str], rows: &[T]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(b' ')
        .has_headers(false)
        .from_writer(out);
    // written by hand so an empty table still has its header
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn format_table<T: Serialize>(header: &[&str], rows: &[T]) -> String {
    let mut buf = Vec::new();
    write_table(&mut buf, header, rows).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is ASCII")
}

fn save<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), CsvError> {
    let file = File::create(path).map_err(|source| CsvError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_table(io::BufWriter::new(file), header, rows).map_err(|source| CsvError::Format {
        path: path.to_path_buf(),
        source,
    })
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CsvError> {
    let fail = |source| CsvError::Format {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::ReaderBuilder::new()
        .delimiter(b' ')
        .from_path(path)
        .map_err(fail)?;
    r.deserialize().collect::<csv::Result<Vec<T>>>().map_err(fail)
}

pub fn format_bench_csv(records: &[BenchRecord]) -> String {
    let rows: Vec<BenchRow> = records.iter().map(BenchRow::from).collect();
    format_table(&BENCH_HEADER, &rows)
}

pub fn format_io_csv(records: &[IoRecord]) -> String {
    format_table(&IO_HEADER, records)
}

/// Writes `size time_ns norm` rows.
pub fn write_bench_csv(records: &[BenchRecord], path: &Path) -> Result<(), CsvError> {
    let rows: Vec<BenchRow> = records.iter().map(BenchRow::from).collect();
    save(path, &BENCH_HEADER, &rows)
}

/// Writes `size B M io ratio seed` rows.
pub fn write_io_csv(records: &[IoRecord], path: &Path) -> Result<(), CsvError> {
    save(path, &IO_HEADER, records)
}

pub fn read_bench_csv(path: &Path) -> Result<Vec<BenchRow>, CsvError> {
    load(path)
}

pub fn read_io_csv(path: &Path) -> Result<Vec<IoRecord>, CsvError> {
    load(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{normalized_time, Algorithm, InputDistribution};

    fn bench(size: usize, time_ns: f64) -> BenchRecord {
        BenchRecord {
            algo: Algorithm::SquareSort,
            dist: InputDistribution::Permutation,
            size,
            time_ns,
            median_ns: time_ns,
            norm: normalized_time(time_ns, size),
        }
    }

    #[test]
    fn empty_tables_have_headers_only() {
        assert_eq!(format_bench_csv(&[]), "size time_ns norm\n");
        assert_eq!(format_io_csv(&[]), "size B M io ratio seed\n");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_io_csv(&[], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "size B M io ratio seed\n");
        assert!(read_io_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn bench_round_trip_and_norm() {
        let records = vec![bench(1000, 123456.0), bench(1 << 20, 9.87654321e8), bench(7, 1.0 / 3.0)];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bench.csv");
        write_bench_csv(&records, &path).unwrap();
        let rows = read_bench_csv(&path).unwrap();
        assert_eq!(rows, records.iter().map(BenchRow::from).collect::<Vec<_>>());
        for row in rows {
            let n = row.size as f64;
            let derived = row.time_ns / (n * n.log2());
            assert!((derived - row.norm).abs() <= 1e-9 * row.norm);
        }
    }

    #[test]
    fn io_round_trip() {
        let records = vec![
            IoRecord {
                size: 1024,
                block: 16,
                cache: 256,
                io_total: 777,
                ratio: 0.1 + 0.2,
                seed: u64::MAX,
            },
            IoRecord {
                size: 4096,
                block: 64,
                cache: 4096,
                io_total: 3,
                ratio: 1e-300,
                seed: 0,
            },
        ];
        let text = format_io_csv(&records);
        assert!(text.starts_with("size B M io ratio seed\n1024 16 256 777 "));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("io.csv");
        write_io_csv(&records, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
        assert_eq!(read_io_csv(&path).unwrap(), records);
    }

    #[test]
    fn missing_directory_names_the_path() {
        let err = write_io_csv(&[], Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
