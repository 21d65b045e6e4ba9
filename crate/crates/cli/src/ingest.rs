//! CSV ingestion of keyed table columns.
//!
//! One-column files carry keys only; two-column files carry `key,value`
//! rows. Keys must parse as integers in `[1, dimension]` unless string
//! hashing is enabled, in which case any key is mapped into the domain.

use std::io::Read;

use anyhow::{bail, Context, Result};
use ipsketch_core::tables::{hash_string_key, KeyedColumn};

#[derive(Clone, Copy, Debug)]
pub struct CsvOptions {
    /// Skip the first row.
    pub has_header: bool,
    /// Hash keys as strings into the domain instead of parsing integers.
    pub hash_keys: bool,
    /// Key domain size.
    pub dimension: u64,
}

/// Reads a keyed column from CSV. Duplicate keys are rejected by the
/// column constructor, matching the one-row-per-key table model.
pub fn read_keyed_csv(reader: impl Read, options: CsvOptions) -> Result<KeyedColumn> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .flexible(false)
        .from_reader(reader);
    let mut keys = Vec::new();
    let mut values: Option<Vec<f64>> = None;
    for (row, record) in csv_reader.records().enumerate() {
        let record = record.with_context(|| format!("reading CSV row {row}"))?;
        match record.len() {
            1 | 2 => {}
            other => bail!("row {row}: expected 1 or 2 columns, found {other}"),
        }
        let key_field = record.get(0).unwrap().trim();
        let key = if options.hash_keys {
            hash_string_key(key_field, options.dimension)
        } else {
            key_field
                .parse::<u64>()
                .with_context(|| format!("row {row}: key {key_field:?} is not an integer (use --hash-keys for string keys)"))?
        };
        keys.push(key);
        match record.get(1) {
            Some(value_field) => {
                let value: f64 = value_field
                    .trim()
                    .parse()
                    .with_context(|| format!("row {row}: parsing value {value_field:?}"))?;
                values.get_or_insert_with(Vec::new).push(value);
            }
            None => {
                if values.is_some() {
                    bail!("row {row}: value column missing but earlier rows had one");
                }
            }
        }
    }
    if let Some(values) = &values {
        if values.len() != keys.len() {
            bail!("value column must cover every row");
        }
    }
    Ok(KeyedColumn::new(options.dimension, keys, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn options() -> CsvOptions {
        CsvOptions {
            has_header: false,
            hash_keys: false,
            dimension: 16,
        }
    }

    #[test]
    fn reads_key_value_rows() {
        let data = "1,6.0\n3,2.0\n4,6.0\n";
        let col = read_keyed_csv(data.as_bytes(), options()).unwrap();
        assert_eq!(col.keys(), &[1, 3, 4]);
        assert_eq!(col.values(), Some(&[6.0, 2.0, 6.0][..]));
    }

    #[test]
    fn reads_key_only_rows() {
        let data = "2\n5\n11\n";
        let col = read_keyed_csv(data.as_bytes(), options()).unwrap();
        assert_eq!(col.keys(), &[2, 5, 11]);
        assert_eq!(col.values(), None);
    }

    #[test]
    fn header_row_is_skipped_when_requested() {
        let data = "key,value\n1,6.0\n";
        let mut opts = options();
        opts.has_header = true;
        let col = read_keyed_csv(data.as_bytes(), opts).unwrap();
        assert_eq!(col.keys(), &[1]);
    }

    #[test]
    fn string_keys_require_the_hashing_flag() {
        let data = "date-2022-01-01,4.5\n";
        assert!(read_keyed_csv(data.as_bytes(), options()).is_err());
        let mut opts = options();
        opts.hash_keys = true;
        opts.dimension = 1 << 32;
        let col = read_keyed_csv(data.as_bytes(), opts).unwrap();
        assert_eq!(col.keys().len(), 1);
        assert!(col.keys()[0] >= 1 && col.keys()[0] <= 1 << 32);
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let data = "1,6.0\n1,2.0\n";
        assert!(read_keyed_csv(data.as_bytes(), options()).is_err());
    }

    #[test]
    fn out_of_range_keys_are_rejected() {
        let data = "99\n";
        assert!(read_keyed_csv(data.as_bytes(), options()).is_err());
    }
}
