//! Relational documents: one or two CSV tables over a shared Name key.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::rng::{DetRng, LOWER};

/// Gender pool for the primary table.
pub const GENDERS: [&str; 2] = ["Male", "Female"];
/// City pool for the primary table. Single alphanumeric words only; cells
/// may not contain spaces or punctuation.
pub const CITIES: [&str; 8] =
    ["Paris", "London", "Tokyo", "Berlin", "Madrid", "Oslo", "Cairo", "Lima"];
/// Inclusive salary range for generated rows.
pub const SALARY_RANGE: (u64, u64) = (100, 999);
/// Inclusive height range for generated rows, in centimeters.
pub const HEIGHT_RANGE: (u64, u64) = (150, 199);

/// One CSV table: a header row plus at least one data row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn col_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column in row order.
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.col_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

/// The document model for the tabular language: one or two tables that share
/// their Name key set but order rows independently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSet {
    pub tables: Vec<Table>,
}

impl TableSet {
    pub fn primary(&self) -> &Table {
        &self.tables[0]
    }

    pub fn secondary(&self) -> Option<&Table> {
        self.tables.get(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabularConfig {
    pub seed: u64,
    /// Inclusive range for the number of data rows per table.
    pub row_count_range: (usize, usize),
    /// Emit the secondary Name/Height table as well.
    pub two_tables: bool,
}

impl Default for TabularConfig {
    fn default() -> Self {
        Self { seed: 0, row_count_range: (4, 8), two_tables: true }
    }
}

/// Generate the table set. The primary table carries Name, Gender, Salary
/// and City; the secondary carries Name and Height over the same names in a
/// shuffled order. Draw order: per primary row name, gender, salary, city;
/// then per secondary row its height; then the secondary shuffle.
pub fn generate_tables(config: &TabularConfig) -> Result<TableSet> {
    let (rlo, rhi) = config.row_count_range;
    if rlo == 0 || rlo > rhi {
        return Err(Error::Config(format!("bad row_count_range ({rlo}, {rhi})")));
    }
    let mut rng = DetRng::from_seed(config.seed);
    let mut minted = HashSet::new();
    let row_count = rng.range_usize(rlo, rhi);

    let mut primary_rows = Vec::with_capacity(row_count);
    for _ in 0..row_count {
        let name = rng.mint(LOWER, 3, 8, &mut minted)?;
        let gender = *rng.choose(&GENDERS);
        let salary = rng.range_u64(SALARY_RANGE.0, SALARY_RANGE.1);
        let city = *rng.choose(&CITIES);
        primary_rows.push(vec![name, gender.to_string(), salary.to_string(), city.to_string()]);
    }
    let primary = Table {
        columns: vec!["Name".into(), "Gender".into(), "Salary".into(), "City".into()],
        rows: primary_rows,
    };

    let mut tables = vec![primary];
    if config.two_tables {
        let mut rows: Vec<Vec<String>> = tables[0]
            .rows
            .iter()
            .map(|r| {
                let height = rng.range_u64(HEIGHT_RANGE.0, HEIGHT_RANGE.1);
                vec![r[0].clone(), height.to_string()]
            })
            .collect();
        rng.shuffle(&mut rows);
        tables.push(Table { columns: vec!["Name".into(), "Height".into()], rows });
    }
    Ok(TableSet { tables })
}

/// Render one table as CSV: header line plus one line per row, comma joined,
/// no trailing newline.
pub fn render_table(table: &Table) -> String {
    let mut lines = Vec::with_capacity(table.rows.len() + 1);
    lines.push(table.columns.join(","));
    for row in &table.rows {
        lines.push(row.join(","));
    }
    lines.join("\n")
}

/// Render the whole set; tables are separated by one blank line.
pub fn render_tableset(set: &TableSet) -> String {
    set.tables.iter().map(render_table).collect::<Vec<_>>().join("\n\n")
}

/// Parse a reference document back into tables. Accepts one or two blocks
/// separated by a blank line; every row must match its header width.
pub fn parse_tableset(text: &str) -> Result<TableSet> {
    let blocks: Vec<&str> = text.split("\n\n").collect();
    if blocks.is_empty() || blocks.len() > 2 {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected 1 or 2 table blocks, found {}", blocks.len()),
        });
    }
    let mut tables = Vec::new();
    let mut line_no = 1;
    for block in blocks {
        let mut lines = block.lines();
        let header = lines.next().ok_or(Error::Parse {
            line: line_no,
            message: "empty table block".into(),
        })?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        if columns.iter().any(|c| c.is_empty()) {
            return Err(Error::Parse { line: line_no, message: "empty column name".into() });
        }
        line_no += 1;
        let mut rows = Vec::new();
        for line in lines {
            let row: Vec<String> = line.split(',').map(str::to_string).collect();
            if row.len() != columns.len() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "row has {} cells, header has {}",
                        row.len(),
                        columns.len()
                    ),
                });
            }
            if row.iter().any(|c| c.is_empty()) {
                return Err(Error::Parse { line: line_no, message: "empty cell".into() });
            }
            rows.push(row);
            line_no += 1;
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "table needs at least one data row".into(),
            });
        }
        tables.push(Table { columns, rows });
        line_no += 1;
    }
    Ok(TableSet { tables })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape_matches_hand_example() {
        let t = Table {
            columns: vec!["Name".into(), "Salary".into()],
            rows: vec![vec!["bob".into(), "100".into()]],
        };
        assert_eq!(render_table(&t), "Name,Salary\nbob,100");
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = TabularConfig { seed: 12, ..TabularConfig::default() };
        assert_eq!(generate_tables(&cfg).unwrap(), generate_tables(&cfg).unwrap());
        let other = generate_tables(&TabularConfig { seed: 13, ..cfg }).unwrap();
        assert_ne!(generate_tables(&cfg).unwrap(), other);
    }

    #[test]
    fn tables_share_name_sets() {
        for seed in 0..50 {
            let set =
                generate_tables(&TabularConfig { seed, ..TabularConfig::default() }).unwrap();
            let a: HashSet<&str> = set.primary().column("Name").unwrap().into_iter().collect();
            let b: HashSet<&str> =
                set.secondary().unwrap().column("Name").unwrap().into_iter().collect();
            assert_eq!(a, b, "seed {seed}");
            assert_eq!(a.len(), set.primary().rows.len(), "names must be unique");
        }
    }

    #[test]
    fn row_counts_respect_range() {
        for seed in 0..50 {
            let cfg = TabularConfig { seed, row_count_range: (2, 5), two_tables: true };
            let set = generate_tables(&cfg).unwrap();
            for t in &set.tables {
                assert!((2..=5).contains(&t.rows.len()));
            }
        }
    }

    #[test]
    fn cell_values_stay_in_their_pools() {
        let set = generate_tables(&TabularConfig { seed: 3, ..TabularConfig::default() }).unwrap();
        let p = set.primary();
        for g in p.column("Gender").unwrap() {
            assert!(GENDERS.contains(&g));
        }
        for c in p.column("City").unwrap() {
            assert!(CITIES.contains(&c));
        }
        for s in p.column("Salary").unwrap() {
            let v: u64 = s.parse().unwrap();
            assert!((SALARY_RANGE.0..=SALARY_RANGE.1).contains(&v));
        }
        for h in set.secondary().unwrap().column("Height").unwrap() {
            let v: u64 = h.parse().unwrap();
            assert!((HEIGHT_RANGE.0..=HEIGHT_RANGE.1).contains(&v));
        }
        for t in &set.tables {
            for row in &t.rows {
                for cell in row {
                    assert!(cell.bytes().all(|b| b.is_ascii_alphanumeric()), "cell {cell:?}");
                }
            }
        }
    }

    #[test]
    fn single_table_mode() {
        let set = generate_tables(&TabularConfig {
            seed: 4,
            two_tables: false,
            ..TabularConfig::default()
        })
        .unwrap();
        assert_eq!(set.tables.len(), 1);
        assert!(set.secondary().is_none());
        assert!(!render_tableset(&set).contains("\n\n"));
    }

    #[test]
    fn round_trip_over_seeds() {
        for seed in 0..100 {
            let set =
                generate_tables(&TabularConfig { seed, ..TabularConfig::default() }).unwrap();
            let text = render_tableset(&set);
            assert_eq!(parse_tableset(&text).unwrap(), set, "seed {seed}");
        }
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(parse_tableset("").is_err());
        assert!(parse_tableset("Name,Salary").is_err(), "no data row");
        assert!(parse_tableset("Name,Salary\nbob").is_err(), "ragged row");
        assert!(parse_tableset("Name\na\n\nName\nb\n\nName\nc").is_err(), "three blocks");
        assert!(parse_tableset("Name,,Salary\na,b,c").is_err(), "empty column name");
    }

    #[test]
    fn invalid_row_range_is_rejected() {
        let cfg = TabularConfig { seed: 0, row_count_range: (0, 4), two_tables: true };
        assert!(matches!(generate_tables(&cfg), Err(Error::Config(_))));
    }
}
