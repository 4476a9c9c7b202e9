use std::path::PathBuf;

use super::{ReportError, Result};
use crate::metrics::DatasetSummary;

/// Column labels after `methods` and `scope`, in display order. rTRE and
/// robustness columns are percents, time is minutes.
pub const VALUE_COLUMNS: [&str; 10] = [
    "Median rTRE [%] Avg.",
    "Median rTRE [%] STD",
    "Median rTRE [%] Median",
    "Max rTRE [%] Avg.",
    "Max rTRE [%] STD",
    "Robustness [%] Avg.",
    "Robustness [%] STD",
    "Robustness [%] Median",
    "time [min] Avg.",
    "time [min] STD",
];

/// Whether a value column is a standard deviation (shown as `±x` in markdown).
const IS_STD: [bool; 10] = [false, true, false, false, true, false, true, false, false, true];

/// One rendered row with values already in display units.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub method: String,
    pub scope: String,
    pub values: [f64; 10],
}

impl TableRow {
    pub fn from_summary(s: &DatasetSummary) -> Self {
        let pct = 100.0;
        TableRow {
            method: s.method.clone(),
            scope: s.scope.clone(),
            values: [
                s.avg_median_rtre * pct,
                s.std_median_rtre * pct,
                s.median_median_rtre * pct,
                s.avg_max_rtre * pct,
                s.std_max_rtre * pct,
                s.avg_robustness * pct,
                s.std_robustness * pct,
                s.median_robustness * pct,
                s.avg_time_min,
                s.std_time_min,
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub csv: String,
    pub markdown: String,
}

fn two(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|")
}

/// Renders one row per (method, scope) with two-decimal values, as CSV and
/// as a markdown table. Rows keep input order.
pub fn render_summary_table(summaries: &[DatasetSummary]) -> Result<SummaryTable> {
    if summaries.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    let rows: Vec<TableRow> = summaries.iter().map(TableRow::from_summary).collect();

    let mut csv = String::from("methods,scope");
    for c in VALUE_COLUMNS {
        csv.push(',');
        csv.push_str(c);
    }
    csv.push('\n');

    let mut md = String::from("| methods | scope |");
    for c in VALUE_COLUMNS {
        md.push_str(&format!(" {} |", c.replace(" STD", " ± STD")));
    }
    md.push_str("\n|:---|:---:|");
    md.push_str(&"---:|".repeat(VALUE_COLUMNS.len()));
    md.push('\n');

    for row in &rows {
        csv.push_str(&format!("{},{}", csv_field(&row.method), csv_field(&row.scope)));
        md.push_str(&format!("| {} | {} |", md_cell(&row.method), md_cell(&row.scope)));
        for (v, is_std) in row.values.iter().zip(IS_STD) {
            let cell = two(*v);
            csv.push(',');
            csv.push_str(&cell);
            if is_std {
                md.push_str(&format!(" ±{cell} |"));
            } else {
                md.push_str(&format!(" {cell} |"));
            }
        }
        csv.push('\n');
        md.push('\n');
    }
    Ok(SummaryTable { csv, markdown: md })
}

/// Reads back the CSV form produced by [`render_summary_table`].
pub fn parse_summary_table(csv_text: &str) -> Result<Vec<TableRow>> {
    let malformed = |reason: String| ReportError::MalformedTable {
        path: PathBuf::from("<table.csv>"),
        reason,
    };
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| malformed(e.to_string()))?
        .clone();
    if headers.len() != 2 + VALUE_COLUMNS.len() {
        return Err(malformed(format!("expected 12 columns, found {}", headers.len())));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| malformed(e.to_string()))?;
        let mut values = [0.0; 10];
        for (i, v) in values.iter_mut().enumerate() {
            *v = record[i + 2]
                .parse()
                .map_err(|_| malformed(format!("bad number {:?}", &record[i + 2])))?;
        }
        rows.push(TableRow {
            method: record[0].to_string(),
            scope: record[1].to_string(),
            values,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn summary(method: &str, scope: &str) -> DatasetSummary {
        DatasetSummary {
            method: method.into(),
            scope: scope.into(),
            avg_median_rtre: 0.0,
            std_median_rtre: 0.0,
            median_median_rtre: 0.0,
            avg_max_rtre: 0.0,
            std_max_rtre: 0.0,
            avg_robustness: 0.0,
            std_robustness: 0.0,
            median_robustness: 0.0,
            avg_time_min: 0.0,
            std_time_min: 0.0,
            case_count: 1,
            failure_count: 0,
        }
    }

    #[test]
    fn percent_cells_have_two_decimals() {
        let mut s = summary("ANTs", "10k");
        s.avg_median_rtre = 0.023;
        let t = render_summary_table(&[s]).unwrap();
        let row = t.csv.lines().nth(1).unwrap();
        assert!(row.starts_with("ANTs,10k,2.30,"), "{row}");
        assert!(t.markdown.contains("| ANTs | 10k | 2.30 | ±0.00 |"));
    }

    #[test]
    fn zero_summary_gives_zero_row() {
        let t = render_summary_table(&[summary("m", "full")]).unwrap();
        assert_eq!(
            t.csv.lines().nth(1).unwrap(),
            "m,full,0.00,0.00,0.00,0.00,0.00,0.00,0.00,0.00,0.00,0.00"
        );
    }

    #[test]
    fn two_scopes_share_method_label() {
        let t = render_summary_table(&[summary("Elastix", "10k"), summary("Elastix", "full")]).unwrap();
        let rows = parse_summary_table(&t.csv).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.method == "Elastix"));
        assert_eq!((rows[0].scope.as_str(), rows[1].scope.as_str()), ("10k", "full"));
        assert_eq!(t.markdown.lines().count(), 4);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(render_summary_table(&[]), Err(ReportError::EmptyInput)));
    }

    proptest! {
        #[test]
        fn round_trip_to_two_decimals(v in prop::array::uniform10(0.0..1.0f64), t in 0.0..1e4f64, name in "[A-Za-z ,]{1,12}") {
            let mut s = summary(&name, "10k");
            s.avg_median_rtre = v[0];
            s.std_median_rtre = v[1];
            s.median_median_rtre = v[2];
            s.avg_max_rtre = v[3];
            s.std_max_rtre = v[4];
            s.avg_robustness = v[5];
            s.std_robustness = v[6];
            s.median_robustness = v[7];
            s.avg_time_min = t;
            s.std_time_min = v[9];
            let table = render_summary_table(std::slice::from_ref(&s)).unwrap();
            let back = parse_summary_table(&table.csv).unwrap();
            prop_assert_eq!(back.len(), 1);
            prop_assert_eq!(&back[0].method, &name);
            let expect = TableRow::from_summary(&s);
            for (a, b) in back[0].values.iter().zip(expect.values) {
                prop_assert!((a - b).abs() <= 0.005 + 1e-9, "{} vs {}", a, b);
            }
        }
    }
}
