use std::fmt::Write as _;

use crate::error::Result;
use crate::eval::{EvalReport, LOGISTIC_REGRESSION, NAIVE_BAYES, RANDOM_FOREST};
use crate::numcore::Matrix;

const CLASSIFIER_COLUMNS: [(&str, &str); 3] = [
    (LOGISTIC_REGRESSION, "Logistic Regression"),
    (RANDOM_FOREST, "Random Forest"),
    (NAIVE_BAYES, "Naive Bayes"),
];

fn cell(value: Option<f64>) -> String {
    value.map_or_else(|| "failed".to_owned(), |v| format!("{v:.4}"))
}

/// Silhouette table sorted best first (failed methods last), then the
/// accuracy table in run order.
pub fn format_tables(dataset: &str, reports: &[EvalReport]) -> String {
    let width = reports
        .iter()
        .map(|r| r.method.len())
        .max()
        .unwrap_or(0)
        .max("Method".len());
    let mut out = String::new();

    let mut ranked: Vec<&EvalReport> = reports.iter().collect();
    ranked.sort_by(|a, b| match (a.silhouette, b.silhouette) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    let _ = writeln!(out, "Silhouette scores ({dataset}, test split)");
    let _ = writeln!(out, "{:<width$}  {:>10}", "Method", "Silhouette");
    for r in ranked {
        let _ = writeln!(out, "{:<width$}  {:>10}", r.method, cell(r.silhouette));
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "Classification accuracy ({dataset}, test split)");
    let mut header = format!("{:<width$}", "Method");
    for (_, title) in CLASSIFIER_COLUMNS {
        let _ = write!(header, "  {title:>19}");
    }
    let _ = writeln!(out, "{header}");
    for r in reports {
        let mut line = format!("{:<width$}", r.method);
        for (key, _) in CLASSIFIER_COLUMNS {
            let value = if r.error.is_some() {
                None
            } else {
                r.accuracy(key)
            };
            let _ = write!(line, "  {:>19}", cell(value));
        }
        let _ = writeln!(out, "{line}");
    }
    out
}

/// `method silhouette acc_lr acc_rf acc_nb`.
pub fn summary_line(report: &EvalReport) -> String {
    let num = |v: Option<f64>| v.map_or_else(|| "nan".to_owned(), |v| format!("{v:.6}"));
    format!(
        "{} {} {} {} {}",
        report.method,
        num(report.silhouette),
        num(report.accuracy(LOGISTIC_REGRESSION)),
        num(report.accuracy(RANDOM_FOREST)),
        num(report.accuracy(NAIVE_BAYES)),
    )
}

/// Plain decimal notation with 9 significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// CSV with header `x,y,z,label_name`. `points` must have exactly three
/// columns.
pub fn points_csv(points: &Matrix, labels: &[usize], label_names: &[String]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| crate::error::Error::Config(format!("writing point cloud: {e}"));
    w.write_record(["x", "y", "z", "label_name"])
        .map_err(csv_err)?;
    for (row, &label) in points.row_iter().zip(labels) {
        w.write_record([
            sig9(row[0]),
            sig9(row[1]),
            sig9(row[2]),
            label_names[label].clone(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| crate::error::Error::Config(format!("writing point cloud: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{ClassifierConfig, EvalReport};
    use std::collections::BTreeMap;

    fn report(method: &str, sil: Option<f64>) -> EvalReport {
        let mut accuracies = BTreeMap::new();
        if sil.is_some() {
            accuracies.insert(LOGISTIC_REGRESSION.to_owned(), 0.9);
            accuracies.insert(RANDOM_FOREST.to_owned(), 0.8);
            accuracies.insert(NAIVE_BAYES.to_owned(), 0.7);
        }
        EvalReport {
            method: method.into(),
            dataset: "agnews".into(),
            silhouette: sil,
            accuracies,
            train_n: 1,
            test_n: 1,
            dim: 3,
            silhouette_n: 1,
            silhouette_split: "test".into(),
            standardized: true,
            classifiers: ClassifierConfig::default(),
            notes: vec![],
            error: sil.is_none().then(|| "boom".to_owned()),
            wall_time_secs: 0.0,
        }
    }

    #[test]
    fn silhouette_table_is_sorted() {
        let rs = [
            report("tfidf", Some(-0.03)),
            report("wordvec", None),
            report("sphere", Some(0.77)),
        ];
        let text = format_tables("agnews", &rs);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[2].starts_with("sphere"));
        assert!(lines[3].starts_with("tfidf"));
        assert!(lines[4].starts_with("wordvec") && lines[4].ends_with("failed"));
        // accuracy table keeps run order
        let acc: Vec<&str> = lines[8..]
            .iter()
            .map(|l| l.split_whitespace().next().unwrap())
            .collect();
        assert_eq!(acc, ["tfidf", "wordvec", "sphere"]);
    }

    #[test]
    fn summary() {
        assert_eq!(
            summary_line(&report("sphere", Some(0.5))),
            "sphere 0.500000 0.900000 0.800000 0.700000"
        );
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(1.0), "1.00000000");
        assert_eq!(sig9(-0.123456789123), "-0.123456789");
        assert_eq!(sig9(123.456), "123.456000");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1234567891234.0), "1234567891234");
    }

    #[test]
    fn csv_layout() {
        let m = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 0.5, -0.25]]).unwrap();
        let bytes = points_csv(&m, &[0, 1], &["World".into(), "Sci/Tech".into()]).unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "x,y,z,label_name\n1.00000000,0,0,World\n0,0.500000000,-0.250000000,Sci/Tech\n"
        );
    }
}
