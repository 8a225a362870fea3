//! Rendering of evaluation results into file artifacts.
//!
//! Everything here produces a `String` the caller writes to disk: pretty
//! JSON for the structured reports, and small CSV tables for the headline
//! metrics, the model leaderboard, the confusion matrix, ROC points and
//! validation-curve sweeps. Headline CSVs round to four decimals; point
//! tables (ROC, curves) keep full precision so the numbers survive a
//! round trip through the file.

use crate::harness::{CvReport, HeadlineMetrics, ValidationCurve};
use crate::metrics::{ConfusionMatrix, MetricsReport, RocCurve};

/// Column header shared by the single-row metrics CSV and the leaderboard.
pub const METRIC_COLUMNS: &str = "Accuracy,AUC,Recall,Prec.,F1,Kappa,MCC";

/// The seven headline values as one CSV row, four decimals each.
fn headline_row(h: &HeadlineMetrics) -> String {
    format!(
        "{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
        h.accuracy, h.auc, h.recall, h.precision, h.f1, h.kappa, h.mcc
    )
}

/// A full evaluation report as pretty-printed JSON (trailing newline).
pub fn metrics_json(report: &MetricsReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// The headline metrics of one evaluation as a two-line CSV.
pub fn metrics_csv(report: &MetricsReport) -> String {
    format!("{METRIC_COLUMNS}\n{}\n", headline_row(&HeadlineMetrics::of(report)))
}

/// Cross-validated models as a leaderboard CSV, best accuracy first.
///
/// Rows are sorted by mean accuracy, descending; exact ties keep the
/// input order. The trailing column is total fit-and-score wall time.
pub fn leaderboard_csv(reports: &[CvReport]) -> String {
    let mut order: Vec<usize> = (0..reports.len()).collect();
    order.sort_by(|&a, &b| reports[b].mean.accuracy.total_cmp(&reports[a].mean.accuracy));
    let mut out = format!("Model,{METRIC_COLUMNS},TT (Sec)\n");
    for i in order {
        let r = &reports[i];
        out.push_str(&format!("{},{},{:.4}\n", r.model, headline_row(&r.mean), r.tt_seconds));
    }
    out
}

/// One cross-validation report as pretty-printed JSON (trailing newline).
pub fn cv_json(report: &CvReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// A confusion matrix as CSV: actual classes as rows, predicted as columns.
///
/// `class_names` must have one name per class.
pub fn confusion_csv(cm: &ConfusionMatrix, class_names: &[&str]) -> String {
    assert_eq!(class_names.len(), cm.n_classes(), "one name per class");
    let mut out = String::from("actual");
    for name in class_names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (t, name) in class_names.iter().enumerate() {
        out.push_str(name);
        for p in 0..cm.n_classes() {
            out.push_str(&format!(",{}", cm.count(t, p)));
        }
        out.push('\n');
    }
    out
}

/// The confusion counts in long form, one `(actual, predicted)` pair per
/// row — the layout a stacked per-class error bar is drawn from.
pub fn class_error_csv(cm: &ConfusionMatrix, class_names: &[&str]) -> String {
    assert_eq!(class_names.len(), cm.n_classes(), "one name per class");
    let mut out = String::from("actual,predicted,count\n");
    for (t, actual) in class_names.iter().enumerate() {
        for (p, predicted) in class_names.iter().enumerate() {
            out.push_str(&format!("{actual},{predicted},{}\n", cm.count(t, p)));
        }
    }
    out
}

/// One ROC curve as a full-precision `fpr,tpr` CSV.
pub fn roc_csv(curve: &RocCurve) -> String {
    let mut out = String::from("fpr,tpr\n");
    for (fpr, tpr) in curve.fpr.iter().zip(&curve.tpr) {
        out.push_str(&format!("{fpr},{tpr}\n"));
    }
    out
}

/// A validation curve as a full-precision CSV, one sweep point per row.
pub fn curve_csv(curve: &ValidationCurve) -> String {
    let mut out = format!("{},train_mean,train_std,cv_mean,cv_std\n", curve.param);
    for p in &curve.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.value, p.train_mean, p.train_std, p.cv_mean, p.cv_std
        ));
    }
    out
}

/// A validation curve as pretty-printed JSON (trailing newline).
pub fn curve_json(curve: &ValidationCurve) -> String {
    let mut s = serde_json::to_string_pretty(curve).expect("curve serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::CurvePoint;
    use crate::metrics::summary;

    fn sample_report() -> MetricsReport {
        // 6 rows, 3 classes; hand-checkable counts.
        let y_true = [0, 0, 1, 1, 2, 2];
        let y_pred = [0, 1, 1, 1, 2, 0];
        let proba = [
            0.8, 0.1, 0.1, //
            0.2, 0.7, 0.1, //
            0.1, 0.8, 0.1, //
            0.3, 0.6, 0.1, //
            0.1, 0.2, 0.7, //
            0.6, 0.2, 0.2,
        ];
        summary(&y_true, &y_pred, &proba, 3).unwrap()
    }

    fn headlines(vals: [f64; 7]) -> HeadlineMetrics {
        HeadlineMetrics {
            accuracy: vals[0],
            auc: vals[1],
            recall: vals[2],
            precision: vals[3],
            f1: vals[4],
            kappa: vals[5],
            mcc: vals[6],
        }
    }

    fn cv_row(model: &str, accuracy: f64, tt: f64) -> CvReport {
        CvReport {
            model: model.to_string(),
            folds: 2,
            per_fold: Vec::new(),
            mean: headlines([accuracy, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5]),
            std: headlines([0.0; 7]),
            tt_seconds: tt,
        }
    }

    #[test]
    fn metrics_csv_is_two_lines_of_four_decimal_headlines() {
        let report = sample_report();
        let csv = metrics_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "Accuracy,AUC,Recall,Prec.,F1,Kappa,MCC");
        assert_eq!(lines.len(), 2);
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells.len(), 7);
        assert_eq!(cells[0], format!("{:.4}", report.accuracy));
        assert_eq!(cells[1], format!("{:.4}", report.auc_weighted));
        assert_eq!(cells[6], format!("{:.4}", report.mcc));
        // 4 of 6 correct.
        assert_eq!(cells[0], "0.6667");
    }

    #[test]
    fn metrics_json_round_trips_every_headline_field() {
        let report = sample_report();
        let value: serde_json::Value = serde_json::from_str(&metrics_json(&report)).unwrap();
        assert_eq!(value["n_evaluated"], 6);
        assert_eq!(value["accuracy"].as_f64().unwrap(), report.accuracy);
        assert_eq!(value["kappa"].as_f64().unwrap(), report.kappa);
        assert_eq!(value["mcc"].as_f64().unwrap(), report.mcc);
        assert_eq!(value["per_class"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn leaderboard_sorts_by_accuracy_descending() {
        let reports =
            vec![cv_row("cart", 0.80, 1.0), cv_row("gbdt", 0.95, 2.5), cv_row("dummy", 0.40, 0.1)];
        let csv = leaderboard_csv(&reports);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "Model,Accuracy,AUC,Recall,Prec.,F1,Kappa,MCC,TT (Sec)");
        assert!(lines[1].starts_with("gbdt,0.9500,"));
        assert!(lines[2].starts_with("cart,0.8000,"));
        assert!(lines[3].starts_with("dummy,0.4000,"));
        assert!(lines[1].ends_with(",2.5000"));
    }

    #[test]
    fn leaderboard_keeps_input_order_on_exact_ties() {
        let reports = vec![cv_row("first", 0.5, 0.0), cv_row("second", 0.5, 0.0)];
        let csv = leaderboard_csv(&reports);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[1].starts_with("first,"));
        assert!(lines[2].starts_with("second,"));
    }

    #[test]
    fn confusion_csv_lays_out_actual_rows_and_predicted_columns() {
        let cm = ConfusionMatrix::from_labels(&[0, 0, 1, 2, 2, 2], &[0, 1, 1, 2, 2, 0], 3).unwrap();
        let csv = confusion_csv(&cm, &["Normal", "Suspect", "Pathological"]);
        let want = "actual,Normal,Suspect,Pathological\n\
                    Normal,1,1,0\n\
                    Suspect,0,1,0\n\
                    Pathological,1,0,2\n";
        assert_eq!(csv, want);
    }

    #[test]
    fn class_error_csv_is_the_same_counts_in_long_form() {
        let cm = ConfusionMatrix::from_labels(&[0, 1, 1], &[1, 1, 0], 2).unwrap();
        let csv = class_error_csv(&cm, &["a", "b"]);
        let want = "actual,predicted,count\n\
                    a,a,0\n\
                    a,b,1\n\
                    b,a,1\n\
                    b,b,1\n";
        assert_eq!(csv, want);
    }

    #[test]
    fn roc_csv_preserves_full_precision() {
        let curve = RocCurve {
            fpr: vec![0.0, 0.010499999999999999, 1.0],
            tpr: vec![0.0, 0.3333333333333333, 1.0],
            auc: 0.66,
        };
        let csv = roc_csv(&curve);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "fpr,tpr");
        assert_eq!(lines.len(), 4);
        for (i, line) in lines[1..].iter().enumerate() {
            let (f, t) = line.split_once(',').unwrap();
            assert_eq!(f.parse::<f64>().unwrap(), curve.fpr[i]);
            assert_eq!(t.parse::<f64>().unwrap(), curve.tpr[i]);
        }
    }

    #[test]
    fn curve_csv_heads_with_the_swept_parameter() {
        let curve = ValidationCurve {
            param: "n_estimators".to_string(),
            points: vec![
                CurvePoint {
                    value: 10.0,
                    train_mean: 0.9,
                    train_std: 0.01,
                    cv_mean: 0.8,
                    cv_std: 0.02,
                },
                CurvePoint {
                    value: 20.0,
                    train_mean: 0.95,
                    train_std: 0.01,
                    cv_mean: 0.85,
                    cv_std: 0.02,
                },
            ],
        };
        let csv = curve_csv(&curve);
        let want = "n_estimators,train_mean,train_std,cv_mean,cv_std\n\
                    10,0.9,0.01,0.8,0.02\n\
                    20,0.95,0.01,0.85,0.02\n";
        assert_eq!(csv, want);
        let json: serde_json::Value = serde_json::from_str(&curve_json(&curve)).unwrap();
        assert_eq!(json["param"], "n_estimators");
        assert_eq!(json["points"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn cv_json_includes_per_fold_reports_and_spread() {
        let report = CvReport {
            model: "gbdt".to_string(),
            folds: 1,
            per_fold: vec![sample_report()],
            mean: headlines([0.6667, 0.8, 0.6667, 0.7, 0.65, 0.5, 0.5]),
            std: headlines([0.0; 7]),
            tt_seconds: 0.25,
        };
        let value: serde_json::Value = serde_json::from_str(&cv_json(&report)).unwrap();
        assert_eq!(value["model"], "gbdt");
        assert_eq!(value["per_fold"].as_array().unwrap().len(), 1);
        assert_eq!(value["mean"]["accuracy"].as_f64().unwrap(), 0.6667);
        assert_eq!(value["tt_seconds"].as_f64().unwrap(), 0.25);
    }
}
