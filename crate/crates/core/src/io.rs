//! Measure serialization: the JSON schema and CSV ingestion.
//!
//! Discrete measures travel as
//! `{"dim":N,"type":"discrete","points":[[..],..],"weights":[..]}` and
//! mixtures as
//! `{"dim":N,"type":"mixture","components":[{"weight":w,"mean":[..],"cov":[[..]]},..]}`.
//! Serialization uses the shortest float representation that parses back
//! to the same bits, so write → read → write is byte-identical. CSV files
//! carry one point per row, optionally with the weight in the last column.

use std::io::Read;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, GaussianComponent, GaussianMixtureMeasure, Measure};

#[derive(Debug, Serialize, Deserialize)]
struct ComponentWire {
    weight: f64,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureWire {
    dim: usize,
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    components: Option<Vec<ComponentWire>>,
}

/// Nested row-major copy of a matrix, for JSON payloads.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Rebuilds a matrix from row-major nested vectors; rows must be nonempty
/// and of equal length.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::Schema("matrix must have at least one entry".into()));
    }
    let cols = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::Schema(format!(
            "ragged matrix: expected {cols} columns, found a row with {}",
            bad.len()
        )));
    }
    let mut m = DMatrix::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

fn wire_to_measure(wire: MeasureWire) -> Result<Measure> {
    match wire.kind.as_str() {
        "discrete" => {
            let points = wire
                .points
                .ok_or_else(|| Error::Schema("discrete measure needs \"points\"".into()))?;
            let weights = wire
                .weights
                .ok_or_else(|| Error::Schema("discrete measure needs \"weights\"".into()))?;
            if wire.components.is_some() {
                return Err(Error::Schema(
                    "discrete measure must not carry \"components\"".into(),
                ));
            }
            let points: Vec<DVector<f64>> = points.into_iter().map(DVector::from_vec).collect();
            for (index, p) in points.iter().enumerate() {
                if p.len() != wire.dim {
                    return Err(Error::PointDim {
                        index,
                        expected: wire.dim,
                        actual: p.len(),
                    });
                }
            }
            Ok(DiscreteMeasure::new(points, weights)?.into())
        }
        "mixture" => {
            let components = wire
                .components
                .ok_or_else(|| Error::Schema("mixture measure needs \"components\"".into()))?;
            if wire.points.is_some() || wire.weights.is_some() {
                return Err(Error::Schema(
                    "mixture measure must not carry \"points\"/\"weights\"".into(),
                ));
            }
            let components = components
                .into_iter()
                .map(|c| {
                    Ok(GaussianComponent {
                        weight: c.weight,
                        mean: DVector::from_vec(c.mean),
                        covariance: matrix_from_rows(&c.cov)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mixture = GaussianMixtureMeasure::new(components)?;
            if mixture.dim() != wire.dim {
                return Err(Error::DimensionMismatch {
                    left: mixture.dim(),
                    right: wire.dim,
                });
            }
            Ok(mixture.into())
        }
        other => Err(Error::Schema(format!(
            "unknown measure type {other:?}, expected \"discrete\" or \"mixture\""
        ))),
    }
}

fn measure_to_wire(measure: &Measure) -> MeasureWire {
    match measure {
        Measure::Discrete(m) => MeasureWire {
            dim: m.dim(),
            kind: "discrete".into(),
            points: Some(
                m.points()
                    .iter()
                    .map(|p| p.iter().copied().collect())
                    .collect(),
            ),
            weights: Some(m.weights().to_vec()),
            components: None,
        },
        Measure::Mixture(m) => MeasureWire {
            dim: m.dim(),
            kind: "mixture".into(),
            points: None,
            weights: None,
            components: Some(
                m.components()
                    .iter()
                    .map(|c| ComponentWire {
                        weight: c.weight,
                        mean: c.mean.iter().copied().collect(),
                        cov: matrix_rows(&c.covariance),
                    })
                    .collect(),
            ),
        },
    }
}

/// Parses a measure from its JSON document, enforcing all invariants.
pub fn measure_from_json(text: &str) -> Result<Measure> {
    wire_to_measure(serde_json::from_str(text)?)
}

/// Serializes a measure to its canonical pretty-printed JSON document.
pub fn measure_to_json(measure: &Measure) -> String {
    serde_json::to_string_pretty(&measure_to_wire(measure))
        .expect("measure wire form always serializes")
}

/// Parses a square matrix from a JSON array of rows (`[[..],..]`).
pub fn matrix_from_json(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(text)?;
    matrix_from_rows(&rows)
}

/// Point rows from a CSV file, with the weight column when one was requested.
pub type CsvPoints = (Vec<DVector<f64>>, Option<Vec<f64>>);

/// Reads points from headerless CSV, one point per row. With
/// `last_column_weight` the final field of each row is its weight.
pub fn points_from_csv<R: Read>(reader: R, last_column_weight: bool) -> Result<CsvPoints> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (index, record) in csv_reader.records().enumerate() {
        let record = record?;
        let mut values = Vec::with_capacity(record.len());
        for field in record.iter() {
            if field.is_empty() {
                continue;
            }
            let value = field.parse::<f64>().map_err(|e| {
                Error::Schema(format!("row {}: bad number {field:?}: {e}", index + 1))
            })?;
            if !value.is_finite() {
                return Err(Error::Schema(format!(
                    "row {}: non-finite value {field:?}",
                    index + 1
                )));
            }
            values.push(value);
        }
        if values.is_empty() {
            continue;
        }
        if last_column_weight {
            if values.len() < 2 {
                return Err(Error::Schema(format!(
                    "row {}: need at least one coordinate plus a weight",
                    index + 1
                )));
            }
            weights.push(values.pop().expect("checked length"));
        }
        points.push(DVector::from_vec(values));
    }
    if points.is_empty() {
        return Err(Error::Empty);
    }
    Ok((points, last_column_weight.then_some(weights)))
}

/// Reads a discrete measure from CSV; uniform weights unless the last
/// column carries them.
pub fn measure_from_csv<R: Read>(reader: R, last_column_weight: bool) -> Result<DiscreteMeasure> {
    let (points, weights) = points_from_csv(reader, last_column_weight)?;
    match weights {
        Some(w) => DiscreteMeasure::new(points, w),
        None => DiscreteMeasure::uniform(points),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::parallel::trial_rng;
    use nalgebra::dvector;
    use proptest::prelude::*;

    #[test]
    fn discrete_round_trip_is_byte_identical() {
        let m: Measure = DiscreteMeasure::new(
            vec![dvector![1.0, 0.0], dvector![0.1234567890123456, -2.5]],
            vec![0.25, 0.75],
        )
        .unwrap()
        .into();
        let first = measure_to_json(&m);
        let reread = measure_from_json(&first).unwrap();
        assert_eq!(measure_to_json(&reread), first);
        assert_eq!(reread, m);
    }

    #[test]
    fn mixture_round_trip_is_byte_identical() {
        let cov = DMatrix::from_row_slice(2, 2, &[0.4, 0.1, 0.1, 0.3]);
        let m: Measure = GaussianMixtureMeasure::single(dvector![0.5, -0.25], cov)
            .unwrap()
            .into();
        let first = measure_to_json(&m);
        let reread = measure_from_json(&first).unwrap();
        assert_eq!(measure_to_json(&reread), first);
    }

    #[test]
    fn schema_matches_the_documented_shape() {
        let m: Measure = DiscreteMeasure::uniform(vec![dvector![1.0, 0.0], dvector![0.0, 1.0]])
            .unwrap()
            .into();
        let json = measure_to_json(&m);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["dim"], 2);
        assert_eq!(value["type"], "discrete");
        assert_eq!(value["points"][0][0], 1.0);
        assert_eq!(value["weights"][1], 0.5);
    }

    #[test]
    fn parses_the_documented_mixture_shape() {
        let json = r#"{
            "dim": 2,
            "type": "mixture",
            "components": [
                {"weight": 1.0, "mean": [0.0, 0.0], "cov": [[0.5, 0.0], [0.0, 0.5]]}
            ]
        }"#;
        let m = measure_from_json(json).unwrap();
        assert_eq!(m.dim(), 2);
        assert!(m.as_mixture().is_some());
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(matches!(
            measure_from_json(r#"{"dim":2,"type":"discrete"}"#),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            measure_from_json(r#"{"dim":2,"type":"nope","points":[],"weights":[]}"#),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            measure_from_json(
                r#"{"dim":2,"type":"discrete","points":[[1,0]],"weights":[1.0],"components":[]}"#
            ),
            Err(Error::Schema(_))
        ));
        // Wrong point length against the declared dim.
        assert!(matches!(
            measure_from_json(r#"{"dim":3,"type":"discrete","points":[[1,0]],"weights":[1.0]}"#),
            Err(Error::PointDim { .. })
        ));
        // Weight invariants still apply on ingestion.
        assert!(matches!(
            measure_from_json(r#"{"dim":1,"type":"discrete","points":[[1]],"weights":[0.4]}"#),
            Err(Error::WeightSum { .. })
        ));
    }

    #[test]
    fn csv_ingestion_with_and_without_weights() {
        let plain = "1.0,0.0\n0.0,1.0\n";
        let m = measure_from_csv(plain.as_bytes(), false).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.weights(), &[0.5, 0.5]);

        let weighted = "1.0,0.0,0.5\n0.0,1.0,0.25\n0.0,-1.0,0.25\n";
        let m = measure_from_csv(weighted.as_bytes(), true).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.weights(), &[0.5, 0.25, 0.25]);

        assert!(matches!(
            measure_from_csv("".as_bytes(), false),
            Err(Error::Empty)
        ));
        assert!(measure_from_csv("1.0,oops\n".as_bytes(), false).is_err());
        assert!(matches!(
            measure_from_csv("1.0,inf\n".as_bytes(), false),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = matrix_from_json("[[4.0, 0.0], [0.0, 1.0]]").unwrap();
        assert_eq!(m[(0, 0)], 4.0);
        assert!(matches!(matrix_from_json("[]"), Err(Error::Schema(_))));
        assert!(matches!(
            matrix_from_json("[[1.0],[2.0,3.0]]"),
            Err(Error::Schema(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn random_measures_round_trip(seed in 0u64..1000) {
            let mut rng = trial_rng(seed, 3);
            let m: Measure = generate::random_discrete(3, 5, &mut rng).into();
            let json = measure_to_json(&m);
            let reread = measure_from_json(&json).unwrap();
            prop_assert_eq!(&measure_to_json(&reread), &json);
            prop_assert_eq!(reread, m);
        }
    }
}
