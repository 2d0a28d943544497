//! Matrix JSON format, used by the CLI and every file interface:
//!
//! ```json
//! {"n": 2, "entries": [[[0.0, 0.0], [2.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]}
//! ```
//!
//! `entries` is row-major, each entry a `[re, im]` pair.  The parser rejects
//! ragged arrays and non-finite numbers, naming the offending entry.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    let raw: MatrixJson = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("matrix json: {e}")))?;
    if raw.n == 0 {
        return Err(Error::InvalidInput("matrix json: n must be positive".into()));
    }
    if raw.entries.len() != raw.n {
        return Err(Error::InvalidInput(format!(
            "matrix json: {} rows, expected n = {}",
            raw.entries.len(),
            raw.n
        )));
    }
    let mut m = ComplexMatrix::zeros(raw.n);
    for (i, row) in raw.entries.iter().enumerate() {
        if row.len() != raw.n {
            return Err(Error::InvalidInput(format!(
                "matrix json: row {i} has {} entries, expected {}",
                row.len(),
                raw.n
            )));
        }
        for (j, pair) in row.iter().enumerate() {
            if !pair[0].is_finite() || !pair[1].is_finite() {
                return Err(Error::InvalidInput(format!(
                    "matrix json: entry ({i},{j}) is not finite"
                )));
            }
            m[(i, j)] = Complex64::new(pair[0], pair[1]);
        }
    }
    Ok(m)
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    let n = m.n();
    let entries: Vec<Vec<[f64; 2]>> = (0..n)
        .map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    serde_json::to_string(&MatrixJson { n, entries }).expect("matrix json serialization")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    #[test]
    fn round_trip_preserves_entries_exactly() {
        let mut rng = CounterRng::new(21, 0);
        for n in 1..=5 {
            let m = rng.complex_matrix(n);
            let back = matrix_from_json(&matrix_to_json(&m)).unwrap();
            assert_eq!(m, back);
        }
    }

    #[test]
    fn rejects_ragged_and_nonfinite() {
        let ragged = r#"{"n":2,"entries":[[[0,0],[1,0]],[[0,0]]]}"#;
        let err = matrix_from_json(ragged).unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");

        let bad_n = r#"{"n":3,"entries":[[[0,0]]]}"#;
        assert!(matrix_from_json(bad_n).is_err());

        // JSON itself has no NaN/inf literal; oversized exponents must not
        // sneak an infinity through either.
        let inf = r#"{"n":1,"entries":[[[1e999,0]]]}"#;
        let res = matrix_from_json(inf);
        match res {
            Err(e) => assert!(e.to_string().contains("entry (0,0)") || e.to_string().contains("json"), "{e}"),
            Ok(_) => panic!("accepted non-finite entry"),
        }
    }
}
