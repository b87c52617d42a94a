use serde::{Deserialize, Serialize};

use crate::{CMat, Complex64};

/// Row-major complex matrix as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMat> for MatrixJson {
    fn from(m: &CMat) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                data.push([z.re, z.im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Option<CMat> {
        if self.data.len() != self.rows * self.cols {
            return None;
        }
        Some(CMat::from_fn(self.rows, self.cols, |r, c| {
            let [re, im] = self.data[r * self.cols + c];
            Complex64::new(re, im)
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_round_trip() {
        let m = CMat::from_fn(2, 3, |r, c| Complex64::new(r as f64, c as f64));
        let j = MatrixJson::from(&m);
        assert_eq!(j.data[1], [0.0, 1.0]);
        assert_eq!(j.to_matrix().unwrap(), m);
    }
}
