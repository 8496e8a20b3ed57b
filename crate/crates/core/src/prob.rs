//! Validated probability vectors and conditional kernels.

use crate::error::{Error, Result};

/// Tolerance on the total mass of a probability vector.
pub const SUM_TOL: f64 = 1e-9;

/// Masses at or below this are treated as zero when forming supports.
pub const ZERO_TOL: f64 = 1e-12;

/// A probability mass function over `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_row(&values, "vector")?;
        Ok(ProbVector(values))
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform over an empty alphabet");
        ProbVector(vec![1.0 / len as f64; len])
    }

    /// Point mass on `index`.
    pub fn point(len: usize, index: usize) -> Self {
        let mut v = vec![0.0; len];
        v[index] = 1.0;
        ProbVector(v)
    }

    /// Binary distribution `(1 - p, p)`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(vec![1.0 - p, p])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > ZERO_TOL)
            .map(|(i, _)| i)
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A row-stochastic matrix: `rows[i]` is the output law given input `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CondKernel {
    inputs: usize,
    outputs: usize,
    data: Vec<f64>,
}

impl CondKernel {
    /// Builds a kernel from flattened row-major data and validates each row.
    pub fn from_flat(inputs: usize, outputs: usize, data: Vec<f64>) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(Error::Dimension("kernel with an empty alphabet".into()));
        }
        if data.len() != inputs * outputs {
            return Err(Error::Dimension(format!(
                "kernel has {} entries, expected {}x{}",
                data.len(),
                inputs,
                outputs
            )));
        }
        for (r, row) in data.chunks(outputs).enumerate() {
            check_row(row, &r.to_string())?;
        }
        Ok(CondKernel {
            inputs,
            outputs,
            data,
        })
    }

    pub fn from_rows(rows: Vec<ProbVector>) -> Result<Self> {
        let outputs = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != outputs) {
            return Err(Error::Dimension("kernel rows of unequal length".into()));
        }
        let inputs = rows.len();
        let data = rows.into_iter().flat_map(|r| r.into_inner()).collect();
        Self::from_flat(inputs, outputs, data)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, input: usize) -> &[f64] {
        &self.data[input * self.outputs..(input + 1) * self.outputs]
    }

    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.data[input * self.outputs + output]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }
}

/// Checks nonnegativity and unit mass of a single row.
pub(crate) fn check_row(row: &[f64], label: &str) -> Result<()> {
    if row.is_empty() {
        return Err(Error::Dimension(format!("row {label} is empty")));
    }
    if let Some(&value) = row.iter().find(|&&p| p < 0.0 || p.is_nan()) {
        return Err(Error::NegativeProbability {
            row: label.to_string(),
            value,
        });
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::NotStochastic {
            row: label.to_string(),
            sum,
        });
    }
    Ok(())
}
