//! Conversion between nested JSON arrays and flat row-major buffers.

use serde_json::Value;

use crate::error::{Error, Result};

/// Flattens a nested array of numbers with the given shape.
pub(crate) fn flatten(value: &Value, shape: &[usize], what: &str) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(shape.iter().product());
    walk(value, shape, what, &mut Vec::new(), &mut out)?;
    Ok(out)
}

fn walk(
    value: &Value,
    shape: &[usize],
    what: &str,
    path: &mut Vec<usize>,
    out: &mut Vec<f64>,
) -> Result<()> {
    let location = || {
        if path.is_empty() {
            what.to_string()
        } else {
            let idx: Vec<String> = path.iter().map(|i| format!("[{i}]")).collect();
            format!("{what}{}", idx.concat())
        }
    };
    match shape.split_first() {
        None => match value.as_f64() {
            Some(x) => {
                out.push(x);
                Ok(())
            }
            None => Err(Error::Dimension(format!("{} is not a number", location()))),
        },
        Some((&len, rest)) => {
            let items = value
                .as_array()
                .ok_or_else(|| Error::Dimension(format!("{} is not an array", location())))?;
            if items.len() != len {
                return Err(Error::Dimension(format!(
                    "{} has length {}, expected {}",
                    location(),
                    items.len(),
                    len
                )));
            }
            for (i, item) in items.iter().enumerate() {
                path.push(i);
                walk(item, rest, what, path, out)?;
                path.pop();
            }
            Ok(())
        }
    }
}

/// Rebuilds a nested array from a flat buffer.
pub(crate) fn nest(data: &[f64], shape: &[usize]) -> Value {
    match shape.split_first() {
        None => Value::from(data[0]),
        Some((&len, rest)) => {
            let stride: usize = rest.iter().product();
            Value::Array(
                (0..len)
                    .map(|i| nest(&data[i * stride..(i + 1) * stride], rest))
                    .collect(),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flatten_reports_location() {
        let v = json!([[1.0, 0.0], [0.5]]);
        let err = flatten(&v, &[2, 2], "kernel").unwrap_err();
        assert!(err.to_string().contains("kernel[1]"), "{err}");
    }

    #[test]
    fn nest_inverts_flatten() {
        let v = json!([[[0.1, 0.2]], [[0.3, 0.4]]]);
        let flat = flatten(&v, &[2, 1, 2], "x").unwrap();
        assert_eq!(flat, vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(nest(&flat, &[2, 1, 2]), v);
    }
}
