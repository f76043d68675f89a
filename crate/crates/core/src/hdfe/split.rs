use crate::error::{Error, Result};
use crate::frame::Frame;

/// Median with linear interpolation between the two middle values for
/// even counts. `None` for an empty slice.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MedianSplit {
    pub variable: String,
    pub median: f64,
    /// Rows strictly below the median.
    pub below: Frame,
    /// Rows at or above the median.
    pub above: Frame,
    /// Rows with a missing split variable, in neither half.
    pub n_missing: usize,
}

/// Splits `data` at the median of `variable`; ties go to the upper half.
pub fn median_split(data: &Frame, variable: &str) -> Result<MedianSplit> {
    let values = data.numeric(variable)?;
    let present: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    let first = present.first().copied();
    if first.is_none_or(|f| present.iter().all(|&v| v == f)) {
        return Err(Error::Domain(format!(
            "{variable} needs at least two distinct values to split"
        )));
    }
    let med = median(&present).expect("nonempty");
    Ok(MedianSplit {
        variable: variable.to_string(),
        median: med,
        below: data.filter(|i| values[i] < med),
        above: data.filter(|i| values[i] >= med),
        n_missing: values.len() - present.len(),
    })
}
