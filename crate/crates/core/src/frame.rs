//! A minimal column store used as the regression input table.
//!
//! Numeric missing values are `NaN`; categorical missing values are the
//! empty string.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn take(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&i| v[i]).collect()),
            Column::Categorical(v) => {
                Column::Categorical(rows.iter().map(|&i| v[i].clone()).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Frame {
    n_rows: usize,
    columns: Vec<(String, Column)>,
}

impl Frame {
    pub fn new(n_rows: usize) -> Self {
        Frame {
            n_rows,
            columns: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn has(&self, name: &str) -> bool {
        self.columns.iter().any(|(n, _)| n == name)
    }

    /// Adds or replaces a column.
    pub fn insert(&mut self, name: impl Into<String>, column: Column) -> Result<()> {
        let name = name.into();
        if column.len() != self.n_rows {
            return Err(Error::Schema(format!(
                "column {name} has {} rows, frame has {}",
                column.len(),
                self.n_rows
            )));
        }
        match self.columns.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = column,
            None => self.columns.push((name, column)),
        }
        Ok(())
    }

    pub fn with_numeric(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        self.insert(name, Column::Numeric(values))?;
        Ok(self)
    }

    pub fn with_categorical<S: Into<String>>(
        mut self,
        name: impl Into<String>,
        values: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        self.insert(name, Column::Categorical(values))?;
        Ok(self)
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::Schema(format!("column {name} not found")))
    }

    pub fn numeric(&self, name: &str) -> Result<&[f64]> {
        match self.column(name)? {
            Column::Numeric(v) => Ok(v),
            Column::Categorical(_) => Err(Error::Schema(format!("column {name} is not numeric"))),
        }
    }

    /// Categorical view of a column. Numeric columns are rendered with
    /// their shortest round-trip representation (`NaN` becomes missing).
    pub fn categorical(&self, name: &str) -> Result<Vec<String>> {
        Ok(match self.column(name)? {
            Column::Categorical(v) => v.clone(),
            Column::Numeric(v) => v
                .iter()
                .map(|x| if x.is_nan() { String::new() } else { x.to_string() })
                .collect(),
        })
    }

    /// New frame holding the given rows, in the given order.
    pub fn take(&self, rows: &[usize]) -> Frame {
        Frame {
            n_rows: rows.len(),
            columns: self
                .columns
                .iter()
                .map(|(n, c)| (n.clone(), c.take(rows)))
                .collect(),
        }
    }

    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> Frame {
        let rows: Vec<usize> = (0..self.n_rows).filter(|&i| keep(i)).collect();
        self.take(&rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_checks_length() {
        let mut f = Frame::new(2);
        assert!(f.insert("x", Column::Numeric(vec![1.0])).is_err());
        f.insert("x", Column::Numeric(vec![1.0, 2.0])).unwrap();
        assert_eq!(f.numeric("x").unwrap(), &[1.0, 2.0]);
        assert!(f.numeric("y").is_err());
    }

    #[test]
    fn take_and_categorical_view() {
        let f = Frame::new(3)
            .with_numeric("x", vec![1.5, f64::NAN, 3.0])
            .unwrap()
            .with_categorical("g", ["a", "b", "c"])
            .unwrap();
        let t = f.take(&[2, 0]);
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.numeric("x").unwrap(), &[3.0, 1.5]);
        assert_eq!(f.categorical("x").unwrap(), vec!["1.5", "", "3"]);
        assert!(f.numeric("g").is_err());
    }
}
