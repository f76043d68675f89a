use std::collections::BTreeMap;

/// A categorical variable coded as dense level indices.
///
/// Levels are numbered in sorted label order, so the coding does not
/// depend on row order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    codes: Vec<usize>,
    labels: Vec<String>,
}

impl Factor {
    pub fn new<S: AsRef<str>>(ids: &[S]) -> Self {
        let mut index: BTreeMap<&str, usize> = ids.iter().map(|s| (s.as_ref(), 0)).collect();
        let labels: Vec<String> = index.keys().map(|s| s.to_string()).collect();
        for (i, v) in index.values_mut().enumerate() {
            *v = i;
        }
        let codes = ids.iter().map(|s| index[s.as_ref()]).collect();
        Factor { codes, labels }
    }

    /// A single level covering `n` rows (an intercept).
    pub fn constant(n: usize) -> Self {
        Factor {
            codes: vec![0; n],
            labels: vec![String::new()],
        }
    }

    pub fn codes(&self) -> &[usize] {
        &self.codes
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_levels(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_levels()];
        for &c in &self.codes {
            sizes[c] += 1;
        }
        sizes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_follow_sorted_labels() {
        let f = Factor::new(&["b", "a", "b", "c"]);
        assert_eq!(f.codes(), &[1, 0, 1, 2]);
        assert_eq!(f.labels(), &["a", "b", "c"]);
        assert_eq!(f.level_sizes(), vec![1, 2, 1]);
    }
}
