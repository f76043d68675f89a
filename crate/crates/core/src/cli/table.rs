//! Plain-text regression tables.
//!
//! Coefficients and standard errors carry four significant digits when
//! at least 1 in magnitude and three otherwise; magnitudes of 1000 and
//! above are printed without decimals. Observation counts use a comma
//! thousands separator.

use crate::hdfe::RegressionResult;

/// Significance stars: `***` p < 0.01, `**` p < 0.05, `*` p < 0.1.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return ".".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = if x.abs() >= 1000.0 {
        0
    } else if x.abs() >= 1.0 {
        (3 - mag).max(0)
    } else {
        2 - mag
    };
    format!("{x:.*}", decimals as usize)
}

/// `beta` with stars followed by the standard error in parentheses.
pub fn format_coef_cell(beta: f64, se: f64, p: f64) -> String {
    format!("{}{} ({})", format_number(beta), stars(p), format_number(se))
}

pub fn format_count(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Display name for a coefficient row.
pub fn regressor_label(name: &str) -> String {
    match name {
        "shock_annualized_pct" => "Annual growth (%) zip code-level demand".into(),
        "shock_total_pct" => "Growth (%) zip code-level demand".into(),
        other => other.into(),
    }
}

fn fe_label(dim: &str) -> String {
    match dim {
        "county_id" => "County FE".into(),
        "state_id" => "State FE".into(),
        other => format!("{other} FE"),
    }
}

#[derive(Debug, Clone)]
pub struct TableColumn {
    pub title: Option<String>,
    pub result: RegressionResult,
    /// Whether the control deltas entered this column.
    pub controls: bool,
}

/// Columns side by side; the listed regressors get coefficient rows,
/// everything else is summarized by the `Controls` row.
#[derive(Debug, Clone)]
pub struct RegressionTable {
    pub columns: Vec<TableColumn>,
    pub key_regressors: Vec<String>,
}

impl RegressionTable {
    pub fn new(key_regressors: Vec<String>) -> Self {
        RegressionTable {
            columns: Vec::new(),
            key_regressors,
        }
    }

    pub fn push(&mut self, title: Option<String>, result: RegressionResult, controls: bool) {
        self.columns.push(TableColumn {
            title,
            result,
            controls,
        });
    }

    fn grid(&self) -> Vec<Vec<String>> {
        let mut grid = Vec::new();
        let mut head = vec![String::new()];
        for (i, c) in self.columns.iter().enumerate() {
            head.push(match &c.title {
                Some(t) => format!("({}) {t}", i + 1),
                None => format!("({})", i + 1),
            });
        }
        grid.push(head);
        for name in &self.key_regressors {
            let mut row = vec![regressor_label(name)];
            for c in &self.columns {
                row.push(match c.result.coef(name) {
                    Some((b, s, p)) => format_coef_cell(b, s, p),
                    None => String::new(),
                });
            }
            grid.push(row);
        }
        let mut obs = vec!["Observations".to_string()];
        let mut r2 = vec!["R-squared".to_string()];
        for c in &self.columns {
            obs.push(format_count(c.result.n_obs));
            r2.push(format_number(c.result.r2_overall));
        }
        grid.push(obs);
        grid.push(r2);
        let mut dims: Vec<&str> = Vec::new();
        for c in &self.columns {
            for d in &c.result.fe_dimensions {
                if !dims.contains(&d.as_str()) {
                    dims.push(d);
                }
            }
        }
        if dims.is_empty() {
            dims.push("county_id");
        }
        let yes = |b: bool| if b { "YES" } else { "NO" }.to_string();
        for d in dims {
            let mut row = vec![fe_label(d)];
            row.extend(
                self.columns
                    .iter()
                    .map(|c| yes(c.result.fe_dimensions.iter().any(|f| f == d))),
            );
            grid.push(row);
        }
        let mut ctl = vec!["Controls".to_string()];
        ctl.extend(self.columns.iter().map(|c| yes(c.controls)));
        grid.push(ctl);
        grid
    }

    pub fn render(&self) -> String {
        let grid = self.grid();
        let ncol = grid[0].len();
        let widths: Vec<usize> = (0..ncol)
            .map(|j| grid.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
            .collect();
        let total: usize = widths.iter().sum::<usize>() + 2 * (ncol - 1);
        let rule = "-".repeat(total);
        let mut out = String::new();
        let line = |row: &[String]| {
            let mut s = String::new();
            for (j, cell) in row.iter().enumerate() {
                let pad = widths[j] - cell.chars().count();
                if j == 0 {
                    s.push_str(cell);
                    s.push_str(&" ".repeat(pad));
                } else {
                    s.push_str("  ");
                    s.push_str(&" ".repeat(pad));
                    s.push_str(cell);
                }
            }
            s.trim_end().to_string()
        };
        out.push_str(&line(&grid[0]));
        out.push('\n');
        out.push_str(&rule);
        out.push('\n');
        let n_key = self.key_regressors.len();
        for row in &grid[1..1 + n_key] {
            out.push_str(&line(row));
            out.push('\n');
        }
        out.push_str(&rule);
        out.push('\n');
        for row in &grid[1 + n_key..] {
            out.push_str(&line(row));
            out.push('\n');
        }
        out.push_str(&rule);
        out.push('\n');
        out.push_str("Standard errors clustered by ");
        let clusters: Vec<&str> = {
            let mut v: Vec<&str> = Vec::new();
            for c in &self.columns {
                if !v.contains(&c.result.cluster_dimension.as_str()) {
                    v.push(&c.result.cluster_dimension);
                }
            }
            v
        };
        out.push_str(&clusters.join(", "));
        out.push_str(" in parentheses.\n*** p<0.01, ** p<0.05, * p<0.1\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_cells_reproduce() {
        assert_eq!(format_coef_cell(6.2514, 0.64551, 0.0), "6.251*** (0.646)");
        assert_eq!(format_number(0.005991), "0.00599");
        assert_eq!(format_number(11.1372), "11.14");
        assert_eq!(format_number(-0.04812), "-0.0481");
        assert_eq!(format_number(0.000559), "0.000559");
        assert_eq!(format_number(28.1449), "28.14");
        assert_eq!(format_number(1234.6), "1235");
        assert_eq!(format_number(0.0), "0");
    }

    #[test]
    fn stars_thresholds() {
        assert_eq!(stars(0.009), "***");
        assert_eq!(stars(0.01), "**");
        assert_eq!(stars(0.049), "**");
        assert_eq!(stars(0.05), "*");
        assert_eq!(stars(0.0999), "*");
        assert_eq!(stars(0.1), "");
    }

    #[test]
    fn thousands_separator() {
        assert_eq!(format_count(14653), "14,653");
        assert_eq!(format_count(999), "999");
        assert_eq!(format_count(1000), "1,000");
        assert_eq!(format_count(1234567), "1,234,567");
        assert_eq!(format_count(0), "0");
    }
}
