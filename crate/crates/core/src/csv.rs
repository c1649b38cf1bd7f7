//! Lossless CSV number formatting shared by every table writer.

use crate::Real;

/// Formats a real with 17 significant digits.
pub fn format_real<T: Real>(x: T) -> String {
    format!("{:.16e}", x.as_f64())
}

/// Joins already-formatted fields with commas.
pub fn join_row<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = String::new();
    for (i, f) in fields.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(f.as_ref());
    }
    out
}

/// Column names `re_ij`, `im_ij` for every entry of a `dim × dim` matrix.
pub fn matrix_columns(dim: usize, prefix: &str) -> Vec<String> {
    let mut cols = Vec::with_capacity(2 * dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            cols.push(format!("{prefix}re_{i}{j}"));
            cols.push(format!("{prefix}im_{i}{j}"));
        }
    }
    cols
}
