//! Exact Gaussian elimination over the rationals.
//!
//! Everything here is homogeneous or affine linear algebra on dense rows; the
//! systems produced by the engine have a few dozen unknowns at most.

use crate::scalar::Scalar;

pub type Row = Vec<Scalar>;

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Row], ncols: usize) -> (Vec<Row>, Vec<usize>) {
    let mut m: Vec<Row> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let k = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &(&k * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

/// A basis of `{x : A x = 0}`.
pub fn nullspace(rows: &[Row], ncols: usize) -> Vec<Row> {
    let (red, pivots) = rref(rows, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for (row, &pc) in red.iter().zip(&pivots) {
            v[pc] = -&row[free];
        }
        basis.push(v);
    }
    basis
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Finds `y` with `sum_i y_i rows[i] = target`, if `target` lies in the row space.
pub fn row_combination(rows: &[Row], target: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = rows.len();
    let ncols = target.len();
    // Transposed augmented system: for every column c, sum_i y_i rows[i][c] = target[c].
    let aug: Vec<Row> = (0..ncols)
        .map(|c| {
            let mut r: Row = rows.iter().map(|row| row[c].clone()).collect();
            r.push(target[c].clone());
            r
        })
        .collect();
    let (red, pivots) = rref(&aug, n + 1);
    if pivots.contains(&n) {
        return None;
    }
    let mut y = vec![Scalar::zero(); n];
    for (row, &pc) in red.iter().zip(&pivots) {
        y[pc] = row[n].clone();
    }
    Some(y)
}

/// Picks a point in `span(basis)` where none of `forms` vanishes.
///
/// Walks the moment curve `t -> sum_j t^j basis[j]` for `t = 1, 2, ...`; every
/// form that is not identically zero on the span restricts to a nonzero
/// polynomial of degree below `basis.len()`, so the sweep stops after at most
/// `forms.len() * basis.len() + 1` steps. Returns `None` if some form vanishes
/// on the whole span.
pub fn avoid_hyperplanes(basis: &[Row], forms: &[Row], ncols: usize) -> Option<Row> {
    let coeffs: Vec<Vec<Scalar>> = forms
        .iter()
        .map(|f| basis.iter().map(|b| dot(f, b)).collect())
        .collect();
    if coeffs.iter().any(|c| c.iter().all(Scalar::is_zero)) {
        return None;
    }
    let bound = forms.len() * basis.len().max(1) + 1;
    for t in 1..=bound as i64 {
        let t = Scalar::from_int(t);
        let powers: Vec<Scalar> = std::iter::successors(Some(Scalar::one()), |p| Some(p * &t))
            .take(basis.len())
            .collect();
        if coeffs.iter().all(|c| !dot(c, &powers).is_zero()) {
            let mut x = vec![Scalar::zero(); ncols];
            for (p, b) in powers.iter().zip(basis) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += &(p * bi);
                }
            }
            return Some(x);
        }
    }
    unreachable!("moment curve sweep exceeded its root bound")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn rows(v: &[&[i64]]) -> Vec<Row> {
        v.iter().map(|r| r.iter().map(|&x| s(x)).collect()).collect()
    }

    #[test]
    fn nullspace_is_annihilated() {
        let a = rows(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let ns = nullspace(&a, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in &a {
                assert!(dot(r, v).is_zero());
            }
        }
    }

    #[test]
    fn row_combination_certificate() {
        let a = rows(&[&[1, 0, -1], &[1, -1, 0]]);
        let y = row_combination(&a, &[s(0), s(1), s(-1)]).unwrap();
        let combo: Vec<Scalar> = (0..3).map(|c| &(&y[0] * &a[0][c]) + &(&y[1] * &a[1][c])).collect();
        assert_eq!(combo, vec![s(0), s(1), s(-1)]);
        assert!(row_combination(&a, &[s(1), s(0), s(0)]).is_none());
    }

    #[test]
    fn avoidance_finds_point_or_reports_forced_zero() {
        // span{(1,0,0),(0,1,1)}; avoid x0 = 0, x1 = 0, x0 - x1 = 0
        let basis = rows(&[&[1, 0, 0], &[0, 1, 1]]);
        let forms = rows(&[&[1, 0, 0], &[0, 1, 0], &[1, -1, 0]]);
        let x = avoid_hyperplanes(&basis, &forms, 3).unwrap();
        for f in &forms {
            assert!(!dot(f, &x).is_zero());
        }
        let forms = rows(&[&[0, 1, -1]]);
        assert!(avoid_hyperplanes(&basis, &forms, 3).is_none());
    }
}
