//! Exact linear algebra over ℚ and over the fraction field of ℚ[x].
//!
//! Polynomial matrices are handled fraction-free (Bareiss), so every
//! intermediate entry is a minor of the input and every division is exact.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polyring::{Poly, Rat};

/// Rank of a rational matrix given by rows.
pub fn rank_q(rows: &[Vec<Rat>]) -> usize {
    echelon_q(rows).1.len()
}

/// Row-echelon form plus the pivot columns, in order.
fn echelon_q(rows: &[Vec<Rat>]) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in &mut m[r][c..] {
            *x *= &inv;
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x -= p * &f;
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (m, pivots)
}

/// Basis of `{v : rows · v = 0}` over ℚ.
pub fn nullspace_q(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let (rref, pivots) = echelon_q(rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); ncols];
            v[f] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rref[r][f].clone();
            }
            v
        })
        .collect()
}

/// Evaluates every entry of a polynomial matrix at a point.
pub fn eval_matrix(rows: &[Vec<Poly>], point: &[Rat]) -> Result<Vec<Vec<Rat>>> {
    rows.iter()
        .map(|row| row.iter().map(|p| p.eval(point)).collect())
        .collect()
}

/// Fraction-free row echelon form. Returns the rank and the sign of the row
/// permutation applied.
fn bareiss(m: &mut [Vec<Poly>]) -> (usize, bool) {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let nvars = m.first().and_then(|r| r.first()).map_or(0, Poly::nvars);
    let mut prev = Poly::one(nvars);
    let mut r = 0;
    let mut negated = false;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        // Prefer the sparsest nonzero pivot to keep intermediate growth down.
        let Some(p) = (r..nrows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| m[i][c].len())
        else {
            continue;
        };
        if p != r {
            m.swap(r, p);
            negated = !negated;
        }
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let num = &(&m[r][c] * &m[i][j]) - &(&m[i][c] * &m[r][j]);
                m[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step must divide exactly");
            }
            m[i][c] = Poly::zero(nvars);
        }
        prev = m[r][c].clone();
        r += 1;
    }
    (r, negated)
}

/// Rank over the field of rational functions.
pub fn rank_poly(rows: &[Vec<Poly>]) -> usize {
    let mut m = rows.to_vec();
    bareiss(&mut m).0
}

/// Determinant of a square polynomial matrix.
pub fn det_poly(rows: &[Vec<Poly>]) -> Result<Poly> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: rows.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n),
        });
    }
    if n == 0 {
        return Err(Error::Precondition("determinant of an empty matrix".into()));
    }
    let nvars = rows[0][0].nvars();
    let mut m = rows.to_vec();
    let (rank, negated) = bareiss(&mut m);
    if rank < n {
        return Ok(Poly::zero(nvars));
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if negated { -&d } else { d })
}

/// Kernel of a polynomial matrix over the rational-function field, returned
/// as polynomial vectors (denominators cleared).
///
/// Pivot rows and columns are chosen from the matrix evaluated at `point`;
/// kernel vectors then come from Cramer's rule on that pivot block. Fails
/// if the rank at `point` is below the generic rank.
pub fn kernel_poly(rows: &[Vec<Poly>], ncols: usize, nvars: usize, point: &[Rat]) -> Result<Vec<Vec<Poly>>> {
    if rows.is_empty() {
        return Ok((0..ncols)
            .map(|f| {
                (0..ncols)
                    .map(|j| if j == f { Poly::one(nvars) } else { Poly::zero(nvars) })
                    .collect()
            })
            .collect());
    }
    let numeric = eval_matrix(rows, point)?;
    let (prow, pcol) = pivot_block(&numeric);
    let block: Vec<Vec<Poly>> = prow
        .iter()
        .map(|&i| pcol.iter().map(|&j| rows[i][j].clone()).collect())
        .collect();
    let det = if block.is_empty() {
        Poly::one(nvars)
    } else {
        det_poly(&block)?
    };
    let mut basis = Vec::new();
    for f in (0..ncols).filter(|c| !pcol.contains(c)) {
        let mut v = vec![Poly::zero(nvars); ncols];
        v[f] = det.clone();
        for (slot, &pc) in pcol.iter().enumerate() {
            let replaced: Vec<Vec<Poly>> = block
                .iter()
                .zip(&prow)
                .map(|(row, &i)| {
                    let mut row = row.clone();
                    row[slot] = rows[i][f].clone();
                    row
                })
                .collect();
            v[pc] = -&det_poly(&replaced)?;
        }
        normalize_constant_lead(&mut v);
        basis.push(v);
    }
    for (i, row) in rows.iter().enumerate() {
        for v in &basis {
            let mut acc = Poly::zero(nvars);
            for (a, b) in row.iter().zip(v) {
                acc = &acc + &(a * b);
            }
            if !acc.is_zero() {
                return Err(Error::Precondition(format!(
                    "row {i} is independent of the pivot rows generically but not at the base point"
                )));
            }
        }
    }
    Ok(basis)
}

/// Pivot rows and columns of a nonsingular block of maximal size.
fn pivot_block(rows: &[Vec<Rat>]) -> (Vec<usize>, Vec<usize>) {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut order: Vec<usize> = (0..m.len()).collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pcols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        order.swap(r, p);
        let pivot = m[r].clone();
        for row in &mut m[r + 1..] {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot[c];
            for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x -= p * &f;
            }
        }
        pcols.push(c);
        r += 1;
    }
    order.truncate(r);
    (order, pcols)
}

/// If every entry is a constant multiple of one common polynomial, scale
/// so the first nonzero entry's leading coefficient is 1.
fn normalize_constant_lead(v: &mut [Poly]) {
    let Some(lead) = v.iter().find(|p| !p.is_zero()) else {
        return;
    };
    let Some((_, c)) = lead.leading_term() else {
        return;
    };
    let inv = c.recip();
    for p in v.iter_mut() {
        *p = p.scale(&inv);
    }
}
