//! Dense Gaussian elimination over F_p.

use crate::modp::Prime;

/// Reduces `rows` to reduced row echelon form in place, dropping zero rows.
/// Returns the pivot column of each remaining row, increasing.
pub fn rref(rows: &mut Vec<Vec<u32>>, p: Prime) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(found) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(rank, found);
        let inv = p.inv(rows[rank][col]).expect("nonzero pivot");
        for v in rows[rank].iter_mut() {
            *v = p.mul(*v, inv);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col] == 0 {
                continue;
            }
            let factor = p.neg(row[col]);
            for (v, &pv) in row.iter_mut().zip(&pivot_row).skip(col) {
                if pv != 0 {
                    *v = p.add(*v, p.mul(factor, pv));
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

pub fn rank(rows: &[Vec<u32>], p: Prime) -> usize {
    let mut work = rows.to_vec();
    rref(&mut work, p).len()
}

/// A basis of `{x : A x = 0}` for the constraint rows `A` with `ncols`
/// unknowns, in reduced row echelon form.
pub fn nullspace(constraints: &[Vec<u32>], ncols: usize, p: Prime) -> Vec<Vec<u32>> {
    let mut work: Vec<Vec<u32>> = constraints.iter().filter(|r| r.iter().any(|&v| v != 0)).cloned().collect();
    let pivots = rref(&mut work, p);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis: Vec<Vec<u32>> = (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0u32; ncols];
            v[free] = 1 % p.get();
            for (row, &pc) in work.iter().zip(&pivots) {
                v[pc] = p.neg(row[free]);
            }
            v
        })
        .collect();
    rref(&mut basis, p);
    basis
}

/// True iff the row spaces of `a` and `b` coincide.
pub fn span_equal(a: &[Vec<u32>], b: &[Vec<u32>], p: Prime) -> bool {
    let ra = rank(a, p);
    if ra != rank(b, p) {
        return false;
    }
    let both: Vec<Vec<u32>> = a.iter().chain(b).cloned().collect();
    rank(&both, p) == ra
}
