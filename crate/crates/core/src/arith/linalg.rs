//! Dense linear algebra over F_p for the small systems that appear in the
//! layered counts.

use super::field::PrimeField;

/// Row-reduces `rows` in place and returns the pivot columns.
pub fn rref(f: &PrimeField, rows: &mut Vec<Vec<u32>>) -> Vec<usize> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = f.inv(rows[r][c]).unwrap();
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let factor = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                if y != 0 {
                    *x = f.sub(*x, f.mul(factor, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(f: &PrimeField, rows: &[Vec<u32>]) -> usize {
    let mut m = rows.to_vec();
    rref(f, &mut m).len()
}

/// Basis of the row space in reduced echelon form (a canonical key for the
/// subspace).
pub fn row_space(f: &PrimeField, rows: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut m = rows.to_vec();
    rref(f, &mut m);
    m
}

/// Basis of the column space of the matrix whose columns are `cols`.
pub fn column_space(f: &PrimeField, cols: &[Vec<u32>]) -> Vec<Vec<u32>> {
    row_space(f, cols)
}

/// Basis of the orthogonal complement of the span of `rows` under the dot
/// product on F_p^n.
pub fn orthogonal_complement(f: &PrimeField, rows: &[Vec<u32>], n: usize) -> Vec<Vec<u32>> {
    let mut m = rows.to_vec();
    let pivots = rref(f, &mut m);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u32; n];
            v[fc] = 1;
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = f.neg(row[fc]);
            }
            v
        })
        .collect()
}

/// Basis of the kernel of the matrix whose rows are `rows` (n columns).
pub fn nullspace(f: &PrimeField, rows: &[Vec<u32>], n: usize) -> Vec<Vec<u32>> {
    orthogonal_complement(f, rows, n)
}

/// Reduces `v` against reduced echelon `rows` with the given pivots; the
/// result is zero exactly when `v` lies in their span.
pub fn reduce_against(f: &PrimeField, rows: &[Vec<u32>], pivots: &[usize], v: &mut [u32]) {
    for (row, &pc) in rows.iter().zip(pivots) {
        let c = v[pc];
        if c == 0 {
            continue;
        }
        for (x, &y) in v.iter_mut().zip(row) {
            if y != 0 {
                *x = f.sub(*x, f.mul(c, y));
            }
        }
    }
}

/// One solution of `sum_i z_i cols[i] = b`, if any.
pub fn solve_columns(f: &PrimeField, cols: &[Vec<u32>], b: &[u32]) -> Option<Vec<u32>> {
    let nrows = b.len();
    let ncols = cols.len();
    let mut aug: Vec<Vec<u32>> = (0..nrows)
        .map(|r| {
            let mut row: Vec<u32> = cols.iter().map(|c| c[r]).collect();
            row.push(b[r]);
            row
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut z = vec![0u32; ncols];
    for (row, &pc) in aug.iter().zip(&pivots) {
        z[pc] = row[ncols];
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_dependent_rows() {
        let f = PrimeField::new(5).unwrap();
        let rows = vec![vec![1, 2, 3], vec![0, 1, 4], vec![1, 3, 2]];
        // third row = first + second
        assert_eq!(rank(&f, &rows), 2);
    }

    #[test]
    fn complement_is_orthogonal() {
        let f = PrimeField::new(3).unwrap();
        let rows = vec![vec![1, 1, 0, 2], vec![0, 1, 2, 2]];
        let comp = orthogonal_complement(&f, &rows, 4);
        assert_eq!(comp.len(), 2);
        for c in &comp {
            for r in &rows {
                let dot = r.iter().zip(c).fold(0, |a, (&x, &y)| f.add(a, f.mul(x, y)));
                assert_eq!(dot, 0);
            }
        }
    }
}
