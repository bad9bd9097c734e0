//! Integer column-echelon forms with unimodular bookkeeping.

/// Column-echelon form of a list of generator vectors.
///
/// Invariants: `pivots` is strictly increasing; `cols[j]` vanishes above
/// `pivots[j]` and is positive there; `cols[j] = Σ coeffs[j][i]·gens[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    pub dim: usize,
    pub cols: Vec<Vec<i64>>,
    pub pivots: Vec<usize>,
    pub coeffs: Vec<Vec<i64>>,
    /// Basis of the integer relations among the generators.
    pub kernel: Vec<Vec<i64>>,
}

impl Echelon {
    pub fn new(dim: usize, gens: &[Vec<i64>]) -> Echelon {
        let m = gens.len();
        let mut cols: Vec<Vec<i64>> = gens.to_vec();
        let mut u: Vec<Vec<i64>> = (0..m)
            .map(|j| (0..m).map(|i| i64::from(i == j)).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for row in 0..dim {
            if r == m {
                break;
            }
            loop {
                let best = (r..m)
                    .filter(|&c| cols[c][row] != 0)
                    .min_by_key(|&c| cols[c][row].unsigned_abs());
                let Some(best) = best else { break };
                cols.swap(r, best);
                u.swap(r, best);
                let mut done = true;
                for c in r + 1..m {
                    if cols[c][row] != 0 {
                        let q = cols[c][row] / cols[r][row];
                        axpy(&mut cols, c, r, q);
                        axpy(&mut u, c, r, q);
                        if cols[c][row] != 0 {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if cols[r][row] != 0 {
                if cols[r][row] < 0 {
                    cols[r].iter_mut().for_each(|x| *x = -*x);
                    u[r].iter_mut().for_each(|x| *x = -*x);
                }
                pivots.push(row);
                r += 1;
            }
        }
        let kernel = u[r..].to_vec();
        cols.truncate(r);
        u.truncate(r);
        Echelon { dim, cols, pivots, coeffs: u, kernel }
    }

    pub fn rank(&self) -> usize {
        self.cols.len()
    }

    /// Splits `v = rep + Σ coef[i]·gens[i]` with `rep` the canonical residue.
    pub fn reduce(&self, v: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let m = self.coeffs.first().map_or(self.kernel.first().map_or(0, |k| k.len()), |c| c.len());
        let mut rep = v.to_vec();
        let mut coef = vec![0i64; m];
        for (j, &p) in self.pivots.iter().enumerate() {
            let q = rep[p].div_euclid(self.cols[j][p]);
            if q != 0 {
                for (x, y) in rep.iter_mut().zip(&self.cols[j]) {
                    *x -= q * y;
                }
                for (x, y) in coef.iter_mut().zip(&self.coeffs[j]) {
                    *x += q * y;
                }
            }
        }
        (rep, coef)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).0.iter().all(|&x| x == 0)
    }
}

fn axpy(rows: &mut [Vec<i64>], target: usize, src: usize, q: i64) {
    let (a, b) = if target < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x -= q * y;
    }
}

/// Integer matrix given by its columns.
pub fn mat_vec(cols: &[Vec<i64>], x: &[i64], dim: usize) -> Vec<i64> {
    let mut out = vec![0i64; dim];
    for (c, &k) in cols.iter().zip(x) {
        for (o, v) in out.iter_mut().zip(c) {
            *o += k * v;
        }
    }
    out
}

/// Columns of `a·b`, both square matrices given by columns, with overflow check.
pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for (j, bc) in b.iter().enumerate() {
        for (k, &bk) in bc.iter().enumerate() {
            if bk == 0 {
                continue;
            }
            for i in 0..n {
                out[j][i] = out[j][i].checked_add(a[k][i].checked_mul(bk)?)?;
            }
        }
    }
    Some(out)
}
