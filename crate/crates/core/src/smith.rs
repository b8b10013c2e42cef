//! Smith normal form of small integer matrices.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::num::{IVec, Z};

/// Nonzero elementary divisors `d_1 | d_2 | ... | d_r` of an integer matrix,
/// all positive.
pub fn elementary_divisors(rows: &[IVec]) -> Vec<Z> {
    let mut m: Vec<IVec> = rows.to_vec();
    let nr = m.len();
    let nc = m.first().map_or(0, Vec::len);
    let mut divisors = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if !m[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            // Clear column t.
            for i in t + 1..nr {
                if m[i][t].is_zero() {
                    continue;
                }
                let f = m[i][t].div_floor(&m[t][t]);
                for j in t..nc {
                    let v = &m[i][j] - &f * &m[t][j];
                    m[i][j] = v;
                }
                if !m[i][t].is_zero() {
                    m.swap(t, i);
                    dirty = true;
                }
            }
            // Clear row t.
            for j in t + 1..nc {
                if m[t][j].is_zero() {
                    continue;
                }
                let f = m[t][j].div_floor(&m[t][t]);
                for row in m.iter_mut().skip(t) {
                    let v = &row[j] - &f * &row[t];
                    row[j] = v;
                }
                if !m[t][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Divisibility: if some entry of the block is not a multiple of
            // the pivot, add its row to row t and repeat.
            let p = m[t][t].clone();
            let offender = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| !m[i][j].is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    for j in t..nc {
                        let v = &m[t][j] + &m[i][j];
                        m[t][j] = v;
                    }
                }
                None => break,
            }
        }
        divisors.push(m[t][t].abs());
        t += 1;
    }
    divisors
}

/// Whether the integer span of the rows equals its real span intersected
/// with the integer lattice.
pub fn is_saturated(rows: &[IVec]) -> bool {
    elementary_divisors(rows).iter().all(One::is_one)
}
