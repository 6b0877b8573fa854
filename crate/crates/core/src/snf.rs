//! Smith normal form over the integers, with the column transform.

/// `diag` holds the invariant factors `d_1 | d_2 | …` (length `min(m, n)`),
/// and `col` is a unimodular `n × n` matrix with `U A col = D` for some
/// unimodular `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub diag: Vec<i64>,
    pub col: Vec<Vec<i64>>,
}

pub fn smith_normal_form(a: &[Vec<i64>], ncols: usize) -> Smith {
    let m = a.len();
    let n = ncols;
    let mut a: Vec<Vec<i64>> = a.to_vec();
    let mut v: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();

    let swap_cols = |a: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    };
    // column_j -= k * column_i
    let sub_col = |a: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, j: usize, i: usize, k: i64| {
        for row in a.iter_mut() {
            row[j] -= k * row[i];
        }
        for row in v.iter_mut() {
            row[j] -= k * row[i];
        }
    };

    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                break;
            };
            a.swap(t, bi);
            swap_cols(&mut a, &mut v, t, bj);
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..m {
                let k = a[i][t] / p;
                if k != 0 {
                    for j in t..n {
                        a[i][j] -= k * a[t][j];
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..n {
                let k = a[t][j] / p;
                if k != 0 {
                    sub_col(&mut a, &mut v, j, t, k);
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // enforce divisibility of the rest by the pivot
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in t..n {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
        if t < m && a[t][t] < 0 {
            for j in t..n {
                a[t][j] = -a[t][j];
            }
        }
        diag.push(if t < m { a[t][t] } else { 0 });
    }
    Smith { diag, col: v }
}
