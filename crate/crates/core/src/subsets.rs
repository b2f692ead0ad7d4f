//! `k`-subsets of `0..n` in lexicographic order.

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Iterator over sorted `k`-subsets of `0..n`, lexicographically.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Subsets ordered so that the tail `{n-k, ..., n-1}` comes first, then
/// those closest to it.
pub fn tail_first(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    Combinations::new(n, k).map(move |s| {
        let mut t: Vec<usize> = s.into_iter().map(|i| n - 1 - i).collect();
        t.reverse();
        t
    })
}

/// Boolean mask of length `n` with `true` on `subset`.
pub fn mask(n: usize, subset: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &i in subset {
        m[i] = true;
    }
    m
}
