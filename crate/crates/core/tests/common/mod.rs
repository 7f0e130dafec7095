//! Independent ground truth: the Gaussian moment sum over every index tuple.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn double_factorial(m: u64) -> i64 {
    (1..=m).rev().step_by(2).product::<u64>() as i64
}

/// Entry moments of the two Gaussian ensembles, written out independently of
/// the crate's moment tables.
#[derive(Clone, Copy)]
pub enum Gaussian {
    Orthogonal,
    Unitary,
}

impl Gaussian {
    /// `E[W^a conj(W)^b]` off the diagonal.
    fn offdiag(self, a: u64, b: u64) -> i64 {
        match self {
            Gaussian::Orthogonal if (a + b).is_multiple_of(2) => double_factorial(a + b - 1),
            Gaussian::Unitary if a == b => (1..=a).product::<u64>() as i64,
            _ => 0,
        }
    }

    /// `E[W_ii^m]`: variance 2 for GOE, 1 for GUE.
    fn diag(self, m: u64) -> i64 {
        if m % 2 == 1 {
            return 0;
        }
        let var: i64 = match self {
            Gaussian::Orthogonal => 2,
            Gaussian::Unitary => 1,
        };
        var.pow((m / 2) as u32) * double_factorial(m - 1)
    }
}

/// `E[tr X^k]/n` summed over every index tuple in `{0..n}^k`.
pub fn brute_force_moment(k: usize, n: usize, law: Gaussian) -> BigRational {
    let mut total = BigInt::zero();
    let mut idx = vec![0usize; k];
    loop {
        let mut edges: BTreeMap<(usize, usize), (u64, u64)> = BTreeMap::new();
        for j in 0..k {
            let (a, b) = (idx[j], idx[(j + 1) % k]);
            let e = edges.entry((a.min(b), a.max(b))).or_default();
            if a <= b {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
        let product: i64 = edges
            .iter()
            .map(|(&(a, b), &(f, r))| {
                if a == b {
                    law.diag(f)
                } else {
                    law.offdiag(f, r)
                }
            })
            .product();
        total += product;

        let mut pos = 0;
        loop {
            if pos == k {
                let scale = BigInt::from(n).pow(1 + k as u32 / 2);
                return BigRational::new(total, scale);
            }
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
