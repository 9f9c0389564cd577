//! Integer rate structure shared by every processing block.
//!
//! A transmission maps `M` user symbols onto `N` subcarriers. All multirate
//! reasoning happens at the common length `L = lcm(M, N)`, with the two
//! expansion factors `L_M = L/M` and `L_N = L/N`. These are coprime, and
//! `L_M | N`, `L_N | M`.

use crate::error::{Error, Result};

/// Immutable set of block sizes for one configuration.
///
/// Constructed once via [`SystemGeometry::new`] and passed by reference
/// everywhere else; all fields satisfy `L = M*L_M = N*L_N`,
/// `gcd(L_M, L_N) = 1` and `N_t = N + N_g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemGeometry {
    m: usize,
    n: usize,
    l: usize,
    l_m: usize,
    l_n: usize,
    n_g: usize,
    n_t: usize,
}

impl SystemGeometry {
    /// Derives the full rate structure from `(M, N, N_g)`.
    ///
    /// Rejects `M = 0`, `N = 0` and `M > N` (the mapping of `M` symbols
    /// onto fewer than `M` subcarriers is undefined). `M = N` is allowed.
    pub fn new(m: usize, n: usize, n_g: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Geometry("block sizes must be positive".into()));
        }
        if m > n {
            return Err(Error::Geometry(format!(
                "M = {m} exceeds the number of subcarriers N = {n}"
            )));
        }
        let l = m / gcd(m, n) * n;
        Ok(Self {
            m,
            n,
            l,
            l_m: l / m,
            l_n: l / n,
            n_g,
            n_t: n + n_g,
        })
    }

    /// Number of user symbols per block (precoding transform size).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of subcarriers (main transform size).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Common analysis length `lcm(M, N)`.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Symbol-side expansion factor `L / M`.
    pub fn l_m(&self) -> usize {
        self.l_m
    }

    /// Subcarrier-side expansion factor `L / N`.
    pub fn l_n(&self) -> usize {
        self.l_n
    }

    /// Cyclic-prefix length in samples.
    pub fn n_g(&self) -> usize {
        self.n_g
    }

    /// Block length including the cyclic prefix, `N + N_g`.
    pub fn n_t(&self) -> usize {
        self.n_t
    }

    /// Whether `N` is large enough to carry a band of excess bandwidth
    /// `alpha` without aliasing: `N >= 2 (1 + alpha) M`.
    ///
    /// `alpha = 0` gives the plain condition `N >= 2M`.
    pub fn nyquist_check(&self, alpha: f64) -> bool {
        self.n as f64 >= 2.0 * (1.0 + alpha) * self.m as f64
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_scale_fractional_geometry() {
        let g = SystemGeometry::new(10, 512, 31).unwrap();
        assert_eq!(g.l(), 2560);
        assert_eq!(g.l_m(), 256);
        assert_eq!(g.l_n(), 5);
        assert_eq!(g.n_t(), 543);
    }

    #[test]
    fn multiple_rate_collapses_to_n() {
        let g = SystemGeometry::new(4, 8, 2).unwrap();
        assert_eq!(g.l(), 8);
        assert_eq!(g.l_m(), 2);
        assert_eq!(g.l_n(), 1);
        assert_eq!(g.n_t(), 10);
    }

    #[test]
    fn small_fractional_geometry() {
        let g = SystemGeometry::new(6, 8, 0).unwrap();
        assert_eq!(g.l(), 24);
        assert_eq!(g.l_m(), 4);
        assert_eq!(g.l_n(), 3);
        assert_eq!(g.n_t(), 8);
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(SystemGeometry::new(0, 8, 0).is_err());
        assert!(SystemGeometry::new(4, 0, 0).is_err());
        assert!(SystemGeometry::new(9, 8, 0).is_err());
        assert!(SystemGeometry::new(8, 8, 0).is_ok());
    }

    #[test]
    fn rate_identities_hold_for_all_small_pairs() {
        for m in 1..=64usize {
            for n in m..=64usize {
                let g = SystemGeometry::new(m, n, 3).unwrap();
                assert_eq!(g.m() * g.l_m(), g.l());
                assert_eq!(g.n() * g.l_n(), g.l());
                assert_eq!(gcd(g.l_m(), g.l_n()), 1, "L_M, L_N coprime for ({m},{n})");
                assert_eq!(g.n() % g.l_m(), 0, "L_M | N for ({m},{n})");
                assert_eq!(g.m() % g.l_n(), 0, "L_N | M for ({m},{n})");
            }
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let a = SystemGeometry::new(12, 512, 31).unwrap();
        let b = SystemGeometry::new(12, 512, 31).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nyquist_condition() {
        let g = SystemGeometry::new(10, 512, 31).unwrap();
        assert!(g.nyquist_check(0.35));
        let toy = SystemGeometry::new(4, 8, 2).unwrap();
        assert!(toy.nyquist_check(0.0));
        assert!(!toy.nyquist_check(0.5));
    }
}
