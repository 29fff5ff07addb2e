//! Seeded generators for randomized checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gauge::GaugeElement;
use crate::groebner::QuotientRing;
use crate::lie::{Form, Mat};
use crate::poly::{rat, Poly};

/// Deterministic source of small random polynomials and matrices over the coordinates of a ring.
pub struct Sampler {
    rng: ChaCha8Rng,
    n_coords: usize,
    /// Largest total degree of a sampled monomial.
    pub max_degree: u32,
    /// Largest number of terms in a sampled polynomial.
    pub max_terms: usize,
}

impl Sampler {
    pub fn new(seed: u64, n_coords: usize) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), n_coords, max_degree: 2, max_terms: 3 }
    }

    fn coeff(&mut self) -> i64 {
        let c = self.rng.gen_range(1..=3);
        if self.rng.gen_bool(0.5) {
            -c
        } else {
            c
        }
    }

    fn monomial(&mut self) -> Poly {
        let degree = self.rng.gen_range(0..=self.max_degree);
        let mut m = Poly::one();
        for _ in 0..degree {
            let i = self.rng.gen_range(0..self.n_coords);
            m = &m * &Poly::coord(i);
        }
        m
    }

    /// A polynomial with at most `max_terms` terms, possibly zero.
    pub fn poly(&mut self) -> Poly {
        let terms = self.rng.gen_range(0..=self.max_terms);
        let mut p = Poly::zero();
        for _ in 0..terms {
            let c = Poly::constant(rat(self.coeff(), 1));
            p = &p + &(&c * &self.monomial());
        }
        p
    }

    pub fn nonzero_poly(&mut self) -> Poly {
        loop {
            let p = self.poly();
            if !p.is_zero() {
                return p;
            }
        }
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Mat {
        let entries = (0..rows).map(|_| (0..cols).map(|_| self.poly()).collect()).collect();
        Mat::from_poly_rows(entries)
    }

    /// An End-valued one-form on `gens` generators.
    pub fn one_form(&mut self, gens: usize, size: usize) -> Form {
        let mats: Vec<Mat> = (0..gens).map(|_| self.matrix(size, size)).collect();
        Form::from_fn(1, gens, (size, size), |t| mats[t[0]].clone())
    }

    /// `1 + N` with `N` strictly triangular (upper or lower at random), with its exact inverse.
    pub fn unipotent(&mut self, size: usize, ring: &QuotientRing) -> GaugeElement {
        let upper = self.rng.gen_bool(0.5);
        let mut rows = vec![vec![Poly::zero(); size]; size];
        for (r, row) in rows.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                if (upper && c > r) || (!upper && c < r) {
                    *x = self.poly();
                }
            }
        }
        let nil = Mat::from_poly_rows(rows);
        let id = Mat::identity(size);
        let g = &id + &nil;
        // (1 + N)^-1 = 1 - N + N^2 - ... since N^size = 0
        let mut inv = id.clone();
        let mut power = id;
        let minus = -&nil;
        for _ in 1..size {
            power = &power * &minus;
            inv = &inv + &power;
        }
        GaugeElement::new(g.nf(ring), inv.nf(ring), ring).expect("unipotent inverse is exact")
    }
}
