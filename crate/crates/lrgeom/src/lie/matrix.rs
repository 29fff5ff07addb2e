use std::ops::{Add, Mul, Neg, Sub};

use crate::groebner::QuotientRing;
use crate::poly::{Coeff, Frac, Poly, VarTable};

/// Dense matrix over the fraction field. Scalars are 1×1, sections are 1×β rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Frac>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![Frac::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Frac::one());
        }
        m
    }

    pub fn scalar(x: Frac) -> Mat {
        Mat { rows: 1, cols: 1, data: vec![x] }
    }

    pub fn from_rows(rows: Vec<Vec<Frac>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_poly_rows(rows: Vec<Vec<Poly>>) -> Mat {
        Mat::from_rows(rows.into_iter().map(|r| r.into_iter().map(Frac::from).collect()).collect())
    }

    pub fn row_vector(v: Vec<Frac>) -> Mat {
        Mat::from_rows(vec![v])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &Frac {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: Frac) {
        self.data[r * self.cols + c] = x;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Frac)> {
        self.data.iter().enumerate().map(move |(k, x)| (k / self.cols, k % self.cols, x))
    }

    pub fn row(&self, r: usize) -> Vec<Frac> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn as_scalar(&self) -> &Frac {
        assert_eq!((self.rows, self.cols), (1, 1), "not a scalar");
        &self.data[0]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map(&self, f: impl Fn(&Frac) -> Frac) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &Frac) -> Mat {
        self.map(|x| x * c)
    }

    pub fn scale_rat(&self, c: &Coeff) -> Mat {
        self.map(|x| x.scale(c))
    }

    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zeros(self.cols, self.rows);
        for (r, c, x) in self.entries() {
            m.set(c, r, x.clone());
        }
        m
    }

    pub fn trace(&self) -> Frac {
        assert_eq!(self.rows, self.cols, "trace of non-square matrix");
        (0..self.rows).fold(Frac::zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn commutator(&self, other: &Mat) -> Mat {
        &(self * other) - &(other * self)
    }

    /// Entrywise anchor action of a vector field.
    pub fn apply_vector_field(&self, coeffs: &[Poly], vars: &VarTable) -> Mat {
        self.map(|x| x.apply_vector_field(coeffs, vars))
    }

    pub fn nf(&self, ring: &QuotientRing) -> Mat {
        self.map(|x| ring.nf_frac(x))
    }

    pub fn is_zero_mod(&self, ring: &QuotientRing) -> bool {
        self.data.iter().all(|x| ring.frac_is_zero(x))
    }

    pub fn kron(&self, other: &Mat) -> Mat {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut m = Mat::zeros(r, c);
        for (i, j, x) in self.entries() {
            for (k, l, y) in other.entries() {
                m.set(i * other.rows + k, j * other.cols + l, x * y);
            }
        }
        m
    }

    pub fn block_diag(&self, other: &Mat) -> Mat {
        let mut m = Mat::zeros(self.rows + other.rows, self.cols + other.cols);
        for (i, j, x) in self.entries() {
            m.set(i, j, x.clone());
        }
        for (i, j, x) in other.entries() {
            m.set(self.rows + i, self.cols + j, x.clone());
        }
        m
    }

    pub fn to_strings(&self, vars: &VarTable) -> Vec<Vec<String>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.get(r, c).to_string_with(vars)).collect()).collect()
    }
}

impl<'a> Add<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sub");
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Mul<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        if self.shape() == (1, 1) && rhs.shape() != (1, 1) {
            return rhs.scale(&self.data[0]);
        }
        if rhs.shape() == (1, 1) && self.shape() != (1, 1) {
            return self.scale(&rhs.data[0]);
        }
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut m = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    m.data[idx] = &m.data[idx] + &(a * b);
                }
            }
        }
        m
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.map(|x| -x)
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<Mat> for Mat {
            type Output = Mat;
            fn $f(self, rhs: Mat) -> Mat {
                (&self).$f(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
