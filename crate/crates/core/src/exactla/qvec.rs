use std::fmt;
use std::ops::{Add, Deref, DerefMut, Neg, Sub};

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use super::rat::{fmt_rat, int, lcm_of_denominators, Rat};

/// A vector of exact rationals with a fixed dimension.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QVec(pub Vec<Rat>);

impl QVec {
    pub fn new(entries: Vec<Rat>) -> Self {
        QVec(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        QVec(vec![Rat::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rat::one();
        v
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        QVec(entries.iter().map(|&x| int(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &QVec) -> Rat {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, s: &Rat) -> QVec {
        QVec(self.0.iter().map(|x| x * s).collect())
    }

    /// `self + s * other`
    pub fn axpy(&self, s: &Rat, other: &QVec) -> QVec {
        QVec(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    pub fn concat(&self, other: &QVec) -> QVec {
        QVec(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    /// The primitive integer vector on the same ray. Zero stays zero.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let l = lcm_of_denominators(self.0.iter());
        let ints: Vec<BigInt> = self.0.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|x| x / &g).collect()
    }

    /// Rescales onto the primitive integer vector of the same ray.
    pub fn primitive(&self) -> QVec {
        QVec(self.primitive_integer().into_iter().map(Rat::from_integer).collect())
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.0
            .iter()
            .map(|x| if x.is_integer() { x.numer().to_i64() } else { None })
            .collect()
    }

    pub fn sign_of_first_nonzero(&self) -> i32 {
        for x in &self.0 {
            if x.is_positive() {
                return 1;
            }
            if x.is_negative() {
                return -1;
            }
        }
        0
    }

    pub fn sum(vs: &[QVec], dim: usize) -> QVec {
        vs.iter().fold(QVec::zeros(dim), |acc, v| &acc + v)
    }

    pub fn lcm_denominator(&self) -> BigInt {
        lcm_of_denominators(self.0.iter())
    }

    pub fn is_one_denominator(&self) -> bool {
        self.lcm_denominator().is_one()
    }
}

impl Deref for QVec {
    type Target = [Rat];
    fn deref(&self) -> &[Rat] {
        &self.0
    }
}

impl DerefMut for QVec {
    fn deref_mut(&mut self) -> &mut [Rat] {
        &mut self.0
    }
}

impl From<Vec<Rat>> for QVec {
    fn from(v: Vec<Rat>) -> Self {
        QVec(v)
    }
}

impl<'a> Add<&'a QVec> for &'a QVec {
    type Output = QVec;
    fn add(self, rhs: &QVec) -> QVec {
        debug_assert_eq!(self.dim(), rhs.dim());
        QVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a QVec> for &'a QVec {
    type Output = QVec;
    fn sub(self, rhs: &QVec) -> QVec {
        debug_assert_eq!(self.dim(), rhs.dim());
        QVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &QVec {
    type Output = QVec;
    fn neg(self) -> QVec {
        QVec(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for QVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_rat(x))?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for QVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[macro_export]
macro_rules! qv {
    ($($x:expr),* $(,)?) => {
        $crate::exactla::QVec::from_ints(&[$($x),*])
    };
}
