//! Minimal double-double arithmetic for the Bessel series.
//!
//! Only the operations the series needs: add, multiply, divide by an exact
//! `f64`. Error-free transforms use `mul_add` for the product residual.

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact product of two doubles.
    pub fn product(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn neg(self) -> Self {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn add(self, b: Dd) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn sub(self, b: Dd) -> Self {
        self.add(b.neg())
    }

    pub fn mul(self, b: Dd) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let rem = ((self.hi - p) - e) + self.lo;
        let (hi, lo) = quick_two_sum(q1, rem / b);
        Dd { hi, lo }
    }
}

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub fn new(re: Dd, im: Dd) -> Self {
        Self { re, im }
    }

    pub fn from_parts(re: f64, im: f64) -> Self {
        Self::new(Dd::from_f64(re), Dd::from_f64(im))
    }

    pub fn add(self, b: CDd) -> Self {
        Self::new(self.re.add(b.re), self.im.add(b.im))
    }

    pub fn mul(self, b: CDd) -> Self {
        Self::new(
            self.re.mul(b.re).sub(self.im.mul(b.im)),
            self.re.mul(b.im).add(self.im.mul(b.re)),
        )
    }

    pub fn div_f64(self, b: f64) -> Self {
        Self::new(self.re.div_f64(b), self.im.div_f64(b))
    }

    pub fn neg(self) -> Self {
        Self::new(self.re.neg(), self.im.neg())
    }

    /// Modulus of the leading parts; adequate for convergence tests.
    pub fn approx_norm(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn to_parts(self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}
