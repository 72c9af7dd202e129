//! Scalar abstractions shared by the closed-form routines.
//!
//! Counting formulas only need ring operations and are available for any
//! [`Scalar`], including exact rationals. Anything involving square roots,
//! powers or eigenvalues requires [`Real`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

pub trait Scalar: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug {
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where T: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug {}

pub trait Real: Scalar + Float + Display + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }
}

impl<T> Real for T where T: Scalar + Float + Display + Send + Sync + 'static {}
