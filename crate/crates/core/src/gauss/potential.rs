use crate::error::{invalid, Result};
use crate::gibbs::{Potential, SplitKernel};
use crate::scalar::Real;
use crate::symbolic::Digit;

/// Inverse branches ψ_a of an expanding interval map with full branches.
pub trait InverseBranches<T: Real>: Send + Sync {
    fn name(&self) -> String;

    /// ψ_a(y).
    fn apply(&self, a: Digit, y: T) -> T;

    /// ln |ψ_a′(y)|.
    fn log_derivative(&self, a: Digit, y: T) -> T;

    /// The fixed point of ψ_a.
    fn fixed_point(&self, a: Digit) -> T;

    /// sup_a of the oscillation of ln|ψ_a′| over the unit interval.
    fn log_derivative_oscillation(&self) -> T;

    /// sup over a, y of |∂_y ln|ψ_a′(y)||.
    fn log_derivative_lipschitz(&self) -> T;

    /// Largest length of an m-cylinder.
    fn cylinder_diameter(&self, m: usize) -> T;

    /// Exponents s at or below this value give infinite pressure.
    fn critical_exponent(&self) -> T;
}

/// The Gauss map S(x) = 1/x − ⌊1/x⌋ with branches ψ_a(y) = 1/(a + y).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GaussMap;

impl<T: Real> InverseBranches<T> for GaussMap {
    fn name(&self) -> String {
        "gauss".into()
    }
    fn apply(&self, a: Digit, y: T) -> T {
        T::one() / (T::c(a as f64) + y)
    }
    fn log_derivative(&self, a: Digit, y: T) -> T {
        -T::c(2.0) * (T::c(a as f64) + y).ln()
    }
    fn fixed_point(&self, a: Digit) -> T {
        crate::gauss::cf::periodic_point(a)
    }
    fn log_derivative_oscillation(&self) -> T {
        T::c(2.0) * T::LN_2()
    }
    fn log_derivative_lipschitz(&self) -> T {
        T::c(2.0)
    }
    fn cylinder_diameter(&self, m: usize) -> T {
        // the m-cylinder of ones is the longest: 1/(F_{m+1} F_{m+2})
        let (mut f1, mut f2) = (1.0f64, 1.0f64);
        for _ in 0..m {
            let f3 = f1 + f2;
            f1 = f2;
            f2 = f3;
        }
        T::c(1.0 / (f1 * f2))
    }
    fn critical_exponent(&self) -> T {
        T::c(0.5)
    }
}

/// φ_s(x) = s·ln|ψ′_{x_1}(T x)|, which for the Gauss map is 2s·ln x.
#[derive(Clone, Debug)]
pub struct GeometricPotential<T, B> {
    branches: B,
    s: T,
}

pub type GaussPotential<T> = GeometricPotential<T, GaussMap>;

impl<T: Real, B: InverseBranches<T>> GeometricPotential<T, B> {
    pub fn new(branches: B, s: T) -> Result<Self> {
        if !(s > branches.critical_exponent()) || !s.is_finite() {
            return Err(invalid(format!(
                "s = {s} must exceed {} for finite pressure",
                branches.critical_exponent()
            )));
        }
        Ok(GeometricPotential { branches, s })
    }

    pub fn s(&self) -> T {
        self.s
    }
}

impl<T: Real> GaussPotential<T> {
    pub fn gauss(s: T) -> Result<Self> {
        GeometricPotential::new(GaussMap, s)
    }
}

impl<T: Real, B: InverseBranches<T>> Potential<T> for GeometricPotential<T, B> {
    fn id(&self) -> String {
        format!("{}(s={})", self.branches.name(), self.s)
    }

    fn eval(&self, word: &[Digit]) -> T {
        let y = self.coordinate(&word[1..]);
        let y = if word.len() == 1 { self.branches.fixed_point(word[0]) } else { y };
        self.s * self.branches.log_derivative(word[0], y)
    }

    fn variation(&self, n: usize) -> T {
        if n <= 1 {
            self.s * self.branches.log_derivative_oscillation()
        } else {
            self.s * self.branches.log_derivative_lipschitz() * self.branches.cylinder_diameter(n - 1)
        }
    }

    fn variation_sum(&self) -> T {
        (2..200).map(|n| self.variation(n)).sum()
    }

    fn kernel(&self) -> Option<&dyn SplitKernel<T>> {
        Some(self)
    }

    fn birkhoff_value(&self, word: &[Digit]) -> T {
        let n = word.len();
        if n == 0 {
            return T::zero();
        }
        let mut y = self.branches.fixed_point(word[n - 1]);
        let mut sum = self.branches.log_derivative(word[n - 1], y);
        for i in (0..n - 1).rev() {
            y = self.branches.apply(word[i + 1], y);
            sum = sum + self.branches.log_derivative(word[i], y);
        }
        self.s * sum
    }
}

impl<T: Real, B: InverseBranches<T>> SplitKernel<T> for GeometricPotential<T, B> {
    /// The point coded by v·v_last^∞.
    fn coordinate(&self, v: &[Digit]) -> T {
        match v.last() {
            None => T::zero(),
            Some(&last) => {
                let mut y = self.branches.fixed_point(last);
                for &d in v[..v.len() - 1].iter().rev() {
                    y = self.branches.apply(d, y);
                }
                y
            }
        }
    }

    fn weight(&self, b: Digit, y: T) -> T {
        (self.s * self.branches.log_derivative(b, y)).exp()
    }
}
