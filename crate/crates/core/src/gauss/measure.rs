use crate::gauss::cf::{fold, CFPoint, LogContinuant};
use crate::scalar::Real;
use crate::symbolic::{CylinderMeasure, Digit};

/// The Gauss measure, density 1/((1+x) ln 2) on (0,1), on continued-fraction digits.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GaussMeasure;

/// η([ω]) = (1/ln 2)·ln(1 + |Δ(ω)|/(1 + e)) with e the left endpoint of Δ(ω).
pub fn gauss_measure_mass<T: Real>(word: &[Digit]) -> T {
    T::c(log_gauss_mass(word).exp())
}

fn log_gauss_mass(word: &[Digit]) -> f64 {
    if word.is_empty() {
        return 0.0;
    }
    let a = fold(word, 0.0f64);
    let b = fold(word, 1.0f64);
    let e = a.min(b);
    let mut c = LogContinuant::new();
    for &d in word {
        c.push(d);
    }
    let ln_len = c.log_interval_length();
    let ln_rel = ln_len - e.ln_1p();
    let ln_mass = if ln_rel > -30.0 {
        ln_rel.exp().ln_1p().ln()
    } else {
        // ln(ln(1+u)) = ln u + ln(1 − u/2 + …) for tiny u
        ln_rel - 0.5 * ln_rel.exp()
    };
    ln_mass - std::f64::consts::LN_2.ln()
}

impl<T: Real> CylinderMeasure<T> for GaussMeasure {
    fn mass(&self, word: &[Digit]) -> T {
        if word.contains(&0) {
            return T::zero();
        }
        gauss_measure_mass(word)
    }

    fn log_mass(&self, word: &[Digit]) -> T {
        T::c(log_gauss_mass(word))
    }

    fn support_cap(&self) -> Option<Digit> {
        None
    }

    fn extension_masses(&self, word: &[Digit], cap: Digit, out: &mut Vec<T>) {
        out.clear();
        let c = CFPoint::from_digits(word);
        if c.q() > 1e100 {
            let mut buf = word.to_vec();
            buf.push(1);
            for a in 1..=cap {
                *buf.last_mut().unwrap() = a;
                out.push(self.mass(&buf));
            }
            return;
        }
        let (p0, p1, q0, q1) = (c.p_prev(), c.p(), c.q_prev(), c.q());
        let inv_ln2 = 1.0 / std::f64::consts::LN_2;
        for a in 1..=cap {
            let af = a as f64;
            let (p, q) = (af * p1 + p0, af * q1 + q0);
            let e = (p / q).min((p + p1) / (q + q1));
            let len = 1.0 / (q * (q + q1));
            out.push(T::c((len / (1.0 + e)).ln_1p() * inv_ln2));
        }
    }

    fn describe(&self) -> String {
        "gauss".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_digit_masses() {
        assert!((gauss_measure_mass::<f64>(&[1]) - (4.0f64 / 3.0).log2()).abs() < 1e-15);
        assert!((gauss_measure_mass::<f64>(&[2]) - (9.0f64 / 8.0).log2()).abs() < 1e-15);
        for n in [1u32, 7, 100] {
            let nf = n as f64;
            let closed = (1.0 / (nf * (nf + 2.0))).ln_1p() / std::f64::consts::LN_2;
            assert!((gauss_measure_mass::<f64>(&[n]) - closed).abs() < 1e-14 * closed.max(1e-3));
        }
    }

    #[test]
    fn extension_masses_match_direct() {
        let mut out = Vec::new();
        CylinderMeasure::<f64>::extension_masses(&GaussMeasure, &[3, 1], 6, &mut out);
        for a in 1..=6u32 {
            let d = gauss_measure_mass::<f64>(&[3, 1, a]);
            assert!((out[a as usize - 1] - d).abs() < 1e-15 * d.max(1e-300) * 10.0);
        }
    }

    #[test]
    fn deep_words_do_not_underflow_in_log_form() {
        let w: Vec<u32> = vec![1000; 200];
        let l: f64 = CylinderMeasure::<f64>::log_mass(&GaussMeasure, &w);
        assert!(l.is_finite() && l < -2000.0);
    }
}
