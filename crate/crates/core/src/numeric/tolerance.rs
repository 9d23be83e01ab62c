use serde::{Deserialize, Serialize};

/// Every verification threshold, derived from the working precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub bits: usize,
    /// Relative round-off allowance, `2^-(bits - 16)`.
    pub working_rel: f64,
    /// Pointwise defect allowed for identities that hold exactly in real arithmetic.
    pub identity_abs: f64,
    /// Seam derivative mismatch below which an order passes.
    pub seam_pass: f64,
    /// A mismatch above `seam_fail_factor * seam_pass` is a definite failure.
    pub seam_fail_factor: f64,
}

impl TolerancePolicy {
    pub fn for_bits(bits: usize) -> Self {
        let working_rel = 2f64.powi(-(bits as i32 - 16));
        TolerancePolicy {
            bits,
            working_rel,
            identity_abs: 2f64.powi(-(bits as i32 * 3 / 4)).max(1e-300),
            seam_pass: 1e-8f64.max(2f64.powi(-(bits as i32) / 4)),
            seam_fail_factor: 1e3,
        }
    }

    pub fn seam_fail(&self) -> f64 {
        self.seam_pass * self.seam_fail_factor
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scales_with_precision() {
        let lo = TolerancePolicy::for_bits(64);
        let hi = TolerancePolicy::for_bits(256);
        assert!(hi.working_rel < lo.working_rel);
        assert!(hi.identity_abs < 1e-50);
        assert_eq!(hi.seam_pass, 1e-8);
        assert!(lo.seam_pass > 1e-8);
    }
}
