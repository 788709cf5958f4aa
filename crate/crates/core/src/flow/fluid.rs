use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Oil/water fluid description with Corey relative permeabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidProps {
    /// Oil viscosity, cp.
    pub mu_o: f64,
    /// Water viscosity, cp.
    pub mu_w: f64,
    /// Oil density, kg/m³. Carried for completeness; the areal model has no gravity.
    pub rho_o: f64,
    /// Water density, kg/m³.
    pub rho_w: f64,
    /// Initial water saturation.
    pub s_w_init: f64,
    pub n_w: f64,
    pub n_o: f64,
    /// Residual (connate) water saturation.
    pub s_wr: f64,
    /// Residual oil saturation.
    pub s_or: f64,
}

impl Default for FluidProps {
    fn default() -> Self {
        FluidProps {
            mu_o: 2.4,
            mu_w: 1.0,
            rho_o: 835.0,
            rho_w: 1000.0,
            s_w_init: 0.2,
            n_w: 2.0,
            n_o: 2.0,
            s_wr: 0.0,
            s_or: 0.0,
        }
    }
}

impl FluidProps {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mu_o", self.mu_o),
            ("mu_w", self.mu_w),
            ("rho_o", self.rho_o),
            ("rho_w", self.rho_w),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        // Exponents below one give an unbounded fractional-flow derivative,
        // which would make the transport CFL limit zero.
        for (name, v) in [("n_w", self.n_w), ("n_o", self.n_o)] {
            if !(v >= 1.0 && v.is_finite()) {
                return Err(Error::Validation(format!("{name} must be >= 1, got {v}")));
            }
        }
        for (name, v) in [
            ("s_wr", self.s_wr),
            ("s_or", self.s_or),
            ("s_w_init", self.s_w_init),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::Validation(format!(
                    "{name} must lie in [0, 1), got {v}"
                )));
            }
        }
        if self.s_wr + self.s_or >= 1.0 {
            return Err(Error::Validation("s_wr + s_or must be below 1".into()));
        }
        if self.s_w_init < self.s_wr || self.s_w_init > 1.0 - self.s_or {
            return Err(Error::Validation(format!(
                "initial saturation {} outside mobile range [{}, {}]",
                self.s_w_init,
                self.s_wr,
                1.0 - self.s_or
            )));
        }
        Ok(())
    }

    /// Normalized (mobile) water saturation, clamped to [0, 1].
    #[inline]
    pub fn normalized_saturation(&self, s_w: f64) -> f64 {
        ((s_w - self.s_wr) / (1.0 - self.s_wr - self.s_or)).clamp(0.0, 1.0)
    }

    /// Phase mobilities `(lambda_w, lambda_o)` in 1/cp.
    #[inline]
    pub fn relative_mobility(&self, s_w: f64) -> (f64, f64) {
        let s = self.normalized_saturation(s_w);
        (
            corey(s, self.n_w) / self.mu_w,
            corey(1.0 - s, self.n_o) / self.mu_o,
        )
    }

    /// Both Corey exponents are 2. Hot loops test this once and call
    /// [`FluidProps::quadratic_mobility`], which LLVM will not turn into
    /// speculative `powf` calls.
    pub fn is_quadratic(&self) -> bool {
        self.n_w == 2.0 && self.n_o == 2.0
    }

    /// [`FluidProps::relative_mobility`] for quadratic curves.
    #[inline]
    pub fn quadratic_mobility(&self, s_w: f64) -> (f64, f64) {
        let s = self.normalized_saturation(s_w);
        (s * s / self.mu_w, (1.0 - s) * (1.0 - s) / self.mu_o)
    }

    /// Total mobility in 1/cp.
    #[inline]
    pub fn total_mobility(&self, s_w: f64) -> f64 {
        let (w, o) = self.relative_mobility(s_w);
        w + o
    }

    /// Water fractional flow `lambda_w / (lambda_w + lambda_o)`.
    #[inline]
    pub fn fractional_flow(&self, s_w: f64) -> f64 {
        let (w, o) = self.relative_mobility(s_w);
        w / (w + o)
    }

    /// d f_w / d s_w, analytic.
    #[inline]
    pub fn fractional_flow_derivative(&self, s_w: f64) -> f64 {
        let span = 1.0 - self.s_wr - self.s_or;
        let s = self.normalized_saturation(s_w);
        let (w, o) = (
            corey(s, self.n_w) / self.mu_w,
            corey(1.0 - s, self.n_o) / self.mu_o,
        );
        let dw = corey_slope(s, self.n_w) / self.mu_w;
        let d_o = -corey_slope(1.0 - s, self.n_o) / self.mu_o;
        let total = w + o;
        (dw * o - w * d_o) / (total * total) / span
    }

    /// Largest fractional-flow derivative over the mobile range, taken on a
    /// dense sample of saturations.
    pub fn max_fractional_flow_derivative(&self) -> f64 {
        const SAMPLES: usize = 4096;
        let span = 1.0 - self.s_wr - self.s_or;
        (0..=SAMPLES)
            .map(|k| self.fractional_flow_derivative(self.s_wr + span * k as f64 / SAMPLES as f64))
            .fold(0.0, f64::max)
    }
}

/// `s^n`, skipping `powf` for the common quadratic case.
#[inline]
fn corey(s: f64, n: f64) -> f64 {
    if n == 2.0 {
        s * s
    } else {
        s.powf(n)
    }
}

/// `n s^(n-1)`.
#[inline]
fn corey_slope(s: f64, n: f64) -> f64 {
    if n == 2.0 {
        2.0 * s
    } else {
        n * s.powf(n - 1.0)
    }
}
