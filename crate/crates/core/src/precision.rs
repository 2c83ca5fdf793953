use rug::float::Constant;
use rug::{Complex, Float};

pub const DEFAULT_BITS: u32 = 128;
pub const DEFAULT_GUARD: u32 = 20;

/// Working precision for one computation. Passed explicitly, never global.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    pub bits: u32,
    pub guard: u32,
    /// Largest truncation radius a theta sum may use before giving up.
    pub max_radius: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(DEFAULT_BITS)
    }
}

impl PrecisionContext {
    pub fn new(bits: u32) -> Self {
        PrecisionContext { bits, guard: DEFAULT_GUARD, max_radius: 400 }
    }

    /// Mantissa size used for intermediate values.
    pub fn prec(&self) -> u32 {
        self.bits + self.guard
    }

    /// Same guard policy, `extra` more target bits.
    pub fn raised(&self, extra: u32) -> Self {
        PrecisionContext { bits: self.bits + extra, ..*self }
    }

    pub fn float(&self, x: f64) -> Float {
        Float::with_val(self.prec(), x)
    }

    pub fn parse_float(&self, s: &str) -> Option<Float> {
        Float::parse(s.trim()).ok().map(|p| Float::with_val(self.prec(), p))
    }

    pub fn complex(&self, re: f64, im: f64) -> Complex {
        Complex::with_val(self.prec(), (re, im))
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.prec(), Constant::Pi)
    }

    pub fn i_pi(&self) -> Complex {
        Complex::with_val(self.prec(), (0, self.pi()))
    }

    /// 2^-bits, the target absolute accuracy.
    pub fn eps(&self) -> Float {
        Float::with_val(self.prec(), 1) >> self.bits
    }

    /// log of 2^-(bits+guard), as f64 for truncation planning.
    pub fn ln_target(&self) -> f64 {
        -(self.prec() as f64) * std::f64::consts::LN_2
    }
}
