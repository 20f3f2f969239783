use serde::{Deserialize, Serialize};

/// A two-term asymptotic value `lead * eps^order + corr * eps^(order+1)`.
///
/// Leading part and correction coefficient are kept apart so the two orders
/// never get mixed by accident.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoTerm {
    pub lead: f64,
    pub corr: f64,
    pub order: i32,
}

impl TwoTerm {
    pub const ZERO: TwoTerm = TwoTerm { lead: 0.0, corr: 0.0, order: 0 };

    pub fn new(lead: f64, corr: f64, order: i32) -> Self {
        Self { lead, corr, order }
    }

    /// An O(1) quantity with an O(eps) correction.
    pub fn regular(lead: f64, corr: f64) -> Self {
        Self::new(lead, corr, 0)
    }

    /// An O(1/eps) quantity with an O(1) correction.
    pub fn singular(lead: f64, corr: f64) -> Self {
        Self::new(lead, corr, -1)
    }

    /// Leading part at `eps`.
    pub fn leading(&self, eps: f64) -> f64 {
        self.lead * eps.powi(self.order)
    }

    /// Both terms at `eps`.
    pub fn value(&self, eps: f64) -> f64 {
        eps.powi(self.order) * (self.lead + self.corr * eps)
    }

    /// Recover the correction coefficient of a computed value whose leading part is known.
    pub fn from_value(lead: f64, value: f64, eps: f64, order: i32) -> Self {
        let corr = (value * eps.powi(-order) - lead) / eps;
        Self { lead, corr, order }
    }

    pub fn neg(&self) -> Self {
        Self { lead: -self.lead, corr: -self.corr, order: self.order }
    }

    /// Two-term value of `f(self)` for an O(1) argument: `f(l) + f'(l) c eps`.
    pub fn compose(&self, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Self {
        debug_assert_eq!(self.order, 0);
        Self::regular(f(self.lead), df(self.lead) * self.corr)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { lead: s * self.lead, corr: s * self.corr, order: self.order }
    }
}
