//! The level `N` lattice of trace-zero matrices `(b, 2c; -2A, -b)` with `N | A`,
//! identified with forms `[A, b, c]`. The norm `det X = 4Ac - b^2` equals `-disc`.
//!
//! Written as `(b, 2c; 2aN, -b)` with `a in Z` this is the same set of matrices;
//! the sign is chosen so that positive definite forms have positive norm and
//! their CM point spans the same ray as `X(z_Q)`.

use serde::{Deserialize, Serialize};

use crate::forms::{QForm, UniMat};

/// A matrix with rational-free integer entries `(m11, m12; m21, -m11)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TraceZero {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl TraceZero {
    /// `(x, y; z, -x)`.
    pub fn new(x: i64, y: i64, z: i64) -> Self {
        TraceZero { x, y, z }
    }

    pub fn det(&self) -> i64 {
        -self.x * self.x - self.y * self.z
    }

    pub fn neg(&self) -> Self {
        TraceZero::new(-self.x, -self.y, -self.z)
    }

    /// `g X g^{-1}`.
    pub fn conj(&self, g: &UniMat) -> Self {
        let (a, b, c, d) = (g.a, g.b, g.c, g.d);
        // g X = (a x + b z, a y - b x; c x + d z, c y - d x); times (d, -b; -c, a)
        let (p, q, r, s) = (a * self.x + b * self.z, a * self.y - b * self.x, c * self.x + d * self.z, c * self.y - d * self.x);
        let m11 = p * d - q * c;
        let m12 = -p * b + q * a;
        let m21 = r * d - s * c;
        TraceZero::new(m11, m12, m21)
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0 && self.z == 0
    }
}

/// An element of the lattice, stored through its form `[A, b, c]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeVec {
    pub form: QForm,
}

impl LatticeVec {
    pub const ZERO: LatticeVec = LatticeVec {
        form: QForm { a: 0, b: 0, c: 0 },
    };

    pub fn vec_of(form: QForm) -> Self {
        LatticeVec { form }
    }

    pub fn form_of(&self) -> QForm {
        self.form
    }

    pub fn matrix(&self) -> TraceZero {
        TraceZero::new(self.form.b, 2 * self.form.c, -2 * self.form.a)
    }

    /// Inverse of [`LatticeVec::matrix`]; `None` off the even lattice.
    pub fn from_matrix(m: &TraceZero) -> Option<Self> {
        if m.y % 2 != 0 || m.z % 2 != 0 {
            return None;
        }
        Some(LatticeVec::vec_of(QForm::new(-m.z / 2, m.x, m.y / 2)))
    }

    pub fn in_level(&self, level: u64) -> bool {
        self.form.a.rem_euclid(level as i64) == 0
    }

    /// `q(X) = det X`.
    pub fn norm(&self) -> i64 {
        self.matrix().det()
    }

    pub fn is_zero(&self) -> bool {
        self.form == QForm::new(0, 0, 0)
    }

    pub fn neg(&self) -> Self {
        LatticeVec::vec_of(self.form.neg())
    }

    /// `g . X = g X g^{-1}`, matching `Q(g^{-1} .)` on forms.
    pub fn translate(&self, g: &UniMat) -> Self {
        LatticeVec::from_matrix(&self.matrix().conj(g)).expect("conjugation preserves the lattice")
    }
}
