//! WENO interface reconstructions (Jiang-Shu weights).

pub const WENO_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WenoOrder {
    Three,
    Five,
}

impl WenoOrder {
    pub fn radius(self) -> usize {
        match self {
            WenoOrder::Three => 2,
            WenoOrder::Five => 3,
        }
    }

    pub fn from_order(order: usize) -> Option<Self> {
        match order {
            3 => Some(WenoOrder::Three),
            5 => Some(WenoOrder::Five),
            _ => None,
        }
    }

    pub fn order(self) -> usize {
        match self {
            WenoOrder::Three => 3,
            WenoOrder::Five => 5,
        }
    }
}

/// Value at the right face of the middle cell of `(f[0], f[1], f[2])`.
#[inline]
pub fn weno3(fm: f64, f0: f64, fp: f64) -> f64 {
    let p0 = -0.5 * fm + 1.5 * f0;
    let p1 = 0.5 * f0 + 0.5 * fp;
    let b0 = (f0 - fm).powi(2);
    let b1 = (fp - f0).powi(2);
    let a0 = (1.0 / 3.0) / (WENO_EPS + b0).powi(2);
    let a1 = (2.0 / 3.0) / (WENO_EPS + b1).powi(2);
    (a0 * p0 + a1 * p1) / (a0 + a1)
}

/// Value at the right face of the middle cell of a 5-cell stencil.
#[inline]
pub fn weno5(fmm: f64, fm: f64, f0: f64, fp: f64, fpp: f64) -> f64 {
    let p0 = (2.0 * fmm - 7.0 * fm + 11.0 * f0) / 6.0;
    let p1 = (-fm + 5.0 * f0 + 2.0 * fp) / 6.0;
    let p2 = (2.0 * f0 + 5.0 * fp - fpp) / 6.0;
    let b0 = 13.0 / 12.0 * (fmm - 2.0 * fm + f0).powi(2) + 0.25 * (fmm - 4.0 * fm + 3.0 * f0).powi(2);
    let b1 = 13.0 / 12.0 * (fm - 2.0 * f0 + fp).powi(2) + 0.25 * (fm - fp).powi(2);
    let b2 = 13.0 / 12.0 * (f0 - 2.0 * fp + fpp).powi(2) + 0.25 * (3.0 * f0 - 4.0 * fp + fpp).powi(2);
    let a0 = 0.1 / (WENO_EPS + b0).powi(2);
    let a1 = 0.6 / (WENO_EPS + b1).powi(2);
    let a2 = 0.3 / (WENO_EPS + b2).powi(2);
    (a0 * p0 + a1 * p1 + a2 * p2) / (a0 + a1 + a2)
}

/// Left- and right-biased values at face `i + 1/2`; `at(k)` returns cell `k`.
#[inline]
pub fn face_values(order: WenoOrder, at: impl Fn(isize) -> f64, i: isize) -> (f64, f64) {
    match order {
        WenoOrder::Three => {
            let minus = weno3(at(i - 1), at(i), at(i + 1));
            let plus = weno3(at(i + 2), at(i + 1), at(i));
            (minus, plus)
        }
        WenoOrder::Five => {
            let minus = weno5(at(i - 2), at(i - 1), at(i), at(i + 1), at(i + 2));
            let plus = weno5(at(i + 3), at(i + 2), at(i + 1), at(i), at(i - 1));
            (minus, plus)
        }
    }
}
