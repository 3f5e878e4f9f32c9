//! Double Butcher tableaux and their IMEX classification.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleButcherTableau {
    pub name: String,
    pub nu: usize,
    /// Row-major `ν × ν`, strictly lower triangular.
    pub a_ex: Vec<f64>,
    /// Row-major `ν × ν`, lower triangular.
    pub a_im: Vec<f64>,
    pub w_ex: Vec<f64>,
    pub w_im: Vec<f64>,
    pub c_ex: Vec<f64>,
    pub c_im: Vec<f64>,
    /// Nominal order of accuracy.
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    TypeA,
    TypeCK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeClassification {
    pub kind: SchemeKind,
    pub isa: bool,
    pub gsa: bool,
}

pub const CLASSIFY_TOL: f64 = 1e-14;

impl DoubleButcherTableau {
    /// Builds a tableau from rows, deriving the abscissas by row sums.
    pub fn new(name: &str, order: usize, a_ex: Vec<Vec<f64>>, a_im: Vec<Vec<f64>>, w_ex: Vec<f64>, w_im: Vec<f64>) -> Result<Self> {
        let nu = w_ex.len();
        let square = |m: &Vec<Vec<f64>>| m.len() == nu && m.iter().all(|r| r.len() == nu);
        if nu == 0 || w_im.len() != nu || !square(&a_ex) || !square(&a_im) {
            return Err(Error::InvalidParameter(format!("tableau '{name}' has inconsistent sizes")));
        }
        for i in 0..nu {
            for j in i..nu {
                if a_ex[i][j] != 0.0 {
                    return Err(Error::InvalidParameter(format!("explicit tableau '{name}' not strictly lower triangular")));
                }
                if j > i && a_im[i][j] != 0.0 {
                    return Err(Error::InvalidParameter(format!("implicit tableau '{name}' not lower triangular")));
                }
            }
        }
        let c_ex = a_ex.iter().map(|r| r.iter().sum()).collect();
        let c_im = a_im.iter().map(|r| r.iter().sum()).collect();
        Ok(Self {
            name: name.to_string(),
            nu,
            a_ex: a_ex.concat(),
            a_im: a_im.concat(),
            w_ex,
            w_im,
            c_ex,
            c_im,
            order,
        })
    }

    pub fn ex(&self, i: usize, j: usize) -> f64 {
        self.a_ex[i * self.nu + j]
    }

    pub fn im(&self, i: usize, j: usize) -> f64 {
        self.a_im[i * self.nu + j]
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "euler" => Ok(tableau_euler()),
            "ars222" => Ok(tableau_ars222()),
            "bpr353" => Ok(tableau_bpr353()),
            other => Err(Error::UnknownScheme(other.to_string())),
        }
    }

    pub fn is_gsa(&self) -> bool {
        classify(self).map(|c| c.gsa).unwrap_or(false)
    }
}

/// Two-stage form of the IMEX Euler pair: forward Euler for the explicit
/// part, backward Euler for the implicit part, with the solution taken as
/// the last stage.
pub fn tableau_euler() -> DoubleButcherTableau {
    DoubleButcherTableau::new(
        "euler",
        1,
        vec![vec![0.0, 0.0], vec![1.0, 0.0]],
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![1.0, 0.0],
        vec![0.0, 1.0],
    )
    .expect("static tableau")
}

pub fn ars222_gamma() -> f64 {
    1.0 - std::f64::consts::SQRT_2 / 2.0
}

pub fn tableau_ars222() -> DoubleButcherTableau {
    let g = ars222_gamma();
    let d = 1.0 - 1.0 / (2.0 * g);
    DoubleButcherTableau::new(
        "ars222",
        2,
        vec![vec![0.0, 0.0, 0.0], vec![g, 0.0, 0.0], vec![d, 1.0 - d, 0.0]],
        vec![vec![0.0, 0.0, 0.0], vec![0.0, g, 0.0], vec![0.0, 1.0 - g, g]],
        vec![d, 1.0 - d, 0.0],
        vec![0.0, 1.0 - g, g],
    )
    .expect("static tableau")
}

pub fn tableau_bpr353() -> DoubleButcherTableau {
    let z = 0.0;
    DoubleButcherTableau::new(
        "bpr353",
        3,
        vec![
            vec![z, z, z, z, z],
            vec![1.0, z, z, z, z],
            vec![4.0 / 9.0, 2.0 / 9.0, z, z, z],
            vec![0.25, z, 0.75, z, z],
            vec![0.25, z, 0.75, z, z],
        ],
        vec![
            vec![z, z, z, z, z],
            vec![0.5, 0.5, z, z, z],
            vec![5.0 / 18.0, -1.0 / 9.0, 0.5, z, z],
            vec![0.5, z, z, 0.5, z],
            vec![0.25, z, 0.75, -0.5, 0.5],
        ],
        vec![0.25, z, 0.75, z, z],
        vec![0.25, z, 0.75, -0.5, 0.5],
    )
    .expect("static tableau")
}

pub fn classify(t: &DoubleButcherTableau) -> Result<SchemeClassification> {
    let nu = t.nu;
    let diag_nonzero = |range: std::ops::Range<usize>| range.into_iter().all(|i| t.im(i, i).abs() > CLASSIFY_TOL);
    let kind = if diag_nonzero(0..nu) {
        SchemeKind::TypeA
    } else if (0..nu).all(|j| t.im(0, j) == 0.0) && nu > 1 && diag_nonzero(1..nu) {
        SchemeKind::TypeCK
    } else {
        return Err(Error::Classification(format!("tableau '{}' is neither type A nor type CK", t.name)));
    };
    let isa = (0..nu).all(|j| (t.im(nu - 1, j) - t.w_im[j]).abs() <= CLASSIFY_TOL);
    let gsa = isa && (0..nu).all(|j| (t.ex(nu - 1, j) - t.w_ex[j]).abs() <= CLASSIFY_TOL);
    Ok(SchemeClassification { kind, isa, gsa })
}
