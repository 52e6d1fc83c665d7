use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;

/// Second-quantized electronic Hamiltonian over spatial orbitals.
///
/// Two-electron integrals are stored in chemists' notation `(pq|rs)`,
/// 0-based, as a dense `n^4` tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionicHamiltonian {
    n_spatial: usize,
    n_alpha: usize,
    n_beta: usize,
    e_core: f64,
    h1: Vec<f64>,
    h2: Vec<f64>,
}

impl FermionicHamiltonian {
    /// Validates symmetry and electron counts.
    pub fn new(
        n_spatial: usize,
        n_alpha: usize,
        n_beta: usize,
        e_core: f64,
        h1: Vec<f64>,
        h2: Vec<f64>,
    ) -> Result<Self> {
        let n = n_spatial;
        if h1.len() != n * n || h2.len() != n * n * n * n {
            return Err(Error::Domain(format!(
                "integral tensor sizes {}/{} do not match {} orbitals",
                h1.len(),
                h2.len(),
                n
            )));
        }
        if n_alpha > n || n_beta > n {
            return Err(Error::Domain(format!(
                "{n_alpha} alpha and {n_beta} beta electrons do not fit in {n} orbitals"
            )));
        }
        if !e_core.is_finite() || h1.iter().chain(&h2).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite integral".into()));
        }
        let ham = Self {
            n_spatial,
            n_alpha,
            n_beta,
            e_core,
            h1,
            h2,
        };
        ham.check_symmetry()?;
        Ok(ham)
    }

    /// A Hamiltonian with only a core energy and zero integrals.
    pub fn zeros(n_spatial: usize, n_alpha: usize, n_beta: usize, e_core: f64) -> Result<Self> {
        let n = n_spatial;
        Self::new(
            n,
            n_alpha,
            n_beta,
            e_core,
            vec![0.0; n * n],
            vec![0.0; n * n * n * n],
        )
    }

    fn check_symmetry(&self) -> Result<()> {
        let n = self.n_spatial;
        for p in 0..n {
            for q in 0..n {
                if (self.h1(p, q) - self.h1(q, p)).abs() > SYMMETRY_TOL {
                    return Err(Error::Consistency(format!(
                        "h1 not symmetric at ({p},{q})"
                    )));
                }
                for r in 0..n {
                    for s in 0..n {
                        let v = self.h2(p, q, r, s);
                        let images = [
                            self.h2(q, p, r, s),
                            self.h2(p, q, s, r),
                            self.h2(r, s, p, q),
                        ];
                        if images.iter().any(|w| (v - w).abs() > SYMMETRY_TOL) {
                            return Err(Error::Consistency(format!(
                                "h2 lacks 8-fold symmetry at ({p}{q}|{r}{s})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn n_electrons(&self) -> usize {
        self.n_alpha + self.n_beta
    }

    pub fn e_core(&self) -> f64 {
        self.e_core
    }

    #[inline]
    pub fn h1(&self, p: usize, q: usize) -> f64 {
        self.h1[p * self.n_spatial + q]
    }

    /// `(pq|rs)` in chemists' notation.
    #[inline]
    pub fn h2(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spatial;
        self.h2[((p * n + q) * n + r) * n + s]
    }

    pub fn h1_data(&self) -> &[f64] {
        &self.h1
    }

    pub fn h2_data(&self) -> &[f64] {
        &self.h2
    }

    /// Largest absolute difference over all fields; `None` if shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.n_spatial != other.n_spatial
            || self.n_alpha != other.n_alpha
            || self.n_beta != other.n_beta
        {
            return None;
        }
        let tensors = self
            .h1
            .iter()
            .zip(&other.h1)
            .chain(self.h2.iter().zip(&other.h2))
            .map(|(a, b)| (a - b).abs());
        Some(tensors.fold((self.e_core - other.e_core).abs(), f64::max))
    }
}
