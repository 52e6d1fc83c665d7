use super::FermionicHamiltonian;
use crate::{Error, Result};

/// Orbitals to freeze (doubly occupied) and to delete (empty).
///
/// Indices are 0-based spatial orbitals. The HF reference used for the
/// occupancy checks is aufbau filling by index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActiveSpaceSpec {
    pub frozen: Vec<usize>,
    pub removed: Vec<usize>,
}

impl ActiveSpaceSpec {
    pub fn new(frozen: Vec<usize>, removed: Vec<usize>) -> Self {
        Self { frozen, removed }
    }

    pub fn is_empty(&self) -> bool {
        self.frozen.is_empty() && self.removed.is_empty()
    }

    /// Checks the spec against a Hamiltonian with `n` orbitals and the
    /// given spin populations.
    pub fn validate(&self, n: usize, n_alpha: usize, n_beta: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for &i in self.frozen.iter().chain(&self.removed) {
            if i >= n {
                return Err(Error::Domain(format!(
                    "active-space index {i} out of range for {n} orbitals"
                )));
            }
            if seen[i] {
                return Err(Error::Domain(format!(
                    "orbital {i} listed twice in frozen/removed"
                )));
            }
            seen[i] = true;
        }
        let doubly = n_alpha.min(n_beta);
        let occupied = n_alpha.max(n_beta);
        if let Some(&i) = self.frozen.iter().find(|&&i| i >= doubly) {
            return Err(Error::Domain(format!(
                "frozen orbital {i} is not doubly occupied in the HF reference"
            )));
        }
        if let Some(&i) = self.removed.iter().find(|&&i| i < occupied) {
            return Err(Error::Domain(format!(
                "removed orbital {i} is occupied in the HF reference"
            )));
        }
        let active = n - self.frozen.len() - self.removed.len();
        let electrons = n_alpha + n_beta - 2 * self.frozen.len();
        if electrons > 2 * active {
            return Err(Error::Domain(format!(
                "{electrons} active electrons exceed capacity of {active} orbitals"
            )));
        }
        Ok(())
    }
}

/// Folds frozen orbitals into the core energy and an effective one-body
/// operator, then drops frozen and removed orbitals.
pub fn reduce_active_space(
    h: &FermionicHamiltonian,
    spec: &ActiveSpaceSpec,
) -> Result<FermionicHamiltonian> {
    let n = h.n_spatial();
    spec.validate(n, h.n_alpha(), h.n_beta())?;
    if spec.is_empty() {
        return Ok(h.clone());
    }

    let frozen = &spec.frozen;
    let active: Vec<usize> = (0..n)
        .filter(|p| !frozen.contains(p) && !spec.removed.contains(p))
        .collect();
    let m = active.len();

    let mut e_core = h.e_core();
    for &i in frozen {
        e_core += 2.0 * h.h1(i, i);
        for &j in frozen {
            e_core += 2.0 * h.h2(i, i, j, j) - h.h2(i, j, j, i);
        }
    }

    let mut h1 = vec![0.0; m * m];
    for (a, &p) in active.iter().enumerate() {
        for (b, &q) in active.iter().enumerate() {
            let mut v = h.h1(p, q);
            for &i in frozen {
                v += 2.0 * h.h2(p, q, i, i) - h.h2(p, i, i, q);
            }
            h1[a * m + b] = v;
        }
    }

    let mut h2 = vec![0.0; m * m * m * m];
    for (a, &p) in active.iter().enumerate() {
        for (b, &q) in active.iter().enumerate() {
            for (c, &r) in active.iter().enumerate() {
                for (d, &s) in active.iter().enumerate() {
                    h2[((a * m + b) * m + c) * m + d] = h.h2(p, q, r, s);
                }
            }
        }
    }

    FermionicHamiltonian::new(
        m,
        h.n_alpha() - frozen.len(),
        h.n_beta() - frozen.len(),
        e_core,
        h1,
        h2,
    )
}
