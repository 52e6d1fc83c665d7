//! Pauli strings stored as X/Z bit masks (qubit k is bit k).
//!
//! In text form an axes string is written with the highest qubit first, so
//! `IZ` is `Z` on qubit 0 of a two-qubit register.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::{Error, Result};

/// Terms with `|coefficient|` below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Maximum register width representable by the bit-mask encoding.
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// Single-qubit product `self * other` as (phase, result).
    fn mul(self, other: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        match (self, other) {
            (I, p) | (p, I) => (one, p),
            (a, b) if a == b => (one, I),
            (X, Y) => (i, Z),
            (Y, Z) => (i, X),
            (Z, X) => (i, Y),
            (Y, X) => (-i, Z),
            (Z, Y) => (-i, X),
            (X, Z) => (-i, Y),
            _ => unreachable!(),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A coefficient times a tensor product of single-qubit Paulis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    n_qubits: usize,
    x: u64,
    z: u64,
    pub coefficient: Complex64,
}

impl PauliTerm {
    pub fn identity(n_qubits: usize, coefficient: Complex64) -> Self {
        Self {
            n_qubits,
            x: 0,
            z: 0,
            coefficient,
        }
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64, coefficient: Complex64) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::Domain(format!("{n_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        let width = if n_qubits == 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        if (x | z) & !width != 0 {
            return Err(Error::Domain("Pauli mask wider than register".into()));
        }
        if !(coefficient.re.is_finite() && coefficient.im.is_finite()) {
            return Err(Error::Domain("non-finite Pauli coefficient".into()));
        }
        Ok(Self {
            n_qubits,
            x,
            z,
            coefficient,
        })
    }

    /// Axes listed per qubit, index 0 first.
    pub fn from_axes(axes: &[Pauli], coefficient: Complex64) -> Result<Self> {
        let (mut x, mut z) = (0u64, 0u64);
        for (k, p) in axes.iter().enumerate().take(MAX_QUBITS) {
            let (xb, zb) = p.bits();
            x |= (xb as u64) << k;
            z |= (zb as u64) << k;
        }
        Self::from_masks(axes.len(), x, z, coefficient)
    }

    /// Parses a label written highest qubit first, e.g. `"IZXY"`.
    pub fn from_label(label: &str, coefficient: Complex64) -> Result<Self> {
        let axes = label
            .chars()
            .rev()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Domain(format!("invalid Pauli label '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_axes(&axes, coefficient)
    }

    /// A single Pauli on one qubit.
    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli, coefficient: Complex64) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::Domain(format!("qubit {qubit} out of range for {n_qubits}")));
        }
        let (xb, zb) = pauli.bits();
        Self::from_masks(n_qubits, (xb as u64) << qubit, (zb as u64) << qubit, coefficient)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn axis(&self, qubit: usize) -> Pauli {
        Pauli::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn axes(&self) -> Vec<Pauli> {
        (0..self.n_qubits).map(|k| self.axis(k)).collect()
    }

    /// Axes string, highest qubit first.
    pub fn label(&self) -> String {
        (0..self.n_qubits).rev().map(|k| self.axis(k).as_char()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of Y factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }
}

/// Product `a * b`, tracking the phase qubit by qubit.
pub fn pauli_multiply(a: &PauliTerm, b: &PauliTerm) -> Result<PauliTerm> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::Domain(format!(
            "cannot multiply {}-qubit and {}-qubit Pauli terms",
            a.n_qubits, b.n_qubits
        )));
    }
    let mut phase = a.coefficient * b.coefficient;
    let active = (a.x | a.z) & (b.x | b.z);
    let mut bits = active;
    while bits != 0 {
        let k = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let (p, _) = a.axis(k).mul(b.axis(k));
        phase *= p;
    }
    Ok(PauliTerm {
        n_qubits: a.n_qubits,
        x: a.x ^ b.x,
        z: a.z ^ b.z,
        coefficient: phase,
    })
}

/// A sum of Pauli terms with like terms merged.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliOperatorSum {
    n_qubits: usize,
    terms: BTreeMap<(u64, u64), Complex64>,
}

impl PauliOperatorSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize, coefficient: f64) -> Self {
        let mut s = Self::zero(n_qubits);
        s.add_term(PauliTerm::identity(n_qubits, coefficient.into()))
            .expect("width matches");
        s
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut s = Self::zero(n_qubits);
        for t in terms {
            s.add_term(t)?;
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds a term, merging with an existing term of the same axes and
    /// dropping the result if it falls below the prune threshold.
    pub fn add_term(&mut self, term: PauliTerm) -> Result<()> {
        if term.n_qubits != self.n_qubits {
            return Err(Error::Domain(format!(
                "{}-qubit term added to {}-qubit sum",
                term.n_qubits, self.n_qubits
            )));
        }
        let key = (term.x, term.z);
        let entry = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *entry += term.coefficient;
        if entry.norm() < PRUNE_THRESHOLD {
            self.terms.remove(&key);
        }
        Ok(())
    }

    /// Terms in a fixed order (by X mask, then Z mask).
    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(move |(&(x, z), &c)| PauliTerm {
            n_qubits: self.n_qubits,
            x,
            z,
            coefficient: c,
        })
    }

    pub fn coefficient(&self, label: &str) -> Complex64 {
        PauliTerm::from_label(label, Complex64::new(1.0, 0.0))
            .ok()
            .and_then(|t| self.terms.get(&(t.x, t.z)).copied())
            .unwrap_or_default()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self::zero(self.n_qubits);
        for mut t in self.terms() {
            t.coefficient *= factor;
            out.add_term(t).expect("same width");
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for t in other.terms() {
            out.add_term(t)?;
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Domain("operator width mismatch".into()));
        }
        let mut out = Self::zero(self.n_qubits);
        for a in self.terms() {
            for b in other.terms() {
                out.add_term(pauli_multiply(&a, &b)?)?;
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.conj();
        }
        out
    }

    /// Largest imaginary part over all coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops imaginary parts, failing if any exceeds `tol`.
    pub fn realize(&self, tol: f64) -> Result<Self> {
        let worst = self.max_imag();
        if worst > tol {
            return Err(Error::Consistency(format!(
                "operator is not Hermitian: imaginary coefficient {worst:e}"
            )));
        }
        let mut out = Self::zero(self.n_qubits);
        for mut t in self.terms() {
            t.coefficient = Complex64::new(t.coefficient.re, 0.0);
            out.add_term(t)?;
        }
        Ok(out)
    }

    /// Line-oriented text: `<coeff> <axes>` per term. Real coefficients
    /// print bare, complex ones as `(re,im)`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut width = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let (coeff, label) = line.rsplit_once(char::is_whitespace).ok_or_else(|| bad("expected '<coeff> <axes>'"))?;
            let coeff = coeff.trim();
            let c = if let Some(inner) = coeff.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
                let (re, im) = inner.split_once(',').ok_or_else(|| bad("bad complex coefficient"))?;
                Complex64::new(
                    re.trim().parse().map_err(|_| bad("bad real part"))?,
                    im.trim().parse().map_err(|_| bad("bad imaginary part"))?,
                )
            } else {
                Complex64::new(coeff.parse().map_err(|_| bad("bad coefficient"))?, 0.0)
            };
            let term = PauliTerm::from_label(label, c)?;
            if *width.get_or_insert(term.n_qubits) != term.n_qubits {
                return Err(bad("inconsistent axes length"));
            }
            terms.push(term);
        }
        Self::from_terms(width.unwrap_or(0), terms)
    }
}

impl fmt::Display for PauliOperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.terms() {
            let c = t.coefficient;
            if c.im == 0.0 {
                writeln!(f, "{:e} {}", c.re, t.label())?;
            } else {
                writeln!(f, "({:e},{:e}) {}", c.re, c.im, t.label())?;
            }
        }
        Ok(())
    }
}

impl Add for &PauliOperatorSum {
    type Output = PauliOperatorSum;

    /// Panics on width mismatch; use [`PauliOperatorSum::try_add`] otherwise.
    fn add(self, rhs: Self) -> PauliOperatorSum {
        self.try_add(rhs).expect("operator width mismatch")
    }
}

impl Mul for &PauliOperatorSum {
    type Output = PauliOperatorSum;

    fn mul(self, rhs: Self) -> PauliOperatorSum {
        self.try_mul(rhs).expect("operator width mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn x_times_y() {
        let x = PauliTerm::from_label("X", c(1.0, 0.0)).unwrap();
        let y = PauliTerm::from_label("Y", c(1.0, 0.0)).unwrap();
        let p = pauli_multiply(&x, &y).unwrap();
        assert_eq!(p.label(), "Z");
        assert_eq!(p.coefficient, c(0.0, 1.0));
        let q = pauli_multiply(&y, &x).unwrap();
        assert_eq!(q.coefficient, c(0.0, -1.0));
    }

    #[test]
    fn involution() {
        let iz = PauliTerm::from_label("ZI", c(1.0, 0.0)).unwrap();
        let p = pauli_multiply(&iz, &iz).unwrap();
        assert!(p.is_identity());
        assert_eq!(p.coefficient, c(1.0, 0.0));
    }

    #[test]
    fn width_mismatch() {
        let a = PauliTerm::from_label("X", c(1.0, 0.0)).unwrap();
        let b = PauliTerm::from_label("XX", c(1.0, 0.0)).unwrap();
        assert!(matches!(pauli_multiply(&a, &b), Err(Error::Domain(_))));
        let mut s = PauliOperatorSum::zero(1);
        assert!(s.add_term(b).is_err());
    }

    #[test]
    fn label_order_is_high_qubit_first() {
        let t = PauliTerm::from_label("XIZ", c(1.0, 0.0)).unwrap();
        assert_eq!(t.axis(0), Pauli::Z);
        assert_eq!(t.axis(1), Pauli::I);
        assert_eq!(t.axis(2), Pauli::X);
        assert_eq!(t.label(), "XIZ");
    }

    #[test]
    fn merge_and_prune() {
        let mut s = PauliOperatorSum::zero(2);
        s.add_term(PauliTerm::from_label("ZI", c(0.5, 0.0)).unwrap()).unwrap();
        s.add_term(PauliTerm::from_label("ZI", c(0.25, 0.0)).unwrap()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coefficient("ZI"), c(0.75, 0.0));
        s.add_term(PauliTerm::from_label("ZI", c(-0.75, 1e-14)).unwrap()).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn text_form() {
        let s = PauliOperatorSum::from_terms(
            4,
            [
                PauliTerm::from_label("IZII", c(-0.5, 0.0)).unwrap(),
                PauliTerm::from_label("XYII", c(0.0, 0.25)).unwrap(),
            ],
        )
        .unwrap();
        let text = s.to_text();
        assert!(text.contains("-5e-1 IZII"));
        assert_eq!(PauliOperatorSum::from_text(&text).unwrap(), s);
    }

    #[test]
    fn realize_rejects_imaginary() {
        let s = PauliOperatorSum::from_terms(1, [PauliTerm::from_label("X", c(1.0, 1e-6)).unwrap()]).unwrap();
        assert!(matches!(s.realize(1e-10), Err(Error::Consistency(_))));
        assert_eq!(s.realize(1e-5).unwrap().coefficient("X"), c(1.0, 0.0));
    }
}
