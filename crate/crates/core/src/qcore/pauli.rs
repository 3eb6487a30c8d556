use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::qcore::matrix::{kron_all, require_square};
use crate::{ComplexMatrix, C64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let m = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        ComplexMatrix::from_row_slice(2, 2, &m)
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Matrix element `⟨b ⊕ flip| P |b⟩` for input bit `b`.
    fn phase(self, bit: usize) -> C64 {
        match (self, bit) {
            (Pauli::I, _) | (Pauli::X, _) | (Pauli::Z, 0) => C64::new(1.0, 0.0),
            (Pauli::Z, _) => C64::new(-1.0, 0.0),
            (Pauli::Y, 0) => C64::new(0.0, 1.0),
            (Pauli::Y, _) => C64::new(0.0, -1.0),
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::param(alloc::format!("unknown Pauli symbol '{other}'"))),
        }
    }
}

/// A weighted tensor product of single-qubit Paulis, site 0 leftmost.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub word: Vec<Pauli>,
    pub coefficient: C64,
}

impl PauliString {
    pub fn new(word: Vec<Pauli>, coefficient: C64) -> Self {
        Self { word, coefficient }
    }

    /// Unit-coefficient string from a label such as `"XIZ"`.
    pub fn from_label(label: &str) -> Result<Self> {
        let word = label
            .chars()
            .map(Pauli::try_from)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(word, C64::new(1.0, 0.0)))
    }

    /// Single Pauli on `site`, identity elsewhere.
    pub fn single(p: Pauli, site: usize, n: usize) -> Self {
        let mut word = alloc::vec![Pauli::I; n];
        word[site] = p;
        Self::new(word, C64::new(1.0, 0.0))
    }

    pub fn with_coefficient(mut self, c: C64) -> Self {
        self.coefficient = c;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.word.len()
    }

    pub fn label(&self) -> String {
        self.word.iter().map(|p| p.symbol()).collect()
    }

    /// Sites carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        self.word
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(i, _)| i)
            .collect()
    }

    /// Bitmask of the basis-index bits flipped by the string.
    fn flip_mask(&self) -> usize {
        let n = self.word.len();
        self.word
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .fold(0, |m, (s, _)| m | (1 << (n - 1 - s)))
    }

    /// Non-zero entry of column `col`: the string maps `|col⟩` to
    /// `value · |row⟩`. Includes the coefficient.
    pub fn column_entry(&self, col: usize) -> (usize, C64) {
        let n = self.word.len();
        let mut phase = self.coefficient;
        for (s, p) in self.word.iter().enumerate() {
            phase *= p.phase((col >> (n - 1 - s)) & 1);
        }
        (col ^ self.flip_mask(), phase)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let mats: Vec<ComplexMatrix> = self.word.iter().map(|p| p.matrix()).collect();
        kron_all(mats.iter()) * self.coefficient
    }

    /// `P |ψ⟩` for an amplitude slice of length `2^n`.
    pub fn apply(&self, amps: &[C64]) -> Vec<C64> {
        let mut out = alloc::vec![C64::new(0.0, 0.0); amps.len()];
        for (col, a) in amps.iter().enumerate() {
            let (row, v) = self.column_entry(col);
            out[row] += v * a;
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{:+}i) {}", self.coefficient.re, self.coefficient.im, self.label())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_label(s)
    }
}

/// Iterates all `4^n` words in lexicographic `I < X < Y < Z` order,
/// site 0 slowest.
pub fn all_words(n: usize) -> impl Iterator<Item = Vec<Pauli>> {
    (0..(1usize << (2 * n))).map(move |code| {
        (0..n)
            .map(|s| Pauli::ALL[(code >> (2 * (n - 1 - s))) & 3])
            .collect()
    })
}

/// Expands `op` in the Pauli basis: `γ_i = Tr(Γ_i† op) / 2^n` for every
/// one of the `4^n` strings, in [`all_words`] order.
pub fn pauli_decompose(op: &ComplexMatrix, n: usize) -> Result<Vec<PauliString>> {
    let dim = 1usize << n;
    require_square(op, dim)?;
    let norm = 1.0 / dim as f64;
    Ok(all_words(n)
        .map(|word| {
            let unit = PauliString::new(word, C64::new(1.0, 0.0));
            // Tr(Γ† A) = Σ_col conj(Γ[row, col]) A[row, col]
            let mut acc = C64::new(0.0, 0.0);
            for col in 0..dim {
                let (row, v) = unit.column_entry(col);
                acc += v.conj() * op[(row, col)];
            }
            unit.with_coefficient(acc * norm)
        })
        .collect())
}

/// `Σ_i γ_i Γ_i`.
pub fn resum(terms: &[PauliString], n: usize) -> Result<ComplexMatrix> {
    let dim = 1usize << n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for t in terms {
        if t.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: t.n_qubits(),
            });
        }
        for col in 0..dim {
            let (row, v) = t.column_entry(col);
            out[(row, col)] += v;
        }
    }
    Ok(out)
}
