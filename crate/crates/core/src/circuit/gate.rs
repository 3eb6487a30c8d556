use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // float math is std-only without this
use num_traits::Float;

use crate::qcore::matrix::{
    dichotomic_deviation, expm_i, identity, kron, require_hermitian, require_square,
    unitary_deviation, validate_sites, UNITARY_TOL,
};
use crate::qcore::Pauli;
use crate::{ComplexMatrix, C64, Error, Result};

/// Payload of a circuit instruction.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    /// Unitary acting on `sites` (first site most significant).
    Local {
        matrix: ComplexMatrix,
        sites: Vec<usize>,
    },
    /// `|c⟩⟨c| ⊗ U + |c̄⟩⟨c̄| ⊗ I` where `c` is `1` when `active_high`
    /// and `0` otherwise.
    Controlled {
        control: usize,
        active_high: bool,
        matrix: ComplexMatrix,
        targets: Vec<usize>,
    },
    /// `exp(-i · angle · P_ancilla ⊗ A_targets)` for a Hermitian `A`.
    Coupling {
        operator: ComplexMatrix,
        ancilla_pauli: Pauli,
        angle: f64,
        ancilla: usize,
        targets: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub label: String,
}

fn require_unitary(m: &ComplexMatrix) -> Result<()> {
    let dev = unitary_deviation(m);
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

fn check_local_dims(matrix: &ComplexMatrix, sites: &[usize]) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::EmptySites);
    }
    require_square(matrix, 1 << sites.len())
}

impl Gate {
    pub fn local(matrix: ComplexMatrix, sites: Vec<usize>, label: impl Into<String>) -> Result<Self> {
        check_local_dims(&matrix, &sites)?;
        validate_sites(&sites, usize::MAX)?;
        require_unitary(&matrix)?;
        Ok(Self {
            kind: GateKind::Local { matrix, sites },
            label: label.into(),
        })
    }

    pub fn controlled(
        control: usize,
        active_high: bool,
        matrix: ComplexMatrix,
        targets: Vec<usize>,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_local_dims(&matrix, &targets)?;
        if targets.contains(&control) {
            return Err(Error::DuplicateSite(control));
        }
        validate_sites(&targets, usize::MAX)?;
        require_unitary(&matrix)?;
        Ok(Self {
            kind: GateKind::Controlled {
                control,
                active_high,
                matrix,
                targets,
            },
            label: label.into(),
        })
    }

    pub fn coupling(
        operator: ComplexMatrix,
        ancilla_pauli: Pauli,
        angle: f64,
        ancilla: usize,
        targets: Vec<usize>,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_local_dims(&operator, &targets)?;
        if targets.contains(&ancilla) {
            return Err(Error::DuplicateSite(ancilla));
        }
        validate_sites(&targets, usize::MAX)?;
        require_hermitian(&operator)?;
        if !angle.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            kind: GateKind::Coupling {
                operator,
                ancilla_pauli,
                angle,
                ancilla,
                targets,
            },
            label: label.into(),
        })
    }

    /// Single-qubit gate from a fixed 2×2 matrix.
    pub fn single(matrix: ComplexMatrix, site: usize, label: impl Into<String>) -> Result<Self> {
        Self::local(matrix, alloc::vec![site], label)
    }

    pub fn hadamard(site: usize) -> Self {
        Self::single(hadamard_matrix(), site, "H").expect("Hadamard is unitary")
    }

    pub fn pauli(p: Pauli, site: usize) -> Self {
        let mut label = String::new();
        label.push(p.symbol());
        Self::single(p.matrix(), site, label).expect("Paulis are unitary")
    }

    /// `RY(θ) = exp(-i θ Y / 2)`.
    pub fn ry(theta: f64, site: usize) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)],
        );
        Self::single(m, site, "RY").expect("rotation is unitary")
    }

    /// `RZ(θ) = exp(-i θ Z / 2)`.
    pub fn rz(theta: f64, site: usize) -> Self {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                C64::from_polar(1.0, -theta / 2.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::from_polar(1.0, theta / 2.0),
            ],
        );
        Self::single(m, site, "RZ").expect("rotation is unitary")
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::controlled(control, true, Pauli::X.matrix(), alloc::vec![target], "CNOT")
            .expect("X is unitary")
    }

    /// Every site the gate touches, in the order of [`Gate::unitary`]'s
    /// local index (first site most significant).
    pub fn sites(&self) -> Vec<usize> {
        match &self.kind {
            GateKind::Local { sites, .. } => sites.clone(),
            GateKind::Controlled { control, targets, .. } => {
                core::iter::once(*control).chain(targets.iter().copied()).collect()
            }
            GateKind::Coupling { ancilla, targets, .. } => {
                core::iter::once(*ancilla).chain(targets.iter().copied()).collect()
            }
        }
    }

    /// Dense unitary on [`Gate::sites`].
    pub fn unitary(&self) -> ComplexMatrix {
        match &self.kind {
            GateKind::Local { matrix, .. } => matrix.clone(),
            GateKind::Controlled {
                active_high,
                matrix,
                ..
            } => {
                let dim = matrix.nrows();
                let mut out = ComplexMatrix::zeros(2 * dim, 2 * dim);
                let (id_block, u_block) = if *active_high { (0, dim) } else { (dim, 0) };
                out.view_mut((id_block, id_block), (dim, dim))
                    .copy_from(&identity(dim));
                out.view_mut((u_block, u_block), (dim, dim)).copy_from(matrix);
                out
            }
            GateKind::Coupling {
                operator,
                ancilla_pauli,
                angle,
                ..
            } => coupling_unitary(operator, *ancilla_pauli, *angle),
        }
    }

    /// The inverse gate.
    pub fn dagger(&self) -> Gate {
        let kind = match &self.kind {
            GateKind::Local { matrix, sites } => GateKind::Local {
                matrix: matrix.adjoint(),
                sites: sites.clone(),
            },
            GateKind::Controlled {
                control,
                active_high,
                matrix,
                targets,
            } => GateKind::Controlled {
                control: *control,
                active_high: *active_high,
                matrix: matrix.adjoint(),
                targets: targets.clone(),
            },
            GateKind::Coupling {
                operator,
                ancilla_pauli,
                angle,
                ancilla,
                targets,
            } => GateKind::Coupling {
                operator: operator.clone(),
                ancilla_pauli: *ancilla_pauli,
                angle: -*angle,
                ancilla: *ancilla,
                targets: targets.clone(),
            },
        };
        let mut label = self.label.clone();
        label.push('†');
        Gate { kind, label }
    }

    /// Same gate with every site `s` replaced by `map[s]`.
    pub fn remapped(&self, map: &[usize]) -> Gate {
        let m = |s: &usize| map[*s];
        let kind = match &self.kind {
            GateKind::Local { matrix, sites } => GateKind::Local {
                matrix: matrix.clone(),
                sites: sites.iter().map(m).collect(),
            },
            GateKind::Controlled {
                control,
                active_high,
                matrix,
                targets,
            } => GateKind::Controlled {
                control: map[*control],
                active_high: *active_high,
                matrix: matrix.clone(),
                targets: targets.iter().map(m).collect(),
            },
            GateKind::Coupling {
                operator,
                ancilla_pauli,
                angle,
                ancilla,
                targets,
            } => GateKind::Coupling {
                operator: operator.clone(),
                ancilla_pauli: *ancilla_pauli,
                angle: *angle,
                ancilla: map[*ancilla],
                targets: targets.iter().map(m).collect(),
            },
        };
        Gate {
            kind,
            label: self.label.clone(),
        }
    }
}

pub fn hadamard_matrix() -> ComplexMatrix {
    let h = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    ComplexMatrix::from_row_slice(2, 2, &[h, h, h, -h])
}

/// `S† = diag(1, -i)`.
pub fn s_dagger_matrix() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
        ],
    )
}

/// `exp(-i · angle · P ⊗ A)` with the ancilla factor `P` leftmost.
///
/// Uses `cos(angle) I − i sin(angle) P⊗A` when `A² = I`, otherwise the
/// spectral route.
pub fn coupling_unitary(operator: &ComplexMatrix, ancilla_pauli: Pauli, angle: f64) -> ComplexMatrix {
    let generator = kron(&ancilla_pauli.matrix(), operator);
    if dichotomic_deviation(operator) < 1e-14 {
        let dim = generator.nrows();
        let (s, c) = angle.sin_cos();
        identity(dim).scale(c) - generator * C64::new(0.0, s)
    } else {
        expm_i(&generator, angle).expect("coupling generator is Hermitian")
    }
}

/// Measurement basis of a read-out qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    /// Rotation applied before a Z read-out so that outcome `0` is the
    /// `+1` eigenstate of the basis operator: `H` for X, `H·S†` for Y.
    pub fn rotation(self) -> Option<ComplexMatrix> {
        match self {
            Basis::Z => None,
            Basis::X => Some(hadamard_matrix()),
            Basis::Y => Some(hadamard_matrix() * s_dagger_matrix()),
        }
    }

    pub fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }
}
