use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::layout::{Register, RegisterLayout};
use super::linalg::hermitian_eigen;
use crate::error::{Error, Result};
use crate::tol;

/// Normalized pure state on a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: RegisterLayout,
    amplitudes: DVector<C64>,
}

impl PureState {
    pub fn new(layout: RegisterLayout, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for a {}-dimensional layout",
                amplitudes.len(),
                layout.dim()
            )));
        }
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > tol::NORM {
            return Err(Error::InvalidState(format!("squared norm {norm2}")));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn normalized(layout: RegisterLayout, amplitudes: DVector<C64>) -> Result<Self> {
        let n = amplitudes.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(layout, amplitudes / C64::new(n, 0.0))
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        let mut v = DVector::zeros(layout.dim());
        if index >= v.len() {
            return Err(Error::InvalidState(format!("basis index {index} out of range")));
        }
        v[index] = C64::new(1.0, 0.0);
        Self::new(layout, v)
    }

    pub(crate) fn from_parts(layout: RegisterLayout, amplitudes: DVector<C64>) -> Self {
        debug_assert_eq!(layout.dim(), amplitudes.len());
        Self { layout, amplitudes }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_parts(self) -> (RegisterLayout, DVector<C64>) {
        (self.layout, self.amplitudes)
    }

    pub fn to_density(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator::from_parts(self.layout.clone(), m)
    }
}

/// Density operator on a register layout. May be subnormalized (trace in (0, 1]).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: RegisterLayout,
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and trace in (0, 1].
    pub fn new(layout: RegisterLayout, matrix: DMatrix<C64>) -> Result<Self> {
        let d = layout.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix for a {d}-dimensional layout",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm_dev = (&matrix - matrix.adjoint()).camax();
        if herm_dev > tol::NORM {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm_dev:e})")));
        }
        let rho = Self::from_parts(layout, matrix);
        let tr = rho.trace();
        if tr <= 0.0 || tr > 1.0 + tol::NORM {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let (evals, _) = hermitian_eigen(&rho.matrix);
        if let Some(min) = evals.iter().cloned().reduce(f64::min) {
            if min < -tol::NORM {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(rho)
    }

    /// Symmetrizes `(m + m†)/2`; no other validation.
    pub(crate) fn from_parts(layout: RegisterLayout, matrix: DMatrix<C64>) -> Self {
        let h = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        Self { layout, matrix: h }
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        Ok(PureState::basis(layout, index)?.to_density())
    }

    pub fn maximally_mixed(layout: RegisterLayout) -> Self {
        let d = layout.dim();
        let m = DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
        Self::from_parts(layout, m)
    }

    /// Diagonal operator with the given (real) entries.
    pub fn diagonal(layout: RegisterLayout, diag: &[f64]) -> Result<Self> {
        let v: Vec<C64> = diag.iter().map(|&p| C64::new(p, 0.0)).collect();
        Self::new(layout, DMatrix::from_diagonal(&DVector::from_vec(v)))
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            layout: self.layout.clone(),
            matrix: &self.matrix * C64::new(factor, 0.0),
        }
    }

    /// Rescales to unit trace.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= tol::PRUNE {
            return Err(Error::InvalidState(format!("cannot normalize trace {tr}")));
        }
        Ok(self.scaled(1.0 / tr))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    /// Relabels the operator onto a layout with identical register structure.
    pub fn relabel(&self, layout: RegisterLayout) -> Result<Self> {
        if layout.dim() != self.layout.dim() {
            return Err(Error::LayoutMismatch("dimension differs".into()));
        }
        Ok(Self {
            layout,
            matrix: self.matrix.clone(),
        })
    }
}

/// Linear isometry between register signatures.
///
/// Every input register must reappear among the outputs with the same width;
/// outputs not among the inputs are fresh registers created by the map.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    inputs: Vec<Register>,
    outputs: Vec<Register>,
    matrix: DMatrix<C64>,
}

impl Isometry {
    pub fn new(inputs: Vec<Register>, outputs: Vec<Register>, matrix: DMatrix<C64>) -> Result<Self> {
        let iso = Self::from_parts(inputs, outputs, matrix)?;
        let d_in = iso.matrix.ncols();
        let gram = iso.matrix.adjoint() * &iso.matrix;
        let dev = (gram - DMatrix::<C64>::identity(d_in, d_in)).camax();
        if dev > tol::NORM {
            return Err(Error::NotIsometry(dev));
        }
        Ok(iso)
    }

    fn from_parts(inputs: Vec<Register>, outputs: Vec<Register>, matrix: DMatrix<C64>) -> Result<Self> {
        for r in &inputs {
            match outputs.iter().find(|o| o.name == r.name) {
                Some(o) if o.width == r.width => {}
                Some(_) => {
                    return Err(Error::SignatureMismatch(format!(
                        "register `{}` changes width",
                        r.name
                    )))
                }
                None => {
                    return Err(Error::SignatureMismatch(format!(
                        "input `{}` missing from outputs",
                        r.name
                    )))
                }
            }
        }
        // catches duplicate names
        RegisterLayout::with_cap(inputs.clone(), usize::MAX)?;
        RegisterLayout::with_cap(outputs.clone(), usize::MAX)?;
        let w_in: usize = inputs.iter().map(|r| r.width).sum();
        let w_out: usize = outputs.iter().map(|r| r.width).sum();
        if matrix.ncols() != 1 << w_in || matrix.nrows() != 1 << w_out {
            return Err(Error::SignatureMismatch(format!(
                "matrix is {}x{}, signature needs {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                1 << w_out,
                1 << w_in
            )));
        }
        Ok(Self {
            inputs,
            outputs,
            matrix,
        })
    }

    /// Unitary acting on `registers` in place.
    pub fn unitary(registers: Vec<Register>, u: DMatrix<C64>) -> Result<Self> {
        Self::new(registers.clone(), registers, u)
    }

    pub fn identity(registers: Vec<Register>) -> Self {
        let d = 1 << registers.iter().map(|r| r.width).sum::<usize>();
        Self {
            inputs: registers.clone(),
            outputs: registers,
            matrix: DMatrix::identity(d, d),
        }
    }

    /// `V|in⟩ = U(|in⟩ ⊗ |0…0⟩_fresh)` for a unitary `U` on `inputs ++ fresh`.
    pub fn from_unitary_on_fresh(inputs: Vec<Register>, fresh: Vec<Register>, u: &DMatrix<C64>) -> Result<Self> {
        let w_in: usize = inputs.iter().map(|r| r.width).sum();
        let w_fresh: usize = fresh.iter().map(|r| r.width).sum();
        let d_out = 1 << (w_in + w_fresh);
        if u.nrows() != d_out || u.ncols() != d_out {
            return Err(Error::SignatureMismatch("unitary dimension".into()));
        }
        let cols: Vec<usize> = (0..1usize << w_in).map(|j| j << w_fresh).collect();
        let v = DMatrix::from_fn(d_out, cols.len(), |r, c| u[(r, cols[c])]);
        let mut outputs = inputs.clone();
        outputs.extend(fresh);
        Self::new(inputs, outputs, v)
    }

    /// `|x⟩ ↦ |x⟩|f(x)⟩` for a classical function into fresh registers.
    pub fn classical(inputs: Vec<Register>, fresh: Vec<Register>, f: impl Fn(usize) -> usize) -> Result<Self> {
        let w_in: usize = inputs.iter().map(|r| r.width).sum();
        let w_fresh: usize = fresh.iter().map(|r| r.width).sum();
        let mut v = DMatrix::zeros(1 << (w_in + w_fresh), 1 << w_in);
        for x in 0..1usize << w_in {
            let y = f(x);
            if y >= 1 << w_fresh {
                return Err(Error::SignatureMismatch(format!(
                    "classical output {y} does not fit {w_fresh} bits"
                )));
            }
            v[((x << w_fresh) | y, x)] = C64::new(1.0, 0.0);
        }
        let mut outputs = inputs.clone();
        outputs.extend(fresh);
        Self::from_parts(inputs, outputs, v)
    }

    /// Coherent copy `|x⟩ ↦ |x⟩|x⟩` of `source` into a fresh register.
    pub fn coherent_copy(source: Register, copy_name: &str) -> Result<Self> {
        let copy = Register::new(copy_name, source.width, source.owner);
        Self::classical(vec![source], vec![copy], |x| x)
    }

    pub fn inputs(&self) -> &[Register] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Register] {
        &self.outputs
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn fresh(&self) -> Vec<Register> {
        self.outputs
            .iter()
            .filter(|o| !self.inputs.iter().any(|i| i.name == o.name))
            .cloned()
            .collect()
    }

    /// `self` followed by `next`; `next` must act on registers available after `self`.
    pub fn then(&self, next: &Isometry) -> Result<Self> {
        let mid = RegisterLayout::with_cap(self.outputs.clone(), usize::MAX)?;
        let plan = super::ops::IsoPlan::new(&mid, next)?;
        let d_in = self.matrix.ncols();
        let mut m = DMatrix::zeros(plan.out_layout.dim(), d_in);
        for c in 0..d_in {
            let col = self.matrix.column(c).into_owned();
            m.set_column(c, &plan.apply(&col));
        }
        Self::from_parts(self.inputs.clone(), plan.out_layout.registers().to_vec(), m)
    }
}
