use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::layout::{bits, Owner, Register, RegisterLayout, Selection};
use super::linalg::hermitian_eigen;
use super::state::{DensityOperator, Isometry, PureState};
use crate::error::{Error, Result};
use crate::tol;

/// Precomputed index maps for applying an isometry inside a larger layout.
pub(crate) struct IsoPlan<'a> {
    pub out_layout: RegisterLayout,
    iso: &'a Isometry,
    out_sub: Vec<usize>,
    rest_base: Vec<usize>,
    in_table: Vec<usize>,
}

impl<'a> IsoPlan<'a> {
    pub fn new(layout: &RegisterLayout, iso: &'a Isometry) -> Result<Self> {
        let mut in_pos = Vec::with_capacity(iso.inputs().len());
        for r in iso.inputs() {
            let p = layout
                .position(&r.name)
                .ok_or_else(|| Error::SignatureMismatch(format!("input `{}` not in layout", r.name)))?;
            if layout.registers()[p].width != r.width {
                return Err(Error::SignatureMismatch(format!("width of `{}` differs", r.name)));
            }
            in_pos.push(p);
        }
        let fresh = iso.fresh();
        if let Some(f) = fresh.iter().find(|f| layout.contains(&f.name)) {
            return Err(Error::SignatureMismatch(format!("fresh register `{}` already in layout", f.name)));
        }
        let out_layout = layout.extended(&fresh)?;
        let out_pos = out_layout.positions(&iso.outputs().iter().map(|r| r.name.as_str()).collect::<Vec<_>>())?;
        let out_sel = out_layout.selection(&out_pos);
        let rest = layout.complement(&in_pos);
        let rest_in = layout.selection(&rest);
        let rest_out = out_layout.selection(&rest);
        let out_sub = (0..out_layout.dim()).map(|o| out_sel.extract(o)).collect();
        let rest_base = (0..out_layout.dim())
            .map(|o| rest_in.deposit(rest_out.extract(o)))
            .collect();
        let in_table = layout.selection(&in_pos).table();
        Ok(Self {
            out_layout,
            iso,
            out_sub,
            rest_base,
            in_table,
        })
    }

    pub fn apply(&self, psi: &DVector<C64>) -> DVector<C64> {
        let v = self.iso.matrix();
        DVector::from_fn(self.out_layout.dim(), |o, _| {
            let row = self.out_sub[o];
            let base = self.rest_base[o];
            let mut acc = C64::new(0.0, 0.0);
            for (j, &off) in self.in_table.iter().enumerate() {
                let a = psi[base | off];
                if a.re != 0.0 || a.im != 0.0 {
                    acc += v[(row, j)] * a;
                }
            }
            acc
        })
    }

    /// `W M` where `W` is the lifted isometry; applied column by column.
    pub fn apply_columns(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.out_layout.dim(), m.ncols());
        for c in 0..m.ncols() {
            let col = m.column(c).into_owned();
            out.set_column(c, &self.apply(&col));
        }
        out
    }
}

/// Tensor product on the concatenated layout `a ++ b`.
pub fn tensor(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    let layout = a.layout().concat(b.layout())?;
    Ok(DensityOperator::from_parts(layout, a.matrix().kronecker(b.matrix())))
}

pub fn tensor_pure(a: &PureState, b: &PureState) -> Result<PureState> {
    let layout = a.layout().concat(b.layout())?;
    Ok(PureState::from_parts(layout, a.amplitudes().kronecker(b.amplitudes())))
}

/// `V ρ V†`, lifted by the identity on untouched registers; fresh registers are appended.
pub fn apply_isometry(state: &DensityOperator, v: &Isometry) -> Result<DensityOperator> {
    let plan = IsoPlan::new(state.layout(), v)?;
    let left = plan.apply_columns(state.matrix());
    let both = plan.apply_columns(&left.adjoint()).adjoint();
    Ok(DensityOperator::from_parts(plan.out_layout, both))
}

pub fn apply_isometry_pure(state: &PureState, v: &Isometry) -> Result<PureState> {
    let plan = IsoPlan::new(state.layout(), v)?;
    let out = plan.apply(state.amplitudes());
    Ok(PureState::from_parts(plan.out_layout, out))
}

/// Split of a layout into kept and traced positions, with lookup tables.
pub(crate) struct TraceSplit {
    pub keep_layout: RegisterLayout,
    pub keep_table: Vec<usize>,
    pub rest_table: Vec<usize>,
}

impl TraceSplit {
    pub fn new<S: AsRef<str>>(layout: &RegisterLayout, keep: &[S]) -> Result<Self> {
        let mut pos = layout.positions(keep)?;
        pos.sort_unstable();
        Ok(Self::at(layout, &pos))
    }

    pub fn at(layout: &RegisterLayout, pos: &[usize]) -> Self {
        let keep_sel: Selection = layout.selection(pos);
        let rest_sel = layout.selection(&layout.complement(pos));
        Self {
            keep_layout: layout.sublayout_at(pos),
            keep_table: keep_sel.table(),
            rest_table: rest_sel.table(),
        }
    }

    /// Reshapes a vector into the (kept × traced) amplitude matrix.
    pub fn reshape(&self, psi: &DVector<C64>) -> DMatrix<C64> {
        DMatrix::from_fn(self.keep_table.len(), self.rest_table.len(), |k, r| {
            psi[self.keep_table[k] | self.rest_table[r]]
        })
    }

    pub fn trace_matrix(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        let dk = self.keep_table.len();
        let mut out = DMatrix::zeros(dk, dk);
        for a in 0..dk {
            for b in a..dk {
                let mut acc = C64::new(0.0, 0.0);
                for &r in &self.rest_table {
                    acc += m[(self.keep_table[a] | r, self.keep_table[b] | r)];
                }
                out[(a, b)] = acc;
                out[(b, a)] = acc.conj();
            }
        }
        out
    }
}

/// Reduced state on `keep` (returned in canonical layout order).
pub fn partial_trace<S: AsRef<str>>(state: &DensityOperator, keep: &[S]) -> Result<DensityOperator> {
    let split = TraceSplit::new(state.layout(), keep)?;
    let m = split.trace_matrix(state.matrix());
    Ok(DensityOperator::from_parts(split.keep_layout, m))
}

pub fn partial_trace_pure<S: AsRef<str>>(state: &PureState, keep: &[S]) -> Result<DensityOperator> {
    let split = TraceSplit::new(state.layout(), keep)?;
    let m = split.reshape(state.amplitudes());
    Ok(DensityOperator::from_parts(split.keep_layout, &m * m.adjoint()))
}

/// One branch of a computational-basis measurement.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub bits: String,
    pub probability: f64,
    pub post_state: DensityOperator,
}

/// Computational-basis measurement of one register.
///
/// Post-measurement states keep the measured register (now in `|bits⟩`) and are
/// normalized. Outcomes below the pruning threshold are dropped and the
/// survivors' probabilities renormalized.
pub fn measure(state: &DensityOperator, register: &str) -> Result<Vec<Outcome>> {
    let layout = state.layout();
    let pos = layout
        .position(register)
        .ok_or_else(|| Error::UnknownRegister(register.to_string()))?;
    let width = layout.registers()[pos].width;
    let sel = layout.selection(&[pos]);
    let total = state.trace();
    let m = state.matrix();
    let mut out = Vec::new();
    for v in 0..1usize << width {
        let idx: Vec<usize> = (0..layout.dim()).filter(|&x| sel.extract(x) == v).collect();
        let p: f64 = idx.iter().map(|&x| m[(x, x)].re).sum::<f64>() / total;
        if p < tol::PRUNE {
            continue;
        }
        let mut post = DMatrix::zeros(layout.dim(), layout.dim());
        for &a in &idx {
            for &b in &idx {
                post[(a, b)] = m[(a, b)];
            }
        }
        let post = DensityOperator::from_parts(layout.clone(), post / C64::new(p * total, 0.0));
        out.push(Outcome {
            bits: bits(v, width),
            probability: p,
            post_state: post,
        });
    }
    let kept: f64 = out.iter().map(|o| o.probability).sum();
    for o in &mut out {
        o.probability /= kept;
    }
    Ok(out)
}

/// Removes the off-diagonal blocks of `register`; the average of [`measure`].
pub fn dephase(state: &DensityOperator, register: &str) -> Result<DensityOperator> {
    let layout = state.layout();
    let pos = layout
        .position(register)
        .ok_or_else(|| Error::UnknownRegister(register.to_string()))?;
    let sel = layout.selection(&[pos]);
    let m = DMatrix::from_fn(layout.dim(), layout.dim(), |a, b| {
        if sel.extract(a) == sel.extract(b) {
            state.matrix()[(a, b)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(DensityOperator::from_parts(layout.clone(), m))
}

/// Purification with a fresh environment register of width ⌈log₂ rank⌉.
///
/// The environment is appended after the input registers. A rank-one input
/// yields its pure state with no environment register.
pub fn purify(state: &DensityOperator) -> Result<PureState> {
    let rho = state.normalized()?;
    let (vals, vecs) = hermitian_eigen(rho.matrix());
    let mut comps: Vec<(f64, usize)> = vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > tol::EIGEN_ZERO)
        .map(|(i, &v)| (v, i))
        .collect();
    comps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let rank = comps.len();
    let env_width = usize::BITS as usize - (rank - 1).leading_zeros() as usize;
    let env_width = if rank <= 1 { 0 } else { env_width };
    let d = rho.dim();
    let weight: f64 = comps.iter().map(|c| c.0).sum();
    if env_width == 0 {
        let col = vecs.column(comps[0].1).into_owned();
        return PureState::normalized(rho.layout().clone(), col);
    }
    let mut name = String::from("E");
    let mut n = 0;
    while rho.layout().contains(&name) {
        n += 1;
        name = format!("E{n}");
    }
    let layout = rho
        .layout()
        .extended(&[Register::new(name, env_width, Owner::Environment)])?;
    let mut amp = DVector::zeros(d << env_width);
    for (k, &(lambda, i)) in comps.iter().enumerate() {
        let s = (lambda / weight).sqrt();
        for x in 0..d {
            amp[(x << env_width) | k] += vecs[(x, i)] * s;
        }
    }
    PureState::new(layout, amp)
}
