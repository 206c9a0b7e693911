use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::layout::RegisterLayout;
use super::linalg::hermitian_eigen;
use super::ops::{IsoPlan, TraceSplit};
use super::state::{DensityOperator, Isometry, PureState};
use crate::error::{Error, Result};
use crate::infomeasures::entropy_of_spectrum;
use crate::tol;

/// A normalized mixed state held as a convex combination of pure vectors.
///
/// Honest protocol branches stay pure and carry a single component; mixed
/// branches only appear after a subsystem has been decoupled.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    layout: RegisterLayout,
    components: Vec<(f64, DVector<C64>)>,
}

impl Ensemble {
    pub fn pure(state: PureState) -> Self {
        let (layout, amps) = state.into_parts();
        Self {
            layout,
            components: vec![(1.0, amps)],
        }
    }

    /// Spectral decomposition of a (possibly subnormalized) density operator.
    pub fn from_density(rho: &DensityOperator) -> Result<Self> {
        let rho = rho.normalized()?;
        let (vals, vecs) = hermitian_eigen(rho.matrix());
        let mut components: Vec<(f64, DVector<C64>)> = vals
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &v)| v > tol::EIGEN_ZERO)
            .map(|(i, &v)| (v, vecs.column(i).into_owned()))
            .collect();
        let total: f64 = components.iter().map(|c| c.0).sum();
        for c in &mut components {
            c.0 /= total;
        }
        Ok(Self {
            layout: rho.layout().clone(),
            components,
        })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn components(&self) -> &[(f64, DVector<C64>)] {
        &self.components
    }

    pub fn is_pure(&self) -> bool {
        self.components.len() == 1
    }

    pub fn density(&self) -> DensityOperator {
        let d = self.layout.dim();
        let mut m = DMatrix::zeros(d, d);
        for (w, v) in &self.components {
            m += v * v.adjoint() * C64::new(*w, 0.0);
        }
        DensityOperator::from_parts(self.layout.clone(), m)
    }

    /// Reduced density operator on `keep` (canonical layout order).
    pub fn reduced<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        let split = TraceSplit::new(&self.layout, keep)?;
        let dk = split.keep_table.len();
        let mut m = DMatrix::zeros(dk, dk);
        for (w, v) in &self.components {
            let a = split.reshape(v);
            m += &a * a.adjoint() * C64::new(*w, 0.0);
        }
        Ok(DensityOperator::from_parts(split.keep_layout, m))
    }

    /// Von Neumann entropy (bits) of the reduced state on `names`.
    ///
    /// For pure ensembles the smaller side of the cut is diagonalized.
    pub fn entropy<S: AsRef<str>>(&self, names: &[S]) -> Result<f64> {
        let pos = self.layout.positions(names)?;
        let width: usize = pos.iter().map(|&p| self.layout.registers()[p].width).sum();
        if width == 0 {
            return Ok(0.0);
        }
        if self.is_pure() {
            if width == self.layout.total_width() {
                return Ok(0.0);
            }
            if 2 * width > self.layout.total_width() {
                let rest = self.layout.complement(&pos);
                let split = TraceSplit::at(&self.layout, &rest);
                let a = split.reshape(&self.components[0].1);
                return Ok(entropy_of_spectrum(&hermitian_eigen(&(&a * a.adjoint())).0));
            }
        }
        let rho = self.reduced(names)?;
        Ok(entropy_of_spectrum(&rho.eigenvalues()))
    }

    pub fn apply(&self, v: &Isometry) -> Result<Self> {
        let plan = IsoPlan::new(&self.layout, v)?;
        let components = self.components.iter().map(|(w, c)| (*w, plan.apply(c))).collect();
        Ok(Self {
            layout: plan.out_layout,
            components,
        })
    }

    /// Computational-basis measurement of `register`, which is then discarded.
    ///
    /// Returns `(value, probability, post-measurement ensemble)` for each
    /// surviving outcome, probabilities renormalized after pruning.
    pub fn measure(&self, register: &str) -> Result<Vec<(usize, f64, Ensemble)>> {
        let pos = self
            .layout
            .position(register)
            .ok_or_else(|| Error::UnknownRegister(register.to_string()))?;
        let sel = self.layout.selection(&[pos]);
        let rest = self.layout.complement(&[pos]);
        let rest_layout = self.layout.sublayout_at(&rest);
        let rest_table = self.layout.selection(&rest).table();
        let mut out = Vec::new();
        for value in 0..sel.dim() {
            let off = sel.deposit(value);
            let mut comps = Vec::with_capacity(self.components.len());
            let mut p = 0.0;
            for (w, v) in &self.components {
                let sub = DVector::from_fn(rest_table.len(), |r, _| v[rest_table[r] | off]);
                let n2 = sub.norm_squared();
                if w * n2 > tol::PRUNE * tol::PRUNE {
                    p += w * n2;
                    comps.push((w * n2, sub / C64::new(n2.sqrt(), 0.0)));
                }
            }
            if p < tol::PRUNE {
                continue;
            }
            for c in &mut comps {
                c.0 /= p;
            }
            out.push((
                value,
                p,
                Ensemble {
                    layout: rest_layout.clone(),
                    components: comps,
                },
            ));
        }
        let kept: f64 = out.iter().map(|o| o.1).sum();
        for o in &mut out {
            o.1 /= kept;
        }
        Ok(out)
    }

    /// `ρ_S ⊗ ρ_rest` for the register set `names`, kept in this layout's order.
    pub fn decouple<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let mut pos = self.layout.positions(names)?;
        pos.sort_unstable();
        let rest = self.layout.complement(&pos);
        let a = self.reduced_at(&pos);
        let b = self.reduced_at(&rest);
        Self::product(self.layout.clone(), &pos, &a, &b)
    }

    fn reduced_at(&self, pos: &[usize]) -> DensityOperator {
        let names: Vec<String> = pos.iter().map(|&p| self.layout.registers()[p].name.clone()).collect();
        self.reduced(&names).expect("positions come from this layout")
    }

    /// Product of `a` (on the sorted positions `pos` of `layout`) and `b` (on the rest).
    pub(crate) fn product(layout: RegisterLayout, pos: &[usize], a: &DensityOperator, b: &DensityOperator) -> Result<Self> {
        let rest = layout.complement(pos);
        let sa = layout.selection(pos).table();
        let sb = layout.selection(&rest).table();
        if sa.len() != a.dim() || sb.len() != b.dim() {
            return Err(Error::LayoutMismatch("factor dimensions do not match the cut".into()));
        }
        let ea = Self::from_density(a)?;
        let eb = Self::from_density(b)?;
        let mut components = Vec::with_capacity(ea.components.len() * eb.components.len());
        for (wa, va) in &ea.components {
            for (wb, vb) in &eb.components {
                let mut v = DVector::zeros(layout.dim());
                for (i, &xa) in sa.iter().enumerate() {
                    if va[i].norm_sqr() == 0.0 {
                        continue;
                    }
                    for (j, &xb) in sb.iter().enumerate() {
                        v[xa | xb] = va[i] * vb[j];
                    }
                }
                components.push((wa * wb, v));
            }
        }
        Ok(Self { layout, components })
    }

    /// Quantized phase-normalized amplitudes, used to merge identical pure branches.
    /// Mixed ensembles have no fingerprint.
    pub(crate) fn fingerprint(&self) -> Option<Vec<i64>> {
        if !self.is_pure() {
            return None;
        }
        let v = &self.components[0].1;
        let pivot = v.iter().find(|a| a.norm_sqr() > 1e-6)?;
        let phase = pivot.conj() / C64::new(pivot.norm(), 0.0);
        let q = |x: f64| (x * 1e8).round() as i64;
        Some(
            v.iter()
                .flat_map(|a| {
                    let z = a * phase;
                    [q(z.re), q(z.im)]
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::layout::{Owner, Register};
    use crate::qcore::ops;

    fn layout(names: &[&str]) -> RegisterLayout {
        RegisterLayout::new(names.iter().map(|n| Register::new(*n, 1, Owner::Alice)).collect()).unwrap()
    }

    fn ghz() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = DVector::zeros(8);
        v[0] = C64::new(s, 0.0);
        v[7] = C64::new(s, 0.0);
        PureState::new(layout(&["A", "B", "C"]), v).unwrap()
    }

    #[test]
    fn measure_matches_dense_measurement() {
        let e = Ensemble::pure(ghz());
        let outs = e.measure("B").unwrap();
        let dense = ops::measure(&ghz().to_density(), "B").unwrap();
        assert_eq!(outs.len(), dense.len());
        for (o, d) in outs.iter().zip(&dense) {
            assert!((o.1 - d.probability).abs() < 1e-12);
            let reduced = ops::partial_trace(&d.post_state, &["A", "C"]).unwrap();
            assert!((o.2.density().matrix() - reduced.matrix()).camax() < 1e-12);
        }
    }

    #[test]
    fn decouple_ghz_and_entropy() {
        let e = Ensemble::pure(ghz());
        assert!(e.entropy(&["A", "B", "C"]).unwrap().abs() < 1e-12);
        assert!((e.entropy(&["B", "C"]).unwrap() - 1.0).abs() < 1e-12);
        let d = e.decouple(&["A"]).unwrap();
        let rho = d.density();
        let expected = ops::tensor(
            &DensityOperator::maximally_mixed(layout(&["A"])),
            &DensityOperator::diagonal(layout(&["B", "C"]), &[0.5, 0.0, 0.0, 0.5]).unwrap(),
        )
        .unwrap();
        assert!((rho.matrix() - expected.matrix()).camax() < 1e-12);
        let again = d.decouple(&["A"]).unwrap();
        assert!((again.density().matrix() - rho.matrix()).camax() < 1e-12);
    }

    #[test]
    fn fingerprint_ignores_global_phase() {
        let a = ghz();
        let (l, v) = a.clone().into_parts();
        let b = PureState::new(l, v * C64::new(0.0, 1.0)).unwrap();
        assert_eq!(Ensemble::pure(a).fingerprint(), Ensemble::pure(b).fingerprint());
    }
}
