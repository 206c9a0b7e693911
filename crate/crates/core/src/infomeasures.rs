//! Entropies, mutual information, distances and checkable inequalities. All logarithms are base 2.

use serde::{Deserialize, Serialize};

use crate::cq::{CqState, Distribution};
use crate::error::{Error, Result};
use crate::qcore::linalg::trace_norm_hermitian;
use crate::qcore::{partial_trace, tensor, DensityOperator};
use crate::tol;

/// Outcome of checking `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

impl InequalityReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            lhs,
            rhs,
            slack,
            holds: slack >= -tol::INEQUALITY,
        }
    }
}

/// Both sides of `|H(A) − H(B)| ≤ H(AB) ≤ H(A) + H(B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArakiLiebReport {
    pub lower: InequalityReport,
    pub upper: InequalityReport,
}

impl ArakiLiebReport {
    pub fn holds(&self) -> bool {
        self.lower.holds && self.upper.holds
    }
}

/// `−Σ λ log₂ λ` over the spectrum of a normalized operator.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > tol::EIGEN_ZERO)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy in bits; the operator is normalized first.
pub fn entropy(rho: &DensityOperator) -> f64 {
    let tr = rho.trace();
    let vals: Vec<f64> = rho.eigenvalues().iter().map(|v| v / tr).collect();
    entropy_of_spectrum(&vals)
}

fn union<'a, S: AsRef<str>>(layout: &crate::qcore::RegisterLayout, parts: &[&'a [S]]) -> Result<Vec<&'a str>> {
    let names: Vec<&str> = parts.iter().flat_map(|p| p.iter().map(|s| s.as_ref())).collect();
    layout.positions(&names)?;
    Ok(names)
}

fn h_of(rho: &DensityOperator, names: &[&str]) -> Result<f64> {
    if names.is_empty() {
        return Ok(0.0);
    }
    Ok(entropy(&partial_trace(rho, names)?))
}

/// `H(X|Y) = H(XY) − H(Y)`; may be negative.
pub fn conditional_entropy<S: AsRef<str>>(rho: &DensityOperator, x: &[S], y: &[S]) -> Result<f64> {
    let xy = union(rho.layout(), &[x, y])?;
    let ys: Vec<&str> = y.iter().map(|s| s.as_ref()).collect();
    Ok(h_of(rho, &xy)? - h_of(rho, &ys)?)
}

pub fn mutual_information<S: AsRef<str>>(rho: &DensityOperator, x: &[S], y: &[S]) -> Result<f64> {
    cmi(rho, x, y, &[] as &[S])
}

/// `I(X;Y|Z) = H(XZ) + H(YZ) − H(Z) − H(XYZ)`.
pub fn cmi<S: AsRef<str>>(rho: &DensityOperator, x: &[S], y: &[S], z: &[S]) -> Result<f64> {
    let xyz = union(rho.layout(), &[x, y, z])?;
    let xz = union(rho.layout(), &[x, z])?;
    let yz = union(rho.layout(), &[y, z])?;
    let zs: Vec<&str> = z.iter().map(|s| s.as_ref()).collect();
    Ok(h_of(rho, &xz)? + h_of(rho, &yz)? - h_of(rho, &zs)? - h_of(rho, &xyz)?)
}

/// `I(X;Y|T) = Σ_τ p_τ I(X;Y)_{ρ_τ}` for the transcript register `T` of a cq state.
pub fn cq_cmi<S: AsRef<str>>(s: &CqState, x: &[S], y: &[S]) -> Result<f64> {
    let xy = union(s.layout(), &[x, y])?;
    let mut total = 0.0;
    for b in s.branches() {
        total += b.weight * (b.state.entropy(x)? + b.state.entropy(y)? - b.state.entropy(&xy)?);
    }
    Ok(total)
}

/// `H(X|T) = Σ_τ p_τ H(X)_{ρ_τ}`.
pub fn cq_conditional_entropy<S: AsRef<str>>(s: &CqState, x: &[S]) -> Result<f64> {
    let mut total = 0.0;
    for b in s.branches() {
        total += b.weight * b.state.entropy(x)?;
    }
    Ok(total)
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.layout() != sigma.layout() {
        return Err(Error::LayoutMismatch(format!(
            "{:?} vs {:?}",
            rho.layout().names(),
            sigma.layout().names()
        )));
    }
    Ok(0.5 * trace_norm_hermitian(&(rho.matrix() - sigma.matrix())))
}

/// `½ Σ |p − q|`; keys missing on one side count as probability zero there.
pub fn statistical_distance(p: &Distribution, q: &Distribution) -> f64 {
    let mut total = 0.0;
    for (k, a) in p {
        total += (a - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, b) in q {
        if !p.contains_key(k) {
            total += b.abs();
        }
    }
    0.5 * total
}

/// `‖ρ_XY − ρ_X ⊗ ρ_Y‖₁ ≤ √((2/ln 2) I(X;Y))`.
pub fn pinsker_check<S: AsRef<str>>(rho: &DensityOperator, x: &[S], y: &[S]) -> Result<InequalityReport> {
    let xy = union(rho.layout(), &[x, y])?;
    let joint = partial_trace(rho, &xy)?;
    let rx = partial_trace(rho, x)?;
    let ry = partial_trace(rho, y)?;
    let prod = tensor(&rx, &ry)?;
    // the product's layout is X ++ Y; bring the joint into the same order
    let joint = reorder(&joint, prod.layout())?;
    let lhs = trace_norm_hermitian(&(joint.matrix() - prod.matrix()));
    let info = mutual_information(rho, x, y)?.max(0.0);
    let rhs = (2.0 / std::f64::consts::LN_2 * info).sqrt();
    Ok(InequalityReport::new(lhs, rhs))
}

/// Araki–Lieb on the bipartition (A, B).
pub fn araki_lieb_check<S: AsRef<str>>(rho: &DensityOperator, a: &[S], b: &[S]) -> Result<ArakiLiebReport> {
    let ab = union(rho.layout(), &[a, b])?;
    let ha = h_of(rho, &a.iter().map(|s| s.as_ref()).collect::<Vec<_>>())?;
    let hb = h_of(rho, &b.iter().map(|s| s.as_ref()).collect::<Vec<_>>())?;
    let hab = h_of(rho, &ab)?;
    Ok(ArakiLiebReport {
        lower: InequalityReport::new((ha - hb).abs(), hab),
        upper: InequalityReport::new(hab, ha + hb),
    })
}

/// Permutes the registers of `rho` into the order of `target`.
fn reorder(rho: &DensityOperator, target: &crate::qcore::RegisterLayout) -> Result<DensityOperator> {
    if rho.layout() == target {
        return Ok(rho.clone());
    }
    let src = rho.layout();
    let names = target.names();
    let pos = src.positions(&names)?;
    if pos.len() != src.registers().len() {
        return Err(Error::LayoutMismatch("reorder needs the same register set".into()));
    }
    let sel = src.selection(&pos);
    let perm: Vec<usize> = (0..src.dim()).map(|x| sel.extract(x)).collect();
    let d = src.dim();
    let mut m = nalgebra::DMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            m[(perm[a], perm[b])] = rho.matrix()[(a, b)];
        }
    }
    DensityOperator::new(target.clone(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cq::Transcript;
    use crate::qcore::linalg::haar_unitary;
    use crate::qcore::{apply_isometry, Isometry, Owner, PureState, Register, RegisterLayout};
    use nalgebra::DVector;
    use num_complex::Complex64 as C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn layout(names: &[&str]) -> RegisterLayout {
        RegisterLayout::new(names.iter().map(|n| Register::new(*n, 1, Owner::Alice)).collect()).unwrap()
    }

    fn ket(names: &[&str], amps: &[f64]) -> DensityOperator {
        let v = DVector::from_iterator(amps.len(), amps.iter().map(|&a| C64::new(a, 0.0)));
        PureState::normalized(layout(names), v).unwrap().to_density()
    }

    fn bell() -> DensityOperator {
        ket(&["X", "Y"], &[1.0, 0.0, 0.0, 1.0])
    }

    /// Random mixed state: a Haar vector on `names` plus `env` traced-out qubits.
    fn random_state(rng: &mut ChaCha8Rng, names: &[&str], env: usize) -> DensityOperator {
        let mut all: Vec<Register> = names.iter().map(|n| Register::new(*n, 1, Owner::Alice)).collect();
        if env > 0 {
            all.push(Register::new("E", env, Owner::Environment));
        }
        let l = RegisterLayout::new(all).unwrap();
        let v = haar_unitary(l.dim(), rng).column(0).into_owned();
        let psi = PureState::new(l, v).unwrap().to_density();
        partial_trace(&psi, names).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert!(entropy(&ket(&["A"], &[1.0, 1.0])).abs() < 1e-12);
        assert!((entropy(&DensityOperator::maximally_mixed(layout(&["A"]))) - 1.0).abs() < 1e-12);
        let skew = DensityOperator::diagonal(layout(&["A"]), &[0.75, 0.25]).unwrap();
        let expected = -0.75 * 0.75f64.log2() - 0.25 * 0.25f64.log2();
        assert!((entropy(&skew) - expected).abs() < 1e-12);
        assert!((entropy(&skew) - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn conditional_entropy_examples() {
        assert!((conditional_entropy(&bell(), &["X"], &["Y"]).unwrap() + 1.0).abs() < 1e-12);
        let skew = DensityOperator::diagonal(layout(&["X"]), &[0.75, 0.25]).unwrap();
        let prod = tensor(&skew, &ket(&["Y"], &[1.0, 2.0])).unwrap();
        assert!((conditional_entropy(&prod, &["X"], &["Y"]).unwrap() - entropy(&skew)).abs() < 1e-12);
        let classical = DensityOperator::diagonal(layout(&["X", "Y"]), &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(conditional_entropy(&classical, &["X"], &["Y"]).unwrap().abs() < 1e-12);
        assert!(matches!(
            conditional_entropy(&bell(), &["X"], &["X"]),
            Err(Error::Overlap(_))
        ));
    }

    #[test]
    fn cmi_examples() {
        let xz = ket(&["X", "Z"], &[1.0, 0.0, 0.0, 1.0]);
        let prod = tensor(&xz, &ket(&["Y"], &[1.0, 2.0])).unwrap();
        assert!(cmi(&prod, &["X"], &["Y"], &["Z"]).unwrap().abs() < 1e-12);
        let ghz = ket(&["X", "Y", "Z"], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((cmi(&ghz, &["X"], &["Y"], &["Z"]).unwrap() - 1.0).abs() < 1e-12);
        assert!((mutual_information(&bell(), &["X"], &["Y"]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cq_cmi_examples() {
        let l = layout(&["X", "Y"]);
        let prod = tensor(&ket(&["X"], &[1.0, 1.0]), &ket(&["Y"], &[1.0, 0.0])).unwrap();
        let products = CqState::from_operators(
            l.clone(),
            vec![
                (Transcript::alternating(&["0"]), prod.scaled(0.5)),
                (Transcript::alternating(&["1"]), prod.scaled(0.5)),
            ],
        )
        .unwrap();
        assert!(cq_cmi(&products, &["X"], &["Y"]).unwrap().abs() < 1e-12);
        let single = CqState::from_operators(l.clone(), vec![(Transcript::new(), bell())]).unwrap();
        assert!((cq_cmi(&single, &["X"], &["Y"]).unwrap() - 2.0).abs() < 1e-12);
        let mixed = CqState::from_operators(
            l,
            vec![
                (Transcript::alternating(&["0"]), bell().scaled(0.5)),
                (Transcript::alternating(&["1"]), prod.scaled(0.5)),
            ],
        )
        .unwrap();
        assert!((cq_cmi(&mixed, &["X"], &["Y"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cq_cmi_matches_dephased_cmi() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let l = layout(&["X", "Y"]);
            let branches = (0..2)
                .map(|i| {
                    let rho = random_state(&mut rng, &["X", "Y"], 1).scaled(0.5);
                    (Transcript::alternating(&[if i == 0 { "0" } else { "1" }]), rho)
                })
                .collect();
            let s = CqState::from_operators(l, branches).unwrap();
            let d = s.dephase_average().unwrap();
            let a = cq_cmi(&s, &["X"], &["Y"]).unwrap();
            let b = cmi(&d, &["X"], &["Y"], &["T"]).unwrap();
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn distance_examples() {
        let zero = ket(&["A"], &[1.0, 0.0]);
        let one = ket(&["A"], &[0.0, 1.0]);
        let plus = ket(&["A"], &[1.0, 1.0]);
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        assert!((trace_distance(&zero, &plus).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(trace_distance(&zero, &bell()), Err(Error::LayoutMismatch(_))));

        let d = |pairs: &[(&str, f64)]| -> Distribution { pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect() };
        let p = d(&[("0", 0.5), ("1", 0.5)]);
        assert_eq!(statistical_distance(&p, &p), 0.0);
        assert_eq!(statistical_distance(&d(&[("0", 1.0)]), &d(&[("1", 1.0)])), 1.0);
        assert!((statistical_distance(&p, &d(&[("0", 0.75), ("1", 0.25)])) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pinsker_examples() {
        let prod = tensor(&ket(&["X"], &[1.0, 1.0]), &ket(&["Y"], &[1.0, 0.0])).unwrap();
        let r = pinsker_check(&prod, &["X"], &["Y"]).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-6 && r.holds);
        let r = pinsker_check(&bell(), &["X"], &["Y"]).unwrap();
        assert!((r.lhs - 1.5).abs() < 1e-12);
        assert!((r.rhs - (4.0 / std::f64::consts::LN_2).sqrt()).abs() < 1e-12);
        assert!((r.rhs - 2.402).abs() < 1e-3);
        // reversed order exercises the register permutation
        let r2 = pinsker_check(&bell(), &["Y"], &["X"]).unwrap();
        assert!((r2.lhs - 1.5).abs() < 1e-12);
    }

    #[test]
    fn araki_lieb_examples() {
        let r = araki_lieb_check(&bell(), &["X"], &["Y"]).unwrap();
        assert!(r.lower.slack.abs() < 1e-12);
        assert!((r.upper.slack - 2.0).abs() < 1e-12);
        let prod = tensor(&ket(&["X"], &[1.0, 1.0]), &ket(&["Y"], &[1.0, 0.0])).unwrap();
        let r = araki_lieb_check(&prod, &["X"], &["Y"]).unwrap();
        assert!(r.lower.lhs.abs() < 1e-12 && r.upper.rhs.abs() < 1e-12 && r.holds());
    }

    #[test]
    fn random_inequalities_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for i in 0..500 {
            let rho = random_state(&mut rng, &["X", "Y"], i % 3);
            assert!(pinsker_check(&rho, &["X"], &["Y"]).unwrap().holds);
            let tri = random_state(&mut rng, &["A", "B", "C"], i % 2);
            assert!(araki_lieb_check(&tri, &["A"], &["B", "C"]).unwrap().holds());
            assert!(araki_lieb_check(&tri, &["C"], &["A"]).unwrap().holds());
            assert!(cmi(&tri, &["A"], &["B"], &["C"]).unwrap() > -1e-8);
        }
    }

    #[test]
    fn entropy_unitarily_invariant_and_data_processing() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let l = layout(&["X", "Y"]);
        let regs = l.registers().to_vec();
        for _ in 0..100 {
            let rho = random_state(&mut rng, &["X", "Y"], 1);
            let sigma = random_state(&mut rng, &["X", "Y"], 2);
            let u = Isometry::unitary(regs.clone(), haar_unitary(4, &mut rng)).unwrap();
            let urho = apply_isometry(&rho, &u).unwrap();
            assert!((entropy(&urho) - entropy(&rho)).abs() < 1e-9);
            let full = trace_distance(&rho, &sigma).unwrap();
            let part = trace_distance(&partial_trace(&rho, &["X"]).unwrap(), &partial_trace(&sigma, &["X"]).unwrap())
                .unwrap();
            assert!(part <= full + 1e-9);
        }
    }
}
