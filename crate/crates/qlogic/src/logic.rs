//! Statements about observable values and their three-valued truth.
//!
//! A statement "K has value k" is the projector onto the eigenspace of k.
//! Its truth on a state is the projector expectation: one means true, zero
//! means false, anything strictly between means the statement carries no
//! classical truth value there. Compound statements stay inside one
//! eigenbasis, where disjunction is index-set union, negation is complement,
//! and conjunction is intersection.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{commutes, inner, ComplexMatrix, ObservableBasis, StateVector};
use crate::tol;

/// Classical classification of a projector expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Indeterminate,
}

/// Expectation of a statement's projector on a state, with its
/// classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthValue {
    pub truth: Truth,
    pub expectation: f64,
}

impl TruthValue {
    /// Classifies an expectation: true above `1 - tol::TRUTH_BAND`, false
    /// below `tol::TRUTH_BAND`, indeterminate between.
    pub fn classify(expectation: f64) -> Self {
        let truth = if expectation > 1.0 - tol::TRUTH_BAND {
            Truth::True
        } else if expectation < tol::TRUTH_BAND {
            Truth::False
        } else {
            Truth::Indeterminate
        };
        Self { truth, expectation }
    }

    pub fn is_indeterminate(&self) -> bool {
        self.truth == Truth::Indeterminate
    }
}

/// A statement "the observable has one of these eigenvalues", realized as
/// the projector onto the span of the matching eigenvectors.
///
/// The index set is empty only for the explicit contradiction, whose
/// projector is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    basis: ObservableBasis,
    indices: BTreeSet<usize>,
    projector: ComplexMatrix,
}

impl Statement {
    /// Statement that the observable's value is the one at eigenvector `l`.
    pub fn elementary(basis: &ObservableBasis, l: usize) -> Result<Self> {
        Self::from_indices(basis, BTreeSet::from([l]))
    }

    /// Statement that the observable's value equals `k`, pooling every
    /// index whose eigenvalue matches within `tol::ATOL`.
    pub fn by_eigenvalue(basis: &ObservableBasis, k: f64) -> Result<Self> {
        Self::from_indices(basis, basis.indices_for_eigenvalue(k)?)
    }

    /// Statement over an explicit nonempty set of eigenvector indices.
    pub fn from_indices(basis: &ObservableBasis, indices: BTreeSet<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyStatementList);
        }
        let projector = basis.projector(indices.iter().copied())?;
        Ok(Self { basis: basis.clone(), indices, projector })
    }

    /// The always-true statement on this basis.
    pub fn tautology(basis: &ObservableBasis) -> Self {
        let indices: BTreeSet<usize> = (0..basis.dim()).collect();
        let projector = basis.projector(indices.iter().copied()).expect("in range");
        Self { basis: basis.clone(), indices, projector }
    }

    /// The always-false statement on this basis: no indices, zero projector.
    pub fn contradiction(basis: &ObservableBasis) -> Self {
        Self {
            basis: basis.clone(),
            indices: BTreeSet::new(),
            projector: ComplexMatrix::zeros(basis.dim(), basis.dim()),
        }
    }

    /// Smallest statement on `basis` that is certainly true on `psi`: the
    /// indices whose amplitudes exceed `eps` in magnitude.
    pub fn support(psi: &StateVector, basis: &ObservableBasis, eps: f64) -> Result<Self> {
        if psi.dim() != basis.dim() {
            return Err(Error::DimensionMismatch { left: psi.dim(), right: basis.dim() });
        }
        let mut indices = BTreeSet::new();
        for l in 0..basis.dim() {
            if inner(basis.eigenvector(l), psi)?.norm() > eps {
                indices.insert(l);
            }
        }
        if indices.is_empty() {
            return Err(Error::ConsistencyCheck { context: "support of a unit state", delta: eps });
        }
        Self::from_indices(basis, indices)
    }

    /// Union of pairwise-disjoint statements on one shared basis.
    pub fn disjunction(parts: &[Statement]) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptyStatementList)?;
        let mut indices = BTreeSet::new();
        for part in parts {
            if part.basis != first.basis {
                return Err(Error::BasisMismatch);
            }
            if let Some(&index) = part.indices.intersection(&indices).next() {
                return Err(Error::OverlappingStatements { index });
            }
            indices.extend(part.indices.iter().copied());
        }
        let joined = Self::from_indices(&first.basis, indices)?;
        joined.verify_projector()?;
        Ok(joined)
    }

    /// Complement statement on the same basis. Negating a tautology yields
    /// the contradiction.
    pub fn negation(&self) -> Self {
        let indices: BTreeSet<usize> =
            (0..self.basis.dim()).filter(|l| !self.indices.contains(l)).collect();
        if indices.is_empty() {
            return Self::contradiction(&self.basis);
        }
        Self::from_indices(&self.basis, indices).expect("complement indices are in range")
    }

    /// Intersection of two statements on one shared basis. An empty
    /// intersection is the contradiction. Statements on different bases are
    /// rejected: when the reconstructed observables do not even commute the
    /// combination carries no truth value at all.
    pub fn conjunction(&self, other: &Statement) -> Result<Self> {
        if self.basis == other.basis {
            let indices: BTreeSet<usize> =
                self.indices.intersection(&other.indices).copied().collect();
            if indices.is_empty() {
                return Ok(Self::contradiction(&self.basis));
            }
            return Self::from_indices(&self.basis, indices);
        }
        if self.basis.dim() == other.basis.dim()
            && commutes(&self.basis.observable(), &other.basis.observable())?
        {
            return Err(Error::BasisMismatch);
        }
        Err(Error::NoncommutingObservables)
    }

    /// Projector expectation on `psi`, classified into the three truth
    /// values.
    pub fn truth_value(&self, psi: &StateVector) -> Result<TruthValue> {
        if psi.dim() != self.basis.dim() {
            return Err(Error::DimensionMismatch { left: psi.dim(), right: self.basis.dim() });
        }
        let mut expectation = Complex64::new(0.0, 0.0);
        for (a, b) in psi.amplitudes().iter().zip(self.projector.apply(psi)?) {
            expectation += a.conj() * b;
        }
        debug_assert!(expectation.im.abs() <= tol::EXPECT_ATOL);
        Ok(TruthValue::classify(expectation.re.clamp(0.0, 1.0)))
    }

    pub fn basis(&self) -> &ObservableBasis {
        &self.basis
    }

    pub fn indices(&self) -> &BTreeSet<usize> {
        &self.indices
    }

    pub fn projector(&self) -> &ComplexMatrix {
        &self.projector
    }

    pub fn is_contradiction(&self) -> bool {
        self.indices.is_empty()
    }

    /// Defensive numeric check that the stored projector is Hermitian and
    /// idempotent within `tol::ATOL`.
    fn verify_projector(&self) -> Result<()> {
        if !self.projector.is_hermitian(tol::ATOL) {
            return Err(Error::ConsistencyCheck { context: "projector hermiticity", delta: 0.0 });
        }
        let delta =
            self.projector.mul(&self.projector)?.sub(&self.projector)?.max_abs();
        if delta > tol::ATOL {
            return Err(Error::ConsistencyCheck { context: "projector idempotence", delta });
        }
        Ok(())
    }
}

/// True when `psi` spreads over more than one eigenvector of `basis` and
/// every elementary statement on its support is indeterminate, so no
/// single-eigenvalue claim about `psi` is either true or false.
pub fn indeterminacy_witness(
    psi: &StateVector,
    basis: &ObservableBasis,
    eps: f64,
) -> Result<bool> {
    let support = Statement::support(psi, basis, eps)?;
    if support.indices().len() < 2 {
        return Ok(false);
    }
    for &l in support.indices() {
        if !Statement::elementary(basis, l)?.truth_value(psi)?.is_indeterminate() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{gram_schmidt, qubit_basis};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag_entries(m: &ComplexMatrix) -> Vec<f64> {
        (0..m.rows()).map(|i| m[(i, i)].re).collect()
    }

    #[test]
    fn elementary_projects_onto_one_eigenvector() {
        let b = ObservableBasis::computational(3);
        let s = Statement::elementary(&b, 1).unwrap();
        assert_eq!(diag_entries(s.projector()), vec![0.0, 1.0, 0.0]);
        assert_eq!(s.projector().max_abs(), 1.0);
        let own = s.projector().apply(b.eigenvector(1)).unwrap();
        assert_abs_diff_eq!(own[1].re, 1.0, epsilon = 1e-15);
        let other = s.projector().apply(b.eigenvector(0)).unwrap();
        assert_abs_diff_eq!(other.iter().map(|z| z.norm()).sum::<f64>(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn elementary_rejects_out_of_range_index() {
        let b = ObservableBasis::computational(2);
        assert!(matches!(Statement::elementary(&b, 5), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn by_eigenvalue_pools_degenerate_indices() {
        let b = ObservableBasis::diagonal(vec![5.0, 5.0, 7.0]).unwrap();
        let s = Statement::by_eigenvalue(&b, 5.0).unwrap();
        assert_eq!(s.indices(), &BTreeSet::from([0, 1]));
        assert_eq!(diag_entries(s.projector()), vec![1.0, 1.0, 0.0]);
        assert!(matches!(Statement::by_eigenvalue(&b, 6.0), Err(Error::NoSuchEigenvalue { .. })));
    }

    #[test]
    fn disjunction_unions_disjoint_statements() {
        let b = ObservableBasis::computational(3);
        let s = Statement::disjunction(&[
            Statement::elementary(&b, 0).unwrap(),
            Statement::elementary(&b, 2).unwrap(),
        ])
        .unwrap();
        assert_eq!(s.indices(), &BTreeSet::from([0, 2]));
        assert_eq!(diag_entries(s.projector()), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn disjunction_rejects_overlap_and_mixed_bases() {
        let b = ObservableBasis::computational(3);
        let s01 = Statement::from_indices(&b, BTreeSet::from([0, 1])).unwrap();
        let s12 = Statement::from_indices(&b, BTreeSet::from([1, 2])).unwrap();
        assert!(matches!(
            Statement::disjunction(&[s01.clone(), s12]),
            Err(Error::OverlappingStatements { index: 1 })
        ));
        let other = ObservableBasis::diagonal(vec![9.0, 8.0, 7.0]).unwrap();
        let t = Statement::elementary(&other, 2).unwrap();
        assert!(matches!(Statement::disjunction(&[s01, t]), Err(Error::BasisMismatch)));
        assert!(matches!(Statement::disjunction(&[]), Err(Error::EmptyStatementList)));
    }

    #[test]
    fn negation_complements_indices() {
        let b = ObservableBasis::computational(3);
        let s = Statement::elementary(&b, 1).unwrap().negation();
        assert_eq!(s.indices(), &BTreeSet::from([0, 2]));
        assert_eq!(diag_entries(s.projector()), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn negation_of_tautology_is_zero_projector() {
        let b = ObservableBasis::computational(2);
        let s = Statement::tautology(&b).negation();
        assert!(s.is_contradiction());
        assert_eq!(s.projector().max_abs(), 0.0);
    }

    #[test]
    fn support_keeps_only_populated_indices() {
        let a = 1.0 / 2f64.sqrt();
        let psi = StateVector::new(vec![c(a, 0.0), c(0.0, 0.0), c(a, 0.0)]).unwrap();
        let b = ObservableBasis::computational(3);
        let s = Statement::support(&psi, &b, tol::SUPPORT_EPS).unwrap();
        assert_eq!(s.indices(), &BTreeSet::from([0, 2]));
        let residual: f64 = s
            .projector()
            .apply(&psi)
            .unwrap()
            .iter()
            .zip(psi.amplitudes())
            .map(|(got, want)| (got - want).norm())
            .fold(0.0, f64::max);
        assert!(residual <= tol::SUPPORT_EPS);

        let eigen = StateVector::basis_state(3, 1).unwrap();
        let s1 = Statement::support(&eigen, &b, tol::SUPPORT_EPS).unwrap();
        assert_eq!(s1.indices(), &BTreeSet::from([1]));
        assert_eq!(s1.truth_value(&eigen).unwrap().truth, Truth::True);
    }

    #[test]
    fn truth_values_cover_all_three_bands() {
        let b = ObservableBasis::computational(2);
        let s = Statement::elementary(&b, 0).unwrap();
        let zero = StateVector::basis_state(2, 0).unwrap();
        let one = StateVector::basis_state(2, 1).unwrap();
        let a = 1.0 / 2f64.sqrt();
        let plus = StateVector::new(vec![c(a, 0.0), c(a, 0.0)]).unwrap();

        let tv = s.truth_value(&zero).unwrap();
        assert_eq!(tv.truth, Truth::True);
        assert_abs_diff_eq!(tv.expectation, 1.0, epsilon = 1e-12);

        let fv = s.truth_value(&one).unwrap();
        assert_eq!(fv.truth, Truth::False);
        assert_abs_diff_eq!(fv.expectation, 0.0, epsilon = 1e-12);

        let iv = s.truth_value(&plus).unwrap();
        assert_eq!(iv.truth, Truth::Indeterminate);
        assert_abs_diff_eq!(iv.expectation, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn support_statement_is_true_on_its_state() {
        let psi = StateVector::normalized(vec![c(0.6, 0.1), c(0.0, 0.0), c(-0.7, 0.3)]).unwrap();
        let b = ObservableBasis::computational(3);
        let s = Statement::support(&psi, &b, tol::SUPPORT_EPS).unwrap();
        assert_eq!(s.truth_value(&psi).unwrap().truth, Truth::True);
    }

    #[test]
    fn conjunction_intersects_on_one_basis() {
        let b = ObservableBasis::computational(3);
        let s01 = Statement::from_indices(&b, BTreeSet::from([0, 1])).unwrap();
        let s12 = Statement::from_indices(&b, BTreeSet::from([1, 2])).unwrap();
        let both = s01.conjunction(&s12).unwrap();
        assert_eq!(both.indices(), &BTreeSet::from([1]));

        let s0 = Statement::elementary(&b, 0).unwrap();
        let s2 = Statement::elementary(&b, 2).unwrap();
        assert!(s0.conjunction(&s2).unwrap().is_contradiction());
    }

    #[test]
    fn conjunction_across_bases_is_rejected() {
        let comp = ObservableBasis::computational(2);
        let rotated = qubit_basis(0.3);
        let a = Statement::elementary(&comp, 0).unwrap();
        let b = Statement::elementary(&rotated, 0).unwrap();
        assert!(matches!(a.conjunction(&b), Err(Error::NoncommutingObservables)));

        let relabeled = ObservableBasis::diagonal(vec![3.0, 4.0]).unwrap();
        let r = Statement::elementary(&relabeled, 0).unwrap();
        assert!(matches!(a.conjunction(&r), Err(Error::BasisMismatch)));
    }

    #[test]
    fn witness_requires_a_genuine_superposition() {
        let b = ObservableBasis::computational(2);
        let a = 1.0 / 2f64.sqrt();
        let plus = StateVector::new(vec![c(a, 0.0), c(a, 0.0)]).unwrap();
        assert!(indeterminacy_witness(&plus, &b, tol::SUPPORT_EPS).unwrap());

        let zero = StateVector::basis_state(2, 0).unwrap();
        assert!(!indeterminacy_witness(&zero, &b, tol::SUPPORT_EPS).unwrap());

        let lopsided =
            StateVector::new(vec![c(0.99f64.sqrt(), 0.0), c(0.01f64.sqrt(), 0.0)]).unwrap();
        assert!(indeterminacy_witness(&lopsided, &b, tol::SUPPORT_EPS).unwrap());
    }

    fn random_pair_strategy() -> impl Strategy<Value = (StateVector, ObservableBasis)> {
        (2usize..=5)
            .prop_flat_map(|dim| {
                (
                    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim),
                    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim),
                )
            })
            .prop_filter_map("degenerate draw", |(state_parts, basis_parts)| {
                let amps: Vec<Complex64> =
                    state_parts.into_iter().map(|(re, im)| c(re, im)).collect();
                let dim = amps.len();
                let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
                if norm_sq < 1e-3 {
                    return None;
                }
                let psi = StateVector::normalized(amps).ok()?;
                let columns: Vec<Vec<Complex64>> = basis_parts
                    .chunks(dim)
                    .map(|row| row.iter().map(|&(re, im)| c(re, im)).collect())
                    .collect();
                let vectors = gram_schmidt(&columns).ok()?;
                let basis =
                    ObservableBasis::new(vectors, (0..dim).map(|i| i as f64).collect()).ok()?;
                Some((psi, basis))
            })
    }

    proptest! {
        #[test]
        fn elementary_expectations_partition_unity((psi, basis) in random_pair_strategy()) {
            let total: f64 = (0..basis.dim())
                .map(|l| {
                    Statement::elementary(&basis, l)
                        .unwrap()
                        .truth_value(&psi)
                        .unwrap()
                        .expectation
                })
                .sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
        }

        #[test]
        fn tautology_is_true_everywhere((psi, basis) in random_pair_strategy()) {
            let tv = Statement::tautology(&basis).truth_value(&psi).unwrap();
            prop_assert_eq!(tv.truth, Truth::True);
        }

        #[test]
        fn disjoint_statements_have_orthogonal_projectors((_, basis) in random_pair_strategy()) {
            let half = basis.dim() / 2;
            let a = Statement::from_indices(&basis, (0..half.max(1)).collect()).unwrap();
            let rest: BTreeSet<usize> = (half.max(1)..basis.dim()).collect();
            if rest.is_empty() {
                return Ok(());
            }
            let b = Statement::from_indices(&basis, rest).unwrap();
            let product = a.projector().mul(b.projector()).unwrap();
            prop_assert!(product.max_abs() <= tol::ATOL);
        }

        #[test]
        fn support_is_minimal((psi, basis) in random_pair_strategy()) {
            let support = Statement::support(&psi, &basis, tol::SUPPORT_EPS).unwrap();
            prop_assert_eq!(support.truth_value(&psi).unwrap().truth, Truth::True);
            for &drop in support.indices() {
                let smaller: BTreeSet<usize> =
                    support.indices().iter().copied().filter(|&l| l != drop).collect();
                if smaller.is_empty() {
                    continue;
                }
                let s = Statement::from_indices(&basis, smaller).unwrap();
                let residual: f64 = s
                    .projector()
                    .apply(&psi)
                    .unwrap()
                    .iter()
                    .zip(psi.amplitudes())
                    .map(|(got, want)| (got - want).norm())
                    .fold(0.0, f64::max);
                prop_assert!(residual > tol::SUPPORT_EPS);
            }
        }

        #[test]
        fn negation_matches_disjunction_of_the_rest((_, basis) in random_pair_strategy()) {
            for l in 0..basis.dim() {
                let neg = Statement::elementary(&basis, l).unwrap().negation();
                let rest: Vec<Statement> = (0..basis.dim())
                    .filter(|&m| m != l)
                    .map(|m| Statement::elementary(&basis, m).unwrap())
                    .collect();
                let dis = Statement::disjunction(&rest).unwrap();
                prop_assert_eq!(neg.indices(), dis.indices());
                let delta = neg.projector().sub(dis.projector()).unwrap().max_abs();
                prop_assert!(delta <= tol::ATOL);
            }
        }
    }
}
