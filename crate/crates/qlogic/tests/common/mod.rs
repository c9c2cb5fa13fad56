//! Seeded random states, bases, and bipartite states shared by the
//! integration suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qlogic::eprb::BipartiteState;
use qlogic::hilbert::{gram_schmidt, ComplexMatrix};
use qlogic::{ObservableBasis, StateVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            let scaled = amps.iter().map(|z| z / norm).collect();
            return StateVector::new(scaled).expect("scaled vector is unit");
        }
    }
}

/// Random orthonormal basis with eigenvalues `0..dim`.
pub fn random_basis(rng: &mut ChaCha8Rng, dim: usize) -> ObservableBasis {
    loop {
        let rows: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        if let Ok(vectors) = gram_schmidt(&rows) {
            let eigenvalues = (0..dim).map(|k| k as f64).collect();
            return ObservableBasis::new(vectors, eigenvalues).expect("orthonormalized basis");
        }
    }
}

pub fn random_bipartite(rng: &mut ChaCha8Rng, d1: usize, d2: usize) -> BipartiteState {
    let flat = random_unit(rng, d1 * d2);
    let rows: Vec<Vec<Complex64>> = (0..d1)
        .map(|i| (0..d2).map(|j| flat.amplitudes()[i * d2 + j]).collect())
        .collect();
    let amplitudes = ComplexMatrix::from_rows(rows).expect("rectangular rows");
    BipartiteState::new(amplitudes, random_basis(rng, d1), random_basis(rng, d2))
        .expect("unit amplitude matrix")
}
