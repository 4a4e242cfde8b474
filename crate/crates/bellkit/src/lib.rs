//! Probability-model toolkit for the CHSH test.

pub mod chsh;
pub mod jointness;
pub mod prob;
pub mod qlogic;
pub mod quantum;
pub mod sim;
pub mod simplex;

#[cfg(test)]
mod eigen_probe {
    use nalgebra::{Complex, DMatrix};

    #[test]
    fn symmetric_eigen_handles_complex_hermitian() {
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[one * 2.0, i, -i, one * 2.0]);
        let eig = m.symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
    }
}
