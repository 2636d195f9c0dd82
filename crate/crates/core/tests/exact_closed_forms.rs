use clonemacro::macromeasures::{certify_max_local_variance, covariance_matrix, VarianceMethod};
use clonemacro::symcore::{cloner_state, micro_macro_branch, micro_macro_state, Branch, Sign};
use clonemacro::Rational;

fn q(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

#[test]
fn maximal_local_variances_for_all_odd_sizes() {
    for n in (1..=101i64).step_by(2) {
        let m = n as usize;
        let psi = certify_max_local_variance(&micro_macro_state::<Rational>(m).unwrap()).unwrap();
        assert_eq!(psi.variance, q((n + 1) * (n + 1), 2) + q(n + 1, 1), "N={n}");
        assert_eq!(psi.method, VarianceMethod::TightRelaxation);
        for branch in [Branch::Zero, Branch::One] {
            let phi = certify_max_local_variance(&micro_macro_branch::<Rational>(m, branch).unwrap()).unwrap();
            assert_eq!(phi.variance, q((n + 1) * (n + 1), 2), "N={n} {branch:?}");
            assert_eq!(phi.method, VarianceMethod::ProductAdditivity);
        }
    }
}

#[test]
fn cloner_moments() {
    for n in (1..=61i64).step_by(2) {
        for sign in [Sign::Plus, Sign::Minus] {
            let c = covariance_matrix(&cloner_state::<Rational>(n as usize, sign).unwrap()).unwrap();
            assert_eq!(c.get(0, 0), &q(n * n + 2 * n - 3, 4), "N={n}");
            assert_eq!(c.get(1, 1), &q(n * n + 2 * n - 1, 2), "N={n}");
            assert_eq!(c.get(2, 2), &q(1, 1), "N={n}");
        }
    }
}
