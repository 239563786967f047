use eightrank::arith::{is_square, isqrt, omega};
use eightrank::classgroup::{is_fundamental, narrow_class_group, rank_profile, ClassGroup};
use eightrank::symbols::jacobi;

fn kronecker(d: i64, n: u64) -> i64 {
    let mut n = n;
    let mut acc = 1;
    while n.is_multiple_of(2) {
        n /= 2;
        acc *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    acc * jacobi(d, n).value()
}

#[test]
fn dirichlet_class_number_formula() {
    for d in (-5000i64..=-7).filter(|&d| is_fundamental(d)) {
        let n = d.unsigned_abs();
        let s: i64 = (1..n).map(|k| kronecker(d, k) * k as i64).sum();
        let h = -s / n as i64;
        assert_eq!(narrow_class_group(d).unwrap().order as i64, h, "D={d}");
    }
}

/// Smallest solution of `t² − D u² = ±4`, returned as `(log ε, norm sign)`.
fn fundamental_unit(d: u64) -> Option<(f64, i64)> {
    for u in 1u64..2_000_000 {
        let du2 = d as u128 * u as u128 * u as u128;
        for (sign, t2) in [(-1i64, du2.checked_sub(4)), (1, Some(du2 + 4))] {
            let t2 = t2?;
            if t2 <= u64::MAX as u128 && is_square(t2 as u64) {
                let t = isqrt(t2 as u64) as f64;
                return Some((((t + u as f64 * (d as f64).sqrt()) / 2.0).ln(), sign));
            }
        }
    }
    None
}

#[test]
fn real_class_number_formula() {
    for d in (5i64..=600).filter(|&d| is_fundamental(d)) {
        let Some((reg, norm)) = fundamental_unit(d as u64) else { continue };
        let s: f64 = (1..d as u64)
            .map(|k| {
                kronecker(d, k) as f64 * (std::f64::consts::PI * k as f64 / d as f64).sin().ln()
            })
            .sum();
        let h = (-0.5 * s / reg).round() as u64;
        let h_plus = if norm == -1 { h } else { 2 * h };
        assert_eq!(narrow_class_group(d).unwrap().order, h_plus, "D={d}");
    }
}

#[test]
fn genus_theory_everywhere() {
    for d in (-20_000i64..=20_000).filter(|&d| is_fundamental(d)) {
        let rp = rank_profile(d).unwrap();
        assert_eq!(rp.rk2 as usize, omega(d.unsigned_abs()) - 1, "D={d}");
        assert!(rp.rk2 >= rp.rk4 && rp.rk4 >= rp.rk8);
    }
}

#[test]
fn definite_group_axioms_on_full_tables() {
    for d in [-6052i64, -25988, -4 * 41 * 73, -8 * 17 * 41, -99_995] {
        if !is_fundamental(d) {
            continue;
        }
        let g = ClassGroup::new(d);
        let n = g.order();
        for i in 0..n {
            assert_eq!(g.compose(i, g.identity()), i);
            assert_eq!(g.compose(i, g.inverse(i)), g.identity());
        }
        for i in (0..n).step_by(3) {
            for j in (0..n).step_by(5) {
                for k in (0..n).step_by(7) {
                    let l = g.compose(g.compose(i, j), k);
                    assert_eq!(l, g.compose(i, g.compose(j, k)), "D={d}");
                }
            }
        }
    }
}
