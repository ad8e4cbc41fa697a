use muprecode::channel::{augment, draw_user_pool, select_users, ChannelMatrix, UserPool};
use muprecode::numerics::ComplexMatrix;
use muprecode::rng::stream_from_seed;
use num_complex::Complex64;
use rand::seq::SliceRandom;

/// Determinant by Gaussian elimination with partial pivoting, kept separate
/// from the crate's solvers.
#[allow(clippy::needless_range_loop)]
fn determinant(m: &ComplexMatrix) -> Complex64 {
    let n = m.rows();
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|r| m.row(r).to_vec()).collect();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm()))
            .unwrap();
        if a[p][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            for c in k..n {
                let v = a[k][c];
                a[r][c] -= f * v;
            }
        }
    }
    det
}

#[test]
fn fading_entries_have_unit_variance() {
    let pool = draw_user_pool(&mut stream_from_seed(2024), 12_500, 8);
    let entries = pool.matrix().as_slice();
    let n = entries.len() as f64;
    assert_eq!(entries.len(), 100_000);

    let mean: Complex64 = entries.iter().sum::<Complex64>() / n;
    let power: Vec<f64> = entries.iter().map(|z| z.norm_sqr()).collect();
    let var = power.iter().sum::<f64>() / n;
    let var_se = (power.iter().map(|p| (p - var).powi(2)).sum::<f64>() / n).sqrt() / n.sqrt();
    assert!((var - 1.0).abs() < 3.0 * var_se, "variance {var}, se {var_se}");
    assert!((0.98..=1.02).contains(&var));
    // |mean|² is exponential with mean 1/n; 9/n is exceeded with probability e^-9.
    assert!(mean.norm() < 3.0 / n.sqrt());

    for part in [|z: &Complex64| z.re, |z: &Complex64| z.im] {
        let sq: Vec<f64> = entries.iter().map(|z| part(z).powi(2)).collect();
        let v = sq.iter().sum::<f64>() / n;
        let se = (sq.iter().map(|s| (s - v).powi(2)).sum::<f64>() / n).sqrt() / n.sqrt();
        assert!((v - 0.5).abs() < 3.0 * se, "component variance {v}, se {se}");
    }
}

#[test]
fn selection_is_permutation_stable() {
    let mut rng = stream_from_seed(5);
    for trial in 0..20 {
        let pool = draw_user_pool(&mut rng, 20, 8);
        let picked = select_users(&pool, 8).unwrap();

        let mut order: Vec<usize> = (0..20).collect();
        order.shuffle(&mut rng);
        let shuffled = UserPool::from_matrix(pool.matrix().select_rows(&order).unwrap());
        let repicked = select_users(&shuffled, 8).unwrap();

        let key = |ch: &ChannelMatrix| {
            let mut rows: Vec<Vec<(u64, u64)>> = (0..ch.num_active_users())
                .map(|r| {
                    ch.matrix()
                        .row(r)
                        .iter()
                        .map(|z| (z.re.to_bits(), z.im.to_bits()))
                        .collect()
                })
                .collect();
            rows.sort();
            rows
        };
        assert_eq!(key(&picked), key(&repicked), "trial {trial}");
    }
}

#[test]
fn augmented_gram_adds_u_squared() {
    let mut rng = stream_from_seed(6);
    for &u in &[0.25, 1.0, 3.0] {
        let ch = select_users(&draw_user_pool(&mut rng, 20, 8), 8).unwrap();
        let hu = augment(&ch, u).unwrap();
        let h = ch.matrix();
        let gram_u = hu.matrix().hermitian().matmul(hu.matrix()).unwrap();
        let expected = h.hermitian().matmul(h).unwrap().add_scaled_identity(u * u).unwrap();
        assert!(gram_u.max_abs_diff(&expected).unwrap() < 1e-12);
    }
}

#[test]
fn augmentation_gives_full_column_rank() {
    // Rank-deficient H (two equal rows, one zero row) becomes full column rank.
    let h = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 0.0], &[1.0, 2.0, 0.0], &[0.0, 0.0, 0.0]]).unwrap();
    let ch = ChannelMatrix::from_matrix(h);
    let gram = |u: f64| {
        let hu = augment(&ch, u).unwrap();
        determinant(&hu.matrix().hermitian().matmul(hu.matrix()).unwrap())
    };
    assert!(gram(0.0).norm() < 1e-12);
    for u in [1e-3, 0.5, 1.0, 4.0] {
        let d = gram(u);
        assert!(d.re > 0.0 && d.im.abs() < 1e-9 * d.re, "u = {u}: det {d}");
    }
    assert_eq!(augment(&ch, 2.0).unwrap().matrix().shape(), (6, 3));
}
