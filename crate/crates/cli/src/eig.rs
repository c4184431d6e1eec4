//! Small dense Hermitian eigensolver (cyclic complex Jacobi). Good enough
//! for the `spectrum` and `hamiltonian` subcommands, which are guarded to
//! modest dimensions.

use num_complex::Complex64;

/// Eigenvalues of a Hermitian matrix given by columns, ascending.
pub fn eigh(cols: &[Vec<Complex64>]) -> Vec<f64> {
    let n = cols.len();
    let mut a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| cols[j][i]).collect())
        .collect();
    // symmetrize against rounding
    for i in 0..n {
        for j in 0..n {
            let avg = 0.5 * (a[i][j] + a[j][i].conj());
            a[i][j] = avg;
        }
    }
    let off = |a: &Vec<Vec<Complex64>>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    for _sweep in 0..60 {
        if off(&a) < 1e-13 * (1.0 + a.iter().enumerate().map(|(i, r)| r[i].norm()).fold(0.0, f64::max)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq.norm() < 1e-300 {
                    continue;
                }
                // unitary 2x2 rotation diagonalizing the (p,q) block:
                // phase out apq, then a real Jacobi rotation
                let phase = apq / apq.norm();
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                let theta = 0.5 * (2.0 * apq.norm()).atan2(aqq - app);
                let (c, s) = (theta.cos(), theta.sin());
                // columns update: v_p' = c v_p - s conj(phase) v_q ; v_q' = s phase v_p + c v_q
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * phase.conj() * aiq;
                    a[i][q] = s * phase * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[p][j];
                    let aqj = a[q][j];
                    a[p][j] = c * apj - s * phase * aqj;
                    a[q][j] = s * phase.conj() * apj + c * aqj;
                }
            }
        }
    }
    let mut evs: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    evs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    evs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizes_small_hermitian() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let cols = vec![
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, -1.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)],
        ];
        let evs = eigh(&cols);
        assert!((evs[0] - 1.0).abs() < 1e-10);
        assert!((evs[1] - 3.0).abs() < 1e-10);
    }
}
