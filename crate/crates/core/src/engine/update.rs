//! The three multiplicative update rules. Each rescales a parameter entry by
//! a ratio of non-negative terms, with `eps` added to every denominator entry.

use super::{Model, StrataDataset};
use crate::error::Result;
use crate::matrix::{elementwise_mul_div, mul_div_slices, DenseMatrix, Vector};

impl Model {
    /// One pass of `v(i) <- v(i) * A(i)^T 1 / (m_i v(i) + H^T W(i)^T 1 + eps)` for every stratum.
    pub fn update_v(&mut self, data: &StrataDataset, eps: f64) -> Result<()> {
        self.update_v_passes(data, eps, 1)
    }

    /// `passes` consecutive v updates. `H^T W(i)^T 1` does not depend on `v`,
    /// so it is computed once per stratum.
    pub fn update_v_passes(&mut self, data: &StrataDataset, eps: f64, passes: usize) -> Result<()> {
        self.check_compatible(data)?;
        for i in 0..data.len() {
            let m = data.rows(i) as f64;
            let shared = self.h.t_mul_vec(self.w[i].column_sums().as_slice());
            let num = data.column_sums(i).as_slice();
            for _ in 0..passes {
                let v = self.v[i].as_slice();
                let den: Vec<f64> = v.iter().zip(&shared).map(|(&vj, &sj)| vj * m + sj).collect();
                self.v[i] = Vector::from_kernel(mul_div_slices(v, num, &den, eps));
            }
        }
        Ok(())
    }

    /// `W(i) <- W(i) * A(i) H^T / ((W(i) H + 1 v(i)^T) H^T + eps)` for every stratum.
    ///
    /// The denominator is evaluated as `W(i) (H H^T) + 1 (H v(i))^T`.
    pub fn update_w(&mut self, data: &StrataDataset, eps: f64) -> Result<()> {
        self.check_compatible(data)?;
        let hht = self.h.matmul_t(&self.h)?;
        for i in 0..data.len() {
            let num = data.stratum(i).mul_dense_t(&self.h)?;
            let hv = self.h.mul_vec(self.v[i].as_slice());
            let mut den = self.w[i].matmul(&hht)?.into_vec();
            let r = hv.len();
            for (k, d) in den.iter_mut().enumerate() {
                *d += hv[k % r];
            }
            let den = DenseMatrix::from_kernel(num.rows(), r, den);
            self.w[i] = elementwise_mul_div(&self.w[i], &num, &den, eps)?;
        }
        Ok(())
    }

    /// `H <- H * sum_i W(i)^T A(i) / (sum_i W(i)^T (W(i) H + 1 v(i)^T) + eps)`.
    ///
    /// Numerator and denominator are each summed over strata in index order
    /// before the division. The denominator is evaluated as
    /// `(sum_i W(i)^T W(i)) H + sum_i (W(i)^T 1) v(i)^T`.
    pub fn update_h(&mut self, data: &StrataDataset, eps: f64) -> Result<()> {
        self.check_compatible(data)?;
        let (r, n) = self.h.shape();
        let mut num = DenseMatrix::zeros(r, n);
        let mut gram = DenseMatrix::zeros(r, r);
        let mut shift = vec![0.0; r * n];
        for i in 0..data.len() {
            num.add_assign(&data.stratum(i).t_mul_by(&self.w[i])?)?;
            gram.add_assign(&self.w[i].gram())?;
            let wsum = self.w[i].column_sums();
            let v = self.v[i].as_slice();
            for (k, &ws) in wsum.as_slice().iter().enumerate() {
                for (s, &vj) in shift[k * n..(k + 1) * n].iter_mut().zip(v) {
                    *s += ws * vj;
                }
            }
        }
        let mut den = gram.matmul(&self.h)?.into_vec();
        for (d, s) in den.iter_mut().zip(&shift) {
            *d += s;
        }
        let den = DenseMatrix::from_kernel(r, n, den);
        self.h = elementwise_mul_div(&self.h, &num, &den, eps)?;
        Ok(())
    }

    /// One outer iteration: `inner_v_updates` v passes, then W, then H.
    pub fn step(&mut self, data: &StrataDataset, eps: f64, inner_v_updates: usize) -> Result<()> {
        self.update_v_passes(data, eps, inner_v_updates)?;
        self.update_w(data, eps)?;
        self.update_h(data, eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::objective;
    use crate::matrix::Matrix;

    fn dense(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    fn vector(v: &[f64]) -> Vector {
        Vector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn update_v_hand_case() {
        let data = StrataDataset::new(vec![dense(&[&[1.0, 2.0], &[3.0, 4.0]]).into()]).unwrap();
        let mut m = Model::new(
            vec![vector(&[1.0, 1.0])],
            vec![DenseMatrix::zeros(2, 1)],
            dense(&[&[0.3, 0.7]]),
        )
        .unwrap();
        m.update_v(&data, 0.0).unwrap();
        assert_eq!(m.v()[0].as_slice(), &[2.0, 3.0]);
    }

    #[test]
    fn update_v_fixed_point_for_pure_shift() {
        let data = StrataDataset::new(vec![dense(&[&[1.5, 0.25], &[1.5, 0.25], &[1.5, 0.25]]).into()])
            .unwrap();
        let mut m = Model::new(
            vec![vector(&[1.5, 0.25])],
            vec![DenseMatrix::zeros(3, 2)],
            dense(&[&[1.0, 1.0], &[2.0, 0.5]]),
        )
        .unwrap();
        m.update_v(&data, 0.0).unwrap();
        assert_eq!(m.v()[0].as_slice(), &[1.5, 0.25]);
    }

    #[test]
    fn zero_shift_stays_zero() {
        let data = StrataDataset::new(vec![dense(&[&[1.0, 2.0], &[3.0, 4.0]]).into()]).unwrap();
        let mut m = Model::new(
            vec![vector(&[0.0, 0.0])],
            vec![dense(&[&[0.5], &[0.1]])],
            dense(&[&[0.3, 0.7]]),
        )
        .unwrap();
        m.update_v_passes(&data, 1e-9, 3).unwrap();
        assert_eq!(m.v()[0].as_slice(), &[0.0, 0.0]);
        m.update_v(&data, 0.0).unwrap();
        assert_eq!(m.v()[0].as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn update_w_hand_case() {
        let data = StrataDataset::new(vec![dense(&[&[2.0]]).into()]).unwrap();
        let mut m = Model::new(vec![vector(&[0.0])], vec![dense(&[&[1.0]])], dense(&[&[1.0]])).unwrap();
        m.update_w(&data, 0.0).unwrap();
        assert_eq!(m.w()[0], dense(&[&[2.0]]));
    }

    #[test]
    fn update_w_keeps_zero_entries() {
        let data = StrataDataset::new(vec![dense(&[&[2.0, 1.0], &[0.5, 3.0]]).into()]).unwrap();
        let mut m = Model::new(
            vec![vector(&[0.1, 0.2])],
            vec![dense(&[&[0.0, 1.0], &[0.4, 0.0]])],
            dense(&[&[1.0, 0.5], &[0.2, 0.3]]),
        )
        .unwrap();
        m.update_w(&data, 1e-9).unwrap();
        assert_eq!(m.w()[0].get(0, 0), 0.0);
        assert_eq!(m.w()[0].get(1, 1), 0.0);
        assert!(m.w()[0].get(0, 1) > 0.0);
    }

    #[test]
    fn update_h_two_strata_hand_case() {
        let data = StrataDataset::new(vec![dense(&[&[2.0]]).into(), dense(&[&[2.0]]).into()]).unwrap();
        let mut m = Model::new(
            vec![vector(&[0.0]), vector(&[0.0])],
            vec![dense(&[&[1.0]]), dense(&[&[1.0]])],
            dense(&[&[1.0]]),
        )
        .unwrap();
        m.update_h(&data, 0.0).unwrap();
        assert_eq!(m.h(), &dense(&[&[2.0]]));
    }

    #[test]
    fn exact_data_is_a_fixed_point_of_a_full_step() {
        let w = dense(&[&[1.0, 0.0], &[2.0, 1.0]]);
        let h = dense(&[&[1.0, 2.0, 0.5], &[0.5, 1.0, 3.0]]);
        let v = vector(&[1.0, 0.25, 2.0]);
        let a = dense(&[&[2.0, 2.25, 2.5], &[3.5, 5.25, 6.0]]);
        let data = StrataDataset::new(vec![Matrix::Dense(a)]).unwrap();
        let start = Model::new(vec![v], vec![w], h).unwrap();
        assert_eq!(objective(&start, &data).unwrap(), 0.0);
        let mut m = start.clone();
        m.step(&data, 0.0, 2).unwrap();
        assert_eq!(m, start);
    }

    #[test]
    fn updates_reject_mismatched_dataset() {
        let data = StrataDataset::new(vec![dense(&[&[2.0, 1.0]]).into()]).unwrap();
        let mut m = Model::new(vec![vector(&[0.0])], vec![dense(&[&[1.0]])], dense(&[&[1.0]])).unwrap();
        assert!(m.update_v(&data, 0.0).is_err());
        assert!(m.update_w(&data, 0.0).is_err());
        assert!(m.update_h(&data, 0.0).is_err());
    }
}
