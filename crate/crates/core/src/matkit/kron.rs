use crate::error::{Error, Result};
use crate::CMat;

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// 2×2 block matrix with row partition `(r1, r2)` and column partition `(c1, c2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix2 {
    pub blocks: [[CMat; 2]; 2],
}

impl BlockMatrix2 {
    pub fn new(b11: CMat, b12: CMat, b21: CMat, b22: CMat) -> Result<Self> {
        let ok = b11.nrows() == b12.nrows()
            && b21.nrows() == b22.nrows()
            && b11.ncols() == b21.ncols()
            && b12.ncols() == b22.ncols();
        if !ok {
            return Err(Error::Shape("inconsistent 2x2 block partition".into()));
        }
        Ok(BlockMatrix2 { blocks: [[b11, b12], [b21, b22]] })
    }

    /// Splits `m` after `r1` rows and `c1` columns.
    pub fn split(m: &CMat, r1: usize, c1: usize) -> Result<Self> {
        if r1 > m.nrows() || c1 > m.ncols() {
            return Err(Error::Shape("split point outside matrix".into()));
        }
        let (r2, c2) = (m.nrows() - r1, m.ncols() - c1);
        Ok(BlockMatrix2 {
            blocks: [
                [m.view((0, 0), (r1, c1)).into_owned(), m.view((0, c1), (r1, c2)).into_owned()],
                [m.view((r1, 0), (r2, c1)).into_owned(), m.view((r1, c1), (r2, c2)).into_owned()],
            ],
        })
    }

    pub fn row_partition(&self) -> (usize, usize) {
        (self.blocks[0][0].nrows(), self.blocks[1][0].nrows())
    }

    pub fn col_partition(&self) -> (usize, usize) {
        (self.blocks[0][0].ncols(), self.blocks[0][1].ncols())
    }

    pub fn to_matrix(&self) -> CMat {
        let (r1, r2) = self.row_partition();
        let (c1, c2) = self.col_partition();
        let mut m = CMat::zeros(r1 + r2, c1 + c2);
        m.view_mut((0, 0), (r1, c1)).copy_from(&self.blocks[0][0]);
        m.view_mut((0, c1), (r1, c2)).copy_from(&self.blocks[0][1]);
        m.view_mut((r1, 0), (r2, c1)).copy_from(&self.blocks[1][0]);
        m.view_mut((r1, c1), (r2, c2)).copy_from(&self.blocks[1][1]);
        m
    }
}

/// Blockwise Kronecker product `(A_ij ⊗ B_ij)`.
pub fn khatri_rao(a: &BlockMatrix2, b: &BlockMatrix2) -> Result<BlockMatrix2> {
    let blk = |i: usize, j: usize| kron(&a.blocks[i][j], &b.blocks[i][j]);
    BlockMatrix2::new(blk(0, 0), blk(0, 1), blk(1, 0), blk(1, 1))
}

/// `E = [V1⊗W1, V2⊗W2]` for partitions `(p1, p2)` of the first factor and `(q1, q2)` of the second.
///
/// For rectangular blocks use the row partitions on the left and the column
/// partitions on the right: `A ⊛ B = E_rows* (A⊗B) E_cols`.
pub fn build_embedding_e(pa: (usize, usize), pb: (usize, usize)) -> CMat {
    let (p1, p2) = pa;
    let (q1, q2) = pb;
    let rows = (p1 + p2) * (q1 + q2);
    let mut e = CMat::zeros(rows, p1 * q1 + p2 * q2);
    let one = crate::C64::new(1.0, 0.0);
    let nb = q1 + q2;
    for i in 0..p1 {
        for j in 0..q1 {
            // e_i ⊗ e_j in C^{p1+p2} ⊗ C^{q1+q2}
            e[(i * nb + j, i * q1 + j)] = one;
        }
    }
    for i in 0..p2 {
        for j in 0..q2 {
            e[((p1 + i) * nb + q1 + j, p1 * q1 + i * q2 + j)] = one;
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::sample::{rng_from_seed, sample_gaussian};
    use crate::matkit::real;

    #[test]
    fn unit_blocks_reproduce_a() {
        let mut rng = rng_from_seed(1);
        let a = BlockMatrix2::split(&sample_gaussian(5, 5, &mut rng), 2, 2).unwrap();
        let ones = BlockMatrix2::split(&CMat::from_element(2, 2, real(1.0)), 1, 1).unwrap();
        assert_eq!(khatri_rao(&a, &ones).unwrap(), a);
    }

    #[test]
    fn smallest_embedding() {
        let e = build_embedding_e((1, 1), (1, 1));
        assert_eq!(e.shape(), (4, 2));
        assert_eq!(e[(0, 0)], real(1.0));
        assert_eq!(e[(3, 1)], real(1.0));
        assert_eq!(e.iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn embedding_identity_rectangular() {
        let mut rng = rng_from_seed(2);
        for (r1, r2, c1, c2, s1, s2, d1, d2) in [(1, 2, 2, 1, 2, 1, 1, 3), (2, 2, 2, 2, 1, 1, 1, 1), (3, 1, 1, 2, 2, 2, 3, 1)] {
            let a = BlockMatrix2::split(&sample_gaussian(r1 + r2, c1 + c2, &mut rng), r1, c1).unwrap();
            let b = BlockMatrix2::split(&sample_gaussian(s1 + s2, d1 + d2, &mut rng), s1, d1).unwrap();
            let er = build_embedding_e((r1, r2), (s1, s2));
            let ec = build_embedding_e((c1, c2), (d1, d2));
            assert!((er.adjoint() * &er - CMat::identity(er.ncols(), er.ncols())).norm() < 1e-15);
            let lhs = khatri_rao(&a, &b).unwrap().to_matrix();
            let rhs = er.adjoint() * kron(&a.to_matrix(), &b.to_matrix()) * ec;
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
