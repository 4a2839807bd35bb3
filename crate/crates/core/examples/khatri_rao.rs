//! Khatri–Rao product of 2×2 block matrices against its Kronecker embedding.

use ncconvex::matkit::sample::{rng_from_seed, sample_gaussian};
use ncconvex::matkit::{build_embedding_e, khatri_rao, kron, BlockMatrix2};

fn main() -> ncconvex::Result<()> {
    let mut rng = rng_from_seed(8);
    let a = BlockMatrix2::split(&sample_gaussian(3, 3, &mut rng), 1, 2)?;
    let b = BlockMatrix2::split(&sample_gaussian(4, 3, &mut rng), 2, 1)?;
    let kr = khatri_rao(&a, &b)?.to_matrix();
    let er = build_embedding_e(a.row_partition(), b.row_partition());
    let ec = build_embedding_e(a.col_partition(), b.col_partition());
    let via = er.adjoint() * kron(&a.to_matrix(), &b.to_matrix()) * ec;
    println!("A ⊛ B is {}×{}, |A ⊛ B − E*(A⊗B)E| = {:.1e}", kr.nrows(), kr.ncols(), (kr - via).camax());
    Ok(())
}
