//! Parse a polynomial and evaluate it at a (not necessarily Hermitian) tuple.

use ncconvex::matkit::real;
use ncconvex::ncalg::{parse_poly, to_text, HermTuple, VarContext};
use ncconvex::CMat;

fn main() -> ncconvex::Result<()> {
    let ctx = VarContext::x_only(&["x1", "x2"])?;
    let p = parse_poly("x1 x2 - 17 x2 x1 + 4", Some(&ctx))?;
    let m = |v: [f64; 4]| CMat::from_row_slice(2, 2, &v.map(real));
    let t = HermTuple::general(2, vec![], vec![m([1.0, 2.0, 3.0, 4.0]), m([-1.0; 4])])?;
    println!("p = {}", to_text(&p)?);
    println!("p(X) = {}", p.eval(&t)?);
    Ok(())
}
