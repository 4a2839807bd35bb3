//! Middle-matrix scans for the square example at three input radii.

use ncconvex::cli::square_mxy_scans;

fn main() -> ncconvex::Result<()> {
    let [near, wide, beyond] = square_mxy_scans(40, 3, 0.6)?;
    for (name, s) in [("norm ≤ 0.1", &near), ("norm < 1/√3", &wide), ("norm ≤ 0.6", &beyond)] {
        println!("{name:>12}: {} inputs, all PSD {}, min eig {:+.3e}", s.tested, s.all_psd, s.min_eig);
    }
    Ok(())
}
