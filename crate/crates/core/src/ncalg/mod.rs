//! Free *-algebra over typed Hermitian letters.

mod context;
mod poly;
mod text;
mod tuple;
mod word;

pub use context::{Letter, LetterClass, VarContext};
pub use poly::FreePoly;
pub use text::{parse_poly, parse_poly_file, to_text, PolyFile};
pub use tuple::{HermTuple, TupleFile};
pub use word::Word;
