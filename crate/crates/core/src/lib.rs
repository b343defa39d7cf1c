//! Construction, enumeration and counting of (k+1)-potent elements
//! (`A^{k+1} = A`) in upper triangular matrix algebras and in incidence
//! algebras of finite posets over finite fields.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: exact arithmetic in `GF(p^e)` and potent scalars.
//! * [`qpoly`]: polynomials in `q` with big integer coefficients.
//! * [`poset`]: finite posets with a fixed linear extension.
//! * [`incmat`]: incidence-algebra elements stored as upper triangular matrices.
//! * [`potent`]: completion of potent matrices from a diagonal, the
//!   structured enumerator and the brute-force oracle.
//! * [`counting`]: closed-form counting polynomials.
//! * [`tables`]: reference tables and their reproduction.
//! * [`verify`]: closed forms against the oracle.

pub mod counting;
pub mod error;
pub mod field;
pub mod incmat;
pub mod poset;
pub mod potent;
pub mod qpoly;
pub mod tables;
pub mod verify;

pub use error::{Error, Result};
pub use field::{CharGuard, DiagonalMode, Field, FieldElem};
pub use incmat::{DenseMatrix, PowerBlocks, UpperMatrix};
pub use poset::{Poset, PosetShape};
pub use qpoly::QPolynomial;
