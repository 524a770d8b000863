//! Generalized down-up algebras `L(f, r, s, 0)` presented as generalized
//! Weyl algebras over `R = ℚ(z)[h, k]`, together with their twisted
//! derivations.

pub mod bipoly;
pub mod derivations;
pub mod downup;
pub mod expr;
pub mod gwa;
pub mod oracle;
pub mod scalars;
pub mod verify;

pub use bipoly::{parse_bipoly, BiPoly, Support};
pub use derivations::{
    apply_derivation, apply_inner, build_alpha_derivation, build_c_derivation, index_sets, solve_inner, AlphaSpec,
    CTypeSpec, Derivation, DerivationError, IndexSet,
};
pub use downup::{defining_relations, parse_gwa_element, solve_conformal, translate_to_gwa, DownUpPresentation};
pub use expr::{parse_expression, Alphabet, Expr};
pub use gwa::{GwaAlgebra, GwaElement};
pub use oracle::oracle_normalize;
pub use scalars::{ParamError, ParamSpec, Rational, Scalar, ScalarError, ZPoly};
