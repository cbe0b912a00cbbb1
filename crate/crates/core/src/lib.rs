//! Rational maps between normal toric varieties presented in Cox coordinates.
//!
//! A map `X --> Y` is presented by a *multi-valued map* between total
//! coordinate spaces: every Cox variable of `Y` is sent to a product of
//! rational powers of irreducible homogeneous polynomials on `X`. The crate
//! checks the homogeneity, relevance and zeroes conditions for such a
//! presentation, builds presentations from character data, and modifies a
//! presentation along divisors until it agrees with the map wherever the map
//! is regular.
//!
//! Module map:
//!
//! * [`abelian`] exact integer linear algebra (Smith form, class groups,
//!   kernels, nonnegative rational feasibility);
//! * [`fan`] fans, cone membership, star fans and the lattice maps `p`, `L`;
//! * [`coxring`] multigraded polynomials over the rationals and a parser;
//! * [`sections`] factored homogeneous multi-valued sections;
//! * [`descriptions`] condition checks, construction and completion;
//! * [`oracle`] floating point evaluation with all root branches.
//!
//! # Example
//!
//! ```
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! use std::sync::Arc;
//! use coxmap::coxring::build_cox_ring;
//! use coxmap::descriptions::CoxDescription;
//! use coxmap::fan::Fan;
//! use coxmap::sections::{FactoredSection, RadicalScalar};
//! use num_rational::BigRational;
//!
//! let p2 = Fan::from_lists(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[0, 2], &[1, 2]])?;
//! let p1 = Fan::from_lists(1, &[&[1], &[-1]], &[&[0], &[1]])?;
//! let x = Arc::new(build_cox_ring(p2, vec!["x0".into(), "x1".into(), "x2".into()])?);
//! let y = Arc::new(build_cox_ring(p1, vec!["u".into(), "v".into()])?);
//!
//! let one = BigRational::from_integer(1.into());
//! let image = |s: &str| {
//!     FactoredSection::new(3, RadicalScalar::one(), [
//!         (x.parse(s).unwrap(), one.clone()),
//!         (x.parse("x2").unwrap(), one.clone()),
//!     ])
//! };
//! let phi = CoxDescription::new(x.clone(), y.clone(), vec![image("x0")?, image("x1")?])?;
//! assert!(phi.check_homogeneity()?.passed());
//! let done = phi.complete()?.description;
//! assert_eq!(done.image_strings(), vec!["x0", "x1"]);
//! # Ok(())
//! # }
//! ```

pub mod abelian;
pub mod coxring;
pub mod descriptions;
pub mod fan;
pub mod oracle;
pub mod sections;

pub use abelian::{FGAbelianGroup, GroupElement, IntMatrix, RationalVector, SmithDecomposition};
pub use coxring::{Monomial, MPoly, ToricCoxRing};
pub use descriptions::{CoxDescription, CharacterMap, DivisorDiagnosis, DivisorStatus};
pub use fan::{Cone, Fan, StarFan};
pub use sections::{FactoredSection, RadicalScalar};
