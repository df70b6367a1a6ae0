//! Exact rational arithmetic, Laurent polynomials in one variable, positive
//! real-root isolation and sign certificates on open intervals.

pub mod certify;
pub mod laurent;
pub mod rational;
pub mod roots;

pub use certify::{
    certify_sign_on_interval, right_neighborhood, strictly_positive_on, Interval, IntervalError,
    PositivityCertificate, RightNeighborhood,
};
pub use laurent::{LaurentError, LaurentPoly};
pub use rational::{format_rational, int, parse_rational, rat, ParseRationalError, Rational};
pub use roots::{
    count_roots_between, default_width, isolate_positive_roots, isolate_positive_roots_with,
    refine_root, sturm_positive_root_count, IsolationOptions, RootError, RootInterval, SturmChain,
    UniPoly,
};
