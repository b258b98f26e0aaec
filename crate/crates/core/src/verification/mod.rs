//! Numerical checks of the optimality conditions and the barren-plateau
//! estimates, plus brute-force reference computations.

pub mod lindblad;
pub mod oracle;
pub mod survey;

pub use lindblad::{ad_g_block_error, check_lemma2, dilation, lindblad_derivative, Lemma2Report, LindbladOp};
pub use survey::{brickwall_bound, brickwall_variance, haar_gradient_survey, GradientSurvey, VarianceEstimate};
