//! Critical-line engine: theta, Hardy's `Z`, an Euler–Maclaurin oracle for
//! `zeta(1/2 + it)`, zero counting and `S(t)`.

pub mod euler_maclaurin;
pub mod riemann_siegel;
pub mod sfun;
pub mod theta;
pub mod zeros;

pub use euler_maclaurin::{hardy_z_em, zeta_em, zeta_em_general};
pub use riemann_siegel::{hardy_z, hardy_z_with, DEFAULT_CORRECTIONS};
pub use theta::{rs_theta, rs_theta_deriv, theta_inverse, theta_loggamma};
pub use sfun::{joint_moment, joint_moment_bound, joint_moment_y, s_of_t, s_window_stats, HistBin, JointMoment, SWindowStats};
pub use zeros::{count_zeros, count_zeros_with, z_eval, ZeroCache, ZeroScanOptions};
