#pragma once

#include <array>

namespace mineig {

// Every numerical tolerance used by the library. Functions take a policy
// argument defaulting to kDefaultPolicy so tests can tighten or relax them.
struct NumericPolicy {
  // Cyclic Jacobi: stop once the off-diagonal Frobenius norm falls below
  // jacobi_relative_tolerance * ||A||_F.
  double jacobi_relative_tolerance = 1e-12;
  int jacobi_max_sweeps = 100;

  // Spectral pseudo-inverse: eigenvalues below pinv_relative_cutoff *
  // lambda_max are treated as zero. A query vector whose component outside
  // range(A) exceeds range_residual_tolerance * ||v|| is rejected.
  double pinv_relative_cutoff = 1e-10;
  double range_residual_tolerance = 1e-8;

  // Base polytope membership.
  double polytope_nonnegativity = 1e-12;
  double polytope_tolerance = 1e-9;

  // Coordinates this close to 0 or 1 count as integral and are snapped.
  double integrality_tolerance = 1e-10;
  // Exchange lengths at or below this are treated as zero.
  double step_tolerance = 1e-9;

  // Local search accepts a swap only when det grows by more than this
  // relative amount.
  double swap_acceptance = 1e-9;

  // Relaxation solver.
  double relaxation_tolerance = 1e-6;
  int relaxation_max_iterations = 20000;
  int golden_section_iterations = 48;
  // Relative ridge used when a smooth objective is queried at a singular X.
  double singular_regularization = 1e-8;
  // Smoothing strengths for the minimum-eigenvalue surrogate, in units of
  // log(d) / tolerance.
  std::array<double, 3> smoothing_schedule{10.0, 40.0, 160.0};
};

inline constexpr NumericPolicy kDefaultPolicy{};

}  // namespace mineig
