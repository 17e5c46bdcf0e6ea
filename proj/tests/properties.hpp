#pragma once

#include <string>

namespace dwellcert::properties {

struct Result {
  std::string name;
  int cases = 0;
  int violations = 0;
  std::string first_violation;

  bool ok() const { return cases > 0 && violations == 0; }
};

/// Spectral test and direct Lyapunov LMI agree on random 2x2 systems away from radius 1.
Result spectral_vs_lmi(int systems = 200, unsigned seed = 1);
/// Every stable verdict's P satisfies I(P,A,J,theta) < 0 on the regime's grid, re-evaluated from scratch.
Result certificate_implication(int systems = 20, unsigned seed = 2);
/// V(0) = V(T) = 0 for the looped functional.
Result loop_condition(int draws = 100, unsigned seed = 3);
/// Integral of dW/dtau over a segment equals the change of V between impulses.
Result integral_identity(int draws = 50, unsigned seed = 4);
/// As T -> 0 the looped condition is feasible exactly when J is Schur.
Result small_t_dichotomy(int draws = 100, unsigned seed = 5);
/// Ranged(T, T) and Periodic(T) give the same verdict for every method.
Result ranged_degeneracy(int systems = 50, unsigned seed = 6);
/// Bisection logs are consistent, refine stably, and looped <= lemma <= spectral boundaries.
Result search_consistency(int systems = 10, unsigned seed = 7);

}  // namespace dwellcert::properties
