#pragma once

#include <span>
#include <vector>

namespace isrsgn {

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rules are computed once per n (Newton iteration on P_n) and cached.
const GaussRule& gauss_legendre(int n);

/// 15-point Gauss-Kronrod rule with its embedded 7-point Gauss rule, on [-1, 1].
/// gauss_weights[i] is zero for Kronrod-only nodes.
struct KronrodRule {
  std::vector<double> nodes;
  std::vector<double> kronrod_weights;
  std::vector<double> gauss_weights;
};

const KronrodRule& gauss_kronrod15();

}  // namespace isrsgn
