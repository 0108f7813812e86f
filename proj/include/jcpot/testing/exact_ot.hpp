#pragma once

// Exact optimal transport solvers used as test oracles. Desk scale only.

#include "jcpot/linalg.hpp"

namespace jcpot::testing {

// Minimum of <gamma, C> over the transport polytope U(row_mass, col_mass),
// solved with a two-phase dense simplex under Bland's rule. Requires
// rows * cols <= 400.
double exact_ot_cost(const Vector& row_mass, const Vector& col_mass, const Matrix& cost);

// Uniform square instances only: by Birkhoff's theorem an optimal plan is a
// scaled permutation, so the optimum is min over permutations of
// (1/n) sum_i C(i, sigma(i)). Requires n <= 8.
double permutation_ot_cost(const Matrix& cost);

}  // namespace jcpot::testing
