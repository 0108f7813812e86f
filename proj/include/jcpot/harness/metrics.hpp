#pragma once

#include <span>

#include "jcpot/class_ops.hpp"

namespace jcpot::harness {

// sum_c |estimate_c - truth_c|, in [0, 2] for simplex inputs.
double l1_proportion_error(const ProportionVector& estimate, const ProportionVector& truth);

// Fraction of exact label matches.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

}  // namespace jcpot::harness
