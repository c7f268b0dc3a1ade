#pragma once

#include "conestab/linalg.hpp"

namespace conestab {

/// Generators of a polyhedral cone: nonnegative combinations of `rays`
/// plus arbitrary combinations of `lineality` (both column-wise).
struct ConeGenerators {
  Mat rays;
  Mat lineality;
};

/// Double description of {u : ineq·u >= 0, eq·u = 0}. Either matrix may have zero rows,
/// but both must have the same number of columns.
ConeGenerators dd_generators(const Mat& ineq, const Mat& eq);

}  // namespace conestab
