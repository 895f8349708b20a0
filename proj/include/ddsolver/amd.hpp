#pragma once

#include <functional>

#include "ddsolver/sparse.hpp"

namespace dds {

/// Approximate minimum degree elimination order. Works on the quotient graph
/// with element absorption, supervariable detection and mass elimination.
/// Ties are broken by lowest vertex index, so the result is a pure function
/// of the graph.
Permutation amd_order(const Graph& g);

/// Pluggable fill-reducing ordering.
using OrderingFn = std::function<Permutation(const Graph&)>;

}  // namespace dds
