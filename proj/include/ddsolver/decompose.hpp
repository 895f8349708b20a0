#pragma once

#include <iosfwd>

#include "ddsolver/sparse.hpp"

namespace dds {

struct Partition {
  std::vector<Index> part;  // vertex -> part id
  Index n_parts = 0;

  std::vector<Index> part_sizes() const;
};

/// Balanced recursive graph bisection. Each bisection orders the vertices of
/// the induced subgraph breadth-first from a pseudo-peripheral seed, cuts the
/// order at the size target, then makes one pass of boundary-vertex moves
/// that reduce the cut. Final parts never exceed ceil(1.05 n / n_parts).
Partition partition(const Graph& g, Index n_parts);

/// Largest part size the partitioner may produce.
Index partition_size_cap(Index n, Index n_parts);

struct InterfaceClassification {
  std::vector<std::vector<Index>> interior;  // per part, sorted
  std::vector<Index> interface;              // sorted
  std::vector<std::vector<Index>> signature; // parallel to `interface`
};

/// A vertex is interface iff a neighbor lies in another part. Its signature
/// is the sorted set of part ids of itself and its neighbors.
InterfaceClassification classify(const Graph& g, const Partition& p);

struct InterfaceGroup {
  std::vector<Index> signature;
  std::vector<Index> vertices;  // sorted
};

/// Interface vertices grouped by identical signature, groups ordered
/// lexicographically by signature.
std::vector<InterfaceGroup> group_interface(const InterfaceClassification& c);

/// Block-arrowhead ordering: interiors of part 0..P-1, then each interface
/// group in group order.
struct ArrowheadLayout {
  Permutation perm;                  // new -> old
  std::vector<Index> part_offsets;   // P + 1 entries, new-index positions
  std::vector<Index> group_offsets;  // G + 1 entries, new-index positions
  Index n_parts = 0;
  Index n_groups = 0;

  Index interface_begin() const { return part_offsets.back(); }
  Index interface_size() const { return perm.size() - interface_begin(); }
  Index part_size(Index i) const { return part_offsets[i + 1] - part_offsets[i]; }
  Index group_size(Index g) const { return group_offsets[g + 1] - group_offsets[g]; }
};

/// Throws kInternal if two different parts' interiors are adjacent.
ArrowheadLayout build_layout(const Graph& g, const Partition& p, const InterfaceClassification& c,
                             const std::vector<InterfaceGroup>& groups);

/// Diagnostic table: one "vertex segment" line per vertex, where the segment
/// is `part:<i>` or `group:<g>`.
void dump_layout(const ArrowheadLayout& layout, std::ostream& out);

}  // namespace dds
