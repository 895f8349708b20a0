#include "ddsolver/decompose.hpp"

#include <algorithm>
#include <map>
#include <ostream>

namespace dds {

std::vector<Index> Partition::part_sizes() const {
  std::vector<Index> sizes(n_parts, 0);
  for (Index q : part) ++sizes[q];
  return sizes;
}

Index partition_size_cap(Index n, Index n_parts) {
  // ceil(1.05 n / n_parts) in integer arithmetic: ceil(105 n / (100 P)).
  const std::int64_t num = 105 * static_cast<std::int64_t>(n);
  const std::int64_t den = 100 * static_cast<std::int64_t>(n_parts);
  return static_cast<Index>((num + den - 1) / den);
}

namespace {

constexpr std::size_t kSeedCandidates = 8;
constexpr std::size_t kRidgeCandidates = 5;

class Bisector {
 public:
  Bisector(const Graph& g, Index cap)
      : g_(g), cap_(cap), member_(g.n, 0), level_(g.n, -1), side_(g.n, 0), ext_(g.n, 0),
        own_(g.n, 0) {}

  void split(std::vector<Index> verts, Index n_parts, Index base, std::vector<Index>& part) {
    if (n_parts == 1) {
      for (Index v : verts) part[v] = base;
      return;
    }
    const Index kl = n_parts / 2 + n_parts % 2;
    const Index kr = n_parts - kl;
    auto [left, right] = bisect(verts, kl, kr);
    split(std::move(left), kl, base, part);
    split(std::move(right), kr, base + kl, part);
  }

 private:
  // Breadth-first order of the component containing `seed` within the
  // current member set; returns the eccentricity of the seed.
  Index bfs(Index seed, std::vector<Index>& order) { return bfs_from({&seed, 1}, order); }

  // Level structure rooted at a set of vertices (all on level 0).
  Index bfs_from(std::span<const Index> seeds, std::vector<Index>& order) {
    ++stamp_;
    const std::size_t start = order.size();
    for (Index seed : seeds) {
      order.push_back(seed);
      visit_[seed] = stamp_;
      level_[seed] = 0;
    }
    for (std::size_t h = start; h < order.size(); ++h) {
      const Index v = order[h];
      for (Index u : g_.neighbors(v))
        if (member_[u] == set_stamp_ && visit_[u] != stamp_) {
          visit_[u] = stamp_;
          level_[u] = level_[v] + 1;
          order.push_back(u);
        }
    }
    return level_[order.back()];
  }

  Index induced_degree(Index v) const {
    Index d = 0;
    for (Index u : g_.neighbors(v)) d += (member_[u] == set_stamp_);
    return d;
  }

  Index pseudo_peripheral(Index start) {
    std::vector<Index> order;
    Index root = start;
    Index ecc = bfs(root, order);
    for (;;) {
      Index best = -1, best_deg = 0;
      for (auto it = order.rbegin(); it != order.rend() && level_[*it] == ecc; ++it) {
        const Index d = induced_degree(*it);
        if (best < 0 || d < best_deg || (d == best_deg && *it < best)) {
          best = *it;
          best_deg = d;
        }
      }
      order.clear();
      const Index e = bfs(best, order);
      if (e <= ecc) return root;
      root = best;
      ecc = e;
    }
  }

  // Evenly spaced vertices of the last level of a level structure.
  std::vector<Index> seed_candidates(const std::vector<Index>& order, Index ecc) {
    std::size_t first = order.size();
    while (first > 0 && level_[order[first - 1]] == ecc) --first;
    const std::size_t count = order.size() - first;
    std::vector<Index> out;
    if (ecc == 0) return out;
    const std::size_t picks = std::min<std::size_t>(kSeedCandidates, count);
    for (std::size_t t = 0; t < picks; ++t)
      out.push_back(order[first + (2 * t + 1) * count / (2 * picks)]);
    const std::vector<Index> deep = deepest_in_level(order, first, ecc);
    out.insert(out.begin(), deep.begin(), deep.end());
    return out;
  }

  // Vertices of the last level farthest, within that level, from its rim
  // (level vertices of less than the level's largest induced degree),
  // sampled evenly along that ridge.
  std::vector<Index> deepest_in_level(const std::vector<Index>& order, std::size_t first,
                                      Index ecc) {
    ++stamp_;
    Index top = 0;
    std::vector<Index> deg(order.size() - first);
    for (std::size_t h = first; h < order.size(); ++h) {
      deg[h - first] = induced_degree(order[h]);
      top = std::max(top, deg[h - first]);
    }
    std::vector<Index> queue, depth;
    for (std::size_t h = first; h < order.size(); ++h)
      if (deg[h - first] < top) {
        queue.push_back(order[h]);
        depth.push_back(0);
        visit_[order[h]] = stamp_;
      }
    if (queue.empty()) return {};
    for (std::size_t h = 0; h < queue.size(); ++h)
      for (Index u : g_.neighbors(queue[h]))
        if (member_[u] == set_stamp_ && visit_[u] != stamp_ && level_[u] == ecc) {
          visit_[u] = stamp_;
          queue.push_back(u);
          depth.push_back(depth[h] + 1);
        }
    std::size_t ridge = queue.size();
    while (ridge > 0 && depth[ridge - 1] == depth.back()) --ridge;
    const std::size_t count = queue.size() - ridge;
    const std::size_t picks = std::min<std::size_t>(kRidgeCandidates, count);
    std::vector<Index> out;
    for (std::size_t t = 0; t < picks; ++t)
      out.push_back(queue[ridge + (2 * t + 1) * count / (2 * picks)]);
    return out;
  }

  // Level boundary of a fresh level structure nearest `target` within
  // [lo, hi]. Without one, the end of the window closest to a boundary, so
  // the cut level is split as unevenly as balance allows.
  Index level_split(const std::vector<Index>& order, Index target, Index lo, Index hi) const {
    Index best = -1;
    for (Index h = lo; h <= hi; ++h)
      if (level_[order[h]] != level_[order[h - 1]] &&
          (best < 0 || std::abs(h - target) < std::abs(best - target)))
        best = h;
    if (best >= 0) return best;
    const Index n = static_cast<Index>(order.size());
    Index below = lo, above = hi;
    while (below > 0 && level_[order[below - 1]] == level_[order[lo]]) --below;
    while (above < n && level_[order[above]] == level_[order[hi]]) ++above;
    return lo - below <= above - hi ? lo : hi;
  }

  // Vertices with a neighbor across the cut when `order` is split at `at`.
  Index cut_size(const std::vector<Index>& order, Index at) {
    const Index n = static_cast<Index>(order.size());
    for (Index h = 0; h < n; ++h) side_[order[h]] = h < at ? 0 : 1;
    Index cut = 0;
    for (Index v : order)
      for (Index u : g_.neighbors(v))
        if (member_[u] == set_stamp_ && side_[u] != side_[v]) {
          ++cut;
          break;
        }
    return cut;
  }

  std::pair<std::vector<Index>, std::vector<Index>> bisect(const std::vector<Index>& verts,
                                                           Index kl, Index kr) {
    const Index k = kl + kr;
    const Index s = static_cast<Index>(verts.size());
    ++set_stamp_;
    for (Index v : verts) member_[v] = set_stamp_;
    if (visit_.empty()) {
      visit_.assign(g_.n, 0);
      seen_.assign(g_.n, 0);
    }

    const std::int64_t max_left = static_cast<std::int64_t>(kl) * cap_;
    const std::int64_t max_right = static_cast<std::int64_t>(kr) * cap_;
    const std::int64_t rounded = (static_cast<std::int64_t>(s) * kl + k / 2) / k;
    Index target = static_cast<Index>(rounded);
    target = std::clamp(target, kl, s - kr);
    const Index lo = static_cast<Index>(std::max<std::int64_t>(kl, s - max_right));
    const Index hi = static_cast<Index>(std::min<std::int64_t>(max_left, s - kr));

    // Level structure per connected component, components in order of their
    // lowest vertex. The seed is the candidate whose split has the fewest
    // separator vertices.
    std::vector<Index> order;
    order.reserve(verts.size());
    std::vector<Index> comp, trial;
    Index split_at = target;
    for (std::size_t idx = 0; idx < verts.size(); ++idx) {
      const Index v = verts[idx];
      if (seen_[v] == set_stamp_) continue;
      const Index before = static_cast<Index>(order.size());
      comp.clear();
      const Index root = pseudo_peripheral(v);
      const Index ecc = bfs(root, comp);
      const Index cs = static_cast<Index>(comp.size());
      const bool holds_cut = target > before && target < before + cs;
      Index local = target - before;
      Index wlo = std::max<Index>(lo - before, 1), whi = std::min<Index>(hi - before, cs - 1);
      if (!holds_cut) {
        local = static_cast<Index>((static_cast<std::int64_t>(cs) * kl + k / 2) / k);
        wlo = 1;
        whi = cs - 1;
      }
      if (cs < 2) {
        order.insert(order.end(), comp.begin(), comp.end());
        seen_[comp[0]] = set_stamp_;
        continue;
      }
      wlo = std::min(wlo, whi);
      local = std::clamp(local, wlo, whi);
      Index best_at = level_split(comp, local, wlo, whi);
      Index best_cut = cut_size(comp, best_at);
      auto consider = [&] {
        const Index at = level_split(trial, local, wlo, whi);
        const Index cut = cut_size(trial, at);
        if (cut < best_cut) {
          best_cut = cut;
          best_at = at;
          comp.swap(trial);
        }
      };
      std::vector<Index> far;
      for (Index c : seed_candidates(comp, ecc)) {
        trial.clear();
        const Index e = bfs(c, trial);
        far.clear();
        for (auto it = trial.rbegin(); it != trial.rend() && level_[*it] == e; ++it)
          far.push_back(*it);
        std::sort(far.begin(), far.end());
        consider();
        // Reverse structure grown from the far level of the candidate.
        if (e > 0) {
          trial.clear();
          bfs_from(far, trial);
          consider();
        }
      }
      if (holds_cut) split_at = before + best_at;
      order.insert(order.end(), comp.begin(), comp.end());
      for (Index u : comp) seen_[u] = set_stamp_;
    }
    target = split_at;


    for (Index h = 0; h < s; ++h) side_[order[h]] = h < target ? 0 : 1;
    std::int64_t size_left = target, size_right = s - target;

    // One refinement pass over boundary vertices in ascending index order.
    for (Index v : verts) {
      ext_[v] = own_[v] = 0;
      for (Index u : g_.neighbors(v))
        if (member_[u] == set_stamp_) (side_[u] == side_[v] ? own_[v] : ext_[v])++;
    }
    for (Index v : verts) {
      if (ext_[v] <= own_[v]) continue;
      const bool to_right = side_[v] == 0;
      if (to_right ? (size_right + 1 > max_right || size_left - 1 < kl)
                   : (size_left + 1 > max_left || size_right - 1 < kr))
        continue;
      side_[v] ^= 1;
      if (to_right) {
        --size_left;
        ++size_right;
      } else {
        ++size_left;
        --size_right;
      }
      std::swap(ext_[v], own_[v]);
      for (Index u : g_.neighbors(v)) {
        if (member_[u] != set_stamp_) continue;
        if (side_[u] == side_[v]) {
          ++own_[u];
          --ext_[u];
        } else {
          --own_[u];
          ++ext_[u];
        }
      }
    }

    std::pair<std::vector<Index>, std::vector<Index>> out;
    for (Index v : verts) (side_[v] == 0 ? out.first : out.second).push_back(v);
    return out;
  }

  const Graph& g_;
  Index cap_;
  std::vector<std::uint64_t> member_;
  std::vector<std::uint64_t> visit_;
  std::vector<std::uint64_t> seen_;
  std::vector<Index> level_;
  std::vector<unsigned char> side_;
  std::vector<Index> ext_;
  std::vector<Index> own_;
  std::uint64_t stamp_ = 0;
  std::uint64_t set_stamp_ = 0;
};

}  // namespace

Partition partition(const Graph& g, Index n_parts) {
  require(n_parts >= 1 && n_parts <= std::max<Index>(g.n, 1), ErrorCode::kInvalidArgument,
          "n_parts must lie in [1, vertex count]");
  Partition p;
  p.n_parts = n_parts;
  p.part.assign(g.n, 0);
  if (n_parts == 1) return p;
  std::vector<Index> all(g.n);
  for (Index v = 0; v < g.n; ++v) all[v] = v;
  Bisector b(g, partition_size_cap(g.n, n_parts));
  b.split(std::move(all), n_parts, 0, p.part);
  return p;
}

InterfaceClassification classify(const Graph& g, const Partition& p) {
  require(p.part.size() == static_cast<std::size_t>(g.n), ErrorCode::kDimensionMismatch,
          "partition does not cover the graph");
  InterfaceClassification c;
  c.interior.resize(p.n_parts);
  for (Index v = 0; v < g.n; ++v) {
    const Index own = p.part[v];
    std::vector<Index> sig{own};
    for (Index u : g.neighbors(v)) sig.push_back(p.part[u]);
    std::sort(sig.begin(), sig.end());
    sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
    if (sig.size() == 1) {
      c.interior[own].push_back(v);
    } else {
      c.interface.push_back(v);
      c.signature.push_back(std::move(sig));
    }
  }
  return c;
}

std::vector<InterfaceGroup> group_interface(const InterfaceClassification& c) {
  std::map<std::vector<Index>, std::vector<Index>> by_sig;
  for (std::size_t k = 0; k < c.interface.size(); ++k)
    by_sig[c.signature[k]].push_back(c.interface[k]);
  std::vector<InterfaceGroup> groups;
  groups.reserve(by_sig.size());
  for (auto& [sig, verts] : by_sig) groups.push_back({sig, std::move(verts)});
  return groups;
}

ArrowheadLayout build_layout(const Graph& g, const Partition& p, const InterfaceClassification& c,
                             const std::vector<InterfaceGroup>& groups) {
  ArrowheadLayout l;
  l.n_parts = p.n_parts;
  l.n_groups = static_cast<Index>(groups.size());
  std::vector<Index> perm;
  perm.reserve(g.n);
  l.part_offsets.push_back(0);
  for (const auto& verts : c.interior) {
    perm.insert(perm.end(), verts.begin(), verts.end());
    l.part_offsets.push_back(static_cast<Index>(perm.size()));
  }
  l.group_offsets.push_back(static_cast<Index>(perm.size()));
  for (const auto& grp : groups) {
    perm.insert(perm.end(), grp.vertices.begin(), grp.vertices.end());
    l.group_offsets.push_back(static_cast<Index>(perm.size()));
  }
  require(static_cast<Index>(perm.size()) == g.n, ErrorCode::kInternal,
          "layout does not cover every vertex");
  l.perm = Permutation::from_perm(std::move(perm));

  // Separator check: interiors of different parts must not touch.
  const Index ib = l.interface_begin();
  std::vector<Index> segment(g.n, -1);
  for (Index q = 0; q < l.n_parts; ++q)
    for (Index k = l.part_offsets[q]; k < l.part_offsets[q + 1]; ++k) segment[l.perm.perm[k]] = q;
  for (Index k = 0; k < ib; ++k) {
    const Index v = l.perm.perm[k];
    for (Index u : g.neighbors(v))
      if (segment[u] >= 0 && segment[u] != segment[v])
        fail(ErrorCode::kInternal, "separator violated: interiors of parts " +
                                       std::to_string(segment[v]) + " and " +
                                       std::to_string(segment[u]) + " are adjacent");
  }
  return l;
}

void dump_layout(const ArrowheadLayout& layout, std::ostream& out) {
  const Index n = layout.perm.size();
  std::vector<std::string> seg(n);
  for (Index q = 0; q < layout.n_parts; ++q)
    for (Index k = layout.part_offsets[q]; k < layout.part_offsets[q + 1]; ++k)
      seg[layout.perm.perm[k]] = "part:" + std::to_string(q);
  for (Index g = 0; g < layout.n_groups; ++g)
    for (Index k = layout.group_offsets[g]; k < layout.group_offsets[g + 1]; ++k)
      seg[layout.perm.perm[k]] = "group:" + std::to_string(g);
  for (Index v = 0; v < n; ++v) out << v << ' ' << seg[v] << '\n';
}

}  // namespace dds
