#include "ddsolver/amd.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace dds {
namespace {

enum class Kind : unsigned char { kVariable, kElement, kAbsorbed, kMerged };

class QuotientGraph {
 public:
  explicit QuotientGraph(const Graph& g)
      : n_(g.n),
        kind_(g.n, Kind::kVariable),
        elems_(g.n),
        vars_(g.n),
        nv_(g.n, 1),
        deg_(g.n),
        esize_(g.n, 0),
        w_(g.n, -1),
        mark_(g.n, 0),
        next_(g.n, -1),
        tail_(g.n) {
    for (Index v = 0; v < n_; ++v) {
      auto nb = g.neighbors(v);
      vars_[v].assign(nb.begin(), nb.end());
      deg_[v] = static_cast<Offset>(nb.size());
      tail_[v] = v;
      heap_.insert({deg_[v], v});
    }
  }

  std::vector<Index> run() {
    std::vector<Index> order;
    order.reserve(n_);
    while (!heap_.empty()) {
      Index p = heap_.begin()->second;
      heap_.erase(heap_.begin());
      eliminate(p);
      for (Index v = p; v >= 0; v = next_[v]) order.push_back(v);
    }
    return order;
  }

 private:
  void append_members(Index head, Index other) {
    next_[tail_[head]] = other;
    tail_[head] = tail_[other];
  }

  void eliminate(Index p) {
    ++stamp_;
    mark_[p] = stamp_;
    eliminated_ += nv_[p];

    // Pattern of the new element: union of absorbed elements and p's variables.
    std::vector<Index> lp;
    for (Index e : elems_[p]) {
      if (kind_[e] != Kind::kElement) continue;
      for (Index v : vars_[e])
        if (kind_[v] == Kind::kVariable && mark_[v] != stamp_) {
          mark_[v] = stamp_;
          lp.push_back(v);
        }
      kind_[e] = Kind::kAbsorbed;
      std::vector<Index>().swap(vars_[e]);
    }
    for (Index v : vars_[p])
      if (kind_[v] == Kind::kVariable && mark_[v] != stamp_) {
        mark_[v] = stamp_;
        lp.push_back(v);
      }
    std::sort(lp.begin(), lp.end());
    kind_[p] = Kind::kElement;
    std::vector<Index>().swap(elems_[p]);
    Offset lp_weight = 0;
    for (Index v : lp) {
      lp_weight += nv_[v];
      heap_.erase({deg_[v], v});
    }

    // |Le \ Lp| for every element touching the new pattern.
    std::vector<Index> touched;
    for (Index i : lp)
      for (Index e : elems_[i]) {
        if (kind_[e] != Kind::kElement) continue;
        if (w_[e] < 0) {
          w_[e] = esize_[e];
          touched.push_back(e);
        }
        w_[e] -= nv_[i];
      }
    for (Index e : touched)
      if (w_[e] == 0) {
        kind_[e] = Kind::kAbsorbed;  // Le is a subset of Lp
        std::vector<Index>().swap(vars_[e]);
      }

    // Prune lists, accumulate the external degree contribution outside p.
    std::vector<Index> live;
    std::vector<Offset> outside(lp.size(), 0);
    for (std::size_t k = 0; k < lp.size(); ++k) {
      const Index i = lp[k];
      Offset d = 0;
      auto& el = elems_[i];
      std::size_t keep = 0;
      for (Index e : el)
        if (kind_[e] == Kind::kElement) {
          el[keep++] = e;
          d += w_[e];
        }
      el.resize(keep);
      auto& vl = vars_[i];
      keep = 0;
      for (Index v : vl)
        if (kind_[v] == Kind::kVariable && mark_[v] != stamp_) {
          vl[keep++] = v;
          d += nv_[v];
        }
      vl.resize(keep);
      if (el.empty() && vl.empty()) {
        // Only adjacent to p: eliminate together with p.
        kind_[i] = Kind::kMerged;
        eliminated_ += nv_[i];
        lp_weight -= nv_[i];
        append_members(p, i);
        continue;
      }
      el.push_back(p);
      std::sort(el.begin(), el.end());
      std::sort(vl.begin(), vl.end());
      outside[live.size()] = d;
      live.push_back(i);
    }
    for (Index e : touched) w_[e] = -1;

    merge_indistinguishable(live);

    vars_[p].clear();
    for (std::size_t k = 0; k < live.size(); ++k) {
      const Index i = live[k];
      if (kind_[i] != Kind::kVariable) continue;
      vars_[p].push_back(i);
    }
    esize_[p] = lp_weight;
    const Offset remaining = n_ - eliminated_;
    for (std::size_t k = 0; k < live.size(); ++k) {
      const Index i = live[k];
      if (kind_[i] != Kind::kVariable) continue;
      Offset d = outside[k] + (lp_weight - nv_[i]);
      d = std::min(d, remaining - nv_[i]);
      deg_[i] = std::max<Offset>(d, 0);
      heap_.insert({deg_[i], i});
    }
  }

  // Variables with identical element and variable lists are merged into the
  // lowest-index representative.
  void merge_indistinguishable(const std::vector<Index>& live) {
    std::unordered_map<std::uint64_t, std::vector<Index>> buckets;
    std::vector<std::uint64_t> keys;
    for (Index i : live) {
      std::uint64_t h = 1469598103934665603ull;
      for (Index e : elems_[i]) h = (h ^ static_cast<std::uint64_t>(e)) * 1099511628211ull;
      h ^= 0x9e3779b97f4a7c15ull;
      for (Index v : vars_[i]) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ull;
      auto [it, fresh] = buckets.try_emplace(h);
      if (fresh) keys.push_back(h);
      it->second.push_back(i);
    }
    for (std::uint64_t h : keys) {
      auto& b = buckets[h];
      for (std::size_t a = 0; a < b.size(); ++a) {
        const Index i = b[a];
        if (kind_[i] != Kind::kVariable) continue;
        for (std::size_t c = a + 1; c < b.size(); ++c) {
          const Index j = b[c];
          if (kind_[j] != Kind::kVariable) continue;
          if (elems_[i] != elems_[j] || vars_[i] != vars_[j]) continue;
          nv_[i] += nv_[j];
          nv_[j] = 0;
          kind_[j] = Kind::kMerged;
          std::vector<Index>().swap(elems_[j]);
          std::vector<Index>().swap(vars_[j]);
          append_members(i, j);
        }
      }
    }
  }

  Index n_;
  std::vector<Kind> kind_;
  std::vector<std::vector<Index>> elems_;
  std::vector<std::vector<Index>> vars_;
  std::vector<Offset> nv_;
  std::vector<Offset> deg_;
  std::vector<Offset> esize_;
  std::vector<Offset> w_;
  std::vector<std::uint64_t> mark_;
  std::vector<Index> next_;
  std::vector<Index> tail_;
  std::set<std::pair<Offset, Index>> heap_;
  std::uint64_t stamp_ = 0;
  Offset eliminated_ = 0;
};

}  // namespace

Permutation amd_order(const Graph& g) {
  if (g.n == 0) return Permutation::identity(0);
  QuotientGraph q(g);
  return Permutation::from_perm(q.run());
}

}  // namespace dds
