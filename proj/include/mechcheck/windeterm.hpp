#pragma once

// Exact winner determination for the combinatorial auction problem.

#include <algorithm>
#include <optional>
#include <vector>

#include "mechcheck/error.hpp"
#include "mechcheck/model.hpp"

namespace mechcheck {

/// A feasible set of accepted bids. `accepted` is sorted ascending.
struct Allocation {
  std::vector<BidIndex> accepted;
  Money welfare = 0;

  bool operator==(const Allocation&) const = default;
};

namespace detail {

class CapSearch {
 public:
  CapSearch(const ValidatedInstance& inst, std::optional<AgentIndex> excluded) : inst_(inst) {
    for (BidIndex i = 0; i < inst.bids.size(); ++i)
      if (!excluded || inst.bids[i].agent != *excluded) candidates_.push_back(i);
    suffix_.assign(candidates_.size() + 1, 0);
    for (std::size_t k = candidates_.size(); k-- > 0;)
      suffix_[k] = suffix_[k + 1] + inst.bids[candidates_[k]].amount;
  }

  Allocation run() {
    dfs(0, Bundle{}, 0);
    return {best_, best_welfare_};
  }

 private:
  // Include-first depth-first search over candidates in input order. The
  // bound is strict so that equal-welfare branches are still visited for
  // the lexicographic tie rule.
  void dfs(std::size_t k, Bundle used, Money welfare) {
    if (welfare + suffix_[k] < best_welfare_) return;
    if (k == candidates_.size()) {
      if (welfare > best_welfare_ ||
          (welfare == best_welfare_ && std::lexicographical_compare(current_.begin(), current_.end(),
                                                                    best_.begin(), best_.end()))) {
        best_welfare_ = welfare;
        best_ = current_;
      }
      return;
    }
    const Bid& bid = inst_.bids[candidates_[k]];
    if (bundles_disjoint(used, bid.bundle)) {
      current_.push_back(candidates_[k]);
      dfs(k + 1, used | bid.bundle, welfare + bid.amount);
      current_.pop_back();
    }
    dfs(k + 1, used, welfare);
  }

  const ValidatedInstance& inst_;
  std::vector<BidIndex> candidates_;
  std::vector<Money> suffix_;
  std::vector<BidIndex> current_;
  std::vector<BidIndex> best_;
  Money best_welfare_ = 0;
};

}  // namespace detail

/// Welfare-maximal feasible allocation over the bids not owned by
/// `excluded_agent`. Ties go to the lexicographically smallest sorted
/// sequence of accepted bid indexes, so the empty allocation wins over
/// accepting only zero-amount bids.
inline Allocation solve_cap(const ValidatedInstance& inst, std::optional<AgentIndex> excluded_agent = std::nullopt) {
  return detail::CapSearch(inst, excluded_agent).run();
}

/// Sum of accepted amounts, skipping bids owned by `excluded_agent`.
inline Money welfare_of(const ValidatedInstance& inst, const Allocation& alloc,
                        std::optional<AgentIndex> excluded_agent = std::nullopt) {
  Bundle used;
  Money total = 0;
  for (BidIndex i : alloc.accepted) {
    if (i >= inst.bids.size()) throw Error(ErrorCode::InfeasibleAllocation, "bid index out of range");
    const Bid& bid = inst.bids[i];
    if (!bundles_disjoint(used, bid.bundle))
      throw Error(ErrorCode::InfeasibleAllocation, "accepted bundles overlap");
    used |= bid.bundle;
    if (!excluded_agent || bid.agent != *excluded_agent) total += bid.amount;
  }
  return total;
}

}  // namespace mechcheck
