#pragma once

// Exhaustive checking of mechanism properties over finite integer grids.
// A verdict of holds_on_grid says nothing about bids outside the grid.

#include <charconv>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mechcheck/error.hpp"
#include "mechcheck/instance_text.hpp"
#include "mechcheck/mechanisms.hpp"
#include "mechcheck/model.hpp"
#include "mechcheck/windeterm.hpp"

namespace mechcheck {

inline constexpr std::uint64_t kDefaultCellCap = 10'000'000;

struct Grid {
  Money lo = 0;
  Money hi = 0;
  Money step = 1;

  std::size_t size() const { return static_cast<std::size_t>((hi - lo) / step) + 1; }
  bool contains(Money x) const { return x >= lo && x <= hi && (x - lo) % step == 0; }
  Money at(std::size_t k) const { return lo + static_cast<Money>(k) * step; }

  std::vector<Money> values() const {
    std::vector<Money> out;
    for (Money x = lo; x <= hi; x += step) out.push_back(x);
    return out;
  }

  bool operator==(const Grid&) const = default;
};

inline void validate_grid(const Grid& g) {
  if (g.step <= 0) throw Error(ErrorCode::InvalidGrid, "step must be positive");
  if (g.lo < 0) throw Error(ErrorCode::InvalidGrid, "bids on the grid must be non-negative");
  if (g.lo > g.hi) throw Error(ErrorCode::InvalidGrid, "lo must not exceed hi");
  if ((g.hi - g.lo) % g.step != 0) throw Error(ErrorCode::InvalidGrid, "hi - lo must be divisible by step");
}

/// Parses "lo..hi:step"; ":step" may be omitted and defaults to 1.
inline Grid parse_grid(std::string_view text) {
  auto bad = [&] { return Error(ErrorCode::InvalidGrid, "expected lo..hi:step, got '" + std::string(text) + "'"); };
  auto num = [&](std::string_view s) {
    Money v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw bad();
    return v;
  };
  auto dots = text.find("..");
  if (dots == std::string_view::npos) throw bad();
  std::string_view rest = text.substr(dots + 2);
  Grid g;
  g.lo = num(text.substr(0, dots));
  if (auto colon = rest.find(':'); colon != std::string_view::npos) {
    g.hi = num(rest.substr(0, colon));
    g.step = num(rest.substr(colon + 1));
  } else {
    g.hi = num(rest);
  }
  validate_grid(g);
  return g;
}

inline std::string format_grid(const Grid& g) {
  return std::to_string(g.lo) + ".." + std::to_string(g.hi) + ":" + std::to_string(g.step);
}

enum class PropertyId { strategyproof, efficient, budget };

inline std::string_view to_string(PropertyId p) {
  switch (p) {
    case PropertyId::strategyproof: return "strategyproof";
    case PropertyId::efficient: return "efficient";
    case PropertyId::budget: return "budget";
  }
  return "strategyproof";
}

inline std::optional<PropertyId> parse_property(std::string_view s) {
  if (s == "strategyproof") return PropertyId::strategyproof;
  if (s == "efficient") return PropertyId::efficient;
  if (s == "budget") return PropertyId::budget;
  return std::nullopt;
}

enum class VerdictResult { holds_on_grid, violated };

/// One cell of the strategyproofness search: agent `agent` with value
/// `valuation` facing the bids `others` (the other agents in index order)
/// gains by bidding `deviation` instead of its value.
struct DeviationWitness {
  AgentIndex agent = 0;
  Money valuation = 0;
  std::vector<Money> others;
  Money deviation = 0;
  Money truthful_utility = 0;
  Money deviating_utility = 0;

  bool operator==(const DeviationWitness&) const = default;
};

struct Verdict {
  PropertyId property = PropertyId::strategyproof;
  VerdictResult result = VerdictResult::holds_on_grid;
  std::optional<DeviationWitness> witness;  // strategyproof violations
  std::optional<std::vector<Money>> profile;  // bid profile of efficiency/budget violations
  std::string detail;
  std::uint64_t cells_checked = 0;

  bool holds() const { return result == VerdictResult::holds_on_grid; }
  bool operator==(const Verdict&) const = default;
};

/// The search space of a grid check: every agent bids on one fixed bundle.
/// Agent i uses the bundle of its first bid in the template; agents beyond
/// the template's get the whole item set.
struct GridDomain {
  ValidatedInstance base;  // items, agent names and config; bids replaced per cell
  std::vector<Bundle> bundles;

  std::size_t agent_count() const { return bundles.size(); }

  ValidatedInstance profile(const std::vector<Money>& amounts) const {
    ValidatedInstance inst = base;
    inst.bids.clear();
    for (AgentIndex a = 0; a < bundles.size(); ++a) inst.bids.push_back({a, bundles[a], amounts[a]});
    return inst;
  }
};

inline GridDomain make_grid_domain(const ValidatedInstance& tmpl, std::size_t n_agents) {
  if (n_agents == 0) throw Error(ErrorCode::UnsupportedDomain, "need at least one agent");
  GridDomain d;
  d.base.name = tmpl.name;
  d.base.items = tmpl.items;
  d.base.config = tmpl.config;
  for (AgentIndex a = 0; a < n_agents; ++a) {
    std::optional<Bundle> bundle;
    for (const Bid& b : tmpl.bids)
      if (b.agent == a) {
        bundle = b.bundle;
        break;
      }
    std::string name = a < tmpl.agents.size() ? tmpl.agents[a] : "bidder" + std::to_string(a + 1);
    while (a >= tmpl.agents.size() && tmpl.find_agent(name)) name += "_";
    d.base.agents.push_back(name);
    d.bundles.push_back(bundle.value_or(Bundle::all(tmpl.item_count())));
  }
  d.base.valuations.assign(n_agents, std::nullopt);
  return d;
}

namespace detail {

inline std::uint64_t checked_cells(std::uint64_t factor, std::size_t base, std::size_t exponent,
                                   std::uint64_t cap) {
  std::uint64_t cells = factor;
  for (std::size_t k = 0; k < exponent; ++k) {
    if (base != 0 && cells > cap / base)
      throw Error(ErrorCode::GridTooLarge, "grid exceeds the cell cap of " + std::to_string(cap));
    cells *= base;
  }
  if (cells > cap) throw Error(ErrorCode::GridTooLarge, "grid exceeds the cell cap of " + std::to_string(cap));
  return cells;
}

// Odometer over grid^k, last position fastest (lexicographic order).
inline bool next_profile(std::vector<std::size_t>& idx, std::size_t base) {
  for (std::size_t p = idx.size(); p-- > 0;) {
    if (++idx[p] < base) return true;
    idx[p] = 0;
  }
  return false;
}

inline Money agent_utility(const GridDomain& d, AgentIndex agent, Money value, const std::vector<Money>& bids) {
  Outcome out = compute_outcome(d.profile(bids));
  const AgentOutcome& rec = out.agents[agent];
  return utility(rec.wins() ? value : 0, rec.payment);
}

inline std::vector<Money> with_agent_bid(const std::vector<Money>& others, AgentIndex agent, Money bid) {
  std::vector<Money> bids;
  bids.reserve(others.size() + 1);
  bids.insert(bids.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(agent));
  bids.push_back(bid);
  bids.insert(bids.end(), others.begin() + static_cast<std::ptrdiff_t>(agent), others.end());
  return bids;
}

}  // namespace detail

/// Number of (agent, value, opponent profile, deviation) cells.
inline std::uint64_t strategyproof_cell_count(std::size_t n_agents, const Grid& grid,
                                              std::uint64_t cap = std::numeric_limits<std::uint64_t>::max()) {
  return detail::checked_cells(n_agents, grid.size(), n_agents + 1, cap);
}

/// Utilities of `agent` when bidding its value and when bidding `deviation`.
inline std::pair<Money, Money> evaluate_deviation(const GridDomain& d, AgentIndex agent, Money value,
                                                  const std::vector<Money>& others, Money deviation) {
  Money truthful = detail::agent_utility(d, agent, value, detail::with_agent_bid(others, agent, value));
  Money deviating = detail::agent_utility(d, agent, value, detail::with_agent_bid(others, agent, deviation));
  return {truthful, deviating};
}

/// Instance text of a witness cell: the deviating bid profile plus the
/// deviating agent's true valuation.
inline ValidatedInstance witness_instance(const GridDomain& d, const DeviationWitness& w, bool deviating) {
  ValidatedInstance inst =
      d.profile(detail::with_agent_bid(w.others, w.agent, deviating ? w.deviation : w.valuation));
  ValuationMap vm;
  vm.emplace(d.bundles[w.agent], w.valuation);
  inst.valuations[w.agent] = std::move(vm);
  return inst;
}

inline void check_strategyproof_domain(const GridDomain& d) {
  const auto& base = d.base;
  if (base.config.mechanism == Mechanism::vcg) {
    if (base.item_count() > 2 || d.agent_count() > 3)
      throw Error(ErrorCode::UnsupportedDomain, "vcg strategyproofness is checked for at most 2 items and 3 agents");
  } else if (base.item_count() != 1) {
    throw Error(ErrorCode::MechanismArityMismatch, "single-item mechanism needs exactly one item");
  }
}

/// Exhaustive search for a profitable deviation. Scan order: agent index,
/// then value ascending, then opponent profile lexicographically, then
/// deviation ascending; the first violation found is returned.
inline Verdict check_strategyproof(const ValidatedInstance& tmpl, std::size_t n_agents, const Grid& grid,
                                   std::uint64_t cell_cap = kDefaultCellCap) {
  validate_grid(grid);
  GridDomain d = make_grid_domain(tmpl, n_agents);
  check_strategyproof_domain(d);
  strategyproof_cell_count(n_agents, grid, cell_cap);

  Verdict verdict;
  verdict.property = PropertyId::strategyproof;
  const std::size_t g = grid.size();
  for (AgentIndex agent = 0; agent < n_agents; ++agent) {
    for (std::size_t vi = 0; vi < g; ++vi) {
      const Money value = grid.at(vi);
      std::vector<std::size_t> idx(n_agents - 1, 0);
      do {
        std::vector<Money> others;
        for (std::size_t k : idx) others.push_back(grid.at(k));
        const Money truthful =
            detail::agent_utility(d, agent, value, detail::with_agent_bid(others, agent, value));
        for (std::size_t di = 0; di < g; ++di) {
          const Money dev = grid.at(di);
          ++verdict.cells_checked;
          const Money deviating =
              dev == value ? truthful
                           : detail::agent_utility(d, agent, value, detail::with_agent_bid(others, agent, dev));
          if (deviating > truthful) {
            verdict.result = VerdictResult::violated;
            verdict.witness = DeviationWitness{agent, value, others, dev, truthful, deviating};
            return verdict;
          }
        }
      } while (detail::next_profile(idx, g));
    }
  }
  return verdict;
}

inline bool check_weak_budget_balance(const Outcome& out) { return out.revenue() >= 0; }

namespace detail {

inline constexpr std::size_t kMaxBruteForceBids = 20;

// Largest total of `values` over subsets of bids with disjoint bundles.
inline Money brute_force_max_welfare(const std::vector<Bid>& bids, const std::vector<Money>& values,
                                     std::uint64_t* subsets = nullptr) {
  if (bids.size() > kMaxBruteForceBids)
    throw Error(ErrorCode::UnsupportedDomain, "efficiency check enumerates at most 20 bids");
  Money best = 0;
  const std::uint64_t limit = std::uint64_t{1} << bids.size();
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    Bundle used;
    Money total = 0;
    bool feasible = true;
    for (std::size_t i = 0; i < bids.size() && feasible; ++i) {
      if (!((mask >> i) & 1U)) continue;
      feasible = bundles_disjoint(used, bids[i].bundle);
      used |= bids[i].bundle;
      total += values[i];
    }
    if (feasible && total > best) best = total;
  }
  if (subsets) *subsets += limit;
  return best;
}

}  // namespace detail

/// With every bid replaced by the bidder's true value for that bundle, the
/// mechanism must pick an allocation of maximal total value.
inline Verdict check_efficiency(const ValidatedInstance& inst) {
  ValidatedInstance truthful = inst;
  std::vector<Money> values;
  for (Bid& b : truthful.bids) {
    auto v = inst.valuation(b.agent, b.bundle);
    if (!v)
      throw Error(ErrorCode::MissingValuation,
                  "agent '" + inst.agents[b.agent] + "' has no valuation for a bundle it bids on");
    b.amount = *v;
    values.push_back(*v);
  }
  Verdict verdict;
  verdict.property = PropertyId::efficient;
  Money best = detail::brute_force_max_welfare(truthful.bids, values, &verdict.cells_checked);
  Outcome out = compute_outcome(truthful);
  Money chosen = 0;
  for (BidIndex i : out.allocation.accepted) chosen += values[i];
  if (chosen != best) {
    verdict.result = VerdictResult::violated;
    verdict.profile = values;
    verdict.detail = "chosen welfare " + std::to_string(chosen) + " below maximum " + std::to_string(best);
  }
  return verdict;
}

/// Efficiency for every truthful value profile on the grid.
inline Verdict check_efficiency_on_grid(const ValidatedInstance& tmpl, std::size_t n_agents, const Grid& grid,
                                        std::uint64_t cell_cap = kDefaultCellCap) {
  validate_grid(grid);
  GridDomain d = make_grid_domain(tmpl, n_agents);
  detail::checked_cells(1, grid.size(), n_agents, cell_cap);
  Verdict verdict;
  verdict.property = PropertyId::efficient;
  std::vector<std::size_t> idx(n_agents, 0);
  do {
    std::vector<Money> values;
    for (std::size_t k : idx) values.push_back(grid.at(k));
    ValidatedInstance inst = d.profile(values);
    ++verdict.cells_checked;
    std::uint64_t ignored = 0;
    Money best = detail::brute_force_max_welfare(inst.bids, values, &ignored);
    Outcome out = compute_outcome(inst);
    Money chosen = 0;
    for (BidIndex i : out.allocation.accepted) chosen += values[i];
    if (chosen != best) {
      verdict.result = VerdictResult::violated;
      verdict.profile = values;
      verdict.detail = "chosen welfare " + std::to_string(chosen) + " below maximum " + std::to_string(best);
      return verdict;
    }
  } while (detail::next_profile(idx, grid.size()));
  return verdict;
}

/// Weak budget balance for the instance as given.
inline Verdict check_budget(const ValidatedInstance& inst) {
  Verdict verdict;
  verdict.property = PropertyId::budget;
  verdict.cells_checked = 1;
  Outcome out = compute_outcome(inst);
  if (!check_weak_budget_balance(out)) {
    verdict.result = VerdictResult::violated;
    for (const Bid& b : inst.bids) verdict.profile.emplace().push_back(b.amount);
    verdict.detail = "revenue " + std::to_string(out.revenue());
  }
  return verdict;
}

/// Weak budget balance for every bid profile on the grid.
inline Verdict check_budget_on_grid(const ValidatedInstance& tmpl, std::size_t n_agents, const Grid& grid,
                                    std::uint64_t cell_cap = kDefaultCellCap) {
  validate_grid(grid);
  GridDomain d = make_grid_domain(tmpl, n_agents);
  detail::checked_cells(1, grid.size(), n_agents, cell_cap);
  Verdict verdict;
  verdict.property = PropertyId::budget;
  std::vector<std::size_t> idx(n_agents, 0);
  do {
    std::vector<Money> bids;
    for (std::size_t k : idx) bids.push_back(grid.at(k));
    ++verdict.cells_checked;
    Outcome out = compute_outcome(d.profile(bids));
    if (!check_weak_budget_balance(out)) {
      verdict.result = VerdictResult::violated;
      verdict.profile = bids;
      verdict.detail = "revenue " + std::to_string(out.revenue());
      return verdict;
    }
  } while (detail::next_profile(idx, grid.size()));
  return verdict;
}

enum class Additivity { additive, sub_additive, super_additive, neither };

inline std::string_view to_string(Additivity a) {
  switch (a) {
    case Additivity::additive: return "additive";
    case Additivity::sub_additive: return "sub_additive";
    case Additivity::super_additive: return "super_additive";
    case Additivity::neither: return "neither";
  }
  return "neither";
}

/// Compares v(B1 u B2) with v(B1) + v(B2) over all disjoint nonempty pairs.
/// `v` must value every nonempty bundle of the first `item_count` items.
inline Additivity classify_additivity(const ValuationMap& v, std::size_t item_count) {
  if (item_count == 0 || item_count > 4)
    throw Error(ErrorCode::UnsupportedDomain, "additivity is classified for 1 to 4 items");
  const std::uint64_t full = Bundle::all(item_count).bits();
  auto value = [&](std::uint64_t bits) {
    auto it = v.find(Bundle(bits));
    if (it == v.end())
      throw Error(ErrorCode::IncompleteValuation, "bundle " + std::to_string(bits) + " has no valuation");
    return it->second;
  };
  for (std::uint64_t b = 1; b <= full; ++b) value(b);

  bool all_le = true, all_ge = true;
  for (std::uint64_t b1 = 1; b1 <= full; ++b1)
    for (std::uint64_t b2 = b1 + 1; b2 <= full; ++b2) {
      if (b1 & b2) continue;
      Money joint = value(b1 | b2);
      Money parts = value(b1) + value(b2);
      all_le = all_le && joint <= parts;
      all_ge = all_ge && joint >= parts;
    }
  if (all_le && all_ge) return Additivity::additive;
  if (all_le) return Additivity::sub_additive;
  if (all_ge) return Additivity::super_additive;
  return Additivity::neither;
}

inline std::string format_witness(const DeviationWitness& w) {
  std::ostringstream os;
  os << "agent=" << w.agent << " v=" << w.valuation << " others=";
  for (std::size_t k = 0; k < w.others.size(); ++k) os << (k ? "," : "") << w.others[k];
  os << " dev=" << w.deviation << " u_truth=" << w.truthful_utility << " u_dev=" << w.deviating_utility;
  return os.str();
}

}  // namespace mechcheck
