#pragma once

// Payment and utility rules: VCG, Vickrey (second price), English in its
// static pay-your-bid form, quasi-linear utility and reserve filtering.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mechcheck/error.hpp"
#include "mechcheck/model.hpp"
#include "mechcheck/windeterm.hpp"

namespace mechcheck {

struct AgentOutcome {
  Money payment = 0;
  Money clarke_tax = 0;  // welfare of the others' optimal allocation without this agent
  std::vector<Bundle> winning_bundles;
  std::optional<Money> utility;  // present only when the agent declared valuations

  Bundle received() const {
    Bundle b;
    for (Bundle w : winning_bundles) b |= w;
    return b;
  }
  bool wins() const { return !winning_bundles.empty(); }

  bool operator==(const AgentOutcome&) const = default;
};

struct Outcome {
  Mechanism mechanism = Mechanism::vcg;
  Allocation allocation;
  std::vector<AgentOutcome> agents;
  bool sold = true;

  Money revenue() const {
    Money total = 0;
    for (const auto& a : agents) total += a.payment;
    return total;
  }

  bool operator==(const Outcome&) const = default;
};

/// Quasi-linear utility: value of what was received minus what was paid.
constexpr Money utility(Money value_received, Money payment) { return value_received - payment; }

namespace detail {

inline Outcome outcome_skeleton(const ValidatedInstance& inst, Mechanism m, Allocation alloc) {
  Outcome out;
  out.mechanism = m;
  out.agents.resize(inst.agent_count());
  for (BidIndex i : alloc.accepted) {
    const Bid& bid = inst.bids[i];
    out.agents[bid.agent].winning_bundles.push_back(bid.bundle);
  }
  out.allocation = std::move(alloc);
  return out;
}

inline void require_single_item(const ValidatedInstance& inst, Mechanism m) {
  if (inst.item_count() != 1)
    throw Error(ErrorCode::MechanismArityMismatch, std::string(to_string(m)) + " requires exactly one item");
}

// Highest bid, ties to the lowest bid index.
inline BidIndex highest_bid(const ValidatedInstance& inst) {
  BidIndex best = 0;
  for (BidIndex i = 1; i < inst.bids.size(); ++i)
    if (inst.bids[i].amount > inst.bids[best].amount) best = i;
  return best;
}

// Highest amount among bids not owned by `agent` (0 if there are none).
inline Money highest_other_bid(const ValidatedInstance& inst, AgentIndex agent) {
  Money best = 0;
  for (const Bid& b : inst.bids)
    if (b.agent != agent && b.amount > best) best = b.amount;
  return best;
}

inline Outcome single_item_outcome(const ValidatedInstance& inst, Mechanism m) {
  require_single_item(inst, m);
  if (inst.bids.empty()) throw Error(ErrorCode::NoBids, "no bids to award");
  BidIndex win = highest_bid(inst);
  const Bid& wb = inst.bids[win];
  Outcome out = outcome_skeleton(inst, m, Allocation{{win}, wb.amount});
  for (AgentIndex a = 0; a < inst.agent_count(); ++a) out.agents[a].clarke_tax = highest_other_bid(inst, a);
  out.agents[wb.agent].payment = m == Mechanism::vickrey ? out.agents[wb.agent].clarke_tax : wb.amount;
  return out;
}

}  // namespace detail

/// VCG: efficient allocation, and each agent pays the welfare the others
/// lose because of its presence. Solves n+1 winner determination problems.
inline Outcome vcg_outcome(const ValidatedInstance& inst) {
  Outcome out = detail::outcome_skeleton(inst, Mechanism::vcg, solve_cap(inst));
  for (AgentIndex a = 0; a < inst.agent_count(); ++a) {
    Money without_a = solve_cap(inst, a).welfare;
    Money others_at_optimum = welfare_of(inst, out.allocation, a);
    out.agents[a].clarke_tax = without_a;
    out.agents[a].payment = without_a - others_at_optimum;
  }
  return out;
}

/// Single item; the highest bid wins and pays the best bid among the other
/// agents (the second-highest bid when every agent bids once).
inline Outcome vickrey_outcome(const ValidatedInstance& inst) {
  return detail::single_item_outcome(inst, Mechanism::vickrey);
}

/// Single item; the highest bid wins and pays its own bid.
inline Outcome english_outcome(const ValidatedInstance& inst) {
  return detail::single_item_outcome(inst, Mechanism::english);
}

/// Withdraws the sale when total revenue falls short of the reserve.
inline Outcome apply_reserve(const ValidatedInstance& inst, Outcome out) {
  if (out.revenue() >= inst.config.reserve) {
    out.sold = true;
    return out;
  }
  out.sold = false;
  out.allocation = Allocation{};
  for (auto& a : out.agents) {
    a.payment = 0;
    a.winning_bundles.clear();
  }
  return out;
}

/// Allocation, payments and reserve for the configured mechanism, without
/// utilities.
inline Outcome compute_outcome(const ValidatedInstance& inst) {
  Outcome out;
  switch (inst.config.mechanism) {
    case Mechanism::vcg: out = vcg_outcome(inst); break;
    case Mechanism::vickrey: out = vickrey_outcome(inst); break;
    case Mechanism::english: out = english_outcome(inst); break;
  }
  return apply_reserve(inst, std::move(out));
}

/// Winner determination followed by payments and utilities.
inline Outcome run_mechanism(const ValidatedInstance& inst) {
  Outcome out = compute_outcome(inst);
  for (AgentIndex a = 0; a < inst.agent_count(); ++a) {
    if (a >= inst.valuations.size() || !inst.valuations[a]) continue;
    auto& rec = out.agents[a];
    if (auto v = inst.valuation(a, rec.received())) rec.utility = utility(*v, rec.payment);
  }
  return out;
}

inline std::string format_outcome(const ValidatedInstance& inst, const Outcome& out) {
  std::ostringstream os;
  for (AgentIndex a = 0; a < inst.agent_count(); ++a) {
    const auto& rec = out.agents[a];
    os << "agent " << inst.agents[a] << " wins {";
    bool first = true;
    for (const auto& name : inst.item_names(rec.received())) {
      os << (first ? "" : " ") << name;
      first = false;
    }
    os << "} pays " << rec.payment << " clarke " << rec.clarke_tax << " utility ";
    if (rec.utility)
      os << *rec.utility;
    else
      os << "n/a";
    os << "\n";
  }
  os << "revenue " << out.revenue() << " sold " << (out.sold ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace mechcheck
