#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mechcheck/error.hpp"

namespace mechcheck {

/// Money in minor currency units. Parsed amounts are never negative; the type
/// is signed so that utilities and contrived outcomes can be represented.
using Money = std::int64_t;
using AgentIndex = std::size_t;
using BidIndex = std::size_t;

inline constexpr std::size_t kMaxItems = 64;

enum class Mechanism { vcg, vickrey, english };

inline std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::vcg: return "vcg";
    case Mechanism::vickrey: return "vickrey";
    case Mechanism::english: return "english";
  }
  return "vcg";
}

inline std::optional<Mechanism> parse_mechanism(std::string_view s) {
  if (s == "vcg") return Mechanism::vcg;
  if (s == "vickrey") return Mechanism::vickrey;
  if (s == "english") return Mechanism::english;
  return std::nullopt;
}

/// A set of items of one validated instance, stored as a bit set over the
/// dense item indexes.
class Bundle {
 public:
  constexpr Bundle() = default;
  constexpr explicit Bundle(std::uint64_t bits) : bits_(bits) {}

  static constexpr Bundle single(std::size_t item) { return Bundle(std::uint64_t{1} << item); }
  static constexpr Bundle all(std::size_t item_count) {
    return Bundle(item_count >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << item_count) - 1);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool contains(std::size_t item) const { return (bits_ >> item) & 1U; }
  constexpr bool subset_of(Bundle other) const { return (bits_ & ~other.bits_) == 0; }

  constexpr Bundle operator|(Bundle o) const { return Bundle(bits_ | o.bits_); }
  constexpr Bundle operator&(Bundle o) const { return Bundle(bits_ & o.bits_); }
  constexpr Bundle& operator|=(Bundle o) {
    bits_ |= o.bits_;
    return *this;
  }

  std::vector<std::size_t> items() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < 64; ++i)
      if (contains(i)) out.push_back(i);
    return out;
  }

  constexpr auto operator<=>(const Bundle&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

/// True iff the two bundles share no item.
constexpr bool bundles_disjoint(Bundle a, Bundle b) { return (a & b).empty(); }

struct Bid {
  AgentIndex agent = 0;
  Bundle bundle;
  Money amount = 0;

  bool operator==(const Bid&) const = default;
};

struct AuctionConfig {
  Mechanism mechanism = Mechanism::vcg;
  Money reserve = 0;
  std::int64_t duration = 0;  // rounds T; recorded only

  bool operator==(const AuctionConfig&) const = default;
};

// Unvalidated, name-based form as it appears in the instance text.

struct RawBid {
  std::string agent;
  std::vector<std::string> items;
  Money amount = 0;

  bool operator==(const RawBid&) const = default;
};

struct AuctionInstance {
  std::string name;
  std::vector<std::string> items;
  std::vector<RawBid> bids;
  std::vector<RawBid> valuations;
  AuctionConfig config;

  bool operator==(const AuctionInstance&) const = default;
};

using ValuationMap = std::map<Bundle, Money>;

/// An instance whose invariants have been checked. Agents are indexed by
/// first appearance in the bid list; agents that only declare valuations
/// follow in order of first appearance among the valuation lines.
struct ValidatedInstance {
  std::string name;
  std::vector<std::string> items;
  std::vector<std::string> agents;
  std::vector<Bid> bids;
  std::vector<std::optional<ValuationMap>> valuations;  // per agent
  AuctionConfig config;

  std::size_t item_count() const { return items.size(); }
  std::size_t agent_count() const { return agents.size(); }

  bool has_valuations() const {
    return std::any_of(valuations.begin(), valuations.end(), [](const auto& v) { return v.has_value(); });
  }

  std::optional<AgentIndex> find_agent(std::string_view id) const {
    auto it = std::find(agents.begin(), agents.end(), id);
    if (it == agents.end()) return std::nullopt;
    return static_cast<AgentIndex>(it - agents.begin());
  }

  std::optional<Money> valuation(AgentIndex agent, Bundle bundle) const {
    if (bundle.empty()) return 0;
    if (agent >= valuations.size() || !valuations[agent]) return std::nullopt;
    auto it = valuations[agent]->find(bundle);
    if (it == valuations[agent]->end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::string> item_names(Bundle bundle) const {
    std::vector<std::string> out;
    for (std::size_t i : bundle.items())
      if (i < items.size()) out.push_back(items[i]);
    return out;
  }

  /// Back to the name-based form, bundles listed in item-index order.
  AuctionInstance to_raw() const {
    AuctionInstance raw;
    raw.name = name;
    raw.items = items;
    raw.config = config;
    for (const Bid& b : bids) raw.bids.push_back({agents[b.agent], item_names(b.bundle), b.amount});
    for (AgentIndex a = 0; a < valuations.size(); ++a) {
      if (!valuations[a]) continue;
      if (valuations[a]->empty()) raw.valuations.push_back({agents[a], {}, 0});
      for (const auto& [bundle, value] : *valuations[a])
        raw.valuations.push_back({agents[a], item_names(bundle), value});
    }
    return raw;
  }

  bool operator==(const ValidatedInstance&) const = default;
};

namespace detail {

inline Bundle resolve_bundle(const std::vector<std::string>& names, const std::map<std::string, std::size_t>& index) {
  Bundle b;
  for (const auto& n : names) {
    auto it = index.find(n);
    if (it == index.end()) throw Error(ErrorCode::UnknownItemInBundle, "item '" + n + "' is not declared");
    b |= Bundle::single(it->second);
  }
  return b;
}

}  // namespace detail

inline ValidatedInstance validate_instance(const AuctionInstance& raw) {
  ValidatedInstance out;
  out.name = raw.name;
  out.config = raw.config;

  if (raw.items.empty()) throw Error(ErrorCode::NoItems, "instance declares no items");
  if (raw.items.size() > kMaxItems) throw Error(ErrorCode::TooManyItems, "at most 64 items are supported");
  std::map<std::string, std::size_t> item_index;
  for (const auto& id : raw.items) {
    if (!item_index.emplace(id, item_index.size()).second)
      throw Error(ErrorCode::DuplicateItem, "item '" + id + "' declared twice");
    out.items.push_back(id);
  }

  if (raw.config.mechanism != Mechanism::vcg && raw.items.size() != 1)
    throw Error(ErrorCode::MechanismArityMismatch,
                std::string(to_string(raw.config.mechanism)) + " requires exactly one item, got " +
                    std::to_string(raw.items.size()));
  if (raw.config.reserve < 0) throw Error(ErrorCode::NegativeAmount, "reserve is negative");
  if (raw.config.duration < 0) throw Error(ErrorCode::NegativeAmount, "duration is negative");

  if (raw.bids.empty()) throw Error(ErrorCode::NoBids, "instance has no bids");

  auto agent_of = [&](const std::string& id) {
    if (auto a = out.find_agent(id)) return *a;
    out.agents.push_back(id);
    return out.agents.size() - 1;
  };

  for (const auto& rb : raw.bids) {
    if (rb.amount < 0) throw Error(ErrorCode::NegativeAmount, "bid of agent '" + rb.agent + "' is negative");
    if (rb.items.empty()) throw Error(ErrorCode::EmptyBundle, "bid of agent '" + rb.agent + "' has an empty bundle");
    Bundle bundle = detail::resolve_bundle(rb.items, item_index);
    out.bids.push_back({agent_of(rb.agent), bundle, rb.amount});
  }

  std::vector<std::optional<ValuationMap>> vals;
  for (const auto& rv : raw.valuations) {
    if (rv.amount < 0) throw Error(ErrorCode::NegativeAmount, "valuation of agent '" + rv.agent + "' is negative");
    Bundle bundle = detail::resolve_bundle(rv.items, item_index);
    if (bundle.empty() && rv.amount != 0)
      throw Error(ErrorCode::EmptyBundle, "the empty bundle is valued at 0 by definition");
    AgentIndex a = agent_of(rv.agent);
    if (vals.size() <= a) vals.resize(a + 1);
    if (!vals[a]) vals[a].emplace();
    if (bundle.empty()) continue;
    if (!vals[a]->emplace(bundle, rv.amount).second)
      throw Error(ErrorCode::DuplicateValuation, "agent '" + rv.agent + "' values the same bundle twice");
  }
  vals.resize(out.agents.size());
  out.valuations = std::move(vals);
  return out;
}

inline ValidatedInstance validate_instance(const ValidatedInstance& inst) { return validate_instance(inst.to_raw()); }

}  // namespace mechcheck
