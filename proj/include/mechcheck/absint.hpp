#pragma once

// Collecting semantics of lowered process programs, their interval
// abstraction, and the harness that checks the abstraction is sound.
//
// States are partial maps from variables to integers. Reading an unbound
// variable gets the execution stuck. Abstractly, a variable mapped to bottom
// (or absent) is one no reachable state binds.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mechcheck/asl.hpp"
#include "mechcheck/interval.hpp"
#include "mechcheck/kernel.hpp"

namespace mechcheck::kernel {

using ConcreteState = std::map<std::string, std::int64_t>;
using ConcreteStateSet = std::set<ConcreteState>;

inline std::string format_state(const ConcreteState& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, x] : s) {
    out += (first ? "" : " ") + v + "=" + std::to_string(x);
    first = false;
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Concrete collecting semantics

struct CollectResult {
  ConcreteStateSet states;
  bool exhausted = false;  // some run hit the loop fuel
  bool stuck = false;      // some run read an unbound variable
};

namespace detail {

inline std::optional<std::int64_t> eval_concrete(const asl::Expr& e, const ConcreteState& s) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    const auto& t = e.terms[i];
    std::int64_t v = 0;
    if (t.is_var) {
      auto it = s.find(t.var);
      if (it == s.end()) return std::nullopt;
      v = it->second;
    } else {
      v = Saturating::clamp(t.value);
    }
    acc = i == 0 ? v : (e.ops[i - 1] == '+' ? Saturating::add(acc, v) : Saturating::sub(acc, v));
  }
  return acc;
}

inline bool compare(std::int64_t a, asl::CmpOp op, std::int64_t b) {
  switch (op) {
    case asl::CmpOp::lt: return a < b;
    case asl::CmpOp::le: return a <= b;
    case asl::CmpOp::gt: return a > b;
    case asl::CmpOp::ge: return a >= b;
    case asl::CmpOp::eq: return a == b;
    case asl::CmpOp::ne: return a != b;
  }
  return false;
}

class ConcreteRunner {
 public:
  ConcreteRunner(CollectResult& out, std::uint64_t fuel) : out_(out), fuel_(fuel) {}

  // False once the run cannot continue.
  bool run(const std::vector<asl::Stmt>& body, ConcreteState& s) {
    for (const auto& st : body)
      if (!step(st, s)) return false;
    return true;
  }

 private:
  bool step(const asl::Stmt& st, ConcreteState& s) {
    switch (st.kind) {
      case asl::Stmt::Kind::assign: {
        auto v = eval_concrete(st.expr, s);
        if (!v) return stuck();
        s[st.name] = *v;
        out_.states.insert(s);
        return true;
      }
      case asl::Stmt::Kind::sequence: return run(st.body, s);
      case asl::Stmt::Kind::perform: return true;
      case asl::Stmt::Kind::while_:
        for (;;) {
          auto l = eval_concrete(st.cond.lhs, s);
          auto r = eval_concrete(st.cond.rhs, s);
          if (!l || !r) return stuck();
          if (!compare(*l, st.cond.op, *r)) return true;
          if (fuel_ == 0) {
            out_.exhausted = true;
            return false;
          }
          --fuel_;
          if (!run(st.body, s)) return false;
        }
    }
    return true;
  }

  bool stuck() {
    out_.stuck = true;
    return false;
  }

  CollectResult& out_;
  std::uint64_t fuel_;
};

}  // namespace detail

/// Every state reachable from d0, initial and intermediate ones included.
/// Each run may execute at most `fuel` loop iterations in total.
inline CollectResult concrete_collect(const ProcessProgram& p, const ConcreteStateSet& d0, std::uint64_t fuel) {
  CollectResult out;
  for (const auto& init : d0) {
    out.states.insert(init);
    ConcreteState s = init;
    detail::ConcreteRunner(out, fuel).run(p.body, s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Abstract domain

/// Non-relational interval state. Unreachable is the lattice bottom;
/// otherwise each variable has an interval, bottom meaning "never bound".
class AbstractState {
 public:
  static AbstractState unreachable() { return AbstractState(); }
  static AbstractState empty() {
    AbstractState a;
    a.reachable_ = true;
    return a;
  }
  static AbstractState top(const std::vector<std::string>& vars) {
    AbstractState a = empty();
    for (const auto& v : vars) a.set(v, Interval::top());
    return a;
  }

  bool reachable() const { return reachable_; }
  const std::map<std::string, Interval>& vars() const { return vars_; }

  Interval get(const std::string& v) const {
    auto it = vars_.find(v);
    return it == vars_.end() ? Interval::bottom() : it->second;
  }

  void set(const std::string& v, const Interval& i) {
    if (i.is_bottom())
      vars_.erase(v);
    else
      vars_[v] = i;
  }

  bool leq(const AbstractState& o) const {
    if (!reachable_) return true;
    if (!o.reachable_) return false;
    for (const auto& [v, i] : vars_)
      if (!i.leq(o.get(v))) return false;
    return true;
  }

  AbstractState join(const AbstractState& o) const { return combine(o, &Interval::join, true); }
  AbstractState meet(const AbstractState& o) const { return combine(o, &Interval::meet, false); }
  AbstractState widen(const AbstractState& o) const { return combine(o, &Interval::widen, true); }
  AbstractState narrow(const AbstractState& o) const { return combine(o, &Interval::narrow, false); }

  std::string to_string() const {
    if (!reachable_) return "unreachable";
    std::string out;
    for (const auto& [v, i] : vars_) out += (out.empty() ? "" : " ") + v + "=" + i.to_string();
    return out.empty() ? "{}" : out;
  }

  bool operator==(const AbstractState&) const = default;

 private:
  // Upper operations keep the reachable side when the other is bottom;
  // lower operations collapse to bottom.
  AbstractState combine(const AbstractState& o, Interval (Interval::*op)(const Interval&) const, bool upper) const {
    if (!reachable_ || !o.reachable_) {
      if (!upper) return unreachable();
      return reachable_ ? *this : o;
    }
    AbstractState out = empty();
    std::set<std::string> names;
    for (const auto& [v, i] : vars_) names.insert(v);
    for (const auto& [v, i] : o.vars_) names.insert(v);
    for (const auto& v : names) out.set(v, (get(v).*op)(o.get(v)));
    return out;
  }

  bool reachable_ = false;
  std::map<std::string, Interval> vars_;
};

/// Pointwise interval hull; unreachable for the empty set.
inline AbstractState alpha(const ConcreteStateSet& states) {
  AbstractState a = AbstractState::unreachable();
  for (const auto& s : states) {
    AbstractState one = AbstractState::empty();
    for (const auto& [v, x] : s) one.set(v, Interval::point(x));
    a = a.join(one);
  }
  return a;
}

/// Membership in the concretisation: every variable the state binds lies in
/// its interval.
inline bool gamma_contains(const AbstractState& a, const ConcreteState& s) {
  if (!a.reachable()) return false;
  for (const auto& [v, x] : s)
    if (!a.get(v).contains(x)) return false;
  return true;
}

struct AnalysisOptions {
  int widening_delay = 3;
  bool narrowing = true;
  int max_iterations = 10'000;
};

template <class Arith = IntervalArith>
class IntervalAnalyzer {
 public:
  explicit IntervalAnalyzer(AnalysisOptions opts = {}) : opts_(opts) {}

  /// Join of the abstract states at every program point, entry included.
  AbstractState reachable(const ProcessProgram& p, const AbstractState& entry) const {
    AbstractState acc = entry;
    exec(p.body, entry, &acc);
    return acc;
  }

  /// Abstract state at program exit.
  AbstractState exit(const ProcessProgram& p, const AbstractState& entry) const {
    return exec(p.body, entry, nullptr);
  }

  Interval eval(const asl::Expr& e, const AbstractState& s) const {
    Interval acc;
    for (std::size_t i = 0; i < e.terms.size(); ++i) {
      const auto& t = e.terms[i];
      Interval v = t.is_var ? s.get(t.var) : Interval::point(Saturating::clamp(t.value));
      if (v.is_bottom()) return Interval::bottom();
      acc = i == 0 ? v : (e.ops[i - 1] == '+' ? Arith::add(acc, v) : Arith::sub(acc, v));
    }
    return acc;
  }

  /// States of `s` that can satisfy `c`.
  AbstractState refine(const AbstractState& s, const asl::Cond& c) const {
    if (!s.reachable()) return s;
    Interval l = eval(c.lhs, s), r = eval(c.rhs, s);
    if (l.is_bottom() || r.is_bottom() || !satisfiable(l, c.op, r)) return AbstractState::unreachable();
    AbstractState out = s;
    if (auto v = single_var(c.lhs)) {
      Interval x = restrict(out.get(*v), c.op, r);
      if (x.is_bottom()) return AbstractState::unreachable();
      out.set(*v, x);
    }
    if (auto v = single_var(c.rhs)) {
      Interval y = restrict(out.get(*v), flip(c.op), eval(c.lhs, out));
      if (y.is_bottom()) return AbstractState::unreachable();
      out.set(*v, y);
    }
    return out;
  }

 private:
  static std::optional<std::string> single_var(const asl::Expr& e) {
    if (e.terms.size() == 1 && e.terms[0].is_var) return e.terms[0].var;
    return std::nullopt;
  }

  static asl::CmpOp flip(asl::CmpOp op) {
    switch (op) {
      case asl::CmpOp::lt: return asl::CmpOp::gt;
      case asl::CmpOp::le: return asl::CmpOp::ge;
      case asl::CmpOp::gt: return asl::CmpOp::lt;
      case asl::CmpOp::ge: return asl::CmpOp::le;
      default: return op;
    }
  }

  static bool satisfiable(const Interval& l, asl::CmpOp op, const Interval& r) {
    switch (op) {
      case asl::CmpOp::lt: return l.lo() < r.hi();
      case asl::CmpOp::le: return l.lo() <= r.hi();
      case asl::CmpOp::gt: return l.hi() > r.lo();
      case asl::CmpOp::ge: return l.hi() >= r.lo();
      case asl::CmpOp::eq: return !l.meet(r).is_bottom();
      case asl::CmpOp::ne: return !(l.singleton() && r.singleton() && l.lo() == r.lo());
    }
    return true;
  }

  static std::int64_t below(std::int64_t b) { return b == Interval::kPosInf ? b : Saturating::sub(b, 1); }
  static std::int64_t above(std::int64_t b) { return b == Interval::kNegInf ? b : Saturating::add(b, 1); }

  // Values of x that can stand in relation `op` to some value of r.
  static Interval restrict(const Interval& x, asl::CmpOp op, const Interval& r) {
    if (x.is_bottom() || r.is_bottom()) return Interval::bottom();
    switch (op) {
      case asl::CmpOp::lt: return x.meet(Interval::of(Interval::kNegInf, below(r.hi())));
      case asl::CmpOp::le: return x.meet(Interval::of(Interval::kNegInf, r.hi()));
      case asl::CmpOp::gt: return x.meet(Interval::of(above(r.lo()), Interval::kPosInf));
      case asl::CmpOp::ge: return x.meet(Interval::of(r.lo(), Interval::kPosInf));
      case asl::CmpOp::eq: return x.meet(r);
      case asl::CmpOp::ne:
        if (!r.singleton()) return x;
        if (x.singleton() && x.lo() == r.lo()) return Interval::bottom();
        if (x.lo() == r.lo()) return Interval::of(above(x.lo()), x.hi());
        if (x.hi() == r.lo()) return Interval::of(x.lo(), below(x.hi()));
        return x;
    }
    return x;
  }

  static void collect(AbstractState* acc, const AbstractState& s) {
    if (acc) *acc = acc->join(s);
  }

  AbstractState exec(const std::vector<asl::Stmt>& body, AbstractState s, AbstractState* acc) const {
    for (const auto& st : body) s = exec(st, s, acc);
    return s;
  }

  AbstractState exec(const asl::Stmt& st, const AbstractState& in, AbstractState* acc) const {
    switch (st.kind) {
      case asl::Stmt::Kind::assign: {
        if (!in.reachable()) return in;
        Interval v = eval(st.expr, in);
        if (v.is_bottom()) return AbstractState::unreachable();
        AbstractState out = in;
        out.set(st.name, v);
        collect(acc, out);
        return out;
      }
      case asl::Stmt::Kind::sequence: return exec(st.body, in, acc);
      case asl::Stmt::Kind::perform: return in;
      case asl::Stmt::Kind::while_: return loop(st, in, acc);
    }
    return in;
  }

  AbstractState loop(const asl::Stmt& st, const AbstractState& in, AbstractState* acc) const {
    auto step = [&](const AbstractState& head) {
      return in.join(exec(st.body, refine(head, st.cond), nullptr));
    };
    AbstractState head = in;
    for (int k = 0; k < opts_.max_iterations; ++k) {
      AbstractState next = step(head);
      AbstractState grown = k < opts_.widening_delay ? head.join(next) : head.widen(next);
      if (grown.leq(head)) break;
      head = grown;
      if (k + 1 == opts_.max_iterations) head = head.widen(AbstractState::top(all_vars(head, next)));
    }
    if (opts_.narrowing) head = head.narrow(step(head));
    if (acc) {
      collect(acc, head);
      exec(st.body, refine(head, st.cond), acc);
    }
    asl::Cond exit_cond{st.cond.lhs, asl::negate(st.cond.op), st.cond.rhs};
    AbstractState out = refine(head, exit_cond);
    collect(acc, out);
    return out;
  }

  static std::vector<std::string> all_vars(const AbstractState& a, const AbstractState& b) {
    std::set<std::string> names;
    for (const auto& [v, i] : a.vars()) names.insert(v);
    for (const auto& [v, i] : b.vars()) names.insert(v);
    return {names.begin(), names.end()};
  }

  AnalysisOptions opts_;
};

/// The abstract reachable states p# of a program from abstract entry d0#.
template <class Arith = IntervalArith>
AbstractState abstract_fixpoint(const ProcessProgram& p, const AbstractState& entry, AnalysisOptions opts = {}) {
  return IntervalAnalyzer<Arith>(opts).reachable(p, entry);
}

// ---------------------------------------------------------------------------
// Soundness harness

struct SoundnessReport {
  enum class Status { pass, fail, inconclusive };
  std::string program;
  Status status = Status::pass;
  std::uint64_t fuel = 0;
  std::size_t concrete_states = 0;
  AbstractState abstract;
  std::optional<ConcreteState> offending;
};

inline std::string_view to_string(SoundnessReport::Status s) {
  switch (s) {
    case SoundnessReport::Status::pass: return "PASS";
    case SoundnessReport::Status::fail: return "FAIL";
    case SoundnessReport::Status::inconclusive: return "INCONCLUSIVE";
  }
  return "FAIL";
}

/// Checks that every concretely reachable state lies in the concretisation
/// of the abstract result computed from alpha(d0).
template <class Arith = IntervalArith>
SoundnessReport check_soundness(const ProcessProgram& p, const ConcreteStateSet& d0, std::uint64_t fuel,
                                AnalysisOptions opts = {}) {
  SoundnessReport report;
  report.program = p.name;
  report.fuel = fuel;
  CollectResult concrete = concrete_collect(p, d0, fuel);
  report.concrete_states = concrete.states.size();
  report.abstract = abstract_fixpoint<Arith>(p, alpha(d0), opts);
  if (concrete.exhausted) {
    report.status = SoundnessReport::Status::inconclusive;
    return report;
  }
  for (const auto& s : concrete.states) {
    if (!gamma_contains(report.abstract, s)) {
      report.status = SoundnessReport::Status::fail;
      report.offending = s;
      return report;
    }
  }
  return report;
}

inline std::string format_report(const SoundnessReport& r) {
  std::ostringstream os;
  os << "process " << r.program << "\n";
  os << "fuel " << r.fuel << "\n";
  os << "concrete_states " << r.concrete_states << "\n";
  os << "abstract " << r.abstract.to_string() << "\n";
  os << "soundness " << to_string(r.status) << "\n";
  if (r.offending) os << "offending " << format_state(*r.offending) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Counterexamples

/// "var stays within allowed".
struct IntervalProperty {
  std::string var;
  Interval allowed;
};

struct AbstractCounterexample {
  enum class Status { holds, witness, unbounded_witness };
  Status status = Status::holds;
  ConcreteState state;
};

namespace detail {

// Element of [lo, hi] closest to zero.
inline std::int64_t closest_to_zero(const Interval& i) {
  if (i.contains(0)) return 0;
  return i.lo() > 0 ? i.lo() : i.hi();
}

}  // namespace detail

/// Picks a concrete state of gamma(a) that breaks the property: the lowest
/// violating value when the violating region is bounded, else the region's
/// element of lowest magnitude. Other bound variables take their value
/// closest to zero.
inline AbstractCounterexample concretize_counterexample(const AbstractState& a, const IntervalProperty& prop) {
  AbstractCounterexample out;
  if (!a.reachable()) return out;
  Interval x = a.get(prop.var);
  if (x.is_bottom() || x.leq(prop.allowed)) return out;

  Interval region_low, region_high;
  if (prop.allowed.is_bottom()) {
    region_low = x;
  } else {
    if (!prop.allowed.lo_infinite())
      region_low = x.meet(Interval::of(Interval::kNegInf, Saturating::sub(prop.allowed.lo(), 1)));
    if (!prop.allowed.hi_infinite())
      region_high = x.meet(Interval::of(Saturating::add(prop.allowed.hi(), 1), Interval::kPosInf));
  }

  std::int64_t value = 0;
  if (!region_low.is_bottom()) {
    bool unbounded = region_low.lo_infinite();
    value = unbounded ? detail::closest_to_zero(region_low) : region_low.lo();
    out.status = unbounded ? AbstractCounterexample::Status::unbounded_witness
                           : AbstractCounterexample::Status::witness;
  } else if (!region_high.is_bottom()) {
    bool unbounded = region_high.hi_infinite();
    value = unbounded ? detail::closest_to_zero(region_high) : region_high.lo();
    out.status = unbounded ? AbstractCounterexample::Status::unbounded_witness
                           : AbstractCounterexample::Status::witness;
  } else {
    return out;
  }
  for (const auto& [v, i] : a.vars()) out.state[v] = detail::closest_to_zero(i);
  out.state[prop.var] = value;
  return out;
}

struct Resimulation {
  enum class Status { real, spurious, inconclusive };
  Status status = Status::spurious;
  std::optional<ConcreteState> state;  // a concrete violation when real
};

/// Replays the program concretely to decide whether an abstract
/// counterexample to the property is real.
inline Resimulation resimulate(const ProcessProgram& p, const ConcreteStateSet& d0, std::uint64_t fuel,
                               const IntervalProperty& prop) {
  Resimulation out;
  CollectResult concrete = concrete_collect(p, d0, fuel);
  for (const auto& s : concrete.states) {
    auto it = s.find(prop.var);
    if (it != s.end() && !prop.allowed.contains(it->second)) {
      out.status = Resimulation::Status::real;
      out.state = s;
      return out;
    }
  }
  if (concrete.exhausted) out.status = Resimulation::Status::inconclusive;
  return out;
}

}  // namespace mechcheck::kernel
