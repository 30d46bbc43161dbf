#pragma once

// Finite set-theoretic interpretation of a checked ASL spec. Classes are
// sets of individuals, object properties sets of individual pairs and
// datatype properties sets of (individual, value) pairs, all evaluated
// under a closed world.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mechcheck/asl.hpp"
#include "mechcheck/asl_check.hpp"
#include "mechcheck/asl_parser.hpp"

namespace mechcheck::kernel {

using Individual = std::size_t;
using IndividualSet = std::set<Individual>;
using ObjectRelation = std::set<std::pair<Individual, Individual>>;
using DataRelation = std::set<std::pair<Individual, std::int64_t>>;

struct KernelModel {
  std::vector<std::string> universe;  // declaration order
  std::map<std::string, IndividualSet> classes;
  std::map<std::string, ObjectRelation> objprops;
  std::map<std::string, DataRelation> dataprops;

  IndividualSet everything() const {
    IndividualSet s;
    for (Individual i = 0; i < universe.size(); ++i) s.insert(i);
    return s;
  }

  std::optional<Individual> find_individual(const std::string& name) const {
    for (Individual i = 0; i < universe.size(); ++i)
      if (universe[i] == name) return i;
    return std::nullopt;
  }

  bool operator==(const KernelModel&) const = default;
};

/// A process body after inlining every perform; only assignment, sequence
/// and while remain. `vars` lists every variable it mentions, sorted.
struct ProcessProgram {
  std::string name;
  std::vector<std::string> vars;
  std::vector<asl::Stmt> body;

  bool operator==(const ProcessProgram&) const = default;
};

struct KernelTranslation {
  KernelModel model;
  std::vector<ProcessProgram> programs;

  const ProcessProgram* find_program(const std::string& name) const {
    for (const auto& p : programs)
      if (p.name == name) return &p;
    return nullptr;
  }
};

/// Evaluates a class expression against the model's extents.
///   some(op, c) = { i | exists y. (i, y) in op and y in c }
///   all(op, c)  = { i | forall y. (i, y) in op implies y in c }
/// Unknown names evaluate to the empty set.
inline IndividualSet eval_class_expr(const KernelModel& model, const asl::ClassExpr& e) {
  using Kind = asl::ClassExpr::Kind;
  switch (e.kind) {
    case Kind::named: {
      auto it = model.classes.find(e.name);
      return it == model.classes.end() ? IndividualSet{} : it->second;
    }
    case Kind::some:
    case Kind::all: {
      IndividualSet filler = eval_class_expr(model, e.operands.at(0));
      static const ObjectRelation kEmpty;
      auto it = model.objprops.find(e.name);
      const ObjectRelation& op = it == model.objprops.end() ? kEmpty : it->second;
      IndividualSet out;
      if (e.kind == Kind::some) {
        for (auto [i, y] : op)
          if (filler.count(y)) out.insert(i);
      } else {
        out = model.everything();
        for (auto [i, y] : op)
          if (!filler.count(y)) out.erase(i);
      }
      return out;
    }
    case Kind::and_:
    case Kind::or_: {
      IndividualSet a = eval_class_expr(model, e.operands.at(0));
      IndividualSet b = eval_class_expr(model, e.operands.at(1));
      IndividualSet out;
      for (Individual i : a)
        if (e.kind == Kind::or_ || b.count(i)) out.insert(i);
      if (e.kind == Kind::or_) out.insert(b.begin(), b.end());
      return out;
    }
  }
  return {};
}

namespace detail {

using Renaming = std::map<std::string, std::string>;

inline std::string rename(const Renaming& r, const std::string& v) {
  auto it = r.find(v);
  return it == r.end() ? v : it->second;
}

inline asl::Expr rename(const Renaming& r, asl::Expr e) {
  for (auto& t : e.terms)
    if (t.is_var) t.var = rename(r, t.var);
  return e;
}

inline std::vector<asl::Stmt> inline_body(const asl::CheckedSpec& spec, const std::vector<asl::Stmt>& body,
                                          const Renaming& r);

inline asl::Stmt inline_stmt(const asl::CheckedSpec& spec, const asl::Stmt& s, const Renaming& r) {
  asl::Stmt out;
  out.loc = s.loc;
  switch (s.kind) {
    case asl::Stmt::Kind::assign:
      out.kind = s.kind;
      out.name = rename(r, s.name);
      out.expr = rename(r, s.expr);
      break;
    case asl::Stmt::Kind::perform: {
      // Callee inputs are bound to the caller's argument variables; all
      // other callee variables are shared by name.
      const auto& callee = spec.processes[spec.process_index.at(s.name)];
      Renaming inner;
      for (std::size_t k = 0; k < callee.inputs.size() && k < s.args.size(); ++k)
        inner[callee.inputs[k]] = rename(r, s.args[k]);
      out.kind = asl::Stmt::Kind::sequence;
      out.body = inline_body(spec, callee.body, inner);
      break;
    }
    case asl::Stmt::Kind::sequence:
      out.kind = s.kind;
      out.body = inline_body(spec, s.body, r);
      break;
    case asl::Stmt::Kind::while_:
      out.kind = s.kind;
      out.cond = {rename(r, s.cond.lhs), s.cond.op, rename(r, s.cond.rhs)};
      out.body = inline_body(spec, s.body, r);
      break;
  }
  return out;
}

inline std::vector<asl::Stmt> inline_body(const asl::CheckedSpec& spec, const std::vector<asl::Stmt>& body,
                                          const Renaming& r) {
  std::vector<asl::Stmt> out;
  for (const auto& s : body) out.push_back(inline_stmt(spec, s, r));
  return out;
}

inline void collect_vars(const asl::Expr& e, std::set<std::string>& vars) {
  for (const auto& t : e.terms)
    if (t.is_var) vars.insert(t.var);
}

inline void collect_vars(const std::vector<asl::Stmt>& body, std::set<std::string>& vars) {
  for (const auto& s : body) {
    if (s.kind == asl::Stmt::Kind::assign) {
      vars.insert(s.name);
      collect_vars(s.expr, vars);
    } else if (s.kind == asl::Stmt::Kind::while_) {
      collect_vars(s.cond.lhs, vars);
      collect_vars(s.cond.rhs, vars);
    }
    collect_vars(s.body, vars);
  }
}

}  // namespace detail

inline ProcessProgram make_program(std::string name, std::vector<asl::Stmt> body) {
  std::set<std::string> vars;
  detail::collect_vars(body, vars);
  return {std::move(name), {vars.begin(), vars.end()}, std::move(body)};
}

/// Lowers a checked spec: the universe is the declared individuals, class
/// extents are closed upward through subclassOf, defined classes are
/// evaluated from their expressions, and process bodies are inlined.
inline KernelTranslation lower_to_kernel(const asl::CheckedSpec& spec) {
  KernelTranslation out;
  KernelModel& m = out.model;
  for (const auto& ind : spec.individuals) m.universe.push_back(ind.name);

  for (const auto& c : spec.classes)
    if (!c.definition) m.classes[c.name];
  for (Individual i = 0; i < spec.individuals.size(); ++i)
    for (std::optional<std::size_t> c = spec.individuals[i].cls; c; c = spec.classes[*c].super)
      m.classes[spec.classes[*c].name].insert(i);

  for (const auto& p : spec.objprops) m.objprops[p];
  for (const auto& a : spec.obj_assertions) m.objprops[spec.objprops[a.prop]].insert({a.subject, a.object});
  for (const auto& p : spec.dataprops) m.dataprops[p];
  for (const auto& a : spec.data_assertions) m.dataprops[spec.dataprops[a.prop]].insert({a.subject, a.value});

  // Defined classes in dependency order; validation rules out cycles.
  auto ready = [&](const asl::ClassExpr& e, auto& self) -> bool {
    if (e.kind == asl::ClassExpr::Kind::named) return m.classes.count(e.name) > 0;
    for (const auto& op : e.operands)
      if (!self(op, self)) return false;
    return true;
  };
  for (bool progress = true; progress;) {
    progress = false;
    for (const auto& c : spec.classes) {
      if (!c.definition || m.classes.count(c.name) || !ready(*c.definition, ready)) continue;
      m.classes[c.name] = eval_class_expr(m, *c.definition);
      progress = true;
    }
  }

  for (const auto& p : spec.processes)
    out.programs.push_back(make_program(p.name, detail::inline_body(spec, p.body, {})));
  return out;
}

/// Convenience for tests and tools: a program from statement source text.
inline ProcessProgram parse_program(std::string_view statements, std::string name = "P") {
  asl::SpecAst ast = asl::parse("process " + name + " { body { " + std::string(statements) + " } }");
  asl::CheckedSpec spec = asl::validate(ast);
  return lower_to_kernel(spec).programs.at(0);
}

// Canonical text forms.

inline std::string sexpr(const asl::Expr& e) {
  std::string acc = asl::print(e.terms.at(0));
  for (std::size_t i = 1; i < e.terms.size(); ++i)
    acc = std::string("(") + e.ops[i - 1] + " " + acc + " " + asl::print(e.terms[i]) + ")";
  return acc;
}

inline std::string sexpr(const asl::Cond& c) {
  return "(" + std::string(asl::to_string(c.op)) + " " + sexpr(c.lhs) + " " + sexpr(c.rhs) + ")";
}

inline std::string sexpr(const std::vector<asl::Stmt>& body);

inline std::string sexpr(const asl::Stmt& s) {
  switch (s.kind) {
    case asl::Stmt::Kind::assign: return "(assign " + s.name + " " + sexpr(s.expr) + ")";
    case asl::Stmt::Kind::while_: return "(while " + sexpr(s.cond) + " " + sexpr(s.body) + ")";
    case asl::Stmt::Kind::sequence: return sexpr(s.body);
    case asl::Stmt::Kind::perform: return "(perform " + s.name + ")";
  }
  return {};
}

inline std::string sexpr(const std::vector<asl::Stmt>& body) {
  std::string out = "(seq";
  for (const auto& s : body) out += " " + sexpr(s);
  return out + ")";
}

inline std::string format_program(const ProcessProgram& p) {
  std::string out = "program " + p.name + " (vars";
  for (const auto& v : p.vars) out += " " + v;
  return out + ") " + sexpr(p.body);
}

inline std::string format_translation(const KernelTranslation& t) {
  const auto& m = t.model;
  std::ostringstream os;
  os << "universe";
  for (const auto& u : m.universe) os << " " << u;
  os << "\n";
  for (const auto& [name, ext] : m.classes) {
    os << "class " << name << " {";
    bool first = true;
    for (Individual i : ext) {
      os << (first ? "" : " ") << m.universe[i];
      first = false;
    }
    os << "}\n";
  }
  for (const auto& [name, rel] : m.objprops) {
    os << "objprop " << name << " {";
    bool first = true;
    for (auto [a, b] : rel) {
      os << (first ? "" : " ") << "(" << m.universe[a] << "," << m.universe[b] << ")";
      first = false;
    }
    os << "}\n";
  }
  for (const auto& [name, rel] : m.dataprops) {
    os << "dataprop " << name << " {";
    bool first = true;
    for (auto [a, v] : rel) {
      os << (first ? "" : " ") << "(" << m.universe[a] << "," << v << ")";
      first = false;
    }
    os << "}\n";
  }
  for (const auto& p : t.programs) os << format_program(p) << "\n";
  return os.str();
}

}  // namespace mechcheck::kernel
