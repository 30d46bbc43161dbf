#pragma once

// Name resolution and well-formedness checks for a parsed ASL spec.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mechcheck/asl.hpp"

namespace mechcheck::asl {

struct CheckedClass {
  std::string name;
  std::optional<std::size_t> super;     // primitive classes only
  std::optional<ClassExpr> definition;  // defined classes only
  SourceLoc loc;
};

struct CheckedIndividual {
  std::string name;
  std::size_t cls = 0;
};

struct ObjAssertion {
  std::size_t prop = 0, subject = 0, object = 0;
};

struct DataAssertion {
  std::size_t prop = 0, subject = 0;
  std::int64_t value = 0;
};

struct CheckedProcess {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<Cond> pre;
  std::vector<Cond> result;
  bool composite = false;
  std::vector<Stmt> body;
  std::vector<std::size_t> callees;
};

/// A spec whose references all resolve. Indexes follow declaration order.
struct CheckedSpec {
  SpecAst ast;
  std::vector<CheckedClass> classes;
  std::vector<CheckedIndividual> individuals;
  std::vector<std::string> objprops;
  std::vector<std::string> dataprops;
  std::vector<ObjAssertion> obj_assertions;
  std::vector<DataAssertion> data_assertions;
  std::vector<CheckedProcess> processes;

  std::map<std::string, std::size_t> class_index, individual_index, objprop_index, dataprop_index, process_index;

  std::optional<std::size_t> find_process(const std::string& name) const {
    auto it = process_index.find(name);
    if (it == process_index.end()) return std::nullopt;
    return it->second;
  }
};

namespace detail {

[[noreturn]] inline void semantic_error(ErrorKind kind, SourceLoc loc, std::string message) {
  throw SpecError({kind, loc.line, loc.col, std::move(message), {}});
}

inline std::size_t declare(std::map<std::string, std::size_t>& index, const std::string& name, SourceLoc loc,
                           std::string_view what) {
  auto [it, fresh] = index.emplace(name, index.size());
  if (!fresh) semantic_error(ErrorKind::DuplicateDeclaration, loc, std::string(what) + " '" + name + "' declared twice");
  return it->second;
}

inline void collect_performs(const std::vector<Stmt>& body, std::vector<const Stmt*>& out) {
  for (const auto& s : body) {
    if (s.kind == Stmt::Kind::perform) out.push_back(&s);
    collect_performs(s.body, out);
  }
}

}  // namespace detail

inline CheckedSpec validate(const SpecAst& ast) {
  using detail::semantic_error;
  CheckedSpec spec;
  spec.ast = ast;

  // Pass 1: declare every name, so references may point forward.
  for (const auto& decl : ast.decls) {
    if (auto* c = std::get_if<ClassDecl>(&decl)) {
      detail::declare(spec.class_index, c->name, c->loc, "class");
      spec.classes.push_back({c->name, std::nullopt, c->definition, c->loc});
    } else if (auto* i = std::get_if<IndividualDecl>(&decl)) {
      detail::declare(spec.individual_index, i->name, i->loc, "individual");
      spec.individuals.push_back({i->name, 0});
    } else if (auto* o = std::get_if<ObjPropDecl>(&decl)) {
      if (spec.dataprop_index.count(o->name))
        semantic_error(ErrorKind::DuplicateDeclaration, o->loc, "property '" + o->name + "' declared twice");
      detail::declare(spec.objprop_index, o->name, o->loc, "property");
      spec.objprops.push_back(o->name);
    } else if (auto* p = std::get_if<DataPropDecl>(&decl)) {
      if (spec.objprop_index.count(p->name))
        semantic_error(ErrorKind::DuplicateDeclaration, p->loc, "property '" + p->name + "' declared twice");
      detail::declare(spec.dataprop_index, p->name, p->loc, "property");
      spec.dataprops.push_back(p->name);
    } else if (auto* pr = std::get_if<ProcessDecl>(&decl)) {
      detail::declare(spec.process_index, pr->name, pr->loc, "process");
      CheckedProcess cp;
      cp.name = pr->name;
      cp.inputs = pr->inputs();
      cp.outputs = pr->outputs();
      for (const auto& s : pr->sections) {
        if (s.kind == Section::Kind::pre && s.cond) cp.pre.push_back(*s.cond);
        if (s.kind == Section::Kind::result && s.cond) cp.result.push_back(*s.cond);
      }
      cp.composite = pr->is_composite();
      cp.body = pr->body();
      spec.processes.push_back(std::move(cp));
    }
  }

  auto class_of = [&](const std::string& name, SourceLoc loc) {
    auto it = spec.class_index.find(name);
    if (it == spec.class_index.end()) semantic_error(ErrorKind::UnknownClass, loc, "unknown class '" + name + "'");
    return it->second;
  };
  auto individual_of = [&](const std::string& name, SourceLoc loc) {
    auto it = spec.individual_index.find(name);
    if (it == spec.individual_index.end())
      semantic_error(ErrorKind::UnknownIndividual, loc, "unknown individual '" + name + "'");
    return it->second;
  };
  auto objprop_of = [&](const std::string& name, SourceLoc loc) {
    auto it = spec.objprop_index.find(name);
    if (it == spec.objprop_index.end())
      semantic_error(ErrorKind::UnknownProperty, loc, "unknown object property '" + name + "'");
    return it->second;
  };
  auto dataprop_of = [&](const std::string& name, SourceLoc loc) {
    auto it = spec.dataprop_index.find(name);
    if (it == spec.dataprop_index.end())
      semantic_error(ErrorKind::UnknownProperty, loc, "unknown datatype property '" + name + "'");
    return it->second;
  };

  // Pass 2: resolve references.
  std::function<void(const ClassExpr&, SourceLoc, std::vector<std::size_t>&)> resolve_expr =
      [&](const ClassExpr& e, SourceLoc loc, std::vector<std::size_t>& deps) {
        switch (e.kind) {
          case ClassExpr::Kind::named: deps.push_back(class_of(e.name, loc)); break;
          case ClassExpr::Kind::some:
          case ClassExpr::Kind::all:
            objprop_of(e.name, loc);
            resolve_expr(e.operands.at(0), loc, deps);
            break;
          case ClassExpr::Kind::and_:
          case ClassExpr::Kind::or_:
            resolve_expr(e.operands.at(0), loc, deps);
            resolve_expr(e.operands.at(1), loc, deps);
            break;
        }
      };

  std::vector<std::vector<std::size_t>> class_deps(spec.classes.size());
  std::size_t ci = 0, ii = 0;
  for (const auto& decl : ast.decls) {
    if (auto* c = std::get_if<ClassDecl>(&decl)) {
      if (c->super) {
        std::size_t s = class_of(*c->super, c->loc);
        if (spec.classes[s].definition)
          semantic_error(ErrorKind::InvalidDefinedClassUse, c->loc,
                         "'" + c->name + "' cannot be a subclass of defined class '" + *c->super + "'");
        spec.classes[ci].super = s;
      }
      if (c->definition) resolve_expr(*c->definition, c->loc, class_deps[ci]);
      ++ci;
    } else if (auto* i = std::get_if<IndividualDecl>(&decl)) {
      std::size_t k = class_of(i->cls, i->loc);
      if (spec.classes[k].definition)
        semantic_error(ErrorKind::InvalidDefinedClassUse, i->loc,
                       "individual '" + i->name + "' cannot be declared in defined class '" + i->cls + "'");
      spec.individuals[ii++].cls = k;
    } else if (auto* a = std::get_if<AssertDecl>(&decl)) {
      spec.obj_assertions.push_back(
          {objprop_of(a->prop, a->loc), individual_of(a->subject, a->loc), individual_of(a->object, a->loc)});
    } else if (auto* v = std::get_if<AssertValDecl>(&decl)) {
      spec.data_assertions.push_back({dataprop_of(v->prop, v->loc), individual_of(v->subject, v->loc), v->value});
    } else if (auto* p = std::get_if<ProcessDecl>(&decl)) {
      auto& cp = spec.processes[spec.process_index.at(p->name)];
      std::vector<const Stmt*> performs;
      detail::collect_performs(cp.body, performs);
      for (const Stmt* s : performs) {
        auto it = spec.process_index.find(s->name);
        if (it == spec.process_index.end())
          semantic_error(ErrorKind::UnknownProcess, s->loc, "unknown process '" + s->name + "'");
        const auto& callee = spec.processes[it->second];
        if (s->args.size() != callee.inputs.size())
          semantic_error(ErrorKind::ArityMismatch, s->loc,
                         "process '" + s->name + "' takes " + std::to_string(callee.inputs.size()) +
                             " input(s), got " + std::to_string(s->args.size()));
        cp.callees.push_back(it->second);
      }
    }
  }

  // Subclass chains must terminate.
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    std::size_t steps = 0;
    for (auto cur = spec.classes[c].super; cur; cur = spec.classes[*cur].super)
      if (++steps > spec.classes.size())
        semantic_error(ErrorKind::CyclicHierarchy, spec.classes[c].loc,
                       "class hierarchy through '" + spec.classes[c].name + "' is cyclic");
  }

  // Defined classes may not depend on themselves; process calls may not recurse.
  auto find_cycle = [](const std::vector<std::vector<std::size_t>>& graph) -> std::optional<std::size_t> {
    enum Mark { white, grey, black };
    std::vector<Mark> mark(graph.size(), white);
    std::optional<std::size_t> found;
    std::function<bool(std::size_t)> visit = [&](std::size_t v) {
      mark[v] = grey;
      for (std::size_t w : graph[v]) {
        if (mark[w] == grey || (mark[w] == white && visit(w))) {
          if (!found) found = v;
          return true;
        }
      }
      mark[v] = black;
      return false;
    };
    for (std::size_t v = 0; v < graph.size(); ++v)
      if (mark[v] == white && visit(v)) return found;
    return std::nullopt;
  };

  if (auto c = find_cycle(class_deps))
    semantic_error(ErrorKind::CyclicHierarchy, spec.classes[*c].loc,
                   "definition of class '" + spec.classes[*c].name + "' refers to itself");

  std::vector<std::vector<std::size_t>> calls;
  for (const auto& p : spec.processes) calls.push_back(p.callees);
  if (auto p = find_cycle(calls)) {
    SourceLoc loc;
    for (const auto& d : ast.decls)
      if (auto* pd = std::get_if<ProcessDecl>(&d); pd && pd->name == spec.processes[*p].name) loc = pd->loc;
    semantic_error(ErrorKind::RecursiveProcess, loc, "process '" + spec.processes[*p].name + "' is part of a call cycle");
  }

  return spec;
}

}  // namespace mechcheck::asl
