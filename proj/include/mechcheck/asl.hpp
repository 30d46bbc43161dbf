#pragma once

// Abstract syntax of the Auction Specification Language (ASL): ontology
// declarations (classes, individuals, object and datatype properties) and
// process models with an integer-valued imperative body.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mechcheck::asl {

/// Position in the source text, 1-based. Positions never take part in AST
/// equality so that a pretty-printed and re-parsed spec compares equal.
struct SourceLoc {
  std::size_t line = 1;
  std::size_t col = 1;

  friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

enum class ErrorKind {
  SyntaxError,
  UnknownClass,
  UnknownIndividual,
  UnknownProperty,
  UnknownProcess,
  CyclicHierarchy,
  RecursiveProcess,
  DuplicateDeclaration,
  ArityMismatch,
  InvalidDefinedClassUse,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::UnknownIndividual: return "UnknownIndividual";
    case ErrorKind::UnknownProperty: return "UnknownProperty";
    case ErrorKind::UnknownProcess: return "UnknownProcess";
    case ErrorKind::CyclicHierarchy: return "CyclicHierarchy";
    case ErrorKind::RecursiveProcess: return "RecursiveProcess";
    case ErrorKind::DuplicateDeclaration: return "DuplicateDeclaration";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::InvalidDefinedClassUse: return "InvalidDefinedClassUse";
  }
  return "Error";
}

struct Diagnostic {
  ErrorKind kind = ErrorKind::SyntaxError;
  std::size_t line = 1;
  std::size_t col = 1;
  std::string message;
  std::vector<std::string> expected;  // syntax errors only

  std::string to_string() const {
    std::string out = std::to_string(line) + ":" + std::to_string(col) + ": " +
                      std::string(asl::to_string(kind)) + ": " + message;
    if (!expected.empty()) {
      out += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) out += (i ? ", " : "") + expected[i];
      out += ")";
    }
    return out;
  }
};

class SpecError : public std::runtime_error {
 public:
  explicit SpecError(Diagnostic d) : std::runtime_error(d.to_string()), diag_(std::move(d)) {}
  const Diagnostic& diagnostic() const noexcept { return diag_; }

 private:
  Diagnostic diag_;
};

struct ClassExpr {
  enum class Kind { named, some, all, and_, or_ };
  Kind kind = Kind::named;
  std::string name;  // class for named, object property for some/all
  std::vector<ClassExpr> operands;

  static ClassExpr named(std::string cls) { return {Kind::named, std::move(cls), {}}; }
  static ClassExpr some(std::string prop, ClassExpr c) { return {Kind::some, std::move(prop), {std::move(c)}}; }
  static ClassExpr all(std::string prop, ClassExpr c) { return {Kind::all, std::move(prop), {std::move(c)}}; }
  static ClassExpr conj(ClassExpr a, ClassExpr b) { return {Kind::and_, {}, {std::move(a), std::move(b)}}; }
  static ClassExpr disj(ClassExpr a, ClassExpr b) { return {Kind::or_, {}, {std::move(a), std::move(b)}}; }

  bool operator==(const ClassExpr&) const = default;
};

struct Term {
  bool is_var = false;
  std::string var;
  std::int64_t value = 0;

  static Term variable(std::string v) { return {true, std::move(v), 0}; }
  static Term literal(std::int64_t v) { return {false, {}, v}; }

  bool operator==(const Term&) const = default;
};

/// terms[0] ops[0] terms[1] ops[1] ... with ops drawn from '+' and '-'.
struct Expr {
  std::vector<Term> terms;
  std::vector<char> ops;

  bool operator==(const Expr&) const = default;
};

enum class CmpOp { lt, le, gt, ge, eq, ne };

inline std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
    case CmpOp::eq: return "==";
    case CmpOp::ne: return "!=";
  }
  return "==";
}

inline CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::lt: return CmpOp::ge;
    case CmpOp::le: return CmpOp::gt;
    case CmpOp::gt: return CmpOp::le;
    case CmpOp::ge: return CmpOp::lt;
    case CmpOp::eq: return CmpOp::ne;
    case CmpOp::ne: return CmpOp::eq;
  }
  return op;
}

struct Cond {
  Expr lhs;
  CmpOp op = CmpOp::eq;
  Expr rhs;

  bool operator==(const Cond&) const = default;
};

struct Stmt {
  enum class Kind { assign, perform, sequence, while_ };
  Kind kind = Kind::assign;
  std::string name;               // assigned variable or performed process
  Expr expr;                      // assign
  std::vector<std::string> args;  // perform
  Cond cond;                      // while
  std::vector<Stmt> body;         // sequence, while
  SourceLoc loc;

  bool operator==(const Stmt&) const = default;
};

struct ClassDecl {
  std::string name;
  std::optional<std::string> super;
  std::optional<ClassExpr> definition;
  SourceLoc loc;
  bool operator==(const ClassDecl&) const = default;
};

struct IndividualDecl {
  std::string name;
  std::string cls;
  SourceLoc loc;
  bool operator==(const IndividualDecl&) const = default;
};

struct ObjPropDecl {
  std::string name;
  SourceLoc loc;
  bool operator==(const ObjPropDecl&) const = default;
};

struct AssertDecl {
  std::string prop;
  std::string subject;
  std::string object;
  SourceLoc loc;
  bool operator==(const AssertDecl&) const = default;
};

struct DataPropDecl {
  std::string name;
  SourceLoc loc;
  bool operator==(const DataPropDecl&) const = default;
};

struct AssertValDecl {
  std::string prop;
  std::string subject;
  std::int64_t value = 0;
  SourceLoc loc;
  bool operator==(const AssertValDecl&) const = default;
};

struct Section {
  enum class Kind { inputs, outputs, pre, result, body };
  Kind kind = Kind::body;
  std::vector<std::string> names;  // inputs, outputs
  std::optional<Cond> cond;        // pre, result
  std::vector<Stmt> body;          // body
  SourceLoc loc;
  bool operator==(const Section&) const = default;
};

struct ProcessDecl {
  std::string name;
  std::vector<Section> sections;
  SourceLoc loc;

  /// Composite processes have a body; the rest are atomic.
  bool is_composite() const {
    for (const auto& s : sections)
      if (s.kind == Section::Kind::body) return true;
    return false;
  }

  std::vector<std::string> names_of(Section::Kind kind) const {
    std::vector<std::string> out;
    for (const auto& s : sections)
      if (s.kind == kind) out.insert(out.end(), s.names.begin(), s.names.end());
    return out;
  }
  std::vector<std::string> inputs() const { return names_of(Section::Kind::inputs); }
  std::vector<std::string> outputs() const { return names_of(Section::Kind::outputs); }

  /// All body sections in order, concatenated.
  std::vector<Stmt> body() const {
    std::vector<Stmt> out;
    for (const auto& s : sections)
      if (s.kind == Section::Kind::body) out.insert(out.end(), s.body.begin(), s.body.end());
    return out;
  }

  bool operator==(const ProcessDecl&) const = default;
};

using Decl = std::variant<ClassDecl, IndividualDecl, ObjPropDecl, AssertDecl, DataPropDecl, AssertValDecl, ProcessDecl>;

struct SpecAst {
  std::vector<Decl> decls;

  template <class T>
  std::vector<T> all() const {
    std::vector<T> out;
    for (const auto& d : decls)
      if (auto* p = std::get_if<T>(&d)) out.push_back(*p);
    return out;
  }

  bool operator==(const SpecAst&) const = default;
};

// Pretty printing. The output is a canonical form that parses back to an
// equal AST.

inline std::string print(const ClassExpr& e) {
  switch (e.kind) {
    case ClassExpr::Kind::named: return e.name;
    case ClassExpr::Kind::some: return "some(" + e.name + ", " + print(e.operands.at(0)) + ")";
    case ClassExpr::Kind::all: return "all(" + e.name + ", " + print(e.operands.at(0)) + ")";
    case ClassExpr::Kind::and_: return "and(" + print(e.operands.at(0)) + ", " + print(e.operands.at(1)) + ")";
    case ClassExpr::Kind::or_: return "or(" + print(e.operands.at(0)) + ", " + print(e.operands.at(1)) + ")";
  }
  return {};
}

inline std::string print(const Term& t) { return t.is_var ? t.var : std::to_string(t.value); }

inline std::string print(const Expr& e) {
  std::string out;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    if (i > 0) out += std::string(" ") + e.ops[i - 1] + " ";
    out += print(e.terms[i]);
  }
  return out;
}

inline std::string print(const Cond& c) {
  return print(c.lhs) + " " + std::string(to_string(c.op)) + " " + print(c.rhs);
}

namespace detail {

inline std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out;
}

inline void print_block(std::ostream& os, const std::vector<Stmt>& body, int indent);

inline void print_stmt(std::ostream& os, const Stmt& s, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case Stmt::Kind::assign: os << pad << s.name << " := " << print(s.expr) << ";\n"; break;
    case Stmt::Kind::perform: os << pad << "perform " << s.name << "(" << join_names(s.args) << ");\n"; break;
    case Stmt::Kind::sequence:
      os << pad << "sequence {\n";
      print_block(os, s.body, indent + 1);
      os << pad << "}\n";
      break;
    case Stmt::Kind::while_:
      os << pad << "while " << print(s.cond) << " {\n";
      print_block(os, s.body, indent + 1);
      os << pad << "}\n";
      break;
  }
}

inline void print_block(std::ostream& os, const std::vector<Stmt>& body, int indent) {
  for (const auto& s : body) print_stmt(os, s, indent);
}

}  // namespace detail

inline std::string print(const SpecAst& ast) {
  std::ostringstream os;
  for (const auto& decl : ast.decls) {
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, ClassDecl>) {
            os << "class " << d.name;
            if (d.super) os << " subclassOf " << *d.super;
            if (d.definition) os << " = " << print(*d.definition);
            os << ";\n";
          } else if constexpr (std::is_same_v<T, IndividualDecl>) {
            os << "individual " << d.name << " : " << d.cls << ";\n";
          } else if constexpr (std::is_same_v<T, ObjPropDecl>) {
            os << "objprop " << d.name << ";\n";
          } else if constexpr (std::is_same_v<T, AssertDecl>) {
            os << "assert " << d.prop << "(" << d.subject << ", " << d.object << ");\n";
          } else if constexpr (std::is_same_v<T, DataPropDecl>) {
            os << "dataprop " << d.name << ";\n";
          } else if constexpr (std::is_same_v<T, AssertValDecl>) {
            os << "assertval " << d.prop << "(" << d.subject << ", " << d.value << ");\n";
          } else {
            os << "process " << d.name << " {\n";
            for (const auto& s : d.sections) {
              switch (s.kind) {
                case Section::Kind::inputs: os << "  inputs(" << detail::join_names(s.names) << ")\n"; break;
                case Section::Kind::outputs: os << "  outputs(" << detail::join_names(s.names) << ")\n"; break;
                case Section::Kind::pre: os << "  pre(" << (s.cond ? print(*s.cond) : "") << ")\n"; break;
                case Section::Kind::result: os << "  result(" << (s.cond ? print(*s.cond) : "") << ")\n"; break;
                case Section::Kind::body:
                  os << "  body {\n";
                  detail::print_block(os, s.body, 2);
                  os << "  }\n";
                  break;
              }
            }
            os << "}\n";
          }
        },
        decl);
  }
  return os.str();
}

}  // namespace mechcheck::asl
