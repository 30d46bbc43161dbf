#pragma once

// Command-line front end. Reports go to `out`, diagnostics to `err`.
// Exit codes: 0 success/PASS/accepted, 1 FAIL/rejected/violated,
// 2 usage or input error.

#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mechcheck/absint.hpp"
#include "mechcheck/asl_check.hpp"
#include "mechcheck/asl_parser.hpp"
#include "mechcheck/certify.hpp"
#include "mechcheck/error.hpp"
#include "mechcheck/instance_text.hpp"
#include "mechcheck/kernel.hpp"
#include "mechcheck/mechanisms.hpp"
#include "mechcheck/properties.hpp"
#include "mechcheck/windeterm.hpp"

namespace mechcheck {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string format_values(const std::vector<Money>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

// "x=lo..hi" or "x=v".
inline std::pair<std::string, kernel::Interval> parse_init(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--init expects var=lo..hi, got '" + text + "'");
  std::string range = text.substr(eq + 1);
  auto number = [&](const std::string& s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      throw UsageError("--init expects var=lo..hi, got '" + text + "'");
    return v;
  };
  auto dots = range.find("..");
  std::int64_t lo = number(range.substr(0, dots));
  std::int64_t hi = dots == std::string::npos ? lo : number(range.substr(dots + 2));
  if (lo > hi) throw UsageError("empty range in --init '" + text + "'");
  if (hi - lo >= 10'000) throw UsageError("--init range too wide in '" + text + "'");
  return {text.substr(0, eq), kernel::Interval::of(lo, hi)};
}

// Every combination of the given ranges; one empty state when none.
inline kernel::ConcreteStateSet initial_states(const std::vector<std::string>& inits) {
  kernel::ConcreteStateSet states{{}};
  std::set<std::string> seen;
  for (const auto& text : inits) {
    auto [var, range] = parse_init(text);
    if (!seen.insert(var).second) throw UsageError("variable '" + var + "' initialised twice");
    kernel::ConcreteStateSet next;
    for (const auto& s : states)
      for (std::int64_t v = range.lo(); v <= range.hi(); ++v) {
        auto t = s;
        t[var] = v;
        next.insert(std::move(t));
      }
    if (next.size() > 100'000) throw UsageError("too many initial states");
    states = std::move(next);
  }
  return states;
}

inline kernel::KernelTranslation load_spec(const std::string& path) {
  return kernel::lower_to_kernel(asl::validate(asl::parse(read_text_file(path))));
}

}  // namespace detail

/// Runs one command line. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Combinatorial auction and mechanism property checker", "mechcheck"};
  app.require_subcommand(1, 1);

  std::string file, cert_file, property, grid_text, process;
  std::uint64_t cell_cap = kDefaultCellCap, fuel = 1000;
  std::size_t agents = 0;
  std::vector<std::string> inits;

  auto* solve = app.add_subcommand("solve", "Solve the winner determination problem");
  solve->add_option("file", file, "Auction instance")->required();

  auto* run = app.add_subcommand("run", "Run the instance's mechanism and print the outcome");
  run->add_option("file", file, "Auction instance")->required();

  auto* verify = app.add_subcommand("verify", "Check a mechanism property");
  verify->add_option("file", file, "Auction instance (template for grid checks)")->required();
  verify->add_option("--property", property, "strategyproof|efficient|budget")
      ->required()
      ->check(CLI::IsMember({"strategyproof", "efficient", "budget"}));
  verify->add_option("--grid", grid_text, "Value grid lo..hi:step");
  verify->add_option("--agents", agents, "Number of agents on the grid (default: as in the instance)");
  verify->add_option("--cell-cap", cell_cap, "Maximum number of grid cells")->capture_default_str();

  auto* translate = app.add_subcommand("translate", "Lower an ASL spec to its finite kernel model");
  translate->add_option("spec", file, "ASL spec")->required();

  auto* absint = app.add_subcommand("absint", "Check interval analysis soundness for one process");
  absint->add_option("spec", file, "ASL spec")->required();
  absint->add_option("--process", process, "Process name")->required();
  absint->add_option("--fuel", fuel, "Loop iteration budget per run")->capture_default_str();
  absint->add_option("--init", inits, "Initial values var=lo..hi (repeatable)");

  auto* cert = app.add_subcommand("cert", "Emit or check certificates");
  cert->require_subcommand(1, 1);
  auto* emit = cert->add_subcommand("emit", "Run a check and print its certificate");
  emit->add_option("file", file, "Auction instance")->required();
  emit->add_option("--property", property, "strategyproof")->required()->check(CLI::IsMember({"strategyproof"}));
  emit->add_option("--grid", grid_text, "Value grid lo..hi:step")->required();
  emit->add_option("--cell-cap", cell_cap, "Maximum number of grid cells")->capture_default_str();
  auto* check = cert->add_subcommand("check", "Check a certificate against an instance");
  check->add_option("cert", cert_file, "Certificate file")->required();
  check->add_option("file", file, "Auction instance")->required();

  // Help for the deepest subcommand named on the command line.
  auto usage = [&]() -> const CLI::App* {
    const CLI::App* cur = &app;
    for (const auto& a : args) {
      const CLI::App* next = nullptr;
      for (const auto* sub : cur->get_subcommands([](const CLI::App*) { return true; }))
        if (sub->get_name() == a) next = sub;
      if (next) cur = next;
    }
    return cur;
  };

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << usage()->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << usage()->help();
    return kExitUsage;
  }

  const CLI::App* active = usage();
  try {
    if (*solve) {
      ValidatedInstance inst = load_instance(read_text_file(file));
      Allocation alloc = solve_cap(inst);
      for (BidIndex b : alloc.accepted) {
        const Bid& bid = inst.bids[b];
        out << "bid " << b << " " << inst.agents[bid.agent] << " " << format_bundle(inst.item_names(bid.bundle))
            << " " << bid.amount << "\n";
      }
      out << "welfare " << alloc.welfare << "\n";
      return kExitOk;
    }

    if (*run) {
      ValidatedInstance inst = load_instance(read_text_file(file));
      out << format_outcome(inst, run_mechanism(inst));
      return kExitOk;
    }

    if (*verify) {
      ValidatedInstance inst = load_instance(read_text_file(file));
      const PropertyId prop = *parse_property(property);
      const std::size_t n = agents ? agents : inst.agent_count();
      if (prop == PropertyId::strategyproof && grid_text.empty())
        throw detail::UsageError("strategyproof needs --grid");

      Verdict v;
      std::optional<ValidatedInstance> counterexample;
      if (grid_text.empty()) {
        v = prop == PropertyId::efficient ? check_efficiency(inst) : check_budget(inst);
        if (!v.holds()) counterexample = inst;
      } else {
        Grid grid = parse_grid(grid_text);
        if (prop == PropertyId::strategyproof) {
          v = check_strategyproof(inst, n, grid, cell_cap);
          if (v.witness) counterexample = witness_instance(make_grid_domain(inst, n), *v.witness, true);
        } else {
          v = prop == PropertyId::efficient ? check_efficiency_on_grid(inst, n, grid, cell_cap)
                                            : check_budget_on_grid(inst, n, grid, cell_cap);
          if (v.profile) counterexample = make_grid_domain(inst, n).profile(*v.profile);
        }
      }

      if (v.holds()) {
        out << "PASS cells=" << v.cells_checked << "\n";
        return kExitOk;
      }
      if (v.witness)
        out << "FAIL witness=" << format_witness(*v.witness) << "\n";
      else
        out << "FAIL profile=" << detail::format_values(v.profile.value_or(std::vector<Money>{})) << " " << v.detail
            << "\n";
      if (counterexample) out << format_instance(counterexample->to_raw());
      return kExitFail;
    }

    if (*translate) {
      out << kernel::format_translation(detail::load_spec(file));
      return kExitOk;
    }

    if (*absint) {
      kernel::KernelTranslation t = detail::load_spec(file);
      const kernel::ProcessProgram* p = t.find_program(process);
      if (!p) throw detail::UsageError("no process named '" + process + "'");
      auto report = kernel::check_soundness(*p, detail::initial_states(inits), fuel);
      out << kernel::format_report(report);
      return report.status == kernel::SoundnessReport::Status::pass ? kExitOk : kExitFail;
    }

    if (*emit) {
      std::string text = read_text_file(file);
      Certificate c = emit_certificate(text, *parse_property(property), parse_grid(grid_text), cell_cap);
      out << format_certificate(c);
      return c.pass ? kExitOk : kExitFail;
    }

    if (*check) {
      CertificateCheck r = check_certificate(read_text_file(cert_file), read_text_file(file));
      if (r.accepted()) {
        out << "accepted\n";
        return kExitOk;
      }
      out << "rejected " << to_string(r.reason) << "\n";
      err << r.detail << "\n";
      return kExitFail;
    }
  } catch (const detail::UsageError& e) {
    err << "error: " << e.what() << "\n" << active->help();
    return kExitUsage;
  } catch (const asl::SpecError& e) {
    err << file << ":" << e.diagnostic().to_string() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace mechcheck
