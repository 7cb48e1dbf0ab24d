// Command-line driver: assemble, disassemble, run, verify, check equivalence,
// and bound execution time of programs for the 64-bit register-memory core.
//
// Exit codes: 0 success / property proven, 1 property falsified,
//             2 usage, file, or parse error, 3 unknown verdict or solver failure.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "redfin/assembler.hpp"
#include "redfin/concrete.hpp"
#include "redfin/hll.hpp"
#include "redfin/semantics.hpp"
#include "redfin/spec_json.hpp"
#include "redfin/verify.hpp"

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Source dispatch by extension: .s/.asm assembly text, .bin binary image,
// .e/.expr arithmetic expression compiled against the given stack/scratch cells.
std::shared_ptr<const redfin::Program> load_program(const std::string& path,
                                                    const redfin::CompileOptions& copts) {
  if (ends_with(path, ".s") || ends_with(path, ".asm"))
    return redfin::assemble(read_file(path));
  if (ends_with(path, ".bin"))
    return redfin::read_image_file(path);
  if (ends_with(path, ".e") || ends_with(path, ".expr")) {
    const auto expr = redfin::parse_expr(read_file(path));
    return redfin::Program::from_instructions(redfin::compile_expr(*expr, copts));
  }
  throw UsageError("cannot tell how to load '" + path + "' (expected .s, .asm, .bin, .e, or .expr)");
}

std::vector<int64_t> parse_data_list(const std::string& text) {
  std::vector<int64_t> out;
  std::string cur;
  std::istringstream ss(text);
  while (std::getline(ss, cur, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoll(cur, &used));
      while (used < cur.size() && std::isspace(static_cast<unsigned char>(cur[used]))) ++used;
      if (used != cur.size()) throw std::invalid_argument(cur);
    } catch (const std::exception&) {
      throw UsageError("--data: '" + cur + "' is not an integer");
    }
  }
  return out;
}

std::pair<uint8_t, uint8_t> parse_window(const std::string& text) {
  const size_t dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const long lo = std::stol(text.substr(0, dots));
      const long hi = std::stol(text.substr(dots + 2));
      if (lo < 0 || hi > 255 || lo > hi) throw std::out_of_range(text);
      return {static_cast<uint8_t>(lo), static_cast<uint8_t>(hi)};
    }
    const long only = std::stol(text);
    if (only < 0 || only > 255) throw std::out_of_range(text);
    return {static_cast<uint8_t>(only), static_cast<uint8_t>(only)};
  } catch (const std::exception&) {
    throw UsageError("--dump: expected LO..HI with 0 <= LO <= HI <= 255, got '" + text + "'");
  }
}

redfin::SolverConfig make_solver(const std::string& override_cmd, unsigned timeout_s) {
  redfin::SolverConfig cfg = redfin::default_solver(timeout_s * 1000u);
  if (!override_cmd.empty()) {
    cfg.command = redfin::split_command(override_cmd);
    if (cfg.command.empty()) throw UsageError("--solver: empty command");
  }
  return cfg;
}

std::string flags_text(bool condition, bool overflow, bool halt) {
  std::string out;
  if (condition) out += "Condition ";
  if (overflow) out += "Overflow ";
  if (halt) out += "Halt ";
  if (out.empty()) return "none";
  out.pop_back();
  return out;
}

json model_json(const std::vector<std::pair<std::string, int64_t>>& inputs) {
  json m = json::object();
  for (const auto& [name, value] : inputs) m[name] = value;
  return m;
}

void print_model(const std::vector<std::pair<std::string, int64_t>>& inputs) {
  for (const auto& [name, value] : inputs)
    std::cout << "  " << name << " = " << value << "\n";
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

const char* verdict_text(redfin::Outcome o) {
  switch (o) {
    case redfin::Outcome::Proven: return "Proven";
    case redfin::Outcome::Falsified: return "Falsified";
    default: return "Unknown";
  }
}

int verdict_exit(redfin::Outcome o) {
  switch (o) {
    case redfin::Outcome::Proven: return 0;
    case redfin::Outcome::Falsified: return 1;
    default: return 3;
  }
}

void print_query_stats(const redfin::QueryStats& stats, double ms) {
  std::cout << "(solver calls: " << stats.solver_calls << ", elapsed: " << ms / 1000.0 << " s)\n";
}

int cmd_run(const std::string& input, const std::string& data_text, unsigned steps,
            const std::string& dump_text, bool abs_penalty, bool as_json,
            const redfin::CompileOptions& copts) {
  const auto program = load_program(input, copts);
  const std::vector<int64_t> data = parse_data_list(data_text);
  if (data.size() > redfin::memory_size) throw UsageError("--data: more than 256 values");

  redfin::ConcreteDomain dom;
  redfin::ConcreteEngine engine(dom, redfin::CycleModel{abs_penalty});
  redfin::ConcreteState state = redfin::boot(dom, program, data);
  state = engine.simulate(redfin::StepBudget{steps}, state);

  const bool halted = state.flag(redfin::Flag::Halt);
  json out;
  out["registers"] = json::object();
  for (size_t i = 0; i < redfin::register_count; ++i)
    out["registers"]["r" + std::to_string(i)] = state.regs[i];
  out["flags"] = {{"Condition", state.flag(redfin::Flag::Condition)},
                  {"Overflow", state.flag(redfin::Flag::Overflow)},
                  {"Halt", halted}};
  out["clock"] = redfin::scalar::to_unsigned(state.clock);
  out["halted"] = halted;

  std::string dump_line;
  if (!dump_text.empty()) {
    const auto [lo, hi] = parse_window(dump_text);
    const redfin::Dump d = redfin::dump_state(state, lo, hi);
    out["dump"] = d.memory;
    dump_line = "Memory dump: [";
    for (size_t i = 0; i < d.memory.size(); ++i) {
      if (i) dump_line += ", ";
      dump_line += std::to_string(d.memory[i]);
    }
    dump_line += "]";
  }

  if (as_json) {
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  if (!dump_line.empty()) std::cout << dump_line << "\n";
  for (size_t i = 0; i < redfin::register_count; ++i)
    std::cout << "R" << i << ": " << state.regs[i] << "\n";
  std::cout << "Flags: "
            << flags_text(state.flag(redfin::Flag::Condition), state.flag(redfin::Flag::Overflow),
                          halted)
            << "\n";
  std::cout << "Clock: " << redfin::scalar::to_unsigned(state.clock) << "\n";
  return 0;
}

int cmd_verify(const std::string& input, const std::string& spec_path, const std::string& solver,
               unsigned timeout_s, const std::string& emit_smt, bool as_json,
               const redfin::CompileOptions& copts) {
  const auto program = load_program(input, copts);
  const redfin::PropertySpec spec = redfin::property_spec_from_json(read_file(spec_path));
  const auto start = std::chrono::steady_clock::now();
  const redfin::VerificationResult r =
      redfin::verify(program, spec, make_solver(solver, timeout_s));
  const double ms = elapsed_ms(start);

  if (!emit_smt.empty()) {
    if (r.script.empty()) {
      std::cerr << "note: no solver query was emitted (the verdict was decided concretely)\n";
    } else {
      std::ofstream out(emit_smt);
      if (!out) throw UsageError("cannot open for writing: " + emit_smt);
      out << r.script;
    }
  }

  if (as_json) {
    json out{{"verdict", verdict_text(r.outcome)},
             {"solver_calls", r.stats.solver_calls},
             {"elapsed_ms", ms}};
    if (!r.detail.empty()) out["detail"] = r.detail;
    if (r.outcome == redfin::Outcome::Falsified) {
      out["model"] = model_json(r.cex.inputs);
      out["resimulated"] = {{"r0", r.cex.final_state.regs[0]},
                            {"clock", redfin::scalar::to_unsigned(r.cex.final_state.clock)},
                            {"halted", r.cex.final_state.flag(redfin::Flag::Halt)}};
    }
    std::cout << out.dump(2) << "\n";
    return verdict_exit(r.outcome);
  }

  switch (r.outcome) {
    case redfin::Outcome::Proven:
      std::cout << "Proven. Q.E.D.\n";
      break;
    case redfin::Outcome::Falsified:
      std::cout << "Falsifiable. Counter-example:\n";
      print_model(r.cex.inputs);
      std::cout << "Confirmed by concrete re-simulation (r0 = " << r.cex.final_state.regs[0]
                << ", clock = " << redfin::scalar::to_unsigned(r.cex.final_state.clock) << ").\n";
      break;
    default:
      std::cout << "Unknown." << (r.detail.empty() ? "" : " " + r.detail) << "\n";
      break;
  }
  print_query_stats(r.stats, ms);
  return verdict_exit(r.outcome);
}

int cmd_equiv(const std::string& input_a, const std::string& input_b, const std::string& spec_path,
              const std::string& observable, const std::string& solver, unsigned timeout_s,
              bool as_json, const redfin::CompileOptions& copts) {
  const auto program_a = load_program(input_a, copts);
  const auto program_b = load_program(input_b, copts);
  redfin::PropertySpec spec = redfin::property_spec_from_json(read_file(spec_path));
  if (!observable.empty()) spec.observable = observable;

  const auto start = std::chrono::steady_clock::now();
  const redfin::VerificationResult r =
      redfin::check_equivalence(program_a, program_b, spec, make_solver(solver, timeout_s));
  const double ms = elapsed_ms(start);

  if (as_json) {
    json out{{"verdict", verdict_text(r.outcome)},
             {"solver_calls", r.stats.solver_calls},
             {"elapsed_ms", ms}};
    if (!r.detail.empty()) out["detail"] = r.detail;
    if (r.outcome == redfin::Outcome::Falsified) {
      out["model"] = model_json(r.cex.inputs);
      out["observed"] = {{"first", r.cex.observed[0]}, {"second", r.cex.observed[1]}};
    }
    std::cout << out.dump(2) << "\n";
    return verdict_exit(r.outcome);
  }

  switch (r.outcome) {
    case redfin::Outcome::Proven:
      std::cout << "Programs agree on "
                << (spec.observable.empty() ? "reg(r0)" : spec.observable) << ". Q.E.D.\n";
      break;
    case redfin::Outcome::Falsified:
      std::cout << "Falsifiable. Counter-example:\n";
      print_model(r.cex.inputs);
      std::cout << "Observable " << (spec.observable.empty() ? "reg(r0)" : spec.observable)
                << ": first = " << r.cex.observed[0] << ", second = " << r.cex.observed[1] << "\n";
      break;
    default:
      std::cout << "Unknown." << (r.detail.empty() ? "" : " " + r.detail) << "\n";
      break;
  }
  print_query_stats(r.stats, ms);
  return verdict_exit(r.outcome);
}

int cmd_timing(const std::string& input, const std::string& spec_path, bool abs_penalty,
               const std::string& solver, unsigned timeout_s, bool as_json,
               const redfin::CompileOptions& copts) {
  const auto program = load_program(input, copts);
  redfin::PropertySpec spec = redfin::property_spec_from_json(read_file(spec_path));
  if (abs_penalty) spec.penalty = true;

  const auto start = std::chrono::steady_clock::now();
  const redfin::TimingResult r =
      redfin::timing_bounds(program, spec, make_solver(solver, timeout_s));
  const double ms = elapsed_ms(start);

  if (as_json) {
    json out{{"verdict", verdict_text(r.outcome)},
             {"solver_calls", r.stats.solver_calls},
             {"elapsed_ms", ms}};
    if (!r.detail.empty()) out["detail"] = r.detail;
    if (r.outcome == redfin::Outcome::Proven) {
      out["best"] = r.best.cycles;
      out["worst"] = r.worst.cycles;
      out["best_witness"] = model_json(r.best.witness);
      out["worst_witness"] = model_json(r.worst.witness);
    }
    std::cout << out.dump(2) << "\n";
    return r.outcome == redfin::Outcome::Proven ? 0 : 3;
  }

  if (r.outcome != redfin::Outcome::Proven) {
    std::cout << "Unknown." << (r.detail.empty() ? "" : " " + r.detail) << "\n";
    print_query_stats(r.stats, ms);
    return 3;
  }
  std::cout << "Best case = " << r.best.cycles << "\n";
  print_model(r.best.witness);
  std::cout << "Worst case = " << r.worst.cycles << "\n";
  print_model(r.worst.witness);
  print_query_stats(r.stats, ms);
  return 0;
}

int cmd_asm(const std::string& input, std::string output, bool listing,
            const redfin::CompileOptions& copts) {
  const auto program = load_program(input, copts);
  if (listing) {
    std::cout << redfin::disassemble(*program);
    return 0;
  }
  if (output.empty()) {
    const size_t dot = input.rfind('.');
    output = (dot == std::string::npos ? input : input.substr(0, dot)) + ".bin";
  }
  redfin::write_image_file(*program, output);
  return 0;
}

int cmd_disasm(const std::string& input) {
  const auto program = redfin::read_image_file(input);
  std::cout << redfin::disassemble(*program);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assembler, simulator, and SMT-backed verifier for the 64-bit register-memory core"};
  app.require_subcommand(1);

  redfin::CompileOptions copts;
  std::string input, input_b, output, data_text = "", dump_text, spec_path, solver, observable,
              emit_smt;
  unsigned steps = 100, timeout_s = 60;
  bool abs_penalty = false, as_json = false, listing = false;

  auto add_compile_opts = [&](CLI::App* sub) {
    sub->add_option("--stack", copts.stack_pointer_cell,
                    "stack pointer cell for compiled expressions (default 5)");
    sub->add_option("--temp", copts.temp_cell,
                    "scratch cell for compiled expressions (default 4)");
  };
  auto add_solver_opts = [&](CLI::App* sub) {
    sub->add_option("--solver", solver, "solver command line (default: $REDFIN_SOLVER or 'z3 -in')");
    sub->add_option("--timeout", timeout_s, "solver wall-clock limit per query, seconds (default 60)");
    sub->add_flag("--json", as_json, "machine-readable report");
  };

  CLI::App* c_asm = app.add_subcommand("asm", "assemble (or compile) a program to a binary image");
  c_asm->add_option("input", input, "source file (.s, .e)")->required();
  c_asm->add_option("-o,--output", output, "output image (default: source with .bin)");
  c_asm->add_flag("-S,--listing", listing, "print the assembly listing instead of writing an image");
  add_compile_opts(c_asm);

  CLI::App* c_disasm = app.add_subcommand("disasm", "disassemble a binary image");
  c_disasm->add_option("input", input, "binary image (.bin)")->required();

  CLI::App* c_run = app.add_subcommand("run", "run a program on concrete inputs");
  c_run->add_option("input", input, "program (.s, .bin, .e)")->required();
  c_run->add_option("--data", data_text, "comma-separated initial memory values, cell 0 first");
  c_run->add_option("--steps", steps, "step budget (default 100)");
  c_run->add_option("--dump", dump_text, "memory window to print, LO..HI inclusive");
  c_run->add_flag("--abs-penalty", abs_penalty, "charge one extra cycle when abs negates");
  c_run->add_flag("--json", as_json, "machine-readable report");
  add_compile_opts(c_run);

  CLI::App* c_verify = app.add_subcommand("verify", "prove or falsify a property of a program");
  c_verify->add_option("input", input, "program (.s, .bin, .e)")->required();
  c_verify->add_option("--spec", spec_path, "property specification (JSON)")->required();
  c_verify->add_option("--emit-smt", emit_smt, "also write the solver script to this file");
  add_solver_opts(c_verify);
  add_compile_opts(c_verify);

  CLI::App* c_equiv = app.add_subcommand("equiv", "prove or refute that two programs agree");
  c_equiv->add_option("first", input, "first program (.s, .bin, .e)")->required();
  c_equiv->add_option("second", input_b, "second program (.s, .bin, .e)")->required();
  c_equiv->add_option("--spec", spec_path, "property specification (JSON)")->required();
  c_equiv->add_option("--observable", observable, "expression compared between the programs");
  add_solver_opts(c_equiv);
  add_compile_opts(c_equiv);

  CLI::App* c_timing = app.add_subcommand("timing", "bound best/worst cycles to termination");
  c_timing->add_option("input", input, "program (.s, .bin, .e)")->required();
  c_timing->add_option("--spec", spec_path, "property specification (JSON)")->required();
  c_timing->add_flag("--abs-penalty", abs_penalty, "charge one extra cycle when abs negates");
  add_solver_opts(c_timing);
  add_compile_opts(c_timing);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_asm->parsed()) return cmd_asm(input, output, listing, copts);
    if (c_disasm->parsed()) return cmd_disasm(input);
    if (c_run->parsed())
      return cmd_run(input, data_text, steps, dump_text, abs_penalty, as_json, copts);
    if (c_verify->parsed())
      return cmd_verify(input, spec_path, solver, timeout_s, emit_smt, as_json, copts);
    if (c_equiv->parsed())
      return cmd_equiv(input, input_b, spec_path, observable, solver, timeout_s, as_json, copts);
    if (c_timing->parsed())
      return cmd_timing(input, spec_path, abs_penalty, solver, timeout_s, as_json, copts);
  } catch (const redfin::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
