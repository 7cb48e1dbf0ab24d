#pragma once

// SMT solver driver and decision procedures.
//
// The solver is an external process speaking SMT-LIB 2 on stdin/stdout,
// configured by the REDFIN_SOLVER environment variable (whitespace-split
// command line, default "z3 -in"). The driver pumps the script in and the
// output out concurrently under a wall-clock deadline and kills the process
// when the deadline passes; scripts additionally carry the solver's own
// :timeout option.
//
// prove() shows hypotheses entail a goal by asserting the hypotheses and
// the negated goal: unsat means proven, sat yields a counter-example model.
// Every counter-example is validated by re-evaluating the assertions under
// the model before it is reported (skipped when array variables make the
// assignment partial).
//
// optimize() asks for the least or greatest value of a 64-bit term, using
// the solver's native objective support when it answers and falling back
// to binary search over unsigned bounds (at most 64 queries) otherwise.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "redfin/expr.hpp"
#include "redfin/scalar.hpp"
#include "redfin/smt.hpp"

namespace redfin {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  std::vector<std::string> command;  // argv; command[0] resolved via PATH
  unsigned timeout_ms = 60000;       // wall-clock deadline per query
};

inline std::vector<std::string> split_command(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline SolverConfig default_solver(unsigned timeout_ms = 60000) {
  SolverConfig cfg;
  cfg.timeout_ms = timeout_ms;
  if (const char* env = std::getenv("REDFIN_SOLVER"); env && *env)
    cfg.command = split_command(env);
  else
    cfg.command = {"z3", "-in"};
  if (cfg.command.empty()) throw SolverError("solver command is empty");
  return cfg;
}

struct SolverRun {
  std::string output;     // combined stdout
  bool timed_out = false;
  int exit_code = -1;
};

// Run the solver process on a script. Never throws on solver failure; the
// caller inspects the transcript.
inline SolverRun run_solver(const SolverConfig& cfg, const std::string& script) {
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw SolverError("pipe failed: " + std::string(std::strerror(errno)));

  const pid_t pid = fork();
  if (pid < 0) throw SolverError("fork failed: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    dup2(from_child[1], STDERR_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    std::vector<char*> argv;
    argv.reserve(cfg.command.size() + 1);
    for (const std::string& a : cfg.command) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    const char* msg = "solver exec failed\n";
    ssize_t ignored = write(STDERR_FILENO, msg, std::strlen(msg));
    (void)ignored;
    _exit(127);
  }

  close(to_child[0]);
  close(from_child[1]);
  const int wfd = to_child[1], rfd = from_child[0];
  fcntl(wfd, F_SETFL, O_NONBLOCK);
  fcntl(rfd, F_SETFL, O_NONBLOCK);
  signal(SIGPIPE, SIG_IGN);

  SolverRun result;
  const auto deadline = [&] {
    struct timespec ts;
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return static_cast<int64_t>(ts.tv_sec) * 1000 + ts.tv_nsec / 1000000 + cfg.timeout_ms;
  }();
  const auto now_ms = [] {
    struct timespec ts;
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return static_cast<int64_t>(ts.tv_sec) * 1000 + ts.tv_nsec / 1000000;
  };

  size_t written = 0;
  bool write_open = true, read_open = true;
  char buf[65536];
  while (read_open) {
    const int64_t remain = deadline - now_ms();
    if (remain <= 0) {
      result.timed_out = true;
      break;
    }
    struct pollfd fds[2];
    int nfds = 0;
    int widx = -1, ridx = -1;
    if (write_open) {
      widx = nfds;
      fds[nfds++] = {wfd, POLLOUT, 0};
    }
    fds[nfds] = {rfd, POLLIN, 0};
    ridx = nfds++;
    const int pr = poll(fds, static_cast<nfds_t>(nfds), static_cast<int>(remain));
    if (pr < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (pr == 0) continue;  // re-check deadline
    if (widx >= 0 && (fds[widx].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (written < script.size()) {
        const ssize_t n = write(wfd, script.data() + written, script.size() - written);
        if (n > 0) {
          written += static_cast<size_t>(n);
        } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
          close(wfd);
          write_open = false;  // solver stopped reading; keep draining output
        }
      }
      if (write_open && written >= script.size()) {
        close(wfd);
        write_open = false;
      }
    }
    if (fds[ridx].revents & (POLLIN | POLLERR | POLLHUP)) {
      const ssize_t n = read(rfd, buf, sizeof buf);
      if (n > 0) {
        result.output.append(buf, static_cast<size_t>(n));
      } else if (n == 0) {
        read_open = false;
      } else if (errno != EAGAIN && errno != EINTR) {
        read_open = false;
      }
    }
  }
  if (write_open) close(wfd);
  close(rfd);

  if (result.timed_out) kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// ---------------------------------------------------------------------------
// Solver output parsing (s-expressions)

namespace sexp {

struct SExpr {
  bool atom = false;
  std::string text;          // atom payload
  std::vector<SExpr> kids;   // list payload
};

inline std::vector<SExpr> parse_all(const std::string& input) {
  std::vector<SExpr> roots;
  std::vector<SExpr*> open;  // stack of unclosed lists
  size_t i = 0;
  const size_t n = input.size();
  auto push = [&](SExpr&& e) -> SExpr* {
    auto& vec = open.empty() ? roots : open.back()->kids;
    vec.push_back(std::move(e));
    return &vec.back();
  };
  while (i < n) {
    const char c = input[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < n && input[i] != '\n') ++i;
    } else if (c == '(') {
      open.push_back(push(SExpr{}));
      ++i;
    } else if (c == ')') {
      if (!open.empty()) open.pop_back();
      ++i;
    } else if (c == '"') {
      std::string s;
      ++i;
      while (i < n) {
        if (input[i] == '"') {
          if (i + 1 < n && input[i + 1] == '"') {  // doubled quote escape
            s.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        s.push_back(input[i++]);
      }
      push(SExpr{true, std::move(s), {}});
    } else if (c == '|') {
      std::string s;
      ++i;
      while (i < n && input[i] != '|') s.push_back(input[i++]);
      if (i < n) ++i;
      push(SExpr{true, std::move(s), {}});
    } else {
      size_t start = i;
      while (i < n && !std::isspace(static_cast<unsigned char>(input[i])) && input[i] != '(' &&
             input[i] != ')' && input[i] != ';')
        ++i;
      push(SExpr{true, input.substr(start, i - start), {}});
    }
  }
  return roots;
}

inline bool is_atom(const SExpr& e, const char* text) { return e.atom && e.text == text; }

// #x.., #b.., decimal, (_ bvN W), (- N), true/false.
inline std::optional<uint64_t> value_bits(const SExpr& e) {
  if (e.atom) {
    const std::string& t = e.text;
    if (t == "true") return uint64_t{1};
    if (t == "false") return uint64_t{0};
    if (t.size() > 2 && t[0] == '#' && t[1] == 'x') {
      uint64_t v = 0;
      for (size_t i = 2; i < t.size(); ++i) {
        const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(t[i])));
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else return std::nullopt;
        v = (v << 4) | static_cast<uint64_t>(d);
      }
      return v;
    }
    if (t.size() > 2 && t[0] == '#' && t[1] == 'b') {
      uint64_t v = 0;
      for (size_t i = 2; i < t.size(); ++i) {
        if (t[i] != '0' && t[i] != '1') return std::nullopt;
        v = (v << 1) | static_cast<uint64_t>(t[i] - '0');
      }
      return v;
    }
    if (!t.empty() && std::isdigit(static_cast<unsigned char>(t[0]))) {
      uint64_t v = 0;
      for (char c : t) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        v = v * 10 + static_cast<uint64_t>(c - '0');
      }
      return v;
    }
    return std::nullopt;
  }
  if (e.kids.size() == 3 && is_atom(e.kids[0], "_") && e.kids[1].atom &&
      e.kids[1].text.rfind("bv", 0) == 0) {
    uint64_t v = 0;
    for (size_t i = 2; i < e.kids[1].text.size(); ++i) {
      const char c = e.kids[1].text[i];
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      v = v * 10 + static_cast<uint64_t>(c - '0');
    }
    return v;
  }
  if (e.kids.size() == 2 && is_atom(e.kids[0], "-")) {
    if (auto inner = value_bits(e.kids[1])) return ~*inner + 1;
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace sexp

// ---------------------------------------------------------------------------
// Models

// Variable assignment extracted from a sat answer: raw bit patterns keyed by
// name. Sorts live with the caller, which knows each variable's width.
struct Model {
  std::map<std::string, uint64_t> values;

  std::optional<uint64_t> bits(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) return std::nullopt;
    return it->second;
  }
  std::optional<int64_t> word(const std::string& name) const {
    auto b = bits(name);
    if (!b) return std::nullopt;
    return scalar::to_signed(*b);
  }
  std::optional<bool> boolean(const std::string& name) const {
    auto b = bits(name);
    if (!b) return std::nullopt;
    return *b != 0;
  }
};

enum class CheckStatus { Sat, Unsat, Unknown };

struct ParsedAnswer {
  CheckStatus status = CheckStatus::Unknown;
  bool saw_status = false;
  Model model;
  // (name, value) entries of the objectives form, in order. Solvers may
  // rename an objective after its defining term, so position is the key.
  std::vector<std::pair<std::string, uint64_t>> objectives;
};

namespace detail_solver {

inline void collect_define_funs(const sexp::SExpr& e, Model& model) {
  if (e.atom) return;
  if (e.kids.size() >= 5 && sexp::is_atom(e.kids[0], "define-fun") && e.kids[1].atom &&
      !e.kids[2].atom && e.kids[2].kids.empty()) {
    if (auto v = sexp::value_bits(e.kids[4])) model.values[e.kids[1].text] = *v;
    return;
  }
  for (const auto& k : e.kids) collect_define_funs(k, model);
}

}  // namespace detail_solver

inline ParsedAnswer parse_answer(const std::string& output) {
  ParsedAnswer ans;
  const auto roots = sexp::parse_all(output);
  for (const auto& e : roots) {
    if (e.atom) {
      if (!ans.saw_status && (e.text == "sat" || e.text == "unsat" || e.text == "unknown")) {
        ans.saw_status = true;
        ans.status = e.text == "sat"     ? CheckStatus::Sat
                     : e.text == "unsat" ? CheckStatus::Unsat
                                         : CheckStatus::Unknown;
      }
      continue;
    }
    if (!e.kids.empty() && sexp::is_atom(e.kids[0], "error")) continue;
    if (!e.kids.empty() && sexp::is_atom(e.kids[0], "objectives")) {
      for (size_t i = 1; i < e.kids.size(); ++i) {
        const auto& entry = e.kids[i];
        // Some solvers label the entry with the fully expanded objective term
        // rather than the name it was defined under, so the label may be a
        // compound form; only the trailing value matters (consumed in order).
        if (!entry.atom && entry.kids.size() == 2)
          if (auto v = sexp::value_bits(entry.kids.back()))
            ans.objectives.emplace_back(entry.kids[0].atom ? entry.kids[0].text : "", *v);
      }
      continue;
    }
    detail_solver::collect_define_funs(e, ans.model);
  }
  return ans;
}

// ---------------------------------------------------------------------------
// Model evaluation (the counter-example validity check)

struct ModelEvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluate a node under a variable assignment; unassigned variables read as
// zero (solver don't-cares). Array-sorted variables are not evaluable.
inline uint64_t evaluate_model(const Node* n, const Model& model,
                               std::unordered_map<const Node*, uint64_t>& memo) {
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  const auto ev = [&](int i) { return evaluate_model(n->child[i], model, memo); };
  const unsigned w = width_of(n->sort);
  const auto sx = [&](uint64_t v, const Node* of) {
    return detail::sext_bits(v, width_of(of->sort));
  };
  uint64_t out = 0;
  switch (n->kind) {
    case Kind::Const:
      out = n->bits;
      break;
    case Kind::Var: {
      if (n->sort == Sort::Array) throw ModelEvalError("array variable in model evaluation");
      out = model.bits(n->name).value_or(0);
      out = detail::mask_bits(out, w);
      break;
    }
    case Kind::ConstArray:
      throw ModelEvalError("array value in model evaluation");
    case Kind::Neg:
      out = detail::mask_bits(~ev(0) + 1, w);
      break;
    case Kind::Not:
      out = n->sort == Sort::Bool ? (ev(0) ^ 1) : detail::mask_bits(~ev(0), w);
      break;
    case Kind::Add: case Kind::Sub: case Kind::Mul: case Kind::Sdiv:
    case Kind::And: case Kind::Or: case Kind::Xor:
    case Kind::Shl: case Kind::Lshr: case Kind::Ashr: {
      const uint64_t a = ev(0), b = ev(1);
      if (n->sort == Sort::Bool) {
        switch (n->kind) {
          case Kind::And: out = a & b; break;
          case Kind::Or: out = a | b; break;
          case Kind::Xor: out = a ^ b; break;
          default: throw ModelEvalError("arithmetic on bool");
        }
        break;
      }
      const int64_t xs = sx(a, n->child[0]), ys = sx(b, n->child[1]);
      int64_t r = 0;
      switch (n->kind) {
        case Kind::Add: r = scalar::add(xs, ys); break;
        case Kind::Sub: r = scalar::sub(xs, ys); break;
        case Kind::Mul: r = scalar::mul(xs, ys); break;
        case Kind::Sdiv: r = scalar::sdiv(xs, ys); break;
        case Kind::And: r = scalar::bit_and(xs, ys); break;
        case Kind::Or: r = scalar::bit_or(xs, ys); break;
        case Kind::Xor: r = scalar::bit_xor(xs, ys); break;
        case Kind::Shl: case Kind::Lshr: case Kind::Ashr: {
          const uint64_t amt = b;  // already masked to operand width
          if (amt >= w) {
            r = n->kind == Kind::Ashr ? (xs < 0 ? -1 : 0) : 0;
          } else if (n->kind == Kind::Shl) {
            r = scalar::to_signed(detail::mask_bits(a << amt, w));
          } else if (n->kind == Kind::Lshr) {
            r = scalar::to_signed(a >> amt);
          } else {
            r = xs >> amt;
          }
          break;
        }
        default: break;
      }
      out = detail::mask_bits(scalar::to_unsigned(r), w);
      break;
    }
    case Kind::Eq:
      out = ev(0) == ev(1) ? 1 : 0;
      break;
    case Kind::Slt:
      out = sx(ev(0), n->child[0]) < sx(ev(1), n->child[1]) ? 1 : 0;
      break;
    case Kind::Sgt:
      out = sx(ev(0), n->child[0]) > sx(ev(1), n->child[1]) ? 1 : 0;
      break;
    case Kind::Ult:
      out = ev(0) < ev(1) ? 1 : 0;
      break;
    case Kind::Ite:
      out = ev(0) ? ev(1) : ev(2);
      break;
    case Kind::ZeroExt:
      out = ev(0);
      break;
    case Kind::SignExt:
      out = detail::mask_bits(scalar::to_unsigned(sx(ev(0), n->child[0])), w);
      break;
    case Kind::Extract: {
      const unsigned lo = static_cast<unsigned>(n->bits & 0xff);
      out = detail::mask_bits(ev(0) >> lo, w);
      break;
    }
    case Kind::Select:
      if (n->child[0]->kind == Kind::ConstArray) {
        out = n->child[0]->child[0]->bits;
        break;
      }
      throw ModelEvalError("select over array variable in model evaluation");
  }
  memo.emplace(n, out);
  return out;
}

inline uint64_t evaluate_model(SymValue v, const Model& model) {
  std::unordered_map<const Node*, uint64_t> memo;
  return evaluate_model(v.node(), model, memo);
}

// ---------------------------------------------------------------------------
// prove / optimize

enum class Outcome { Proven, Falsified, Unknown };

struct ProveResult {
  Outcome outcome = Outcome::Unknown;
  Model model;          // counter-example when Falsified
  std::string detail;   // diagnostic for Unknown
  std::string script;   // the exact script sent
  std::string transcript;
};

struct QueryStats {
  unsigned solver_calls = 0;
};

// Entailment check: hypotheses |= goal.
inline ProveResult prove(Context& ctx, std::vector<SymValue> hypotheses, SymValue goal,
                         const SolverConfig& cfg, QueryStats* stats = nullptr) {
  ProveResult res;
  // Fold-level shortcuts: fully concrete queries resolve without a solver.
  bool all_hyps_true = true;
  for (const SymValue& h : hypotheses) {
    const auto hk = ctx.known_bool(h);
    if (hk && !*hk) {
      res.outcome = Outcome::Proven;  // vacuous: hypotheses are contradictory
      return res;
    }
    if (!hk) all_hyps_true = false;
  }
  if (const auto gk = ctx.known_bool(goal)) {
    if (*gk) {
      res.outcome = Outcome::Proven;
      return res;
    }
    if (all_hyps_true) {
      res.outcome = Outcome::Falsified;  // concrete violation; empty model
      return res;
    }
  }
  std::vector<SymValue> assertions = std::move(hypotheses);
  assertions.push_back(ctx.logic_not(goal));

  smt::LowerOptions lopts;
  lopts.timeout_ms = cfg.timeout_ms;
  const auto lowered = smt::lower(assertions, lopts);
  res.script = lowered.script;
  const auto run = run_solver(cfg, lowered.script);
  if (stats) ++stats->solver_calls;
  res.transcript = run.output;
  if (run.timed_out) {
    res.detail = "solver timed out";
    return res;
  }
  const auto ans = parse_answer(run.output);
  if (!ans.saw_status) {
    res.detail = "no solver verdict in output (exit code " + std::to_string(run.exit_code) + ")";
    return res;
  }
  switch (ans.status) {
    case CheckStatus::Unsat:
      res.outcome = Outcome::Proven;
      return res;
    case CheckStatus::Unknown:
      res.detail = "solver answered unknown";
      return res;
    case CheckStatus::Sat:
      break;
  }
  res.model = ans.model;
  // Counter-example validity: all assertions must evaluate true under the
  // model. Partial assignments over arrays are not checkable; accept those.
  try {
    for (const SymValue& a : assertions) {
      if (evaluate_model(a, res.model) != 1) {
        res.detail = "solver model failed validation";
        return res;
      }
    }
  } catch (const ModelEvalError&) {
    // arrays present; skip the check
  }
  res.outcome = Outcome::Falsified;
  return res;
}

struct Optimum {
  Outcome outcome = Outcome::Unknown;  // Proven: bound found; Falsified unused
  std::string name;
  int64_t value = 0;
  Model model;          // witness attaining the bound
  std::string detail;
  bool used_fallback = false;
};

namespace detail_solver {

// Binary search for the extremal value of term (unsigned order) subject to
// the hypotheses. At most 64 sat queries.
inline Optimum optimize_by_search(Context& ctx, const std::vector<SymValue>& hypotheses,
                                  SymValue term, bool minimize, const std::string& name,
                                  const SolverConfig& cfg, QueryStats* stats) {
  Optimum opt;
  opt.name = name;
  opt.used_fallback = true;
  uint64_t lo = 0, hi = ~uint64_t{0};
  Model best;
  bool any = false;

  const auto check_sat_with = [&](SymValue extra, Model& out_model) -> std::optional<bool> {
    std::vector<SymValue> assertions = hypotheses;
    assertions.push_back(extra);
    smt::LowerOptions lopts;
    lopts.timeout_ms = cfg.timeout_ms;
    const auto lowered = smt::lower(assertions, lopts);
    const auto run = run_solver(cfg, lowered.script);
    if (stats) ++stats->solver_calls;
    if (run.timed_out) return std::nullopt;
    const auto ans = parse_answer(run.output);
    if (!ans.saw_status || ans.status == CheckStatus::Unknown) return std::nullopt;
    if (ans.status == CheckStatus::Sat) {
      out_model = ans.model;
      return true;
    }
    return false;
  };

  // Establish satisfiability and an initial witness.
  {
    Model m;
    auto sat = check_sat_with(ctx.boolean(true), m);
    if (!sat) {
      opt.detail = "solver failed during optimization";
      return opt;
    }
    if (!*sat) {
      opt.detail = "constraints are unsatisfiable";
      return opt;
    }
    best = m;
    any = true;
    try {
      const uint64_t v = evaluate_model(term, m);
      if (minimize) hi = v; else lo = v;
    } catch (const ModelEvalError&) {
      // keep full range
    }
  }

  for (int iter = 0; iter < 64 && lo < hi; ++iter) {
    const uint64_t mid = lo + (hi - lo) / 2;
    Model m;
    std::optional<bool> sat;
    if (minimize) {
      // is there a value <= mid?
      const auto bound = ctx.logic_not(ctx.ult(ctx.constant(Sort::Bv64, mid), term));
      sat = check_sat_with(bound, m);
    } else {
      // is there a value > mid?
      const auto bound = ctx.ult(ctx.constant(Sort::Bv64, mid), term);
      sat = check_sat_with(bound, m);
    }
    if (!sat) {
      opt.detail = "solver failed during optimization";
      return opt;
    }
    if (*sat) {
      best = m;
      uint64_t v = minimize ? hi : lo;
      try {
        v = evaluate_model(term, m);
      } catch (const ModelEvalError&) {
        v = minimize ? mid : mid + 1;
      }
      if (minimize) hi = v; else lo = v;
    } else {
      if (minimize) lo = mid + 1; else hi = mid;
    }
  }

  if (!any) {
    opt.detail = "no witness found";
    return opt;
  }
  opt.outcome = Outcome::Proven;
  opt.value = scalar::to_signed(minimize ? hi : lo);
  opt.model = best;
  return opt;
}

}  // namespace detail_solver

// Least / greatest value of a 64-bit term subject to hypotheses, with a
// witness model attaining it.
inline Optimum optimize(Context& ctx, const std::vector<SymValue>& hypotheses, SymValue term,
                        bool minimize, const std::string& name, const SolverConfig& cfg,
                        QueryStats* stats = nullptr) {
  smt::LowerOptions lopts;
  lopts.timeout_ms = cfg.timeout_ms;
  lopts.objective = minimize ? smt::ObjectiveKind::Minimize : smt::ObjectiveKind::Maximize;
  lopts.objective_term = term;
  lopts.objective_name = "objective";
  const auto lowered = smt::lower(hypotheses, lopts);
  const auto run = run_solver(cfg, lowered.script);
  if (stats) ++stats->solver_calls;
  if (!run.timed_out) {
    const auto ans = parse_answer(run.output);
    if (ans.saw_status && ans.status == CheckStatus::Sat) {
      if (!ans.objectives.empty()) {
        Optimum opt;
        opt.outcome = Outcome::Proven;
        opt.name = name;
        opt.value = scalar::to_signed(ans.objectives.front().second);
        opt.model = ans.model;
        return opt;
      }
    } else if (ans.saw_status && ans.status == CheckStatus::Unsat) {
      Optimum opt;
      opt.name = name;
      opt.detail = "constraints are unsatisfiable";
      return opt;
    }
  }
  return detail_solver::optimize_by_search(ctx, hypotheses, term, minimize, name, cfg, stats);
}

}  // namespace redfin
