#include "farcheck/trace_io.hpp"

#include <cctype>
#include <sstream>

#include "farcheck/diag.hpp"

namespace far {

std::string verdict_line(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Safe: return "SAFE";
    case Verdict::Kind::Unsafe: return "UNSAFE";
    case Verdict::Kind::Inconclusive: break;
  }
  return "INCONCLUSIVE(" + v.reason + ")";
}

std::string format_trace(const std::string& model, const Trace& t,
                         const CoreSystem& sys) {
  std::ostringstream os;
  os << "model " << model << "\n";
  os << "procs " << t.nprocs << "\n";
  for (const TraceStep& s : t.steps) {
    os << sys.transitions[s.tau].name << "(";
    for (size_t i = 0; i < s.procs.size(); ++i) {
      if (i) os << ",";
      os << s.procs[i];
    }
    os << ")\n";
  }
  return os.str();
}

namespace {

[[noreturn]] void fail(Diag::Kind kind, int line, const std::string& msg) {
  throw ParseError(Diag{kind, line, 1, msg});
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int32_t parse_int(const std::string& tok, int line, const char* what) {
  if (tok.empty()) fail(Diag::Kind::SyntaxError, line, std::string("missing ") + what);
  for (char c : tok)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      fail(Diag::Kind::SyntaxError, line, std::string("bad ") + what + " `" + tok + "`");
  if (tok.size() > 9) fail(Diag::Kind::SyntaxError, line, std::string(what) + " out of range");
  return static_cast<int32_t>(std::stol(tok));
}

}  // namespace

TraceFile parse_trace(const std::string& text, const CoreSystem& sys) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  TraceFile out;
  int stage = 0;  // 0 = want model, 1 = want procs, 2 = steps
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (stage == 0) {
      if (line.rfind("model ", 0) != 0)
        fail(Diag::Kind::SyntaxError, lineno, "expected `model NAME`");
      out.model = trim(line.substr(6));
      if (out.model.empty())
        fail(Diag::Kind::SyntaxError, lineno, "missing model name");
      stage = 1;
      continue;
    }
    if (stage == 1) {
      if (line.rfind("procs ", 0) != 0)
        fail(Diag::Kind::SyntaxError, lineno, "expected `procs N`");
      out.trace.nprocs = parse_int(trim(line.substr(6)), lineno, "process count");
      if (out.trace.nprocs < 1)
        fail(Diag::Kind::SyntaxError, lineno, "process count must be positive");
      stage = 2;
      continue;
    }
    size_t lp = line.find('(');
    if (lp == std::string::npos || line.back() != ')')
      fail(Diag::Kind::SyntaxError, lineno, "expected `name(i,...)`");
    std::string name = trim(line.substr(0, lp));
    int32_t tau = -1;
    for (size_t i = 0; i < sys.transitions.size(); ++i)
      if (sys.transitions[i].name == name) {
        tau = static_cast<int32_t>(i);
        break;
      }
    if (tau < 0)
      fail(Diag::Kind::NameError, lineno, "unknown transition `" + name + "`");
    TraceStep step;
    step.tau = tau;
    std::string args = trim(line.substr(lp + 1, line.size() - lp - 2));
    if (!args.empty()) {
      size_t pos = 0;
      while (true) {
        size_t comma = args.find(',', pos);
        std::string tok = trim(comma == std::string::npos
                                   ? args.substr(pos)
                                   : args.substr(pos, comma - pos));
        step.procs.push_back(parse_int(tok, lineno, "process id"));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
    if (static_cast<int32_t>(step.procs.size()) != sys.transitions[tau].nparams)
      fail(Diag::Kind::SortError, lineno,
           "`" + name + "` takes " +
               std::to_string(sys.transitions[tau].nparams) + " process ids");
    out.trace.steps.push_back(std::move(step));
  }
  if (stage < 2)
    fail(Diag::Kind::SyntaxError, lineno, "truncated trace: missing header");
  return out;
}

}  // namespace far
