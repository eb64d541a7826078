#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "farcheck/system.hpp"
#include "farcheck/trace_io.hpp"
#include "support/load.hpp"

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

// Runs the installed binary with stderr folded into stdout.
RunResult run(const std::string& args) {
  std::string cmd = std::string(FARCHECK_BIN) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string model(const char* stem) {
  return std::string(FARCHECK_MODELS) + "/" + stem + ".fcub";
}

std::string first_line(const std::string& s) {
  return s.substr(0, s.find('\n'));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string tmp_path(const char* name) {
  return std::string("cli_tmp_") + name;
}

}  // namespace

TEST_CASE("exit codes track the verdict") {
  CHECK(run("check " + model("dekker")).code == 0);
  CHECK(run("check " + model("broken_dekker")).code == 10);
  RunResult r = run("check " + model("german_ish") + " --max-steps 5");
  CHECK(r.code == 20);
  CHECK(first_line(r.out) == "INCONCLUSIVE(step budget exhausted)");
}

TEST_CASE("the first stdout line is the verdict token") {
  CHECK(first_line(run("check " + model("dekker")).out) == "SAFE");
  CHECK(first_line(run("check " + model("broken_mux_sem")).out) == "UNSAFE");
  CHECK(first_line(run("check " + model("mux_sem") + " --engine backward").out)
        == "SAFE");
  CHECK(first_line(run("check " + model("broken_german_ish") +
                       " --engine explicit -N 2").out) == "UNSAFE");
}

TEST_CASE("usage errors exit 2 with a hint") {
  RunResult r = run("check " + model("dekker") + " --engine explicit");
  CHECK(r.code == 2);
  CHECK(r.out == "--engine explicit requires -N\n");

  r = run("check " + model("dekker") + " -N 3");
  CHECK(r.code == 2);
  CHECK(r.out == "-N only applies to --engine explicit\n");

  r = run("check no_such_file.fcub");
  CHECK(r.code == 2);
  CHECK(r.out == "no_such_file.fcub: cannot open file\n");

  r = run("check " + model("dekker") + " --engine warp");
  CHECK(r.code == 2);

  r = run("check " + model("dekker") + " --inject-far-verdict UNSAFE");
  CHECK(r.code == 2);
  CHECK(r.out == "--inject-far-verdict only applies to --engine diff\n");

  CHECK(run("").code == 2);
}

TEST_CASE("parse errors exit 2 with the diagnostic") {
  std::string bad = tmp_path("bad.fcub");
  {
    std::ofstream out(bad);
    out << "var on bool\n";
  }
  RunResult r = run("check " + bad);
  CHECK(r.code == 2);
  CHECK(r.out == "1:8: syntax error: expected ':'\n");
  std::remove(bad.c_str());
}

TEST_CASE("diff mode prints the triangle and stays consistent") {
  RunResult r = run("check " + model("dekker") + " --engine diff");
  CHECK(r.code == 0);
  CHECK(r.out ==
        "SAFE\n"
        "far: SAFE\n"
        "backward: SAFE\n"
        "explicit N=2: SAFE\n"
        "explicit N=3: SAFE\n"
        "CONSISTENT\n");

  r = run("check " + model("broken_mux_sem") + " --engine diff");
  CHECK(r.code == 10);
  CHECK(r.out ==
        "UNSAFE\n"
        "far: UNSAFE\n"
        "backward: UNSAFE\n"
        "explicit N=2: UNSAFE\n"
        "explicit N=3: UNSAFE\n"
        "CONSISTENT\n");
}

TEST_CASE("an injected far verdict is flagged as inconsistent") {
  RunResult r = run("check " + model("dekker") +
                    " --engine diff --inject-far-verdict UNSAFE");
  CHECK(r.code == 3);
  CHECK(r.out ==
        "UNSAFE\n"
        "far: UNSAFE\n"
        "backward: SAFE\n"
        "explicit N=2: SAFE\n"
        "explicit N=3: SAFE\n"
        "violation: far Unsafe but backward Safe\n"
        "INCONSISTENT\n");
}

TEST_CASE("the corpus table is frozen") {
  RunResult r = run("corpus " FARCHECK_MODELS);
  CHECK(r.code == 0);
  CHECK(r.out ==
        "model               far     backward  explicit(2)  explicit(3)  triangle\n"
        "broken_dekker       UNSAFE  UNSAFE    UNSAFE       UNSAFE       CONSISTENT\n"
        "broken_german_ish   UNSAFE  UNSAFE    UNSAFE       UNSAFE       CONSISTENT\n"
        "broken_german_ish2  UNSAFE  UNSAFE    UNSAFE       UNSAFE       CONSISTENT\n"
        "broken_mux_sem      UNSAFE  UNSAFE    UNSAFE       UNSAFE       CONSISTENT\n"
        "dekker              SAFE    SAFE      SAFE         SAFE         CONSISTENT\n"
        "german_ish          SAFE    SAFE      SAFE         SAFE         CONSISTENT\n"
        "german_ish2         SAFE    SAFE      SAFE         SAFE         CONSISTENT\n"
        "mux_sem             SAFE    SAFE      SAFE         SAFE         CONSISTENT\n");
}

TEST_CASE("corpus mode rejects bad directories") {
  RunResult r = run("corpus does_not_exist");
  CHECK(r.code == 2);
  CHECK(r.out == "does_not_exist: not a directory\n");
}

TEST_CASE("stats files carry the keys in order") {
  std::string stats = tmp_path("stats.json");
  RunResult r = run("check " + model("mux_sem") + " --stats " + stats);
  CHECK(r.code == 0);
  std::string j = slurp(stats);
  std::remove(stats.c_str());
  CHECK(j.rfind("{\"verdict\":\"SAFE\",\"vertices_created\":3,\"edges\":12,"
                "\"covers\":5,\"refines\":3,\"bad_propagations\":1,"
                "\"solver_calls\":46,\"elapsed_ms\":", 0) == 0);
  CHECK(j.back() == '\n');
}

TEST_CASE("trace files written by the binary replay through the library") {
  std::string tr = tmp_path("cex.trace");
  RunResult r = run("check " + model("broken_german_ish") + " --trace " + tr);
  CHECK(r.code == 10);
  far::CoreSystem sys = support::load_model("broken_german_ish");
  far::TraceFile f = far::parse_trace(slurp(tr), sys);
  std::remove(tr.c_str());
  CHECK(f.model == "broken_german_ish");
  CHECK(!f.trace.steps.empty());

  // Safe runs write no trace file.
  std::string none = tmp_path("none.trace");
  r = run("check " + model("dekker") + " --trace " + none);
  CHECK(r.code == 0);
  std::ifstream probe(none);
  CHECK(!probe.good());
}

TEST_CASE("query dumps are JSONL with one record per solver call") {
  std::string dump = tmp_path("queries.jsonl");
  RunResult r = run("check " + model("dekker") + " --dump-queries " + dump);
  CHECK(r.code == 0);
  std::string text = slurp(dump);
  std::remove(dump.c_str());
  REQUIRE(!text.empty());
  CHECK(text.back() == '\n');
  std::istringstream in(text);
  std::string line;
  int64_t count = 0;
  while (std::getline(in, line)) {
    ++count;
    CHECK(line.rfind("{\"witnesses\":", 0) == 0);
    CHECK(line.find("\"result\":") != std::string::npos);
    CHECK(line.back() == '}');
  }
  CHECK(count == 70);
}

TEST_CASE("verbose mode appends stats after the verdict") {
  RunResult r = run("check " + model("dekker") + " -v");
  CHECK(r.code == 0);
  CHECK(first_line(r.out) == "SAFE");
  CHECK(r.out.find("stats: {\"verdict\":\"SAFE\"") != std::string::npos);

  r = run("check " + model("dekker") + " --engine explicit -N 2 -v");
  CHECK(r.out == "SAFE\nstates: 12\n");
}

TEST_CASE("queue order is a visible knob") {
  RunResult r = run("check " + model("german_ish") + " --queue-order fifo");
  CHECK(r.code == 0);
  CHECK(first_line(r.out) == "SAFE");
  r = run("check " + model("german_ish") + " --queue-order lifo");
  CHECK(r.code == 2);
}
