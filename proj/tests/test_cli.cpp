#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace {

std::string cli() {
  const char* p = std::getenv("BFOML_CLI");
  return p ? p : "./bfoml";
}

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args, const std::string& stderr_sink = "/dev/null") {
  std::string cmd = cli() + " " + args + " 2>" + stderr_sink;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  while (!r.out.empty() && (r.out.back() == '\n' || r.out.back() == '\r')) r.out.pop_back();
  return r;
}

// every json-mode invocation must put exactly one JSON document on stdout
json run_json(const std::string& args, int want_code) {
  RunResult r = run(args);
  CAPTURE(args);
  CAPTURE(r.out);
  CHECK(r.code == want_code);
  return json::parse(r.out);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
  REQUIRE(f.good());
}

const char* kModelPath = "/tmp/bfoml_cli_model.json";
const char* kSatModel =
    R"js({"delta":{"r":["z0"],"r.v_t":["z0"]},"domain":["z0"],"policy":"increasing",)js"
    R"js("relation":[["r","r.v_t"]],"valuation":{"r.v_t":{"Q":[["z0"]]}},)js"
    R"js("worlds":["r","r.v_t"]})js";

}  // namespace

TEST_CASE("sat reports SAT with the extracted model") {
  RunResult r = run("sat 'dia forall t Q(t)' --format json");
  CHECK(r.code == 0);
  CHECK(r.out == std::string(R"js({"model":)js") + kSatModel +
                     R"js(,"status":"SAT","valuation":{"z0":"z0"},"world":"r"})js");

  r = run("sat 'dia forall t Q(t)'");
  CHECK(r.code == 0);
  CHECK(r.out == std::string("SAT\nmodel: ") + kSatModel + "\nworld: r\nvaluation: z0=z0");
}

TEST_CASE("sat reports UNSAT with exit 1") {
  RunResult r = run("sat 'P(x) & ~P(x)' --format json");
  CHECK(r.code == 1);
  CHECK(r.out == R"js({"status":"UNSAT"})js");
  r = run("sat 'P(x) & ~P(x)'");
  CHECK(r.code == 1);
  CHECK(r.out == "UNSAT");
}

TEST_CASE("sat rejects quantifier-first input with exit 2") {
  RunResult r = run("sat 'exists x box P(x)' --format json");
  CHECK(r.code == 2);
  CHECK(r.out == R"js({"error":"formula outside the single-binder modality-first fragment: )js"
                 R"js(exists x box P(x)"})js");
}

TEST_CASE("errors stay valid JSON in json mode") {
  json e = run_json("sat --format json", 2);
  CHECK(e["error"] == "invalid usage: formula is required");
  e = run_json("nonsense --format json", 2);
  CHECK(e["error"] == "invalid usage: A subcommand is required");
  e = run_json("pnf 'P(x' --format json", 2);
  CHECK(e["error"] == "parse error at 3: expected ')', found end of input");
  e = run_json("oracle top --policy sometimes --format json", 2);
  CHECK(e["error"] == "invalid usage: --policy: sometimes not in {increasing,constant}");
  e = run_json("corpus --profile bogus --format json", 2);
  CHECK(e["error"] == "invalid usage: --profile: bogus not in {tableau,preservation}");

  // text mode keeps stdout silent and reports on stderr
  RunResult r = run("pnf 'P(x'", "/tmp/bfoml_cli_err.txt");
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  std::ifstream err("/tmp/bfoml_cli_err.txt");
  std::string line;
  std::getline(err, line);
  CHECK(line == "error: parse error at 3: expected ')', found end of input");
}

TEST_CASE("oracle finds a witness or reports the bounds") {
  RunResult r = run("oracle 'box exists x P(x)' --max-worlds 1 --max-domain 1 --format json");
  CHECK(r.code == 0);
  CHECK(r.out ==
        R"js({"model":{"delta":{"w0":["d0"]},"domain":["d0"],"policy":"increasing",)js"
        R"js("relation":[],"valuation":{},"worlds":["w0"]},"status":"SAT","valuation":{},)js"
        R"js("world":"w0"})js");

  r = run("oracle top --policy constant --max-worlds 1 --max-domain 1 --format json");
  CHECK(r.code == 0);
  CHECK(r.out ==
        R"js({"model":{"delta":{"w0":["d0"]},"domain":["d0"],"policy":"constant",)js"
        R"js("relation":[],"valuation":{},"worlds":["w0"]},"status":"SAT","valuation":{},)js"
        R"js("world":"w0"})js");

  r = run("oracle 'P(x) & ~P(x)' --max-worlds 2 --max-domain 2 --format json");
  CHECK(r.code == 3);
  CHECK(r.out == R"js({"max_domain":2,"max_worlds":2,"status":"NO_MODEL_WITHIN_BOUNDS"})js");
  r = run("oracle 'P(x) & ~P(x)' --max-worlds 1 --max-domain 1");
  CHECK(r.code == 3);
  CHECK(r.out == "no model within bounds");

  r = run("oracle '(dia forall z P(z)) & (dia forall t ~P(t))' --max-worlds 3 "
          "--max-domain 2 --format json");
  CHECK(r.code == 0);
  CHECK(r.out ==
        R"js({"model":{"delta":{"w0":["d0"],"w1":["d0"]},"domain":["d0"],)js"
        R"js("policy":"increasing","relation":[["w0","w0"],["w0","w1"]],)js"
        R"js("valuation":{"w0":{"P":[["d0"]]}},"worlds":["w0","w1"]},"status":"SAT",)js"
        R"js("valuation":{},"world":"w0"})js");
}

TEST_CASE("mc evaluates a formula in a model file") {
  write_file(kModelPath,
             R"js({"worlds":["w"],"relation":[],"domain":["d","e"],)js"
             R"js("delta":{"w":["d","e"]},"valuation":{"w":{"P":[["d"]]}},)js"
             R"js("policy":"constant"})js");
  RunResult r = run(std::string("mc ") + kModelPath + " 'P(x)' --world w --assign x=d "
                    "--format json");
  CHECK(r.code == 0);
  CHECK(r.out == R"js({"result":true})js");
  r = run(std::string("mc ") + kModelPath + " 'P(x)' --world w --assign x=d");
  CHECK(r.code == 0);
  CHECK(r.out == "true");

  r = run(std::string("mc ") + kModelPath + " 'P(x)' --world w --assign x=e --format json");
  CHECK(r.code == 1);
  CHECK(r.out == R"js({"result":false})js");

  r = run(std::string("mc ") + kModelPath + " 'P(x)' --world w --format json");
  CHECK(r.code == 2);
  CHECK(r.out == R"js({"error":"valuation does not bind free variable 'x'"})js");

  json e = run_json("mc /tmp/bfoml_no_such_model.json 'P(x)' --world w --format json", 2);
  CHECK(e["error"] == "cannot read model file: /tmp/bfoml_no_such_model.json");
}

TEST_CASE("sat output feeds mc as-is") {
  json sat = run_json("sat 'dia forall t Q(t)' --format json", 0);
  write_file(kModelPath, sat["model"].dump());
  std::string args = std::string("mc ") + kModelPath + " 'dia forall t Q(t)' --world " +
                     sat["world"].get<std::string>();
  for (auto& [var, elem] : sat["valuation"].items())
    args += " --assign " + var + "=" + elem.get<std::string>();
  json mc = run_json(args + " --format json", 0);
  CHECK(mc["result"] == true);
}

TEST_CASE("translate emits the encoded formula with metadata") {
  json t = run_json("translate 'A x. E y. R(x,y)' --format json", 0);
  CHECK(t["alpha"] == "A x. E y. R(x,y)");
  CHECK(t["target"] == "forall-box");
  CHECK(t["modal_depth"] == 5);
  CHECK(t["classification"] == "ExistsBoxForallBox");
  CHECK(t["formula"] ==
        "(((forall z box forall z_1 box forall x_1 box exists y_1 dia exists z_2 dia "
        "(P(x_1) & Q(y_1))) & (((((exists z0 dia top) & forall z1 box exists z2 dia top) & "
        "forall z3 box forall z4 box exists z5 dia top) & forall z6 box forall z7 box "
        "forall z8 box exists z9 dia top) & forall z10 box forall z11 box forall z12 box "
        "forall z13 box exists z14 dia top)) & forall z1_1 box forall z2_1 box ((forall "
        "z3_1 box forall z4_1 box forall z5_1 box (~P(z1_1) | ~Q(z2_1))) | forall z6_1 box "
        "forall z7_1 box exists z8_1 dia (P(z1_1) & Q(z2_1))))");

  t = run_json("translate 'E x. R(x,x)' --format json", 0);
  CHECK(t["modal_depth"] == 4);

  t = run_json("translate 'E x. R(x,x)' box-exists2 --format json", 0);
  CHECK(t["target"] == "box-exists2");
  CHECK(t["classification"] == "BoxExists2");
  CHECK(t["modal_depth"] == 3);

  json e = run_json("translate 'A x. R(x,y)' --format json", 2);
  CHECK(std::string(e["error"]).find("unbound variable 'y' in matrix") != std::string::npos);
}

TEST_CASE("pnf, clean and classify one-shot transforms") {
  RunResult r = run("pnf '!(box exists x P(x))' --format json");
  CHECK(r.code == 0);
  CHECK(r.out == R"js({"formula":"dia forall x ~P(x)"})js");
  r = run("pnf '!(box exists x P(x))'");
  CHECK(r.code == 0);
  CHECK(r.out == "dia forall x ~P(x)");
  // idempotent on normal input
  r = run("pnf 'dia forall x ~P(x)'");
  CHECK(r.out == "dia forall x ~P(x)");

  r = run("clean '(exists x box P(x)) & (exists x box Q(x))' --format json");
  CHECK(r.code == 0);
  CHECK(r.out == R"js({"formula":"((exists x box P(x)) & exists x_1 box Q(x_1))"})js");

  r = run("classify 'box exists x y P(x,y)' --format json");
  CHECK(r.code == 0);
  CHECK(r.out == R"js({"classification":"BoxExists2"})js");
  r = run("classify 'box exists x y P(x,y)'");
  CHECK(r.out == "BoxExists2");
}

TEST_CASE("formulas load from @file") {
  write_file("/tmp/bfoml_cli_formula.txt", "dia forall t Q(t)\n");
  json direct = run_json("sat 'dia forall t Q(t)' --format json", 0);
  json via_file = run_json("sat @/tmp/bfoml_cli_formula.txt --format json", 0);
  CHECK(direct == via_file);
}

TEST_CASE("corpus generation is deterministic and seeded") {
  RunResult a = run("corpus --profile preservation --count 2 --format json");
  RunResult b = run("corpus --profile preservation --count 2 --format json");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  json j = json::parse(a.out);
  CHECK(j["profile"] == "preservation");
  CHECK(j["seed"] == 271);
  CHECK(j["count"] == 2);
  CHECK(j["formulas"].size() == 2);
  CHECK(j["formulas"][1] == "P(v1)");

  RunResult t = run("corpus --count 1");
  CHECK(t.code == 0);
  CHECK(t.out ==
        "(((P(v2) & bot) | ((P(v2) | ((Q(v1,v2) | (((~S | S) & Q(v1,v1)) | ~P(v2))) | "
        "bot)) & bot)) | ~S)");

  json full = run_json("corpus --format json", 0);
  CHECK(full["seed"] == 1729);
  CHECK(full["count"] == 500);
  CHECK(full["formulas"].size() == 500);
}

TEST_CASE("trace goes to stderr and leaves stdout machine-readable") {
  RunResult r = run("sat 'dia forall t Q(t)' --trace --format json", "/tmp/bfoml_cli_trace.txt");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["status"] == "SAT");
  std::ifstream trace("/tmp/bfoml_cli_trace.txt");
  std::string line;
  std::getline(trace, line);
  CHECK(line == "BR r 1 1");
}

TEST_CASE("help exits cleanly") {
  RunResult r = run("--help");
  CHECK(r.code == 0);
  CHECK(r.out.find("Subcommands:") != std::string::npos);
  CHECK(r.out.find("sat") != std::string::npos);
  r = run("sat --help");
  CHECK(r.code == 0);
}
