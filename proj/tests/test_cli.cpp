#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "canlift/arith.hpp"
#include "canlift/cli.hpp"

using namespace canlift;
using nlohmann::json;

namespace {

struct Outcome {
  int status = 0;
  std::string out;
  std::string err;
};

Outcome exec(const RunConfig& cfg) {
  std::ostringstream out, err;
  Outcome r;
  r.status = run(cfg, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

RunConfig base_cfg(const std::string& command, std::uint64_t p) {
  RunConfig cfg;
  cfg.command = command;
  cfg.p = p;
  return cfg;
}

}  // namespace

TEST_CASE("lift solves the frozen example and reports it in every mode") {
  RunConfig cfg = base_cfg("lift", 5);
  cfg.N = 2;
  cfg.lambda_text = "3";

  Outcome r = exec(cfg);
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["p"] == 5);
  CHECK(j["n_ext"] == 1);
  CHECK(j["N"] == 2);
  CHECK(j["lambda"] == "3");
  CHECK(j["smooth"] == true);
  CHECK(j["ordinary"] == true);
  CHECK(j["eta_witt"] == "(3|3)");
  CHECK(j["eta_zp2"] == 8);
  CHECK(j["canonical"] == true);
  CHECK(j["cross_checked"] == true);
  CHECK(j["inconclusive_n2"] == false);
  CHECK(j["timing_ms"].is_number());

  cfg.output = "csv";
  Outcome c = exec(cfg);
  REQUIRE(c.status == 0);
  auto nl = c.out.find('\n');
  CHECK(c.out.substr(0, nl) ==
        "p,n_ext,N,lambda,smooth,ordinary,eta_witt,eta_zp2,canonical,"
        "cross_checked,inconclusive_n2,timing_ms");
  CHECK(c.out.find("5,1,2,3,true,true,(3|3),8,true,true,false,") != std::string::npos);

  cfg.output = "text";
  Outcome t = exec(cfg);
  REQUIRE(t.status == 0);
  CHECK(t.out.find("eta = (3|3)  (8 mod 25)") != std::string::npos);
  CHECK(t.out.find("canonical: yes") != std::string::npos);
}

TEST_CASE("lift without verification reports an unconfirmed answer") {
  RunConfig cfg = base_cfg("lift", 5);
  cfg.N = 2;
  cfg.lambda_text = "4";
  cfg.verify = false;
  Outcome r = exec(cfg);
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["eta_zp2"] == 4);
  CHECK(j["canonical"].is_null());
  CHECK(j["cross_checked"] == false);
}

TEST_CASE("lift verifies a supplied candidate instead of solving") {
  RunConfig cfg = base_cfg("lift", 5);
  cfg.N = 2;
  cfg.lambda_text = "3";

  cfg.eta_text = "(3|3)";
  Outcome good = exec(cfg);
  REQUIRE(good.status == 0);
  json jg = json::parse(good.out);
  CHECK(jg["canonical"] == true);
  CHECK(jg["cross_checked"] == true);
  CHECK(jg["eta_zp2"] == 8);

  cfg.eta_text = "(3|0)";  // the multiplicative lift, residue 18
  Outcome bad = exec(cfg);
  REQUIRE(bad.status == 0);
  json jb = json::parse(bad.out);
  CHECK(jb["canonical"] == false);
  CHECK(jb["cross_checked"] == false);
  CHECK(jb["eta_zp2"] == 18);

  cfg.eta_text = "(4|0)";  // does not lie over lambda = 3
  CHECK(exec(cfg).status == 1);
}

TEST_CASE("precondition violations exit with status 1") {
  RunConfig cfg = base_cfg("lift", 5);
  cfg.N = 2;

  cfg.lambda_text = "0";
  Outcome singular = exec(cfg);
  CHECK(singular.status == 1);
  CHECK(singular.err.find("singular") != std::string::npos);

  cfg.lambda_text = "2";
  Outcome nonord = exec(cfg);
  CHECK(nonord.status == 1);
  CHECK(nonord.err.find("not ordinary") != std::string::npos);

  cfg.lambda_text = "3";
  cfg.N = 4;  // p divides N+1
  CHECK(exec(cfg).status == 1);

  cfg.N = 2;
  cfg.p = 2;
  CHECK(exec(cfg).status == 1);

  cfg.p = 5;
  cfg.output = "yaml";
  CHECK(exec(cfg).status == 1);

  cfg.output = "json";
  cfg.command = "warp";
  CHECK(exec(cfg).status == 1);

  cfg.command = "lift";
  cfg.lambda_text = "";
  CHECK(exec(cfg).status == 1);
}

TEST_CASE("parse failures exit with status 2 and point at the offender") {
  RunConfig cfg = base_cfg("lift", 5);
  cfg.N = 2;
  cfg.lambda_text = "x";
  Outcome r = exec(cfg);
  CHECK(r.status == 2);
  CHECK(r.err.find("position") != std::string::npos);

  cfg.lambda_text = "3";
  cfg.eta_text = "(3|";
  CHECK(exec(cfg).status == 2);

  RunConfig chk = base_cfg("check", 5);
  chk.f_text = "x0^3 +";
  Outcome c = exec(chk);
  CHECK(c.status == 2);
  CHECK(c.err.find("position") != std::string::npos);

  RunConfig mod = base_cfg("lift", 3);
  mod.n_ext = 2;
  mod.modulus = "1,q,1";
  mod.N = 3;
  mod.lambda_text = "1,1";
  CHECK(exec(mod).status == 2);
}

TEST_CASE("table reproduces the frozen grid over F_5") {
  RunConfig cfg = base_cfg("table", 5);
  cfg.N = 2;
  Outcome r = exec(cfg);
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  REQUIRE(j["rows"].size() == 5);
  auto& rows = j["rows"];
  for (int i = 0; i < 5; ++i) CHECK(rows[i]["lambda"] == std::to_string(i));
  CHECK(rows[0]["smooth"] == false);
  CHECK(rows[1]["smooth"] == false);
  CHECK(rows[2]["smooth"] == true);
  CHECK(rows[2]["ordinary"] == false);
  CHECK(rows[2]["eta_witt"].is_null());
  CHECK(rows[2]["eta_zp2"].is_null());
  CHECK(rows[3]["eta_witt"] == "(3|3)");
  CHECK(rows[3]["eta_zp2"] == 8);
  CHECK(rows[4]["eta_witt"] == "(4|1)");
  CHECK(rows[4]["eta_zp2"] == 4);
  for (auto& row : rows) CHECK(row["timing_ms"].is_null());
}

TEST_CASE("table output is byte-identical across worker counts") {
  RunConfig cfg = base_cfg("table", 7);
  cfg.N = 2;
  cfg.output = "csv";
  cfg.threads = 1;
  Outcome one = exec(cfg);
  REQUIRE(one.status == 0);
  for (int t : {2, 3, 8}) {
    cfg.threads = t;
    Outcome many = exec(cfg);
    REQUIRE(many.status == 0);
    CHECK(many.out == one.out);
  }
#ifndef _WIN32
  ::setenv("CANLIFT_THREADS", "5", 1);
  cfg.threads = 0;
  Outcome env = exec(cfg);
  ::unsetenv("CANLIFT_THREADS");
  CHECK(env.out == one.out);
#endif
}

TEST_CASE("table accepts an explicit parameter list") {
  RunConfig cfg = base_cfg("table", 7);
  cfg.N = 3;
  cfg.lambda_text = "2;3";
  Outcome r = exec(cfg);
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][0]["eta_zp2"] == 16);
  CHECK(j["rows"][1]["eta_zp2"] == 45);
}

TEST_CASE("table over an extension field quotes csv fields and drops residues") {
  RunConfig cfg = base_cfg("table", 3);
  cfg.n_ext = 2;
  cfg.N = 3;
  cfg.output = "csv";
  Outcome r = exec(cfg);
  REQUIRE(r.status == 0);
  CHECK(r.out.find("\"1,1\"") != std::string::npos);
  CHECK(r.out.find("\"(1,1|2,1)\"") != std::string::npos);

  cfg.output = "json";
  json j = json::parse(exec(cfg).out);
  REQUIRE(j["rows"].size() == 9);
  int smooth = 0;
  for (auto& row : j["rows"]) {
    if (row["smooth"] == true) {
      ++smooth;
      CHECK(row["ordinary"] == true);
      CHECK(row["eta_zp2"].is_null());
      CHECK(row["eta_witt"].is_string());
    }
  }
  CHECK(smooth == 4);
}

TEST_CASE("check emits the full obstruction report") {
  RunConfig cfg = base_cfg("check", 5);
  cfg.f_text = "x0^4 + x1^4 + x2^4 + x3^4";
  Outcome r = exec(cfg);
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["p"] == 5);
  CHECK(j["N"] == 3);
  CHECK(j["d"] == 4);
  CHECK(j["canonical"] == true);
  CHECK(j["inconclusive_n2"] == false);
  CHECK(j["witness"].is_null());
  CHECK(j["kernel_rank"].get<int>() > 0);
  CHECK(j["timings_ms"]["context"].is_number());
  CHECK(j["timings_ms"]["verdict"].is_number());
}

TEST_CASE("check flags negative surface verdicts as inconclusive") {
  // quartic family member at eta = (2|0) over F_7: the canonical residue
  // over lambda = 2 is 16 while (2|0) has residue 30.
  RunConfig cfg = base_cfg("check", 7);
  cfg.f_text =
      "(2|0)*x0^4 + (2|0)*x1^4 + (2|0)*x2^4 + (2|0)*x3^4 - 4*x0*x1*x2*x3";
  Outcome r = exec(cfg);
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["canonical"] == false);
  CHECK(j["inconclusive_n2"] == true);
  CHECK(j["witness"].is_string());

  // the canonical lift of the same parameter, residue 16 = iso((2|5))
  cfg.f_text =
      "(2|5)*x0^4 + (2|5)*x1^4 + (2|5)*x2^4 + (2|5)*x3^4 - 4*x0*x1*x2*x3";
  json g = json::parse(exec(cfg).out);
  CHECK(g["canonical"] == true);
  CHECK(g["inconclusive_n2"] == false);

  // a curve in P^2 never carries the flag, even on a negative verdict
  cfg.f_text = "(3|0)*x0^3 + (3|0)*x1^3 + (3|0)*x2^3 - 3*x0*x1*x2";
  cfg.p = 5;
  json c = json::parse(exec(cfg).out);
  CHECK(c["canonical"] == false);
  CHECK(c["inconclusive_n2"] == false);
  CHECK(c["witness"].is_string());
}

TEST_CASE("gamma answers the verdict with the documented precondition") {
  RunConfig cfg = base_cfg("gamma", 7);
  cfg.f_text = "x0^3 + x1^3 + x2^3";
  Outcome r = exec(cfg);
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["canonical"] == true);
  CHECK(j["N"] == 2);
  CHECK(j["d"] == 3);
  CHECK(j["note"] == "smoothness of f is assumed, not verified");

  cfg.output = "text";
  Outcome t = exec(cfg);
  CHECK(t.out.find("canonical: yes") != std::string::npos);
  CHECK(t.out.find("smoothness of f is assumed") != std::string::npos);
}

TEST_CASE("hd emits the coefficient polynomial exactly and mod p^2") {
  RunConfig cfg = base_cfg("hd", 5);
  cfg.N = 2;
  cfg.m = 2;
  Outcome r = exec(cfg);
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["M"] == 3);
  CHECK(j["P"] == 9);
  CHECK(j["exact"] == "-19683 + 367416*X^3 - 204120*X^6 + 1680*X^9");
  CHECK(j["mod_p2"] == "17 + 16*X^3 + 5*X^6 + 5*X^9 (mod 25)");

  cfg.m = 1;
  json k = json::parse(exec(cfg).out);
  CHECK(k["exact"] == "81 - 72*X^3");
  CHECK(k["mod_p2"] == "6 + 3*X^3 (mod 25)");

  cfg.m = 3;
  CHECK(exec(cfg).status == 1);
}

TEST_CASE("selftest reports a full pass") {
  RunConfig cfg;
  cfg.command = "selftest";
  Outcome r = exec(cfg);
  CHECK(r.status == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("selftest: 9/9 passed") != std::string::npos);
}

TEST_CASE("report formatting is deterministic and round-trips") {
  LiftReport r;
  r.p = 5;
  r.n_ext = 1;
  r.N = 2;
  r.lambda = "3";
  r.smooth = true;
  r.ordinary = true;
  r.eta_witt = "(3|3)";
  r.eta_zp2 = 8;
  r.canonical = true;
  r.cross_checked = true;
  r.timing_ms = 1.25;

  json j = json::parse(format_report(r, "json"));
  CHECK(j["eta_witt"] == "(3|3)");
  CHECK(j["timing_ms"] == 1.25);
  CHECK(format_report(r, "json") == format_report(r, "json"));

  std::string csv = format_report(r, "csv");
  CHECK(csv.find("5,1,2,3,true,true,(3|3),8,true,true,false,1.250") !=
        std::string::npos);

  CHECK_THROWS_AS(format_report(r, "yaml"), precondition_error);

  std::string empty = format_table({}, "csv");
  CHECK(empty ==
        "p,n_ext,N,lambda,smooth,ordinary,eta_witt,eta_zp2,canonical,"
        "cross_checked,inconclusive_n2,timing_ms\n");

  LiftReport nonord;
  nonord.p = 5;
  nonord.n_ext = 1;
  nonord.N = 2;
  nonord.lambda = "2";
  nonord.smooth = true;
  json t = json::parse(format_table({nonord}, "json"));
  CHECK(t["rows"][0]["ordinary"] == false);
  CHECK(t["rows"][0]["eta_witt"].is_null());
  std::string txt = format_table({nonord}, "text");
  CHECK(txt.find("lambda") != std::string::npos);
  CHECK(txt.find('-') != std::string::npos);
}
