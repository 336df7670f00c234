#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "canlift/cli.hpp"

namespace {

void add_field_options(CLI::App* sub, canlift::RunConfig& cfg) {
  sub->add_option("--p", cfg.p, "odd prime characteristic")->required();
  sub->add_option("--n-ext", cfg.n_ext, "extension degree of the base field");
  sub->add_option("--modulus", cfg.modulus,
                  "defining polynomial of F_{p^n} as \"c0,c1,...,1\"");
}

void add_output_option(CLI::App* sub, canlift::RunConfig& cfg) {
  sub->add_option("--output", cfg.output, "output mode: json, csv or text");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"canonical liftings of Dwork hypersurfaces modulo p^2"};
  app.require_subcommand(1);
  canlift::RunConfig cfg;
  bool no_verify = false;

  CLI::App* lift = app.add_subcommand(
      "lift", "solve for the canonical family parameter over one lambda");
  add_field_options(lift, cfg);
  lift->add_option("--N", cfg.N, "ambient projective dimension");
  lift->add_option("--lambda", cfg.lambda_text, "family parameter in F_{p^n}")
      ->required();
  lift->add_option("--eta", cfg.eta_text,
                   "candidate lift \"(a0|a1)\" to verify instead of solving");
  lift->add_flag("--no-verify", no_verify,
                 "skip the obstruction-pipeline cross-check");
  add_output_option(lift, cfg);

  CLI::App* table = app.add_subcommand(
      "table", "solve every lambda in F_{p^n}, or a ';'-separated list");
  add_field_options(table, cfg);
  table->add_option("--N", cfg.N, "ambient projective dimension");
  table->add_option("--lambda", cfg.lambda_text,
                    "optional ';'-separated list of parameters");
  table->add_option("--threads", cfg.threads,
                    "worker count (default: $CANLIFT_THREADS, else 1)");
  table->add_flag("--no-verify", no_verify,
                  "skip the obstruction-pipeline cross-check");
  add_output_option(table, cfg);

  CLI::App* check = app.add_subcommand(
      "check", "full obstruction report for a hypersurface over W2");
  add_field_options(check, cfg);
  check->add_option("--N", cfg.N, "accepted for symmetry; inferred from f");
  check->add_option("--f", cfg.f_text, "homogeneous polynomial over W2")
      ->required();
  add_output_option(check, cfg);

  CLI::App* gamma = app.add_subcommand(
      "gamma", "canonical-lift verdict for a hypersurface over W2");
  add_field_options(gamma, cfg);
  gamma->add_option("--N", cfg.N, "accepted for symmetry; inferred from f");
  gamma->add_option("--f", cfg.f_text, "homogeneous polynomial over W2")
      ->required();
  add_output_option(gamma, cfg);

  CLI::App* hd = app.add_subcommand(
      "hd", "coefficient polynomial, exact and mod p^2");
  add_field_options(hd, cfg);
  hd->add_option("--N", cfg.N, "ambient projective dimension");
  hd->add_option("--m", cfg.m, "exponent selector: emits degree m*p - 1");
  add_output_option(hd, cfg);

  app.add_subcommand("selftest", "run the built-in invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.verify = !no_verify;
  return canlift::run(cfg, std::cout, std::cerr);
}
