#ifndef CANLIFT_CLI_HPP
#define CANLIFT_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace canlift {

/* Parsed command line. Field requirements depend on the command:
     lift      p, N, lambda; with --eta the candidate is verified through the
               obstruction pipeline instead of solving
     table     p, N; lambda optionally a ';'-separated list of parameters
     check     p, f (a homogeneous polynomial over W2)
     gamma     p, f
     hd        p, N, m (emits HD^{m*p-1}_{N+1} exactly and mod p^2)
     selftest  no fields
   modulus selects the defining polynomial of F_{p^n} as comma-separated
   coefficients "c0,c1,...,1"; empty means the interned default. */
struct RunConfig {
  std::string command;
  std::uint64_t p = 0;
  unsigned n_ext = 1;
  std::string modulus;
  int N = 2;
  std::string lambda_text;
  std::string eta_text;
  std::string f_text;
  int m = 1;
  std::string output = "json";  // json | csv | text
  int threads = 0;              // <= 0: single worker
  bool verify = true;
};

/* One solved (or rejected) family parameter. For non-smooth or non-ordinary
   lambda only the flags are meaningful and the eta fields stay empty.
   canonical is set once a lift has been pronounced on: true from the solver
   after pipeline verification, the verdict itself for a user candidate,
   empty when verification was skipped. timing_ms is set on single lifts and
   left empty in table rows, keeping table bytes independent of scheduling. */
struct LiftReport {
  std::uint64_t p = 0;
  unsigned n_ext = 1;
  int N = 0;
  std::string lambda;
  bool smooth = false;
  bool ordinary = false;
  std::optional<std::string> eta_witt;   // "(a0|a1)"
  std::optional<std::uint64_t> eta_zp2;  // residue mod p^2, base field only
  std::optional<bool> canonical;
  bool cross_checked = false;
  bool inconclusive_n2 = false;
  std::optional<double> timing_ms;
};

/* Deterministic serialization; mode is "json", "csv" or "text".
   Field names and column order are fixed; see docs/schema.md. */
std::string format_report(const LiftReport& r, const std::string& mode);
std::string format_table(const std::vector<LiftReport>& rows, const std::string& mode);

/* Executes cfg, writing reports to out and diagnostics to err. Returns the
   process exit status: 0 ok, 1 precondition violation (non-smooth,
   non-ordinary, p | N+1, invalid config), 2 parse error, 3 internal
   cross-check failure. */
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace canlift

#endif  // CANLIFT_CLI_HPP
