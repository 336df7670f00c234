#include "canlift/poly.hpp"

namespace canlift::detail {

std::string format_monomial(unsigned nv, const std::vector<std::int64_t>& exps) {
  std::string out;
  for (unsigned i = 0; i < nv; ++i) {
    if (exps[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += "x" + std::to_string(i);
    if (exps[i] != 1) out += "^" + std::to_string(exps[i]);
  }
  return out;
}

}  // namespace canlift::detail
