#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace aniscale {

inline constexpr double kPi = 3.14159265358979323846;

// max(1, log(lambda)); the log_+ factor used by logarithmic normalizations.
inline double log_plus(double lambda) { return std::max(1.0, std::log(lambda)); }

// Full-precision decimal form used by every CSV/JSON emitter, so text output
// round-trips to the same double.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

// Detects whether x is (up to a few ulp) a small-denominator rational and
// returns it in lowest terms.  Used for deliberate gamma == gamma0 selection:
// grid values like 0.5 or 5/12 are recognized exactly instead of relying on
// floating-point equality of derived quantities.
std::optional<Rational> detect_rational(double x, std::int64_t max_den = 1'000'000);

// Compares gamma against upsilon1/upsilon2.  Exact rational arithmetic when
// all three inputs are recognizably rational, otherwise a 1e-12 relative
// tolerance on the cross product.
int compare_gamma(double gamma, double ups1, double ups2);

// True when x equals the rational p/q up to the same detection rule.
bool nearly_rational_equal(double x, std::int64_t p, std::int64_t q);

class ThreadLimit {
 public:
  static void set(unsigned n);
  static unsigned get();
};

// Static-partition parallel map over [0, n).  Work item i writes only state
// owned by index i, so the result is independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// FNV-1a, used to stamp run outputs with the hash of their resolved config.
std::uint64_t fnv1a64(const std::string& s);

}  // namespace aniscale
