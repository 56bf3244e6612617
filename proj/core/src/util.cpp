#include "aniscale/util.hpp"

#include <atomic>
#include <cstring>
#include <mutex>

namespace aniscale {

std::optional<Rational> detect_rational(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) return std::nullopt;
  double ax = std::fabs(x);
  if (ax > 1e15) return std::nullopt;
  // Continued fraction expansion of |x|.
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = ax;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(v);
    if (fl > 9e15) return std::nullopt;
    auto a = static_cast<std::int64_t>(fl);
    std::int64_t p2 = a * p1 + p0;
    std::int64_t q2 = a * q1 + q0;
    if (q2 > max_den || p2 > (std::int64_t)9e15) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double r = v - fl;
    if (r < 1e-15) break;
    v = 1.0 / r;
  }
  if (q1 == 0) return std::nullopt;
  double approx = static_cast<double>(p1) / static_cast<double>(q1);
  double ulp = std::max(std::fabs(ax), 1.0) * 4e-16;
  if (std::fabs(approx - ax) > 4 * ulp) return std::nullopt;
  if (x < 0) p1 = -p1;
  return Rational{p1, q1};
}

bool nearly_rational_equal(double x, std::int64_t p, std::int64_t q) {
  auto r = detect_rational(x);
  if (!r) return false;
  // both in lowest terms with positive denominators
  return r->num * q == p * r->den;
}

int compare_gamma(double gamma, double ups1, double ups2) {
  auto g = detect_rational(gamma);
  auto a = detect_rational(ups1);
  auto b = detect_rational(ups2);
  if (g && a && b) {
    // gamma ? ups1/ups2  <=>  gamma*ups2 ? ups1   (all positive here)
    // cross-multiplied in integers: g.n*b.n*a.d ? a.n*g.d*b.d
    __int128 lhs = (__int128)g->num * b->num * a->den;
    __int128 rhs = (__int128)a->num * g->den * b->den;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
  }
  double lhs = gamma * ups2;
  double tol = 1e-12 * std::max({1.0, std::fabs(lhs), std::fabs(ups1)});
  if (lhs < ups1 - tol) return -1;
  if (lhs > ups1 + tol) return 1;
  return 0;
}

namespace {
std::atomic<unsigned> g_thread_limit{0};
}

void ThreadLimit::set(unsigned n) { g_thread_limit.store(n); }

unsigned ThreadLimit::get() {
  unsigned n = g_thread_limit.load();
  if (n == 0) {
    n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(ThreadLimit::get(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto run = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 0; t + 1 < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace aniscale
