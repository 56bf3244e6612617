#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>

namespace aniscale::quad {

struct QuadratureResult {
  double value = 0;
  double abs_error_estimate = 0;
  std::size_t cells_used = 0;
};

struct QuadOptions {
  std::size_t max_cells_1d = 1u << 21;
  std::size_t max_cells_2d = 400'000;
  int max_rounds = 200;
  int max_tail_octaves = 18;
  std::string trace_csv;  // when non-empty, final cell list is dumped there
};

// D_n(u) = sum_{t=1..n} exp(i t u).  Closed sine-ratio form away from u = 0,
// direct summation / series below the switch threshold; exact at u = 0.
std::complex<double> dirichlet(std::int64_t n, double u);

// ---------------------------------------------------------------------------
// 1-D: even integrands on [0, b] (doubled), with an optional power singularity
// at 0 and an optional structured tail beyond b.
// ---------------------------------------------------------------------------
struct LineIntegrand {
  std::function<double(double)> g;
  double b = 0;               // core half-range; the full core is [-b, b]
  bool even = true;           // currently the only supported symmetry
  double singular_alpha = 0;  // |g(u)| <= C |u|^{-alpha} near 0, alpha in [0, 1)

  enum class Tail { none, power, osc_power };
  Tail tail = Tail::none;
  // power:     |g(u)| ~ |u|^{-tail_s} beyond b (monotone envelope), tail_s > 1;
  //            integrated exactly via the substitution u -> 1/t.
  // osc_power: g(u) == tail_amp * (2 - 2 cos u) * |u|^{-tail_s} for |u| >= b,
  //            integrated by the integration-by-parts series (exact form).
  double tail_s = 2;
  double tail_amp = 1;

  double osc_scale = 0;  // oscillation frequency hint: period ~ 2*pi/osc_scale
};

QuadratureResult integrate_line(const LineIntegrand& L, double tol,
                                const QuadOptions& opt = {});

// Tail pieces exposed for cross-checks: value of 2 * int_b^inf of the declared
// tail model (both signs of the even integrand).
double osc_power_tail(double amp, double s, double b);

// ---------------------------------------------------------------------------
// 2-D: integrands over [-A1,A1] x [-A2,A2] with a declared singularity class.
// ---------------------------------------------------------------------------
enum class OriginKind {
  none,          // bounded near the origin
  rho,           // |g| <= C * (a|u1|^ups1 + b|u2|^ups2)^{-w} near 0, w < 1/ups1 + 1/ups2
  axis_product,  // |g| <= C * |u1|^{-alpha1} |u2|^{-alpha2}, alpha_j in [0, 1)
};

struct SingularIntegrand2D {
  std::function<double(double, double)> g;  // real-valued; never called on the axes
  double half_width1 = 0, half_width2 = 0;  // may be +inf

  enum class Sym {
    full,               // integrate the four signed quadrants
    quadrant_x4,        // g even in each coordinate: positive quadrant * 4
    quadrant_prefolded  // caller already folded the sign combinations into g
  };
  Sym sym = Sym::full;

  OriginKind origin = OriginKind::none;
  double w = 0;
  double ups1 = 1, ups2 = 1;
  double alpha1 = 0, alpha2 = 0;

  double osc_scale1 = 1, osc_scale2 = 1;

  // Exact separable structure g(u1,u2) = factor1(u1)*factor2(u2); enables the
  // structured 1-D tails of the factors.  The central box is still integrated
  // by the genuine 2-D cell machinery.
  bool separable = false;
  LineIntegrand line1, line2;
};

QuadratureResult integrate_singular_2d(const SingularIntegrand2D& G, double tol,
                                       const QuadOptions& opt = {});

}  // namespace aniscale::quad
