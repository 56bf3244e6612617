#include "aniscale/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "aniscale/errors.hpp"
#include "aniscale/util.hpp"

namespace aniscale::quad {

namespace {

// ---- Gauss / Kronrod rule constants ----

// 15-point Kronrod extension of 7-point Gauss (positive half; symmetric).
constexpr double kGK15_x[8] = {
    0.0000000000000000000000000000000000,
    0.2077849550078984676006894037732449,
    0.4058451513773971669066064120769615,
    0.5860872354676911302941448382587296,
    0.7415311855993944398638647732807884,
    0.8648644233597690727897127886409262,
    0.9491079123427585245261896840478513,
    0.9914553711208126392068546975263285};
constexpr double kGK15_wk[8] = {
    0.2094821410847278280129991748917143, 0.2044329400752988924141619992346491,
    0.1903505780647854099132564024210137, 0.1690047266392679028265834265985503,
    0.1406532597155259187451895905102379, 0.1047900103222501838398763225415180,
    0.0630920926299785532907006631892043, 0.0229353220105292249637320080589696};
constexpr double kG7_x[4] = {0.0, 0.4058451513773971669066064120769615,
                             0.7415311855993944398638647732807884,
                             0.9491079123427585245261896840478513};
constexpr double kG7_w[4] = {0.4179591836734693877551020408163265,
                             0.3818300505051189449503697754889751,
                             0.2797053914892766679014677714237796,
                             0.1294849661688869693270611432679082};
constexpr double kG5_x[3] = {0.0, 0.5384693101056830910363144207002088,
                             0.9061798459386639927976268782993929};
constexpr double kG5_w[3] = {0.5688888888888888888888888888888889,
                             0.4786286704993664680412915148356382,
                             0.2369268850561890875142640407199173};

// ---- coordinate maps ----

// u(t) = sign * (power ? c * t^q : t); the power map absorbs an algebraic
// singularity at u = 0 into a bounded integrand on the work interval.
struct Map1 {
  double sign = 1;
  double c = 1;
  double q = 1;
  bool power = false;
};

inline double map_u(const Map1& m, double t) {
  return m.power ? m.sign * m.c * std::pow(t, m.q) : m.sign * t;
}
inline double map_jac(const Map1& m, double t) {
  return m.power ? m.c * m.q * std::pow(t, m.q - 1) : 1.0;
}

// ---- 1-D cells ----

struct Cell1 {
  double t0, t1;
  Map1 map;
  double val = 0, err = 0;
};

void eval_cell1(const std::function<double(double)>& g, Cell1& c) {
  const double mid = 0.5 * (c.t0 + c.t1), half = 0.5 * (c.t1 - c.t0);
  double k15 = 0, g7 = 0;
  for (int i = 0; i < 8; ++i) {
    if (i == 0) {
      const double fv = g(map_u(c.map, mid)) * map_jac(c.map, mid);
      k15 += kGK15_wk[0] * fv;
      g7 += kG7_w[0] * fv;
      continue;
    }
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      const double t = mid + sgn * half * kGK15_x[i];
      const double fv = g(map_u(c.map, t)) * map_jac(c.map, t);
      k15 += kGK15_wk[i] * fv;
      if (i % 2 == 0) g7 += kG7_w[i / 2] * fv;
    }
  }
  c.val = k15 * half;
  c.err = std::fabs(k15 - g7) * half;
}

struct RunResult {
  double value = 0, err = 0;
  std::size_t cells = 0;

  RunResult& operator+=(const RunResult& o) {
    value += o.value;
    err += o.err;
    cells += o.cells;
    return *this;
  }
};

RunResult run1d(const std::function<double(double)>& g, std::vector<Cell1> cells,
                double tol, std::size_t budget, int max_rounds) {
  parallel_for(cells.size(), [&](std::size_t i) { eval_cell1(g, cells[i]); });
  for (int round = 0; round < max_rounds; ++round) {
    double total_err = 0;
    for (const auto& c : cells) total_err += c.err;
    if (total_err <= tol || cells.size() >= budget) break;
    const double thresh = tol / (2.0 * static_cast<double>(cells.size()));
    std::vector<std::size_t> refine;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].err > thresh) refine.push_back(i);
    if (refine.empty()) break;
    if (cells.size() + refine.size() > budget)
      refine.resize(budget > cells.size() ? budget - cells.size() : 0);
    if (refine.empty()) break;
    const std::size_t old_n = cells.size();
    cells.resize(old_n + refine.size());
    for (std::size_t k = 0; k < refine.size(); ++k) {
      Cell1& a = cells[refine[k]];
      Cell1 b = a;
      const double mid = 0.5 * (a.t0 + a.t1);
      a.t1 = mid;
      b.t0 = mid;
      cells[old_n + k] = b;
    }
    std::vector<std::size_t> dirty = refine;
    for (std::size_t k = 0; k < refine.size(); ++k) dirty.push_back(old_n + k);
    parallel_for(dirty.size(), [&](std::size_t i) { eval_cell1(g, cells[dirty[i]]); });
  }
  // fixed summation order over the final cell list
  std::vector<std::size_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ua = map_u(cells[a].map, 0.5 * (cells[a].t0 + cells[a].t1));
    const double ub = map_u(cells[b].map, 0.5 * (cells[b].t0 + cells[b].t1));
    return ua < ub;
  });
  RunResult r;
  r.cells = cells.size();
  double comp = 0;
  for (std::size_t i : order) {
    const double y = cells[i].val - comp;
    const double t = r.value + y;
    comp = (t - r.value) - y;
    r.value = t;
    r.err += cells[i].err;
  }
  return r;
}

// Seeds for [0, B]: an optional power-mapped cell absorbing the |u|^{-alpha}
// endpoint, then dyadic bands outward with uniform oscillation-resolving
// splits within each band.
std::vector<Cell1> seeds1d(double B, double alpha, double osc_scale, double sign = 1.0) {
  std::vector<Cell1> cells;
  double start = 0;
  if (alpha > 0) {
    const double c = std::min(1.0, 0.5 * B);
    const double q = std::max(2.0 / (1.0 - alpha), 1.0);
    Map1 m{sign, c, q, true};
    cells.push_back({0.0, 0.5, m, 0, 0});
    cells.push_back({0.5, 1.0, m, 0, 0});
    start = c;
  }
  const double h_osc = osc_scale > 0 ? kPi / osc_scale : B;
  double lo = start;
  double band = std::min(std::max(2 * start, 1e-3), B);
  while (lo < B) {
    double hi = std::min(B, band <= lo ? 2 * lo : band);
    if (hi <= lo) hi = B;
    const auto parts = static_cast<std::size_t>(
        std::min(262144.0, std::max(1.0, std::ceil((hi - lo) / h_osc))));
    for (std::size_t p = 0; p < parts; ++p) {
      const double a = lo + (hi - lo) * static_cast<double>(p) / static_cast<double>(parts);
      const double b = lo + (hi - lo) * static_cast<double>(p + 1) / static_cast<double>(parts);
      cells.push_back({a, b, Map1{sign, 1, 1, false}, 0, 0});
    }
    lo = hi;
    band = 2 * hi;
  }
  return cells;
}

// ---- 2-D cells ----

struct Cell2 {
  double x0, x1, y0, y1;
  Map1 mx, my;
  double val = 0, err = 0;
  double vx = 0, vy = 0;  // directional variation, drives the split choice
};

void eval_cell2(const std::function<double(double, double)>& g, Cell2& c) {
  const double cx = 0.5 * (c.x0 + c.x1), hx = 0.5 * (c.x1 - c.x0);
  const double cy = 0.5 * (c.y0 + c.y1), hy = 0.5 * (c.y1 - c.y0);

  const double xs7[7] = {cx - hx * kG7_x[3], cx - hx * kG7_x[2], cx - hx * kG7_x[1], cx,
                         cx + hx * kG7_x[1], cx + hx * kG7_x[2], cx + hx * kG7_x[3]};
  const double ws7[7] = {kG7_w[3], kG7_w[2], kG7_w[1], kG7_w[0],
                         kG7_w[1], kG7_w[2], kG7_w[3]};
  const double ys7[7] = {cy - hy * kG7_x[3], cy - hy * kG7_x[2], cy - hy * kG7_x[1], cy,
                         cy + hy * kG7_x[1], cy + hy * kG7_x[2], cy + hy * kG7_x[3]};

  double px[7], jx[7], py[7], jy[7], f7[7][7];
  for (int i = 0; i < 7; ++i) {
    px[i] = map_u(c.mx, xs7[i]);
    jx[i] = map_jac(c.mx, xs7[i]);
    py[i] = map_u(c.my, ys7[i]);
    jy[i] = map_jac(c.my, ys7[i]);
  }
  double q7 = 0;
  for (int i = 0; i < 7; ++i) {
    double row = 0;
    for (int j = 0; j < 7; ++j) {
      f7[i][j] = g(px[i], py[j]) * jx[i] * jy[j];
      row += ws7[j] * f7[i][j];
    }
    q7 += ws7[i] * row;
  }
  q7 *= hx * hy;

  const double xs5[5] = {cx - hx * kG5_x[2], cx - hx * kG5_x[1], cx, cx + hx * kG5_x[1],
                         cx + hx * kG5_x[2]};
  const double ws5[5] = {kG5_w[2], kG5_w[1], kG5_w[0], kG5_w[1], kG5_w[2]};
  const double ys5[5] = {cy - hy * kG5_x[2], cy - hy * kG5_x[1], cy, cy + hy * kG5_x[1],
                         cy + hy * kG5_x[2]};
  double q5 = 0;
  for (int i = 0; i < 5; ++i) {
    const double pxi = map_u(c.mx, xs5[i]);
    const double jxi = map_jac(c.mx, xs5[i]) * ws5[i];
    double row = 0;
    for (int j = 0; j < 5; ++j)
      row += ws5[j] * g(pxi, map_u(c.my, ys5[j])) * map_jac(c.my, ys5[j]);
    q5 += jxi * row;
  }
  q5 *= hx * hy;

  c.val = q7;
  c.err = std::fabs(q7 - q5);
  double vx = 0, vy = 0;
  for (int i = 1; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      vx += std::fabs(f7[i][j] - f7[i - 1][j]);
      vy += std::fabs(f7[j][i] - f7[j][i - 1]);
    }
  c.vx = vx;
  c.vy = vy;
}

RunResult run2d(const std::function<double(double, double)>& g, std::vector<Cell2> cells,
                double tol, std::size_t budget, int max_rounds, const std::string& trace) {
  parallel_for(cells.size(), [&](std::size_t i) { eval_cell2(g, cells[i]); });
  for (int round = 0; round < max_rounds; ++round) {
    double total_err = 0;
    for (const auto& c : cells) total_err += c.err;
    if (total_err <= tol || cells.size() >= budget) break;
    const double thresh = tol / (2.0 * static_cast<double>(cells.size()));
    std::vector<std::size_t> refine;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].err > thresh) refine.push_back(i);
    if (refine.empty()) break;
    if (cells.size() + refine.size() > budget)
      refine.resize(budget > cells.size() ? budget - cells.size() : 0);
    if (refine.empty()) break;
    const std::size_t old_n = cells.size();
    cells.resize(old_n + refine.size());
    for (std::size_t k = 0; k < refine.size(); ++k) {
      Cell2& a = cells[refine[k]];
      Cell2 b = a;
      if (a.vx >= a.vy) {
        const double mid = 0.5 * (a.x0 + a.x1);
        a.x1 = mid;
        b.x0 = mid;
      } else {
        const double mid = 0.5 * (a.y0 + a.y1);
        a.y1 = mid;
        b.y0 = mid;
      }
      cells[old_n + k] = b;
    }
    std::vector<std::size_t> dirty = refine;
    for (std::size_t k = 0; k < refine.size(); ++k) dirty.push_back(old_n + k);
    parallel_for(dirty.size(), [&](std::size_t i) { eval_cell2(g, cells[dirty[i]]); });
  }
  std::vector<std::size_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Cell2 &ca = cells[a], &cb = cells[b];
    const double ax = map_u(ca.mx, 0.5 * (ca.x0 + ca.x1));
    const double bx = map_u(cb.mx, 0.5 * (cb.x0 + cb.x1));
    if (ax != bx) return ax < bx;
    return map_u(ca.my, 0.5 * (ca.y0 + ca.y1)) < map_u(cb.my, 0.5 * (cb.y0 + cb.y1));
  });
  if (!trace.empty()) {
    if (FILE* fp = std::fopen(trace.c_str(), "a")) {
      std::fprintf(fp, "x_mid,y_mid,value,err\n");
      for (std::size_t i : order) {
        const Cell2& c = cells[i];
        std::fprintf(fp, "%s,%s,%s,%s\n", fmt17(map_u(c.mx, 0.5 * (c.x0 + c.x1))).c_str(),
                     fmt17(map_u(c.my, 0.5 * (c.y0 + c.y1))).c_str(), fmt17(c.val).c_str(),
                     fmt17(c.err).c_str());
      }
      std::fclose(fp);
    }
  }
  RunResult r;
  r.cells = cells.size();
  double comp = 0;
  for (std::size_t i : order) {
    const double y = cells[i].val - comp;
    const double t = r.value + y;
    comp = (t - r.value) - y;
    r.value = t;
    r.err += cells[i].err;
  }
  return r;
}

// Per-axis breakpoints covering [lo, hi]: uniform oscillation-resolving cells
// inside a small radius, dyadic bands beyond.
std::vector<double> axis_breaks(double lo, double hi, double osc_scale) {
  std::vector<double> br;
  br.push_back(lo);
  const double h_osc = osc_scale > 0 ? kPi / (2.0 * osc_scale) : (hi - lo);
  const double osc_box = std::min(hi, std::max(lo, std::max(24.0 * h_osc, 4.0)));
  double pos = lo;
  if (pos < osc_box) {
    const double width = std::max(h_osc, (osc_box - lo) / 4096.0);
    while (pos + width < osc_box) {
      pos += width;
      br.push_back(pos);
    }
    if (osc_box < hi) {
      br.push_back(osc_box);
      pos = osc_box;
    }
  }
  while (pos < hi) {
    double next = std::min(hi, pos <= 0 ? 1.0 : 2 * pos);
    if (next <= pos) next = hi;
    br.push_back(next);
    pos = next;
  }
  if (br.back() < hi) br.push_back(hi);
  return br;
}

struct PanelSpec {
  double sx = 1, sy = 1;
};

// Seed cells for the rectangle [x0,X]x[y0,Y] of one signed quadrant, applying
// the declared singular transforms on cells that touch the axes.
void seed_panel(const SingularIntegrand2D& G, const PanelSpec& p, double x0, double X,
                double y0, double Y, std::vector<Cell2>* out) {
  if (X <= x0 || Y <= y0) return;
  const bool rho_corner = G.origin == OriginKind::rho && G.w > 0 && x0 == 0 && y0 == 0;
  const bool ax1 = G.origin == OriginKind::axis_product && G.alpha1 > 0 && x0 == 0;
  const bool ax2 = G.origin == OriginKind::axis_product && G.alpha2 > 0 && y0 == 0;

  Map1 id_x{p.sx, 1, 1, false}, id_y{p.sy, 1, 1, false};
  Map1 sing_x = id_x, sing_y = id_y;
  double cx = 0, cy = 0;
  if (rho_corner) {
    const double ups_sum = 1.0 / G.ups1 + 1.0 / G.ups2;
    const double m = std::max({2.0 / (ups_sum - G.w), G.ups1, G.ups2, 1.0});
    cx = std::min(1.0, X);
    cy = std::min(1.0, Y);
    sing_x = Map1{p.sx, cx, m / G.ups1, true};
    sing_y = Map1{p.sy, cy, m / G.ups2, true};
  }
  if (ax1) {
    cx = std::min(1.0, X);
    sing_x = Map1{p.sx, cx, std::max(2.0 / (1.0 - G.alpha1), 1.0), true};
  }
  if (ax2) {
    cy = std::min(1.0, Y);
    sing_y = Map1{p.sy, cy, std::max(2.0 / (1.0 - G.alpha2), 1.0), true};
  }

  const std::vector<double> unit = {0.0, 0.5, 1.0};
  auto add_grid = [&](const std::vector<double>& xs, const std::vector<double>& ys,
                      const Map1& mx, const Map1& my) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      for (std::size_t j = 0; j + 1 < ys.size(); ++j)
        out->push_back({xs[i], xs[i + 1], ys[j], ys[j + 1], mx, my, 0, 0, 0, 0});
  };

  if (rho_corner) {
    add_grid(unit, unit, sing_x, sing_y);
    if (cx < X)  // right block, full height
      add_grid(axis_breaks(cx, X, G.osc_scale1), axis_breaks(0, Y, G.osc_scale2), id_x, id_y);
    if (cy < Y)  // block above the corner cell
      add_grid(axis_breaks(0, cx, G.osc_scale1), axis_breaks(cy, Y, G.osc_scale2), id_x, id_y);
    return;
  }
  if (ax1 && ax2) {
    add_grid(unit, unit, sing_x, sing_y);
    if (cx < X) add_grid(axis_breaks(cx, X, G.osc_scale1), unit, id_x, sing_y);
    if (cy < Y) add_grid(unit, axis_breaks(cy, Y, G.osc_scale2), sing_x, id_y);
    if (cx < X && cy < Y)
      add_grid(axis_breaks(cx, X, G.osc_scale1), axis_breaks(cy, Y, G.osc_scale2), id_x, id_y);
    return;
  }
  if (ax1) {
    add_grid(unit, axis_breaks(y0, Y, G.osc_scale2), sing_x, id_y);
    if (cx < X)
      add_grid(axis_breaks(cx, X, G.osc_scale1), axis_breaks(y0, Y, G.osc_scale2), id_x, id_y);
    return;
  }
  if (ax2) {
    add_grid(axis_breaks(x0, X, G.osc_scale1), unit, id_x, sing_y);
    if (cy < Y)
      add_grid(axis_breaks(x0, X, G.osc_scale1), axis_breaks(cy, Y, G.osc_scale2), id_x, id_y);
    return;
  }
  add_grid(axis_breaks(x0, X, G.osc_scale1), axis_breaks(y0, Y, G.osc_scale2), id_x, id_y);
}

std::vector<PanelSpec> panels_for(SingularIntegrand2D::Sym sym) {
  using Sym = SingularIntegrand2D::Sym;
  if (sym == Sym::full)
    return {PanelSpec{1, 1}, PanelSpec{-1, 1}, PanelSpec{1, -1}, PanelSpec{-1, -1}};
  return {PanelSpec{1, 1}};
}

RunResult integrate_region(const SingularIntegrand2D& G, double x0, double X, double y0,
                           double Y, double tol, const QuadOptions& opt) {
  std::vector<Cell2> cells;
  for (const auto& p : panels_for(G.sym)) seed_panel(G, p, x0, X, y0, Y, &cells);
  if (cells.empty()) return {};
  RunResult r =
      run2d(G.g, std::move(cells), tol, opt.max_cells_2d, opt.max_rounds, opt.trace_csv);
  if (G.sym == SingularIntegrand2D::Sym::quadrant_x4) {
    r.value *= 4.0;
    r.err *= 4.0;
  }
  return r;
}

// int_b^inf cos(u) u^{-s} du via repeated integration by parts.
double cos_tail(double s, double b) {
  double acc = 0, mult = 1;
  bool want_cos = true;
  const double sb = std::sin(b), cb = std::cos(b);
  for (int k = 0; k < 60; ++k) {
    const double bs = std::pow(b, -s);
    if (want_cos) {
      acc += mult * (-sb * bs);
      mult *= s;
      want_cos = false;
    } else {
      acc += mult * (cb * bs);
      mult *= -s;
      want_cos = true;
    }
    s += 1.0;
    const double remainder = std::fabs(mult) * std::pow(b, 1.0 - s) / (s - 1.0);
    if (remainder < 1e-18 * (1.0 + std::fabs(acc))) break;
  }
  return acc;
}

std::pair<double, double> line_tail(const LineIntegrand& L, double tol,
                                    const QuadOptions& opt, std::size_t* cells) {
  switch (L.tail) {
    case LineIntegrand::Tail::none:
      return {0.0, 0.0};
    case LineIntegrand::Tail::osc_power:
      return {osc_power_tail(L.tail_amp, L.tail_s, L.b), 0.0};
    case LineIntegrand::Tail::power: {
      if (L.tail_s <= 1.0)
        throw ConfigError("integrate_line: power tail needs decay exponent > 1");
      auto gt = [g = L.g](double t) {
        const double u = 1.0 / t;
        return g(u) * u * u;
      };
      RunResult t = run1d(gt, seeds1d(1.0 / L.b, std::max(0.0, 2.0 - L.tail_s), 0.0), tol,
                          opt.max_cells_1d, opt.max_rounds);
      if (cells) *cells += t.cells;
      return {2.0 * t.value, 2.0 * t.err};
    }
  }
  return {0.0, 0.0};
}

}  // namespace

// ---- Dirichlet kernel ----

std::complex<double> dirichlet(std::int64_t n, double u) {
  if (n < 1) throw ConfigError("dirichlet: n must be >= 1");
  if (u == 0.0) return {static_cast<double>(n), 0.0};
  const double au = std::fabs(u);
  const double nd = static_cast<double>(n);
  const double phase = 0.5 * (nd + 1.0) * u;
  if (au * nd >= 1e-6) {
    // D_n(u) = e^{i(n+1)u/2} sin(nu/2)/sin(u/2); the sine ratio is the
    // compensated form of (e^{iu} - e^{i(n+1)u})/(1 - e^{iu}).
    const double ratio = std::sin(0.5 * nd * u) / std::sin(0.5 * u);
    return std::polar(ratio, phase);
  }
  if (n <= 10'000) {
    std::complex<double> s{0, 0};
    for (std::int64_t t = 1; t <= n; ++t) s += std::polar(1.0, static_cast<double>(t) * u);
    return s;
  }
  // sin(nu/2)/sin(u/2) = n(1 - (n^2-1)u^2/24 + (u/2)^4 (7/360 - n^2/36 + n^4/120) + ...)
  const double x2 = 0.25 * u * u;
  const double ratio =
      nd * (1.0 - (nd * nd - 1.0) * u * u / 24.0 +
            x2 * x2 * (7.0 / 360.0 - nd * nd / 36.0 + nd * nd * nd * nd / 120.0));
  return std::polar(ratio, phase);
}

double osc_power_tail(double amp, double s, double b) {
  if (s <= 1.0) throw ConfigError("osc_power_tail: needs s > 1");
  if (b < 20.0) throw ConfigError("osc_power_tail: start the tail at b >= 20");
  // 2 * int_b^inf (2 - 2 cos u) u^{-s} du   (both signs of the even integrand)
  const double plain = 2.0 * std::pow(b, 1.0 - s) / (s - 1.0);
  return 2.0 * amp * (plain - 2.0 * cos_tail(s, b));
}

// ---- 1-D entry point ----

QuadratureResult integrate_line(const LineIntegrand& L, double tol, const QuadOptions& opt) {
  if (L.b <= 0) throw ConfigError("integrate_line: core half-range must be positive");
  if (L.singular_alpha >= 1.0)
    throw ConfigError("integrate_line: singular exponent must be < 1");

  if (!L.even) {
    // literal two-sided integration; structured tails require the even form
    if (L.tail != LineIntegrand::Tail::none)
      throw ConfigError("integrate_line: tails are only supported for even integrands");
    auto cells = seeds1d(L.b, L.singular_alpha, L.osc_scale, 1.0);
    auto neg = seeds1d(L.b, L.singular_alpha, L.osc_scale, -1.0);
    cells.insert(cells.end(), neg.begin(), neg.end());
    RunResult both = run1d(L.g, std::move(cells), tol, opt.max_cells_1d, opt.max_rounds);
    return {both.value, both.err, both.cells};
  }

  const double tail_share = L.tail == LineIntegrand::Tail::power ? 0.3 : 0.0;
  RunResult core = run1d(L.g, seeds1d(L.b, L.singular_alpha, L.osc_scale),
                         0.5 * tol * (1 - tail_share), opt.max_cells_1d, opt.max_rounds);
  QuadratureResult out;
  out.value = 2.0 * core.value;  // even symmetry
  out.abs_error_estimate = 2.0 * core.err;
  out.cells_used = core.cells;

  auto [tv, te] = line_tail(L, 0.5 * tol * tail_share, opt, &out.cells_used);
  out.value += tv;
  out.abs_error_estimate += te;

  if (out.abs_error_estimate > std::max(20.0 * tol, 1e-12) && out.cells_used >= opt.max_cells_1d)
    throw NonConvergenceError("integrate_line: cell budget exhausted, err=" +
                              fmt17(out.abs_error_estimate) + " target=" + fmt17(tol));
  return out;
}

// ---- 2-D entry point ----

QuadratureResult integrate_singular_2d(const SingularIntegrand2D& G, double tol,
                                       const QuadOptions& opt) {
  if (G.origin == OriginKind::rho && G.w > 0) {
    const double ups_sum = 1.0 / G.ups1 + 1.0 / G.ups2;
    if (G.w >= ups_sum)
      throw ConfigError(
          "integrate_singular_2d: rho singularity needs w < 1/ups1 + 1/ups2 (w=" + fmt17(G.w) +
          ", bound=" + fmt17(ups_sum) + ")");
  }
  if (G.alpha1 >= 1 || G.alpha2 >= 1)
    throw ConfigError("integrate_singular_2d: axis exponents must be < 1");

  QuadratureResult out;

  if (G.separable) {
    // g = f1(u1) f2(u2) exactly.  The central box goes through the genuine 2-D
    // cell machinery; everything beyond it uses the declared 1-D structure.
    QuadratureResult l1 = integrate_line(G.line1, 0.25 * tol, opt);
    QuadratureResult l2 =
        integrate_line(G.line2, 0.25 * tol / std::max(1.0, std::fabs(l1.value)), opt);
    l1 = integrate_line(G.line1, 0.25 * tol / std::max(1.0, std::fabs(l2.value)), opt);

    std::size_t tail_cells = 0;
    auto [t1, te1] = line_tail(G.line1, 0.05 * tol, opt, &tail_cells);
    auto [t2, te2] = line_tail(G.line2, 0.05 * tol, opt, &tail_cells);
    const double c1 = l1.value - t1, c2 = l2.value - t2;

    SingularIntegrand2D core = G;
    core.separable = false;
    RunResult box = integrate_region(core, 0, G.line1.b, 0, G.line2.b,
                                     0.25 * tol / (core.sym == SingularIntegrand2D::Sym::quadrant_x4
                                                       ? 4.0
                                                       : 1.0),
                                     opt);
    const double cross_defect = std::fabs(box.value - c1 * c2);

    out.value = box.value + c1 * t2 + t1 * c2 + t1 * t2;
    out.abs_error_estimate = box.err + cross_defect +
                             l1.abs_error_estimate * (std::fabs(c2) + std::fabs(t2)) +
                             l2.abs_error_estimate * (std::fabs(c1) + std::fabs(t1)) +
                             te1 * std::fabs(l2.value) + te2 * std::fabs(l1.value);
    out.cells_used = box.cells + l1.cells_used + l2.cells_used + tail_cells;
    return out;
  }

  // Non-separable: integrate a growing box; each doubling adds two strips and
  // a corner.  Stop when the added octave is negligible and extrapolate the
  // geometric remainder into the error estimate.
  const double A1 = G.half_width1, A2 = G.half_width2;
  double T1 = std::min(A1, 96.0), T2 = std::min(A2, 96.0);
  RunResult total = integrate_region(G, 0, T1, 0, T2, 0.5 * tol, opt);
  double remainder = 0;
  double prev_delta = 0;
  bool first = true;
  for (int oct = 0; oct < opt.max_tail_octaves; ++oct) {
    const bool grow1 = T1 < A1, grow2 = T2 < A2;
    if (!grow1 && !grow2) {
      remainder = 0;  // exact domain boundary reached
      break;
    }
    const double N1 = grow1 ? std::min(A1, 2 * T1) : T1;
    const double N2 = grow2 ? std::min(A2, 2 * T2) : T2;
    RunResult delta;
    const double strip_tol = 0.1 * tol;
    if (N1 > T1) delta += integrate_region(G, T1, N1, 0, T2, strip_tol, opt);
    if (N2 > T2) delta += integrate_region(G, 0, T1, T2, N2, strip_tol, opt);
    if (N1 > T1 && N2 > T2) delta += integrate_region(G, T1, N1, T2, N2, strip_tol, opt);
    total += delta;
    T1 = N1;
    T2 = N2;
    const double d = std::fabs(delta.value);
    if (!first && d < 0.25 * tol) {
      double r = prev_delta > 0 ? std::min(0.75, d / prev_delta) : 0.5;
      remainder = d * r / (1 - r);
      break;
    }
    if (first && d < 0.05 * tol && T1 >= 192) {
      remainder = d;
      break;
    }
    prev_delta = d;
    first = false;
    remainder = d;  // pessimistic if the octave loop runs out
  }
  out.value = total.value;
  out.abs_error_estimate = total.err + remainder;
  out.cells_used = total.cells;
  if (out.abs_error_estimate > std::max(20.0 * tol, 1e-12) && total.cells >= opt.max_cells_2d)
    throw NonConvergenceError("integrate_singular_2d: cell budget exhausted, err=" +
                              fmt17(out.abs_error_estimate) + " target=" + fmt17(tol));
  return out;
}

}  // namespace aniscale::quad
