#include "aniscale/spectral_model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "aniscale/errors.hpp"
#include "aniscale/util.hpp"

namespace aniscale::spectral {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double pow_abs(double u, double e) {
  if (e == 0.0) return 1.0;
  const double a = std::fabs(u);
  if (a == 0.0) return e > 0 ? 0.0 : kInf;
  return std::pow(a, e);
}

bool is_lrnd(Regime r) { return r == Regime::lrnd1 || r == Regime::lrnd2; }
}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::lrd: return "lrd";
    case Regime::nd: return "nd";
    case Regime::lrnd1: return "lrnd1";
    case Regime::lrnd2: return "lrnd2";
    case Regime::hyperbolic: return "hyperbolic";
  }
  return "?";
}

const char* spectrum_class_name(SpectrumClass c) {
  switch (c) {
    case SpectrumClass::lrd: return "spectrum-LRD";
    case SpectrumClass::nd: return "spectrum-ND";
    case SpectrumClass::lrnd: return "spectrum-LRND";
    case SpectrumClass::srd: return "spectrum-SRD";
  }
  return "?";
}

double rho(const RadialExponents& e, double u1, double u2) {
  if (!(e.ups1 > 0) || !(e.ups2 > 0))
    throw ConfigError("rho: exponents must be positive (pass |ups| for hyperbolic models)");
  return pow_abs(u1, e.ups1) + pow_abs(u2, e.ups2);
}

double rho_p(const RadialExponents& e, double p, double u1, double u2) {
  if (!(p > 0)) throw ConfigError("rho_p: p must be positive");
  if (p == 1.0) return rho(e, u1, u2);
  return std::pow(pow_abs(u1, p * e.ups1) + pow_abs(u2, p * e.ups2), 1.0 / p);
}

IntegrabilityVerdict check_integrability(const RadialExponents& e, double w) {
  if (!(e.ups1 > 0) || !(e.ups2 > 0) || !(w > 0))
    throw ConfigError("check_integrability: needs positive exponents and w");
  const double idx = e.index();
  // strict inequalities; the boundary diverges on both ranges
  return {w < idx, w > idx};
}

SpectralModel::SpectralModel(const Spec& spec) : spec_(spec) { validate(); }

RadialExponents SpectralModel::norm_exponents() const {
  if (spec_.regime == Regime::hyperbolic)
    return {std::fabs(spec_.upsilon1), std::fabs(spec_.upsilon2)};
  return {spec_.upsilon1, spec_.upsilon2};
}

bool SpectralModel::angular_is_constant() const { return const_profile_; }

bool SpectralModel::separable() const {
  if (has_correction() || !const_profile_ || spec_.p != 1.0) return false;
  return spec_.regime == Regime::nd || spec_.regime == Regime::hyperbolic;
}

double SpectralModel::profile_eval(double s1, double s2) const {
  double base;
  if (const_profile_) {
    base = const_value_;
  } else {
    base = profile_expr_.eval(s1, s2);
  }
  if (spec_.regime == Regime::lrnd1) base *= spec_.ell * pow_abs(s1, spec_.mu);
  if (spec_.regime == Regime::lrnd2) base *= spec_.ell * pow_abs(s2, spec_.mu);
  return base;
}

double SpectralModel::angular_eval(double u1, double u2) const {
  if (u1 == 0.0 && u2 == 0.0)
    throw ConfigError("angular_eval: undefined at the origin");
  if (const_profile_ && !is_lrnd(spec_.regime)) return const_value_;
  const RadialExponents ne = norm_exponents();
  if (ne.ups1 == 0.0 || ne.ups2 == 0.0) return const_value_;  // constant by validation
  const double r = rho_p(ne, spec_.p, u1, u2);
  const double s1 = u1 / std::pow(r, 1.0 / ne.ups1);
  const double s2 = u2 / std::pow(r, 1.0 / ne.ups2);
  return profile_eval(s1, s2);
}

double SpectralModel::correction_eval(double u1, double u2) const {
  if (spec_.correction.empty()) return 1.0;
  return correction_expr_.eval(u1, u2);
}

double SpectralModel::density(double u1, double u2) const {
  const bool at_origin = (u1 == 0.0 && u2 == 0.0);
  switch (spec_.regime) {
    case Regime::lrd:
    case Regime::lrnd1:
    case Regime::lrnd2: {
      if (at_origin) return kInf;
      const double r = rho_p(exponents(), spec_.p, u1, u2);
      return angular_eval(u1, u2) / r * correction_eval(u1, u2);
    }
    case Regime::nd: {
      if (at_origin) return 0.0;
      const double r = rho_p(exponents(), spec_.p, u1, u2);
      return angular_eval(u1, u2) * r * correction_eval(u1, u2);
    }
    case Regime::hyperbolic: {
      const double a = spec_.upsilon1, b = spec_.upsilon2;
      if (at_origin) {
        if (a == 0.0 && b == 0.0) return const_value_;
        return (a > 0 || b > 0) ? kInf : 0.0;
      }
      const double part = pow_abs(u1, -a) * pow_abs(u2, -b);
      if (std::isinf(part)) return kInf;
      return angular_eval(u1, u2) * part * correction_eval(u1, u2);
    }
  }
  return 0;
}

SpectrumClass SpectralModel::classify() const {
  switch (spec_.regime) {
    case Regime::lrd: return SpectrumClass::lrd;
    case Regime::nd: return SpectrumClass::nd;
    case Regime::lrnd1:
    case Regime::lrnd2: return SpectrumClass::lrnd;
    case Regime::hyperbolic: {
      const double a = spec_.upsilon1, b = spec_.upsilon2;
      if (a == 0 && b == 0) return SpectrumClass::srd;
      if (a >= 0 && b >= 0) return SpectrumClass::lrd;
      if (a <= 0 && b <= 0) return SpectrumClass::nd;
      return SpectrumClass::lrnd;
    }
  }
  return SpectrumClass::srd;
}

void SpectralModel::validate() {
  const Spec& s = spec_;
  if (!(s.p > 0)) throw ConfigError("model: p must be positive");

  if (s.regime == Regime::hyperbolic) {
    if (!(std::fabs(s.upsilon1) < 1) || !(std::fabs(s.upsilon2) < 1))
      throw ConfigError("model: hyperbolic exponents must satisfy |upsilon_i| < 1");
  } else {
    if (!(s.upsilon1 > 0) || !(s.upsilon2 > 0))
      throw ConfigError("model: upsilon_i must be positive");
  }
  if (s.regime == Regime::lrd || is_lrnd(s.regime)) {
    if (!(exponents().index() > 1))
      throw ConfigError("model: 1/upsilon1 + 1/upsilon2 > 1 is required for an integrable 1/rho density");
  }
  if (is_lrnd(s.regime)) {
    if (!(s.mu > 0 && s.mu < 1))
      throw ConfigError("model: lrnd requires mu in (0,1)");
    if (!(s.ell > 0)) throw ConfigError("model: lrnd requires ell > 0");
  }

  // angular profile
  if (s.angular.rfind("const:", 0) == 0) {
    const_profile_ = true;
    const_value_ = std::strtod(s.angular.c_str() + 6, nullptr);
    if (!(const_value_ > 0)) throw ConfigError("model: constant profile must be positive");
  } else {
    const_profile_ = false;
    profile_expr_ = Expression(s.angular, {"s1", "s2"});
  }
  if (!s.correction.empty()) correction_expr_ = Expression(s.correction, {"u1", "u2"});

  const RadialExponents ne = norm_exponents();
  if ((ne.ups1 == 0.0 || ne.ups2 == 0.0) && !const_profile_)
    throw ConfigError("model: a zero hyperbolic exponent requires a constant angular profile");

  // Sampled construction-time checks: evenness, positivity, generalized
  // invariance of the induced L, and correction sanity.
  if (!const_profile_ || is_lrnd(s.regime)) {
    profile_sup_ = 0;
    const int K = 181;
    for (int k = 0; k < K; ++k) {
      const double th = 2.0 * kPi * (k + 0.37) / K;
      double u1 = std::cos(th), u2 = std::sin(th);
      const double r = rho_p(ne, s.p, u1, u2);
      const double s1 = u1 / std::pow(r, 1.0 / ne.ups1);
      const double s2 = u2 / std::pow(r, 1.0 / ne.ups2);
      const double v = profile_eval(s1, s2);
      const double vneg = profile_eval(-s1, -s2);
      if (!std::isfinite(v)) throw ConfigError("model: angular profile not finite on the unit sphere");
      if (std::fabs(v - vneg) > 1e-8 * std::max(1.0, std::fabs(v)))
        throw ConfigError("model: angular profile must be even, L(x) = L(-x)");
      const bool near_axis1 = std::fabs(s1) < 1e-3, near_axis2 = std::fabs(s2) < 1e-3;
      const bool may_vanish = (s.regime == Regime::lrnd1 && near_axis1) ||
                              (s.regime == Regime::lrnd2 && near_axis2);
      if (!may_vanish && !(v > 0))
        throw ConfigError("model: angular profile must be strictly positive off the vanishing axis");
      if (is_lrnd(s.regime)) {
        // the factor multiplying ell*|s_i|^mu must itself stay positive,
        // doubly-vanishing profiles are rejected
        const double axis = s.regime == Regime::lrnd1 ? s1 : s2;
        const double q = v / (s.ell * pow_abs(axis, s.mu));
        if (!(q > 1e-10))
          throw ConfigError("model: lrnd profile factor must be strictly positive (single vanishing axis)");
      }
      profile_sup_ = std::max(profile_sup_, v);
    }
    // generalized invariance of L under u -> (la^{1/ups1} u1, la^{1/ups2} u2)
    const double pts[4][2] = {{0.3, 0.7}, {1.0, 2.0}, {-1.3, 0.4}, {0.05, -0.9}};
    for (const auto& pt : pts) {
      const double base = angular_eval(pt[0], pt[1]);
      for (double la : {0.1, 10.0}) {
        const double d1 = std::pow(la, 1.0 / ne.ups1) * pt[0];
        const double d2 = std::pow(la, 1.0 / ne.ups2) * pt[1];
        if (std::fabs(angular_eval(d1, d2) - base) > 1e-8 * std::max(1.0, std::fabs(base)))
          throw ConfigError("model: angular profile violates generalized invariance");
      }
    }
  } else {
    profile_sup_ = const_value_;
  }

  if (!s.correction.empty()) {
    const double c0 = correction_expr_.eval(0.0, 0.0);
    if (std::fabs(c0 - 1.0) > 1e-10)
      throw ConfigError("model: correction factor must equal 1 at the origin");
    correction_sup_ = 0;
    for (int i = 0; i < 17; ++i)
      for (int j = 0; j < 17; ++j) {
        const double u1 = -kPi + (i + 0.5) * 2 * kPi / 17;
        const double u2 = -kPi + (j + 0.5) * 2 * kPi / 17;
        const double c = correction_expr_.eval(u1, u2);
        const double cneg = correction_expr_.eval(-u1, -u2);
        if (!(c > 1e-6) || !(c < 1e6))
          throw ConfigError("model: correction factor must be positive and bounded");
        if (std::fabs(c - cneg) > 1e-8 * std::max(1.0, c))
          throw ConfigError("model: correction factor must be even");
        correction_sup_ = std::max(correction_sup_, c);
      }
  }
}

std::string SpectralModel::serialize() const {
  std::ostringstream out;
  out << "regime = " << regime_name(spec_.regime) << "\n";
  out << "upsilon1 = " << fmt17(spec_.upsilon1) << "\n";
  out << "upsilon2 = " << fmt17(spec_.upsilon2) << "\n";
  if (is_lrnd(spec_.regime)) {
    out << "mu = " << fmt17(spec_.mu) << "\n";
    out << "ell = " << fmt17(spec_.ell) << "\n";
  }
  out << "p = " << fmt17(spec_.p) << "\n";
  out << "angular = " << spec_.angular << "\n";
  if (!spec_.correction.empty()) out << "correction = " << spec_.correction << "\n";
  return out.str();
}

SpectralModel SpectralModel::parse_text(const std::string& text) {
  Spec sp;
  bool saw_regime = false, saw_u1 = false, saw_u2 = false;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string v) {
    const auto a = v.find_first_not_of(" \t\r");
    const auto b = v.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("model file: expected 'key = value': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "regime") {
      saw_regime = true;
      if (val == "lrd") sp.regime = Regime::lrd;
      else if (val == "nd") sp.regime = Regime::nd;
      else if (val == "lrnd1") sp.regime = Regime::lrnd1;
      else if (val == "lrnd2") sp.regime = Regime::lrnd2;
      else if (val == "hyperbolic") sp.regime = Regime::hyperbolic;
      else throw ConfigError("model file: unknown regime '" + val + "'");
    } else if (key == "upsilon1") { sp.upsilon1 = std::strtod(val.c_str(), nullptr); saw_u1 = true; }
    else if (key == "upsilon2") { sp.upsilon2 = std::strtod(val.c_str(), nullptr); saw_u2 = true; }
    else if (key == "mu") sp.mu = std::strtod(val.c_str(), nullptr);
    else if (key == "ell") sp.ell = std::strtod(val.c_str(), nullptr);
    else if (key == "p") sp.p = std::strtod(val.c_str(), nullptr);
    else if (key == "angular") sp.angular = val;
    else if (key == "correction") sp.correction = val;
    else throw ConfigError("model file: unknown key '" + key + "'");
  }
  if (!saw_regime || !saw_u1 || !saw_u2)
    throw ConfigError("model file: regime, upsilon1, upsilon2 are required");
  return SpectralModel(sp);
}

SpectralModel SpectralModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

std::uint64_t SpectralModel::hash() const { return fnv1a64(serialize()); }

}  // namespace aniscale::spectral
