#pragma once

#include <string>

#include "aniscale/expression.hpp"

namespace aniscale::spectral {

struct RadialExponents {
  double ups1 = 0.5;
  double ups2 = 0.5;
  double index() const { return 1.0 / ups1 + 1.0 / ups2; }  // integrability index
};

// rho(u) = |u1|^ups1 + |u2|^ups2, for positive exponents.
double rho(const RadialExponents& e, double u1, double u2);
// rho_p(u) = (|u1|^{p ups1} + |u2|^{p ups2})^{1/p}.
double rho_p(const RadialExponents& e, double p, double u1, double u2);

enum class Regime { lrd, nd, lrnd1, lrnd2, hyperbolic };
enum class SpectrumClass { lrd, nd, lrnd, srd };

const char* regime_name(Regime r);
const char* spectrum_class_name(SpectrumClass c);

struct IntegrabilityVerdict {
  bool integrable_near_zero = false;
  bool integrable_at_infinity = false;
};
// Integrability of rho^{-w} near 0 (w < index) and at infinity (w > index);
// both ranges diverge on the boundary w == index.
IntegrabilityVerdict check_integrability(const RadialExponents& e, double w);

// One of the four spectral density families on Pi^2 = [-pi,pi]^2:
//   lrd        f = L(u) / rho_p(u)
//   nd         f = L(u) * rho_p(u)
//   lrnd1/2    f = L(u) / rho_p(u), profile vanishing as ell*|s_i|^mu on axis i
//   hyperbolic f = L(u) * |u1|^{-ups1} |u2|^{-ups2},  |ups_i| < 1
// optionally multiplied by an even, strictly positive correction factor with
// correction(0,0) = 1, so the behavior at the origin is untouched.
class SpectralModel {
 public:
  struct Spec {
    Regime regime = Regime::lrd;
    double upsilon1 = 0.5;
    double upsilon2 = 0.5;
    double mu = 0;    // lrnd only
    double ell = 1;   // lrnd only
    double p = 1;
    std::string angular = "const:1";  // "const:<v>" or expression in s1, s2
    std::string correction;           // optional expression in u1, u2
  };

  explicit SpectralModel(const Spec& spec);

  const Spec& spec() const { return spec_; }
  Regime regime() const { return spec_.regime; }
  RadialExponents exponents() const { return {spec_.upsilon1, spec_.upsilon2}; }
  // Exponents used for sphere normalization (absolute values for hyperbolic).
  RadialExponents norm_exponents() const;
  double mu() const { return spec_.mu; }
  double ell() const { return spec_.ell; }
  double p() const { return spec_.p; }

  // L~ on the rho_p unit sphere.
  double profile_eval(double s1, double s2) const;
  // L(u) via the normalized coordinates; throws on u == 0.
  double angular_eval(double u1, double u2) const;
  // f(u); +infinity and 0 are ordinary return values.
  double density(double u1, double u2) const;
  double correction_eval(double u1, double u2) const;

  SpectrumClass classify() const;

  bool angular_is_constant() const;
  bool has_correction() const { return !spec_.correction.empty(); }
  // True when f factorizes exactly across coordinates (constant profile,
  // p == 1, no correction; nd and hyperbolic families only).
  bool separable() const;
  double profile_sup() const { return profile_sup_; }
  double correction_sup() const { return correction_sup_; }

  std::string serialize() const;
  static SpectralModel parse_text(const std::string& text);
  static SpectralModel load_file(const std::string& path);
  std::uint64_t hash() const;

 private:
  void validate();
  Spec spec_;
  bool const_profile_ = true;
  double const_value_ = 1.0;
  Expression profile_expr_;     // in (s1, s2)
  Expression correction_expr_;  // in (u1, u2)
  double profile_sup_ = 1.0;
  double correction_sup_ = 1.0;
};

}  // namespace aniscale::spectral
