#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "germlab/sl2germs.hpp"

namespace germlab {

enum class TorusType { Split, Elliptic };

/// Rank-1 endoscopic datum of sl2: the torus H = ker(N: E -> F) for
/// E = F(sqrt(tau)), or the split torus (tau = 1, kappa trivial).
struct EndoscopicDatum {
  TorusType type = TorusType::Split;
  SquareClass tau = SquareClass::One;

  static EndoscopicDatum split() { return {}; }
  /// Throws std::invalid_argument for tau = 1.
  static EndoscopicDatum elliptic(SquareClass tau);
  bool kappa_trivial() const { return type == TorusType::Split; }
  std::string name() const;
  nlohmann::json to_json() const;
};

/// X_H in h(F) = F.
struct TorusElement {
  LocalElement x;
};

/// D = -tau x^2: the characteristic point X_H maps to.
CharPoint char_point(const TorusElement& xh, const EndoscopicDatum& datum);
bool corresponds(const TorusElement& xh, const Sl2Element& xg, const EndoscopicDatum& datum);

struct BasePoint {
  TorusElement xh;
  Sl2Element xg;
};

/// X_H = pi^n with the class of Hilbert sign +1 above it.
BasePoint default_base_point(const EndoscopicDatum& datum, const FieldSpec& field, int n = 0);

/// Delta_0 * p^-(d - d_base) with Delta_0 = kappa(inv(X_G) / inv(base)) read off
/// the Hilbert signs and d = ord(D) / 2 the discriminant exponent. Zero when the
/// characteristic points do not correspond.
Rational transfer_factor(const TorusElement& xh, const Sl2Element& xg, const BasePoint& base,
                         const EndoscopicDatum& datum);

/// Options for deliberate perturbations of Delta.
struct DeltaOptions {
  /// Multiplies Delta by the Legendre symbol of ac(X_H), a sign that is not
  /// a function of the stable class (negative control).
  bool wrong_sign = false;
};

/// Sum over the rational classes in the stable class of X_H of Delta * O(Y, f).
Rational kappa_orbital_integral(const TorusElement& xh, const BarbaschMoyPair& f, const BasePoint& base,
                                const EndoscopicDatum& datum, int depth, const DeltaOptions& opts = {});

/// Step function on h(F) = F: value per annulus ord(x) = n for n in
/// [first, first + values.size()), and one value on the ball beyond.
struct AnnulusStep {
  int first = 0;
  std::vector<Rational> values;
  Rational ball = 0;

  /// Throws std::out_of_range for ord(x) < first.
  Rational operator()(const LocalElement& x) const;
  nlohmann::json to_json() const;
};

AnnulusStep operator+(const AnnulusStep& f, const AnnulusStep& g);

/// The torus orbit is a point: f^H(X_H).
Rational stable_orbital_integral_torus(const TorusElement& xh, const AnnulusStep& fh);

/// X_H with ord(char point) in [a0, a0 + span], per_level unit parts each
/// (leading digits cycle through 1..p-1).
std::vector<TorusElement> sample_torus_elements(const FieldSpec& field, const EndoscopicDatum& datum, int a0,
                                                int span, int per_level, std::uint64_t seed);

struct MatchingOptions {
  int annuli = 6;
  int per_level = 4;
  std::uint64_t seed = 1;
  DeltaOptions delta;
};

struct MatchResult {
  std::string test_function;
  AnnulusStep fh;
  bool solved = false;
  /// Per truncation level a: f^H(X_H) - kappa integral over the samples.
  std::vector<std::pair<long, std::vector<Rational>>> residuals;
  /// The same at fresh samples.
  std::vector<std::pair<long, std::vector<Rational>>> fresh_residuals;
  /// Sample values that break a constant fit per annulus (empty on success).
  std::vector<Rational> obstruction;
  bool success = false;
};

struct MatchingReport {
  EndoscopicDatum datum;
  int p = 0;
  long a0 = 0, a_span = 0;
  std::vector<MatchResult> results;
  bool success = false;
  nlohmann::json to_json() const;
};

/// Solves for an annulus step f^H per test function with
/// f^H(X_H) = kappa integral for all sampled X_H, then re-evaluates at fresh
/// samples.
MatchingReport local_matching_check(const std::vector<BarbaschMoyPair>& tests, const EndoscopicDatum& datum,
                                    const FieldSpec& field, long a0, long a_span, int depth,
                                    const MatchingOptions& opts = {});

/// Per orbit: sum over rational classes of Delta * Gamma_i / det.
RationalVector kappa_germ_table(const TorusElement& xh, const BarbaschMoyTuple& upsilon, const ThetaMatrix& theta,
                                const BasePoint& base, const EndoscopicDatum& datum, int depth);

}  // namespace germlab
