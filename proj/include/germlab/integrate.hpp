#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "germlab/denefpas.hpp"
#include "germlab/polynomial.hpp"
#include "germlab/rational.hpp"

namespace germlab {

using Box = std::map<std::string, Ball>;

/// Unit ball O for each variable.
Box unit_box(const std::vector<std::string>& vars, const FieldSpec& field);

struct IntegralResult {
  Rational value;
  int depth = 0;
  /// Same value at depth + 1 (and, for adaptive sums, a certified tail).
  bool stable = false;
  FieldSpec field = FieldSpec::mixed(5);
  nlohmann::json to_json() const;
};

/// r * p^(a * ord g(x)) * [x in support]; an empty support means everywhere,
/// a = 0 means no ord factor.
struct IntegrandTerm {
  Rational coefficient = 1;
  int exponent = 0;
  TermPtr g;
  std::optional<DefinableSet> support;
};

struct Integrand {
  std::vector<IntegrandTerm> terms;
  static Integrand one();
  /// {"terms": [{"coeff": "1/2", "exponent": -1, "g": "x", "support": "ord(x) >= 1"}]}
  static Integrand from_json(const nlohmann::json& j, const std::vector<Variable>& signature);
};

struct IntegrationOptions {
  /// Undetermined cells are refined at most this many levels below the base depth.
  int max_refinement = 8;
  /// Refinement stops once the frontier exceeds this many cells.
  std::size_t max_frontier = 200000;
};

/// Detailed outcome of one adaptive coset sum.
struct CosetSum {
  Rational decided;           ///< exact contribution of decided cells
  Rational tail;              ///< certified geometric tail (0 if none needed)
  bool certified = false;     ///< all cells decided, or a geometric tail fits
  std::vector<Rational> level_mass;  ///< new decided contribution per refinement level
  std::size_t frontier = 0;   ///< undetermined cells left
  bool ord_undetermined = false;
};

/// Coset sum at a single depth with adaptive refinement of cells whose
/// membership or integrand is not decided modulo pi^depth.
CosetSum coset_sum(const Integrand& f, const DefinableSet& s, const Box& box, int depth, const FieldSpec& field,
                   const Environment& fixed = {}, const IntegrationOptions& opts = {});

/// Volume with vol(O) = 1 per VF coordinate.
IntegralResult measure(const DefinableSet& s, const Box& box, int depth, const FieldSpec& field,
                       const Environment& fixed = {}, const IntegrationOptions& opts = {});

/// Throws PrecisionError if some ord(g_j) stays undetermined and no tail can be certified.
IntegralResult integrate(const Integrand& f, const DefinableSet& s, const Box& box, int depth,
                         const FieldSpec& field, const Environment& fixed = {}, const IntegrationOptions& opts = {});

/// Fiber {c(x) = D} with the Leray measure N_m * p^(-(n-1) m).
struct LerayFiberSpec {
  Polynomial c;
  LocalElement target;
  Box box;
  /// Excludes the ball where every coordinate has ord >= exclude_radius
  /// (the singular point at the origin).
  std::optional<int> exclude_radius;
};

struct LerayResult {
  IntegralResult result;
  /// With an exclusion radius M: values at M, M+1, M+2 and the extrapolated limit.
  std::vector<Rational> exclusion_values;
  std::optional<Rational> tail_ratio;
  std::optional<Rational> extrapolated;
  bool tail_geometric = false;
};

/// Number of depth-m grid points of the box with c(x) = D mod pi^m (and in
/// restriction, tested at the representative). Uses a linear solve in the last
/// variable when c has degree 1 in it and restriction does not involve it.
Integer leray_count(const LerayFiberSpec& spec, const DefinableSet* restriction, int m, const FieldSpec& field,
                    std::optional<int> exclude_radius = {});

LerayResult leray_fiber_measure(const LerayFiberSpec& spec, const DefinableSet* restriction, int m,
                                const FieldSpec& field);

struct TransferReport {
  int p = 0;
  int depth = 0;
  Rational value_mixed;
  Rational value_equal;
  bool stable_mixed = false;
  bool stable_equal = false;
  bool agree = false;
  nlohmann::json to_json() const;
};

/// Evaluates the same expression over Q_p and F_p((t)). Throws for p = 2 and
/// PrecisionError if either side is unstable.
TransferReport transfer_compare(const std::function<IntegralResult(const FieldSpec&)>& expr, int p, int depth);
TransferReport transfer_compare(const Integrand& f, const DefinableSet& s, int p, int depth);

struct VanishingReport {
  std::vector<std::pair<long, Rational>> values;
  std::optional<long> first_nonzero;
  /// Smallest a in range such that the value vanishes on [a, hi].
  std::optional<long> vanishes_from;
  bool vanishes_on_range = false;
};

/// Scans a in [lo, hi], binding the VG variable index_var of s; the index
/// enters only through the support.
VanishingReport asymptotic_vanishing_check(const Integrand& f, const DefinableSet& s, const std::string& index_var,
                                           long lo, long hi, const Box& box, int depth, const FieldSpec& field);

}  // namespace germlab
