#include "germlab/endoscopy.hpp"

#include <random>
#include <stdexcept>

namespace germlab {

namespace {

nlohmann::json rationals(const std::vector<Rational>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

nlohmann::json residual_table(const std::vector<std::pair<long, std::vector<Rational>>>& rs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [a, v] : rs) out.push_back({{"a", a}, {"residuals", rationals(v)}});
  return out;
}

int tau_ord(const EndoscopicDatum& d) {
  return d.tau == SquareClass::Uniformizer || d.tau == SquareClass::NonsquareUniformizer ? 1 : 0;
}

long ceil_half(long n) { return n >= 0 ? (n + 1) / 2 : -((-n) / 2); }

}  // namespace

EndoscopicDatum EndoscopicDatum::elliptic(SquareClass tau) {
  if (tau == SquareClass::One) throw std::invalid_argument("elliptic datum needs a nonsquare tau");
  return {TorusType::Elliptic, tau};
}

std::string EndoscopicDatum::name() const {
  return type == TorusType::Split ? "split" : "elliptic(" + germlab::to_string(tau) + ")";
}

nlohmann::json EndoscopicDatum::to_json() const {
  return {{"torus", type == TorusType::Split ? "split" : "elliptic"},
          {"tau", germlab::to_string(tau)},
          {"kappa_trivial", kappa_trivial()}};
}

CharPoint char_point(const TorusElement& xh, const EndoscopicDatum& datum) {
  LocalElement tau = LocalElement::square_class_representative(xh.x.spec(), datum.tau);
  return {-(tau * xh.x * xh.x)};
}

bool corresponds(const TorusElement& xh, const Sl2Element& xg, const EndoscopicDatum& datum) {
  return same_value(char_point(xh, datum).D, char_point(xg).D);
}

BasePoint default_base_point(const EndoscopicDatum& datum, const FieldSpec& field, int n) {
  TorusElement xh{LocalElement::uniformizer_power(field, n)};
  return {xh, semisimple_representative(char_point(xh, datum), 1)};
}

Rational transfer_factor(const TorusElement& xh, const Sl2Element& xg, const BasePoint& base,
                         const EndoscopicDatum& datum) {
  if (!corresponds(base.xh, base.xg, datum)) throw std::invalid_argument("base points do not correspond");
  if (!corresponds(xh, xg, datum)) return 0;
  int delta0 = datum.kappa_trivial() ? 1 : class_invariant(xg).sign * class_invariant(base.xg).sign;
  int twice_d = *char_point(xg).D.ord() - *char_point(base.xg).D.ord();
  if (twice_d % 2 != 0) throw std::logic_error("discriminant exponents of one torus differ by an odd amount");
  return delta0 * rational_pow(xh.x.spec().p(), -twice_d / 2);
}

Rational kappa_orbital_integral(const TorusElement& xh, const BarbaschMoyPair& f, const BasePoint& base,
                                const EndoscopicDatum& datum, int depth, const DeltaOptions& opts) {
  CharPoint d = char_point(xh, datum);
  Rational total = 0;
  for (int sign : rational_classes(d)) {
    Rational delta = transfer_factor(xh, semisimple_representative(d, sign), base, datum);
    if (opts.wrong_sign) delta *= legendre_symbol(xh.x.ac(), xh.x.spec().p());
    total += delta * orbital_integral(d, sign, f, depth).value;
  }
  return total;
}

Rational AnnulusStep::operator()(const LocalElement& x) const {
  if (!x.is_nonzero()) return ball;
  int n = *x.ord();
  if (n < first) throw std::out_of_range("X_H outside the step function's domain");
  std::size_t idx = static_cast<std::size_t>(n - first);
  return idx < values.size() ? values[idx] : ball;
}

nlohmann::json AnnulusStep::to_json() const {
  nlohmann::json annuli = nlohmann::json::array();
  for (std::size_t i = 0; i < values.size(); ++i)
    annuli.push_back({{"ord", first + static_cast<int>(i)}, {"value", to_string(values[i])}});
  return {{"annuli", annuli}, {"ball_from", first + static_cast<int>(values.size())}, {"ball", to_string(ball)}};
}

AnnulusStep operator+(const AnnulusStep& f, const AnnulusStep& g) {
  if (f.first != g.first || f.values.size() != g.values.size())
    throw std::invalid_argument("step functions on different annuli");
  AnnulusStep h = f;
  for (std::size_t i = 0; i < h.values.size(); ++i) h.values[i] += g.values[i];
  h.ball += g.ball;
  return h;
}

Rational stable_orbital_integral_torus(const TorusElement& xh, const AnnulusStep& fh) { return fh(xh.x); }

std::vector<TorusElement> sample_torus_elements(const FieldSpec& field, const EndoscopicDatum& datum, int a0,
                                                int span, int per_level, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> digit(0, field.p() - 1);
  const int t = tau_ord(datum);
  std::vector<TorusElement> out;
  for (int a = a0; a <= a0 + span; ++a) {
    if (((a - t) % 2 + 2) % 2 != 0) continue;
    for (int i = 0; i < per_level; ++i) {
      std::vector<int> d{i % (field.p() - 1) + 1};
      for (int j = 1; j < 4; ++j) d.push_back(digit(rng));
      out.push_back({LocalElement::from_digits(field, (a - t) / 2, d)});
    }
  }
  return out;
}

MatchingReport local_matching_check(const std::vector<BarbaschMoyPair>& tests, const EndoscopicDatum& datum,
                                    const FieldSpec& field, long a0, long a_span, int depth,
                                    const MatchingOptions& opts) {
  MatchingReport rep;
  rep.datum = datum;
  rep.p = field.p();
  rep.a0 = a0;
  rep.a_span = a_span;
  const int first = static_cast<int>(ceil_half(a0 - tau_ord(datum)));
  BasePoint base = default_base_point(datum, field, first);
  auto samples = sample_torus_elements(field, datum, static_cast<int>(a0), static_cast<int>(a_span),
                                       opts.per_level, opts.seed);
  auto fresh = sample_torus_elements(field, datum, static_cast<int>(a0), static_cast<int>(a_span), opts.per_level,
                                     opts.seed + 1);
  if (samples.empty()) throw std::invalid_argument("no torus samples in the truncation range");
  const std::size_t unknowns = static_cast<std::size_t>(opts.annuli) + 1;
  auto index = [&](const TorusElement& x) {
    std::size_t i = static_cast<std::size_t>(*x.x.ord() - first);
    return std::min(i, unknowns - 1);
  };
  auto level = [&](const TorusElement& x) { return static_cast<long>(*char_point(x, datum).D.ord()); };

  rep.success = true;
  for (const auto& f : tests) {
    MatchResult res;
    res.test_function = f.orbit_label + "@" + to_string(f.f);
    std::vector<Rational> kappa;
    RationalMatrix m;
    for (const auto& x : samples) {
      kappa.push_back(kappa_orbital_integral(x, f, base, datum, depth, opts.delta));
      RationalVector row(unknowns, 0);
      row[index(x)] = 1;
      m.push_back(row);
    }
    std::optional<RationalVector> sol = solve(m, kappa);
    res.solved = sol.has_value();
    res.fh.first = first;
    res.fh.values.assign(unknowns - 1, 0);
    if (sol) {
      for (std::size_t i = 0; i + 1 < unknowns; ++i) res.fh.values[i] = (*sol)[i];
      res.fh.ball = sol->back();
    } else {
      // Fit the first sample per annulus; the remaining mismatches obstruct.
      std::vector<bool> set(unknowns, false);
      for (std::size_t s = 0; s < samples.size(); ++s) {
        std::size_t i = index(samples[s]);
        if (set[i]) continue;
        set[i] = true;
        if (i + 1 < unknowns) res.fh.values[i] = kappa[s];
        else res.fh.ball = kappa[s];
      }
    }
    auto residuals = [&](const std::vector<TorusElement>& xs, const std::vector<Rational>* known) {
      std::vector<std::pair<long, std::vector<Rational>>> out;
      for (std::size_t s = 0; s < xs.size(); ++s) {
        Rational k = known ? (*known)[s] : kappa_orbital_integral(xs[s], f, base, datum, depth, opts.delta);
        Rational r = stable_orbital_integral_torus(xs[s], res.fh) - k;
        long a = level(xs[s]);
        if (out.empty() || out.back().first != a) out.push_back({a, {}});
        out.back().second.push_back(r);
      }
      return out;
    };
    res.residuals = residuals(samples, &kappa);
    res.fresh_residuals = residuals(fresh, nullptr);
    bool zero = true;
    for (const auto* table : {&res.residuals, &res.fresh_residuals})
      for (const auto& [a, v] : *table)
        for (const auto& r : v) {
          if (r != 0) {
            zero = false;
            if (table == &res.residuals) res.obstruction.push_back(r);
          }
        }
    res.success = res.solved && zero;
    rep.success = rep.success && res.success;
    rep.results.push_back(std::move(res));
  }
  return rep;
}

nlohmann::json MatchingReport::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : results)
    rs.push_back({{"test_function", r.test_function},
                  {"f_H", r.fh.to_json()},
                  {"solved", r.solved},
                  {"residuals", residual_table(r.residuals)},
                  {"fresh_residuals", residual_table(r.fresh_residuals)},
                  {"obstruction", rationals(r.obstruction)},
                  {"success", r.success}});
  return {{"datum", datum.to_json()}, {"p", p}, {"a0", a0}, {"a_span", a_span}, {"results", rs}, {"success", success}};
}

RationalVector kappa_germ_table(const TorusElement& xh, const BarbaschMoyTuple& upsilon, const ThetaMatrix& theta,
                                const BasePoint& base, const EndoscopicDatum& datum, int depth) {
  CharPoint d = char_point(xh, datum);
  RationalVector out(upsilon.size(), 0);
  for (int sign : rational_classes(d)) {
    Rational delta = transfer_factor(xh, semisimple_representative(d, sign), base, datum);
    RationalVector g = shalika_germs(d, sign, upsilon, theta, depth).normalized(theta.det);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += delta * g[i];
  }
  return out;
}

}  // namespace germlab
