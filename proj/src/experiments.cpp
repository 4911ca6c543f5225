#include "germlab/experiments.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "germlab/integrate.hpp"
#include "germlab/sl2germs.hpp"

namespace germlab {

namespace {

using Evaluator = std::function<std::pair<std::vector<Rational>, bool>(const FieldSpec&)>;

Evaluator from_integral(std::function<IntegralResult(const FieldSpec&)> f) {
  return [f](const FieldSpec& field) {
    IntegralResult r = f(field);
    return std::make_pair(std::vector<Rational>{r.value}, r.stable);
  };
}

Evaluator measure_of(const std::string& text, int depth) {
  return from_integral([text, depth](const FieldSpec& field) {
    Formula s = parse_formula(text);
    return measure(s, unit_box(s.vf_variables(), field), depth, field);
  });
}

struct Sl2Context {
  BarbaschMoyTuple tuple;
  ThetaMatrix theta;
  GermRow germs;
};

Sl2Context sl2_context(const FieldSpec& field, int depth) {
  BarbaschMoyTuple t = barbasch_moy_tuple(5, field, depth);
  ThetaMatrix th = theta_matrix(t, depth);
  LocalElement d = -(LocalElement::nonsquare_unit(field) * LocalElement::uniformizer_power(field, 2));
  GermRow g = shalika_germs(CharPoint{d}, 1, t, th, depth);
  return {t, th, g};
}

}  // namespace

AkReport ak_regression_family(int p, int depth) {
  if (p == 2) throw std::invalid_argument("residue characteristic 2 is not supported");
  const FieldSpec fields[2] = {FieldSpec::mixed(p, 40), FieldSpec::equal(p, 40)};
  // The sl2 data is shared by six expressions.
  Sl2Context ctx[2] = {sl2_context(fields[0], depth), sl2_context(fields[1], depth)};
  auto side = [&](const FieldSpec& f) -> const Sl2Context& { return f.kind() == fields[0].kind() ? ctx[0] : ctx[1]; };

  std::vector<std::pair<std::string, Evaluator>> family;
  // The generic integrator enumerates p^(n * depth) cells, so the measures stay at depth 2.
  const int md = std::min(depth, 2);
  family.push_back({"measure ord(x) >= 1", measure_of("ord(x) >= 1", md)});
  family.push_back({"measure ord(x^2 - y) >= 1", measure_of("ord(x*x - y) >= 1", md)});
  family.push_back({"shell integral |x|^-1 on 1 <= ord(x) <= 2", from_integral([md](const FieldSpec& field) {
                      Formula s = parse_formula("ord(x) >= 1 && ord(x) <= 2");
                      Integrand f;
                      f.terms.push_back({1, 1, parse_term("x", s.signature()), std::nullopt});
                      return integrate(f, s, unit_box({"x"}, field), md, field);
                    })});
  family.push_back({"split orbital integral D = -pi^2", [&](const FieldSpec& f) {
                      LocalElement d = -LocalElement::uniformizer_power(f, 2);
                      OrbitalIntegral o = orbital_integral(CharPoint{d}, 1, side(f).tuple.pairs[0], depth);
                      return std::make_pair(std::vector<Rational>{o.value}, o.stable);
                    }});
  family.push_back({"theta entries", [&](const FieldSpec& f) {
                      const ThetaMatrix& th = side(f).theta;
                      std::vector<Rational> v;
                      for (const auto& row : th.entries) v.insert(v.end(), row.begin(), row.end());
                      return std::make_pair(v, th.stable);
                    }});
  for (std::size_t i = 0; i < 5; ++i)
    family.push_back({"germ " + std::to_string(i), [&, i](const FieldSpec& f) {
                        const Sl2Context& c = side(f);
                        return std::make_pair(std::vector<Rational>{c.germs.normalized(c.theta.det)[i]},
                                              c.germs.stable && c.theta.stable);
                      }});

  AkReport rep;
  rep.p = p;
  rep.depth = depth;
  rep.agree = true;
  for (const auto& [name, eval] : family) {
    AkEntry e;
    e.name = name;
    auto [m, sm] = eval(fields[0]);
    auto [q, sq] = eval(fields[1]);
    e.mixed = m;
    e.equal = q;
    e.stable = sm && sq;
    e.agree = e.stable && m == q;
    rep.agree = rep.agree && e.agree;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

nlohmann::json AkReport::to_json() const {
  nlohmann::json es = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json m = nlohmann::json::array(), q = nlohmann::json::array();
    for (const auto& x : e.mixed) m.push_back(to_string(x));
    for (const auto& x : e.equal) q.push_back(to_string(x));
    es.push_back({{"name", e.name}, {"qp", m}, {"fpt", q}, {"stable", e.stable}, {"agree", e.agree}});
  }
  return {{"p", p}, {"depth", depth}, {"entries", es}, {"agree", agree}};
}

std::string AkReport::to_csv() const {
  std::ostringstream out;
  out << "expression,index,qp,fpt,agree\n";
  for (const auto& e : entries)
    for (std::size_t i = 0; i < e.mixed.size(); ++i)
      out << '"' << e.name << "\"," << i << ',' << to_string(e.mixed[i]) << ','
          << (i < e.equal.size() ? to_string(e.equal[i]) : "") << ',' << (e.agree ? "yes" : "no") << '\n';
  return out.str();
}

}  // namespace germlab
