#include "germlab/integrate.hpp"

#include <algorithm>
#include <stdexcept>

#include "germlab/parallel.hpp"

namespace germlab {

Box unit_box(const std::vector<std::string>& vars, const FieldSpec& field) {
  Box box;
  for (const auto& v : vars) box.emplace(v, Ball{LocalElement::zero(field), 0});
  return box;
}

nlohmann::json IntegralResult::to_json() const {
  return {{"value", germlab::to_string(value)}, {"depth", depth}, {"stable", stable}, {"field", field.name()}};
}

Integrand Integrand::one() {
  Integrand f;
  f.terms.push_back(IntegrandTerm{});
  return f;
}

Integrand Integrand::from_json(const nlohmann::json& j, const std::vector<Variable>& signature) {
  Integrand f;
  for (const auto& t : j.at("terms")) {
    IntegrandTerm term;
    if (t.contains("coeff"))
      term.coefficient = t["coeff"].is_string() ? parse_rational(t["coeff"].get<std::string>())
                                                : Rational(t["coeff"].get<long>());
    term.exponent = t.value("exponent", 0);
    if (term.exponent != 0) term.g = parse_term(t.at("g").get<std::string>(), signature, Sort::VF);
    if (t.contains("support")) term.support = parse_formula(t["support"].get<std::string>());
    f.terms.push_back(std::move(term));
  }
  return f;
}

namespace {

using Cell = std::vector<LocalElement>;

enum class CellStatus { Decided, Undetermined, OrdUndetermined };

struct CellOutcome {
  CellStatus status = CellStatus::Decided;
  Rational value;
};

class CosetIntegrator {
 public:
  CosetIntegrator(const Integrand& f, const DefinableSet& s, const Box& box, const FieldSpec& field,
                  const Environment& fixed)
      : f_(f), s_(s), box_(box), field_(field), fixed_(fixed), vars_(s.vf_variables()) {
    for (const auto& v : vars_)
      if (!box.count(v)) throw std::invalid_argument("box does not cover VF variable '" + v + "'");
    for (const auto& [name, ball] : box)
      if (std::find(vars_.begin(), vars_.end(), name) == vars_.end())
        throw std::invalid_argument("box variable '" + name + "' is not a VF variable of the set");
    for (const auto& v : s.signature())
      if (v.sort != Sort::VF && !fixed.count(v.name))
        throw std::invalid_argument("free " + to_string(v.sort) + " variable '" + v.name + "' needs a value");
    for (const auto& t : f.terms) {
      if (t.exponent == 0) {
        ord_terms_.push_back(nullptr);
        continue;
      }
      if (!t.g) throw std::invalid_argument("integrand term with an exponent needs g");
      auto ord = std::make_shared<Term>();
      ord->op = Term::Op::Ord;
      ord->sort = Sort::VG;
      ord->args = {t.g};
      ord_terms_.push_back(ord);
    }
  }

  std::vector<Cell> initial_cells(int depth) const {
    std::vector<std::vector<LocalElement>> grids;
    for (const auto& v : vars_) {
      const Ball& b = box_.at(v);
      if (depth < b.radius) throw std::invalid_argument("depth below the radius of the box ball for " + v);
      grids.push_back(coset_representatives(b, depth));
    }
    std::vector<Cell> cells{{}};
    for (const auto& g : grids) {
      std::vector<Cell> next;
      next.reserve(cells.size() * g.size());
      for (const auto& c : cells)
        for (const auto& x : g) {
          Cell d = c;
          d.push_back(x);
          next.push_back(std::move(d));
        }
      cells = std::move(next);
    }
    return cells;
  }

  std::vector<Cell> children(const Cell& cell, int depth) const {
    std::vector<Cell> out{{}};
    for (const auto& x : cell) {
      std::vector<Cell> next;
      for (const auto& prefix : out)
        for (const auto& c : coset_representatives({x, depth}, depth + 1)) {
          Cell d = prefix;
          d.push_back(c);
          next.push_back(std::move(d));
        }
      out = std::move(next);
    }
    return out;
  }

  CellOutcome evaluate(const Cell& cell, int depth, bool representative) const {
    Environment env = fixed_;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      env.insert_or_assign(vars_[i], representative ? cell[i] : cell[i].truncated(depth));
    EvalOptions opts;
    opts.ball_depth = depth;
    if (!representative) opts.coset_precision = depth;
    CellOutcome out;
    Truth in = evaluate_truth(s_.root(), env, field_, opts);
    if (in == Truth::Unknown) return {CellStatus::Undetermined, 0};
    if (in == Truth::False) return out;
    for (std::size_t j = 0; j < f_.terms.size(); ++j) {
      const IntegrandTerm& t = f_.terms[j];
      if (t.support) {
        Truth sup = evaluate_truth(t.support->root(), env, field_, opts);
        if (sup == Truth::Unknown) return {CellStatus::Undetermined, 0};
        if (sup == Truth::False) continue;
      }
      Rational v = t.coefficient;
      if (ord_terms_[j]) {
        auto [lo, hi] = evaluate_vg(ord_terms_[j], env, field_, opts);
        if (lo != hi || lo >= kInfinity) {
          if (representative) throw PrecisionError("integrand ord undetermined at a representative");
          return {CellStatus::OrdUndetermined, 0};
        }
        v *= rational_pow(field_.p(), static_cast<long>(t.exponent) * lo);
      }
      out.value += v;
    }
    out.value *= rational_pow(field_.p(), -static_cast<long>(depth) * static_cast<long>(vars_.size()));
    return out;
  }

  CosetSum run(int depth, const IntegrationOptions& opts) const {
    CosetSum sum;
    std::vector<Cell> frontier = initial_cells(depth);
    std::vector<Rational> frontier_volume;
    int level = depth;
    for (;;) {
      std::vector<CellOutcome> results(frontier.size());
      parallel_for(frontier.size(), [&](std::size_t i) { results[i] = evaluate(frontier[i], level, false); });
      Rational mass = 0;
      std::vector<Cell> next;
      bool ord_flag = false;
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        if (results[i].status == CellStatus::Decided) {
          mass += results[i].value;
        } else {
          ord_flag = ord_flag || results[i].status == CellStatus::OrdUndetermined;
          next.push_back(std::move(frontier[i]));
        }
      }
      sum.decided += mass;
      frontier = std::move(next);
      if (level > depth) {
        sum.level_mass.push_back(mass);
        frontier_volume.push_back(Rational(static_cast<long>(frontier.size())) *
                                  rational_pow(field_.p(), -static_cast<long>(level) * static_cast<long>(vars_.size())));
      }
      sum.ord_undetermined = ord_flag;
      if (frontier.empty()) {
        sum.certified = true;
        return sum;
      }
      const std::size_t branching = static_cast<std::size_t>(
          rational_pow(field_.p(), static_cast<long>(vars_.size())).get_num().get_ui());
      if (level - depth >= opts.max_refinement || frontier.size() * branching > opts.max_frontier) break;
      std::vector<Cell> refined;
      for (const auto& c : frontier)
        for (auto& d : children(c, level)) refined.push_back(std::move(d));
      frontier = std::move(refined);
      ++level;
    }
    sum.frontier = frontier.size();
    const auto& m = sum.level_mass;
    const auto& u = frontier_volume;
    // The undetermined volume has to shrink for any tail to be trusted.
    if (m.size() >= 3 && u[u.size() - 1] < u[u.size() - 2] && u[u.size() - 2] < u[u.size() - 3]) {
      const Rational& a = m[m.size() - 3];
      const Rational& b = m[m.size() - 2];
      const Rational& c = m[m.size() - 1];
      if (a == 0 && b == 0 && c == 0) {
        sum.certified = true;
      } else if (a != 0 && b != 0 && c != 0 && b * b == a * c) {
        Rational r = c / b;
        if (r > 0 && r < 1) {
          sum.tail = c * r / (1 - r);
          sum.certified = true;
        }
      }
    }
    if (!sum.certified) {
      // Best estimate: remaining cells at their representatives.
      Rational est = 0;
      for (const auto& cell : frontier) {
        CellOutcome o = evaluate(cell, level, true);
        est += o.value;
      }
      sum.tail = est;
    }
    return sum;
  }

 private:
  const Integrand& f_;
  const DefinableSet& s_;
  const Box& box_;
  const FieldSpec& field_;
  const Environment& fixed_;
  std::vector<std::string> vars_;
  std::vector<TermPtr> ord_terms_;
};

}  // namespace

CosetSum coset_sum(const Integrand& f, const DefinableSet& s, const Box& box, int depth, const FieldSpec& field,
                   const Environment& fixed, const IntegrationOptions& opts) {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  return CosetIntegrator(f, s, box, field, fixed).run(depth, opts);
}

IntegralResult integrate(const Integrand& f, const DefinableSet& s, const Box& box, int depth, const FieldSpec& field,
                         const Environment& fixed, const IntegrationOptions& opts) {
  CosetSum a = coset_sum(f, s, box, depth, field, fixed, opts);
  if (!a.certified && a.ord_undetermined)
    throw PrecisionError("ord of an integrand factor stays undetermined after refinement to depth " +
                         std::to_string(depth + opts.max_refinement));
  CosetSum b = coset_sum(f, s, box, depth + 1, field, fixed, opts);
  IntegralResult r;
  r.value = a.decided + a.tail;
  r.depth = depth;
  r.field = field;
  r.stable = a.certified && b.certified && r.value == b.decided + b.tail;
  return r;
}

IntegralResult measure(const DefinableSet& s, const Box& box, int depth, const FieldSpec& field,
                       const Environment& fixed, const IntegrationOptions& opts) {
  return integrate(Integrand::one(), s, box, depth, field, fixed, opts);
}

// ---------------------------------------------------------------------------
// Leray fiber counts.

namespace {

std::vector<ResidueRing::Code> ball_codes(const ResidueRing& ring, const Ball& b) {
  if (b.radius < 0) throw std::invalid_argument("Leray box balls must lie in O");
  if (!b.center.is_zero() && b.center.ord_lower_bound() < 0) throw std::invalid_argument("ball center not integral");
  std::vector<ResidueRing::Code> out;
  for (const auto& x : coset_representatives(b, ring.depth())) out.push_back(ring.from_element(x.truncated(ring.depth())));
  return out;
}

bool mentions(const TermPtr& t, const std::string& var) {
  if (!t) return false;
  if (t->op == Term::Op::Var && t->name == var) return true;
  for (const auto& a : t->args)
    if (mentions(a, var)) return true;
  return false;
}

// Free occurrence of var (bound occurrences do not count).
bool mentions(const FormulaPtr& f, const std::string& var) {
  if (!f) return false;
  switch (f->kind) {
    case FormulaNode::Kind::Cmp:
    case FormulaNode::Kind::Cong: return mentions(f->lhs, var) || mentions(f->rhs, var);
    case FormulaNode::Kind::Exists:
    case FormulaNode::Kind::Forall:
      if (mentions(f->center, var)) return true;
      return f->var != var && mentions(f->a, var);
    default: return mentions(f->a, var) || mentions(f->b, var);
  }
}

}  // namespace

Integer leray_count(const LerayFiberSpec& spec, const DefinableSet* restriction, int m, const FieldSpec& field,
                    std::optional<int> exclude_radius) {
  const auto& vars = spec.c.vars();
  const std::size_t n = vars.size();
  if (n == 0) throw std::invalid_argument("Leray fiber needs at least one variable");
  for (const auto& v : vars)
    if (!spec.box.count(v)) throw std::invalid_argument("box does not cover '" + v + "'");
  if (restriction)
    for (const auto& v : restriction->vf_variables())
      if (std::find(vars.begin(), vars.end(), v) == vars.end())
        throw std::invalid_argument("restriction uses '" + v + "' outside the fiber variables");
  if (!spec.target.is_zero() && spec.target.ord_lower_bound() < 0) return 0;  // c maps the box into O
  const ResidueRing ring(field, m);
  const ResidueRing::Code target = ring.from_element(spec.target.truncated(m));

  std::vector<std::vector<ResidueRing::Code>> codes;
  for (const auto& v : vars) codes.push_back(ball_codes(ring, spec.box.at(v)));

  const std::size_t last = n - 1;
  const bool linear = spec.c.degree_in(last) <= 1 && (!restriction || !mentions(restriction->root(), vars[last]));
  Polynomial lead_poly, rest_poly;
  if (linear) std::tie(lead_poly, rest_poly) = spec.c.split_linear(last);
  const ResidueRing::Compiled whole = ring.compile(spec.c), lead = ring.compile(lead_poly),
                              rest = ring.compile(rest_poly);
  const int r_last = spec.box.at(vars[last]).radius;
  const ResidueRing::Code c_last = codes[last].empty() ? 0 : codes[last][0];

  auto excluded = [&](const std::vector<ResidueRing::Code>& pt, std::size_t upto) {
    if (!exclude_radius) return false;
    for (std::size_t i = 0; i < upto; ++i)
      if (ring.ord(pt[i]) < *exclude_radius) return false;
    return true;
  };
  auto in_restrict = [&](const std::vector<ResidueRing::Code>& pt) {
    if (!restriction) return true;
    Environment env;
    for (std::size_t i = 0; i < pt.size(); ++i) env.insert_or_assign(vars[i], ring.to_element(pt[i]));
    Truth t = evaluate_truth(restriction->root(), env, field, EvalOptions{m, std::nullopt});
    if (t == Truth::Unknown) throw PrecisionError("restriction undetermined at a grid point");
    return t == Truth::True;
  };

  // Enumerate the prefix grid (all variables, or all but the last on the linear path).
  const std::size_t prefix_len = linear ? last : n;
  std::vector<std::size_t> radix;
  std::size_t outer = codes[0].size();
  for (std::size_t i = 1; i < prefix_len; ++i) radix.push_back(codes[i].size());
  std::size_t inner = 1;
  for (auto r : radix) inner *= r;
  if (prefix_len == 0) outer = 1;

  std::vector<std::uint64_t> pow_table{1};
  for (int i = 0; i <= m; ++i) pow_table.push_back(pow_table.back() * static_cast<std::uint64_t>(field.p()));
  std::vector<std::uint64_t> partial(outer);
  parallel_for(outer, [&](std::size_t o) {
    std::uint64_t count = 0;
    std::vector<ResidueRing::Code> pt(n, 0);
    for (std::size_t idx = 0; idx < inner; ++idx) {
      if (prefix_len > 0) pt[0] = codes[0][o];
      std::size_t rest_idx = idx;
      for (std::size_t i = prefix_len; i-- > 1;) {
        pt[i] = codes[i][rest_idx % codes[i].size()];
        rest_idx /= codes[i].size();
      }
      if (!linear) {
        if (excluded(pt, n) || !in_restrict(pt)) continue;
        if (ring.evaluate(whole, pt) == target) ++count;
        continue;
      }
      if (!in_restrict(pt)) continue;
      if (excluded(pt, last)) {
        // Near the singular point: walk the last coordinate explicitly.
        for (auto x : codes[last]) {
          pt[last] = x;
          if (!excluded(pt, n) && ring.evaluate(whole, pt) == target) ++count;
        }
        continue;
      }
      pt[last] = 0;
      const ResidueRing::Code L = ring.evaluate(lead, pt);
      const ResidueRing::Code R = ring.evaluate(rest, pt);
      const ResidueRing::Code rhs = ring.sub(ring.sub(target, R), ring.mul(L, c_last));
      const int e = std::min(ring.ord(L) + r_last, m);
      if (ring.ord(rhs) >= e) count += pow_table[static_cast<std::size_t>(e - r_last)];
    }
    partial[o] = count;
  });
  Integer total = 0;
  for (auto c : partial) total += Integer(std::to_string(c));
  return total;
}

namespace {

Rational leray_value(const LerayFiberSpec& spec, const DefinableSet* restriction, int m, const FieldSpec& field,
                     std::optional<int> exclude) {
  const long n = static_cast<long>(spec.c.vars().size());
  Rational v(leray_count(spec, restriction, m, field, exclude));
  return v * rational_pow(field.p(), -(n - 1) * m);
}

struct Extrapolation {
  std::vector<Rational> values;
  std::optional<Rational> ratio;
  std::optional<Rational> limit;
  bool geometric = false;
};

Extrapolation extrapolate(const LerayFiberSpec& spec, const DefinableSet* restriction, int m, const FieldSpec& field) {
  Extrapolation e;
  const int M = *spec.exclude_radius;
  for (int j = 0; j < 3; ++j) e.values.push_back(leray_value(spec, restriction, m, field, M + j));
  Rational d1 = e.values[1] - e.values[0], d2 = e.values[2] - e.values[1];
  if (d1 == 0 && d2 == 0) {
    e.geometric = true;
    e.ratio = Rational(0);
    e.limit = e.values[2];
  } else if (d1 != 0) {
    Rational r = d2 / d1;
    e.ratio = r;
    if (r > 0 && r < 1) {
      e.geometric = true;
      e.limit = e.values[2] + d2 * r / (1 - r);
    }
  }
  return e;
}

}  // namespace

LerayResult leray_fiber_measure(const LerayFiberSpec& spec, const DefinableSet* restriction, int m,
                                const FieldSpec& field) {
  LerayResult out;
  out.result.depth = m;
  out.result.field = field;
  if (!spec.exclude_radius) {
    out.result.value = leray_value(spec, restriction, m, field, std::nullopt);
    out.result.stable = out.result.value == leray_value(spec, restriction, m + 1, field, std::nullopt);
    return out;
  }
  if (*spec.exclude_radius + 2 > m)
    throw std::invalid_argument("depth must be at least the exclusion radius + 2");
  Extrapolation a = extrapolate(spec, restriction, m, field);
  out.exclusion_values = a.values;
  out.tail_ratio = a.ratio;
  out.tail_geometric = a.geometric;
  out.extrapolated = a.limit;
  out.result.value = a.limit ? *a.limit : a.values.back();
  if (a.geometric) {
    Extrapolation b = extrapolate(spec, restriction, m + 1, field);
    out.result.stable = b.geometric && b.limit == a.limit;
  }
  return out;
}

// ---------------------------------------------------------------------------

nlohmann::json TransferReport::to_json() const {
  return {{"p", p},
          {"depth", depth},
          {"value_mixed", germlab::to_string(value_mixed)},
          {"value_equal", germlab::to_string(value_equal)},
          {"stable_mixed", stable_mixed},
          {"stable_equal", stable_equal},
          {"agree", agree}};
}

TransferReport transfer_compare(const std::function<IntegralResult(const FieldSpec&)>& expr, int p, int depth) {
  if (p == 2 || !is_prime(p)) throw std::invalid_argument("transfer comparison needs an odd prime p");
  TransferReport r;
  r.p = p;
  r.depth = depth;
  IntegralResult a = expr(FieldSpec::mixed(p));
  IntegralResult b = expr(FieldSpec::equal(p));
  r.value_mixed = a.value;
  r.value_equal = b.value;
  r.stable_mixed = a.stable;
  r.stable_equal = b.stable;
  if (!a.stable || !b.stable)
    throw PrecisionError("unstable evaluation at p = " + std::to_string(p) + ", depth " + std::to_string(depth) +
                         " (" + (a.stable ? "equal" : "mixed") + " characteristic)");
  r.agree = a.value == b.value;
  return r;
}

TransferReport transfer_compare(const Integrand& f, const DefinableSet& s, int p, int depth) {
  return transfer_compare(
      [&](const FieldSpec& field) { return integrate(f, s, unit_box(s.vf_variables(), field), depth, field); }, p,
      depth);
}

VanishingReport asymptotic_vanishing_check(const Integrand& f, const DefinableSet& s, const std::string& index_var,
                                           long lo, long hi, const Box& box, int depth, const FieldSpec& field) {
  bool found = false;
  for (const auto& v : s.signature())
    if (v.name == index_var) {
      if (v.sort != Sort::VG) throw std::invalid_argument("index variable '" + index_var + "' is not VG");
      found = true;
    }
  if (!found) throw std::invalid_argument("index variable '" + index_var + "' does not occur in the support");
  VanishingReport rep;
  for (long a = lo; a <= hi; ++a) {
    IntegralResult r = integrate(f, s, box, depth, field, {{index_var, a}});
    if (!r.stable) throw PrecisionError("unstable integral at a = " + std::to_string(a));
    rep.values.emplace_back(a, r.value);
    if (r.value != 0 && !rep.first_nonzero) rep.first_nonzero = a;
  }
  for (auto it = rep.values.rbegin(); it != rep.values.rend() && it->second == 0; ++it) rep.vanishes_from = it->first;
  rep.vanishes_on_range = !rep.first_nonzero;
  return rep;
}

}  // namespace germlab
