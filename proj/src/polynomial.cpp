#include "germlab/polynomial.hpp"

#include <array>
#include <stdexcept>

namespace germlab {

void Polynomial::check_vars(const Polynomial& a, const Polynomial& b) {
  if (a.vars_ != b.vars_) throw std::invalid_argument("polynomials over different variable lists");
}

void Polynomial::add_term(const Exponents& e, const Integer& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::constant(std::vector<std::string> vars, const Integer& c) {
  Polynomial f(std::move(vars));
  f.add_term(Exponents(f.vars_.size(), 0), c);
  return f;
}

Polynomial Polynomial::variable(std::vector<std::string> vars, std::size_t i) {
  Polynomial f(std::move(vars));
  Exponents e(f.vars_.size(), 0);
  e.at(i) = 1;
  f.add_term(e, 1);
  return f;
}

Polynomial Polynomial::from_term(const TermPtr& t, const std::vector<std::string>& vars) {
  if (t->sort != Sort::VF) throw std::invalid_argument("not a VF term: " + germlab::to_string(t));
  switch (t->op) {
    case Term::Op::Var: {
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == t->name) return variable(vars, i);
      throw std::invalid_argument("variable '" + t->name + "' not in the polynomial's variable list");
    }
    case Term::Op::Const: return constant(vars, t->value);
    case Term::Op::Add: return from_term(t->args[0], vars) + from_term(t->args[1], vars);
    case Term::Op::Sub: return from_term(t->args[0], vars) - from_term(t->args[1], vars);
    case Term::Op::Mul: return from_term(t->args[0], vars) * from_term(t->args[1], vars);
    case Term::Op::Neg: return -from_term(t->args[0], vars);
    case Term::Op::Pow: {
      Polynomial base = from_term(t->args[0], vars);
      Polynomial r = constant(vars, 1);
      for (long i = 0; i < t->exponent; ++i) r = r * base;
      return r;
    }
    default: throw std::invalid_argument("not a polynomial: " + germlab::to_string(t));
  }
}

Polynomial Polynomial::parse(std::string_view text, const std::vector<std::string>& vars) {
  std::vector<Variable> known;
  for (const auto& v : vars) known.push_back({v, Sort::VF});
  return from_term(parse_term(text, known, Sort::VF), vars);
}

int Polynomial::degree_in(std::size_t i) const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e.at(i));
  return d;
}

int Polynomial::total_degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

std::pair<Polynomial, Polynomial> Polynomial::split_linear(std::size_t i) const {
  if (degree_in(i) > 1) throw std::invalid_argument("polynomial is not linear in " + vars_.at(i));
  Polynomial lead(vars_), rest(vars_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 1) {
      Exponents f = e;
      f[i] = 0;
      lead.add_term(f, c);
    } else {
      rest.add_term(e, c);
    }
  }
  return {lead, rest};
}

LocalElement Polynomial::evaluate(std::span<const LocalElement> point, const FieldSpec& field) const {
  if (point.size() != vars_.size()) throw std::invalid_argument("point dimension mismatch");
  LocalElement sum = LocalElement::zero(field);
  for (const auto& [e, c] : terms_) {
    LocalElement t = LocalElement::from_integer(field, c);
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) t = t * point[i];
    sum = sum + t;
  }
  return sum;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial::check_vars(a, b);
  Polynomial r = a;
  for (const auto& [e, c] : b.terms_) r.add_term(e, c);
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(vars_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial::check_vars(a, b);
  Polynomial r(a.vars_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      Polynomial::Exponents e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  return r;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Integer mag = abs(c);
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += vars_[i];
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    std::string body = mono.empty() ? mag.get_str() : (mag == 1 ? mono : mag.get_str() + "*" + mono);
    if (out.empty()) out = (c < 0 ? "-" : "") + body;
    else out += (c < 0 ? " - " : " + ") + body;
  }
  return out;
}

// ---------------------------------------------------------------------------

ResidueRing::ResidueRing(const FieldSpec& field, int m) : field_(field), m_(m), p_(static_cast<Code>(field.p())) {
  if (m < 1) throw std::invalid_argument("residue ring depth must be positive");
  powers_.push_back(1);
  for (int i = 0; i < m; ++i) {
    if (powers_.back() > (Code{1} << 62) / p_) throw std::invalid_argument("p^m too large for the residue ring");
    powers_.push_back(powers_.back() * p_);
  }
  size_ = powers_.back();
}

ResidueRing::Code ResidueRing::add(Code a, Code b) const {
  if (field_.kind() == FieldKind::Mixed) {
    Code s = a + b;
    return s >= size_ ? s - size_ : s;
  }
  Code out = 0;
  for (int i = 0; i < m_; ++i) {
    Code d = (a % p_ + b % p_) % p_;
    out += d * powers_[static_cast<std::size_t>(i)];
    a /= p_;
    b /= p_;
  }
  return out;
}

ResidueRing::Code ResidueRing::sub(Code a, Code b) const {
  if (field_.kind() == FieldKind::Mixed) return a >= b ? a - b : a + size_ - b;
  Code out = 0;
  for (int i = 0; i < m_; ++i) {
    Code d = (a % p_ + p_ - b % p_) % p_;
    out += d * powers_[static_cast<std::size_t>(i)];
    a /= p_;
    b /= p_;
  }
  return out;
}

ResidueRing::Code ResidueRing::mul(Code a, Code b) const {
  if (field_.kind() == FieldKind::Mixed)
    return static_cast<Code>((static_cast<unsigned __int128>(a) * b) % size_);
  std::array<Code, 64> da{}, db{};
  for (int i = 0; i < m_; ++i) {
    da[static_cast<std::size_t>(i)] = a % p_;
    db[static_cast<std::size_t>(i)] = b % p_;
    a /= p_;
    b /= p_;
  }
  Code out = 0;
  for (int k = 0; k < m_; ++k) {
    Code s = 0;
    for (int i = 0; i <= k; ++i) s += da[static_cast<std::size_t>(i)] * db[static_cast<std::size_t>(k - i)];
    out += (s % p_) * powers_[static_cast<std::size_t>(k)];
  }
  return out;
}

ResidueRing::Code ResidueRing::from_integer(const Integer& n) const {
  if (field_.kind() == FieldKind::Equal) {
    Integer r = n % static_cast<unsigned long>(p_);
    if (r < 0) r += static_cast<unsigned long>(p_);
    return static_cast<Code>(r.get_ui());
  }
  Integer r = n % Integer(std::to_string(size_));
  if (r < 0) r += Integer(std::to_string(size_));
  return static_cast<Code>(std::stoull(r.get_str()));
}

ResidueRing::Code ResidueRing::from_element(const LocalElement& x) const {
  if (x.is_zero()) return 0;
  if (x.absolute_precision() < m_) throw PrecisionError("element not known modulo pi^" + std::to_string(m_));
  if (x.ord_lower_bound() < 0) throw std::invalid_argument("element is not integral");
  Code out = 0;
  for (int i = 0; i < m_; ++i) out += static_cast<Code>(x.digit_at(i)) * powers_[static_cast<std::size_t>(i)];
  return out;
}

LocalElement ResidueRing::to_element(Code c) const {
  std::vector<int> d;
  for (int i = 0; i < m_; ++i) {
    d.push_back(static_cast<int>(c % p_));
    c /= p_;
  }
  return LocalElement::from_digits(field_, 0, d);
}

int ResidueRing::ord(Code c) const {
  if (c == 0) return m_;
  int v = 0;
  while (c % p_ == 0) {
    c /= p_;
    ++v;
  }
  return v;
}

int ResidueRing::digit(Code c, int i) const { return static_cast<int>((c / powers_.at(static_cast<std::size_t>(i))) % p_); }

ResidueRing::Code ResidueRing::uniformizer_power(int e) const {
  if (e < 0) throw std::invalid_argument("negative power in the residue ring");
  return e >= m_ ? 0 : powers_[static_cast<std::size_t>(e)];
}

ResidueRing::Code ResidueRing::evaluate(const Polynomial& f, std::span<const Code> point) const {
  if (point.size() != f.vars().size()) throw std::invalid_argument("point dimension mismatch");
  Code sum = 0;
  for (const auto& [e, c] : f.terms()) {
    Code t = from_integer(c);
    for (std::size_t i = 0; i < e.size() && t != 0; ++i)
      for (int k = 0; k < e[i]; ++k) t = mul(t, point[i]);
    sum = add(sum, t);
  }
  return sum;
}

ResidueRing::Compiled ResidueRing::compile(const Polynomial& f) const {
  Compiled c;
  c.arity = f.vars().size();
  for (const auto& [e, coeff] : f.terms()) {
    Code k = from_integer(coeff);
    if (k == 0) continue;
    std::vector<std::pair<std::size_t, int>> powers;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] > 0) powers.emplace_back(i, e[i]);
    c.terms.emplace_back(k, std::move(powers));
  }
  return c;
}

ResidueRing::Code ResidueRing::evaluate(const Compiled& f, std::span<const Code> point) const {
  if (point.size() != f.arity) throw std::invalid_argument("point dimension mismatch");
  Code sum = 0;
  for (const auto& [k, powers] : f.terms) {
    Code t = k;
    for (const auto& [i, e] : powers)
      for (int j = 0; j < e && t != 0; ++j) t = mul(t, point[i]);
    sum = add(sum, t);
  }
  return sum;
}

}  // namespace germlab
