#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "germlab/denefpas.hpp"
#include "germlab/localfield.hpp"

namespace germlab {

/// Multivariate polynomial with integer coefficients over a fixed variable list.
class Polynomial {
 public:
  using Exponents = std::vector<int>;

  Polynomial() = default;
  explicit Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  static Polynomial constant(std::vector<std::string> vars, const Integer& c);
  static Polynomial variable(std::vector<std::string> vars, std::size_t i);
  /// Expands a VF term; throws std::invalid_argument for names outside vars.
  static Polynomial from_term(const TermPtr& t, const std::vector<std::string>& vars);
  static Polynomial parse(std::string_view text, const std::vector<std::string>& vars);

  const std::vector<std::string>& vars() const { return vars_; }
  const std::map<Exponents, Integer>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree_in(std::size_t i) const;
  int total_degree() const;

  /// Splits f = lead * x_i + rest with rest free of x_i; requires degree_in(i) <= 1.
  std::pair<Polynomial, Polynomial> split_linear(std::size_t i) const;

  LocalElement evaluate(std::span<const LocalElement> point, const FieldSpec& field) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const;
  friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

  std::string to_string() const;

 private:
  void add_term(const Exponents& e, const Integer& c);
  static void check_vars(const Polynomial& a, const Polynomial& b);

  std::vector<std::string> vars_;
  std::map<Exponents, Integer> terms_;
};

/// O / pi^m for Z_p (integers mod p^m) or F_p[[t]] (truncated power series).
/// Elements are coded as integers in [0, p^m) whose base-p digits are the
/// pi-adic digits, so a code doubles as the index of a depth-m coset.
class ResidueRing {
 public:
  using Code = std::uint64_t;

  ResidueRing(const FieldSpec& field, int m);

  const FieldSpec& field() const { return field_; }
  int depth() const { return m_; }
  Code size() const { return size_; }

  Code add(Code a, Code b) const;
  Code sub(Code a, Code b) const;
  Code mul(Code a, Code b) const;
  Code neg(Code a) const { return sub(0, a); }

  Code from_integer(const Integer& n) const;
  /// Requires an integral element known modulo pi^m.
  Code from_element(const LocalElement& x) const;
  LocalElement to_element(Code c) const;
  /// m for the zero class.
  int ord(Code c) const;
  int digit(Code c, int i) const;
  Code uniformizer_power(int e) const;

  Code evaluate(const Polynomial& f, std::span<const Code> point) const;

  /// Coefficients reduced once, for repeated evaluation.
  struct Compiled {
    std::size_t arity = 0;
    std::vector<std::pair<Code, std::vector<std::pair<std::size_t, int>>>> terms;
  };
  Compiled compile(const Polynomial& f) const;
  Code evaluate(const Compiled& f, std::span<const Code> point) const;

 private:
  FieldSpec field_;
  int m_;
  Code p_;
  Code size_;
  std::vector<Code> powers_;
};

}  // namespace germlab
