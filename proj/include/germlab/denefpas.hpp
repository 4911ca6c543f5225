#pragma once

#include <climits>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "germlab/localfield.hpp"

namespace germlab {

enum class Sort { VF, RF, VG };
std::string to_string(Sort s);

class SyntaxError : public std::invalid_argument {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : std::invalid_argument(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class SortError : public std::invalid_argument {
 public:
  SortError(const std::string& what, std::string subterm)
      : std::invalid_argument(what + " in '" + subterm + "'"), subterm_(std::move(subterm)) {}
  const std::string& subterm() const { return subterm_; }

 private:
  std::string subterm_;
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Op { Var, Const, Add, Sub, Mul, Neg, Pow, Ord, Ac };
  Op op;
  Sort sort = Sort::VF;
  std::string name;  // Var
  Integer value;     // Const, nonnegative
  long exponent = 0; // Pow
  std::vector<TermPtr> args;
};

struct FormulaNode;
using FormulaPtr = std::shared_ptr<const FormulaNode>;

enum class CmpOp { Eq, Ne, Le, Ge, Lt, Gt };

struct FormulaNode {
  enum class Kind { True, False, Cmp, Cong, Not, And, Or, Exists, Forall };
  enum class Domain { RF, Interval, Ball };
  Kind kind;
  // Cmp / Cong
  CmpOp cmp = CmpOp::Eq;
  TermPtr lhs, rhs;
  long modulus = 0;
  // Not / And / Or / quantifiers
  FormulaPtr a, b;
  // quantifiers
  std::string var;
  Domain domain = Domain::RF;
  long lo = 0, hi = 0;  // Interval
  TermPtr center;       // Ball
  int radius = 0;       // Ball
};

struct Variable {
  std::string name;
  Sort sort;
  friend bool operator==(const Variable&, const Variable&) = default;
};

/// A formula with its ordered free-variable signature (declared variables
/// first, then inferred ones in order of appearance).
class Formula {
 public:
  Formula(FormulaPtr root, std::vector<Variable> signature) : root_(std::move(root)), signature_(std::move(signature)) {}

  const FormulaPtr& root() const { return root_; }
  const std::vector<Variable>& signature() const { return signature_; }
  std::vector<std::string> vf_variables() const;

  /// Declarations followed by the fully parenthesized body.
  std::string to_string() const;
  friend bool operator==(const Formula& a, const Formula& b);

 private:
  FormulaPtr root_;
  std::vector<Variable> signature_;
};

using DefinableSet = Formula;

/// Grammar: optional declarations "vf x, y; rf r; vg n;" then a formula over
/// + - * ^, ord(), ac(), = != <= >= < >, "t = c mod n", && || !, and bounded
/// quantifiers "exists r in RF:", "forall n in [a..b]:", "exists y in ball(c, r):".
/// Undeclared variables get their sort by inference (VF if unconstrained).
Formula parse_formula(std::string_view text);
Formula load_formula(const std::filesystem::path& dp_file);
/// A single term over the given variables (sorts inferred for new ones).
TermPtr parse_term(std::string_view text, const std::vector<Variable>& known, std::optional<Sort> expected = {});

std::string to_string(const TermPtr& t);
std::string to_string(const FormulaPtr& f);
bool structurally_equal(const TermPtr& a, const TermPtr& b);
bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b);

// ---------------------------------------------------------------------------
// Evaluation.

inline constexpr long kInfinity = LONG_MAX / 4;

/// VF element, RF residue (0..p-1), or VG integer (kInfinity for +inf).
using Value = std::variant<LocalElement, int, long>;
using Environment = std::map<std::string, Value>;

enum class Truth { False, True, Unknown };

struct EvalOptions {
  /// Absolute depth at which ball quantifiers enumerate cosets.
  int ball_depth = 3;
  /// Coset mode: integer VF constants and ball cosets are known only modulo
  /// pi^k; VF inputs are expected to be truncated likewise.
  std::optional<int> coset_precision;
};

/// Three-valued (Kleene) interpretation. ord of an element known only to lie
/// in pi^k O is the interval [k, +inf]; ac of it is unknown.
Truth evaluate_truth(const FormulaPtr& f, const Environment& env, const FieldSpec& field, const EvalOptions& opts = {});

struct EvalResult {
  bool value;
  /// Ball quantifiers give the same answer at ball_depth and ball_depth + 1.
  bool stable;
};

/// Strict evaluation: throws PrecisionError if the value is undetermined and
/// std::invalid_argument for unbound or ill-sorted variables.
EvalResult evaluate(const Formula& f, const Environment& env, const FieldSpec& field, const EvalOptions& opts = {});

/// Interval [lo, hi] (hi may be kInfinity) for a VG term.
std::pair<long, long> evaluate_vg(const TermPtr& t, const Environment& env, const FieldSpec& field,
                                  const EvalOptions& opts = {});
LocalElement evaluate_vf(const TermPtr& t, const Environment& env, const FieldSpec& field, const EvalOptions& opts = {});

/// center + pi^radius O.
struct Ball {
  LocalElement center;
  int radius = 0;
};

/// The p^(depth - radius) elements center + pi^radius * (d_0 + ... ) with
/// digits below depth, lexicographic in the digits. Requires depth >= radius.
std::vector<LocalElement> coset_representatives(const Ball& ball, int depth);

struct PointSet {
  /// One tuple per satisfying coset, in the order of the VF signature.
  std::vector<std::vector<LocalElement>> points;
  bool stable = false;
  std::size_t cosets = 0;
  std::size_t undetermined = 0;  ///< cosets whose membership O/pi^k cannot decide
};

/// Depth-k cosets of the box whose representative satisfies S. The flag is
/// set iff every coset's membership is decided modulo pi^k and refining a
/// deterministic sample to k + 1 changes nothing. Non-VF free variables must
/// be bound in fixed.
PointSet enumerate_points(const DefinableSet& s, const std::map<std::string, Ball>& box, int depth,
                          const FieldSpec& field, const Environment& fixed = {});

}  // namespace germlab
