#include "germlab/denefpas.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "germlab/parallel.hpp"

namespace germlab {

std::string to_string(Sort s) {
  switch (s) {
    case Sort::VF: return "VF";
    case Sort::RF: return "RF";
    case Sort::VG: return "VG";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Lexer.

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

const std::set<std::string> kKeywords = {"vf", "rf", "vg", "exists", "forall", "in", "ord", "ac",
                                         "ball", "mod", "true", "false", "RF", "VG", "VF"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(c)) {
      while (i < src.size() && std::isalnum(static_cast<unsigned char>(src[i]))) ++i;
      std::string word(src.substr(start, i - start));
      bool var_shape = std::islower(static_cast<unsigned char>(word[0]));
      if (!var_shape && !kKeywords.count(word)) throw SyntaxError("unknown word '" + word + "'", start);
      out.push_back({Tok::Ident, word, start});
      continue;
    }
    if (std::isdigit(c)) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      out.push_back({Tok::Int, std::string(src.substr(start, i - start)), start});
      continue;
    }
    if (src.compare(i, 3, "\xE2\x88\x92") == 0) {  // U+2212
      out.push_back({Tok::Sym, "-", start});
      i += 3;
      continue;
    }
    static const char* two[] = {"!=", "<=", ">=", "&&", "||", ".."};
    bool matched = false;
    for (const char* t : two)
      if (src.compare(i, 2, t) == 0) {
        out.push_back({Tok::Sym, t, start});
        i += 2;
        matched = true;
        break;
      }
    if (matched) continue;
    if (std::string_view("+-*^()=<>!,;:[]").find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back({Tok::Sym, std::string(1, static_cast<char>(c)), start});
      ++i;
      continue;
    }
    throw SyntaxError(std::string("unexpected character '") + static_cast<char>(c) + "'", start);
  }
  out.push_back({Tok::End, "", src.size()});
  return out;
}

// ---------------------------------------------------------------------------
// Parser producing an untyped tree (sorts are filled in by inference).

TermPtr make_term(Term::Op op, std::vector<TermPtr> args = {}) {
  auto t = std::make_shared<Term>();
  t->op = op;
  t->args = std::move(args);
  return t;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  std::vector<Variable> declarations() {
    std::vector<Variable> decls;
    while (peek_ident("vf") || peek_ident("rf") || peek_ident("vg")) {
      const std::string kw = toks_[pos_].text;
      Sort s = kw == "vf" ? Sort::VF : kw == "rf" ? Sort::RF : Sort::VG;
      ++pos_;
      for (;;) {
        std::string name = variable_name();
        for (const auto& d : decls)
          if (d.name == name) throw SyntaxError("variable '" + name + "' declared twice", toks_[pos_ - 1].pos);
        decls.push_back({name, s});
        if (!accept(",")) break;
      }
      expect(";");
    }
    return decls;
  }

  FormulaPtr formula() {
    if (peek_ident("exists") || peek_ident("forall")) return quantifier();
    return disjunction();
  }

  TermPtr term() {
    TermPtr t = product();
    for (;;) {
      if (accept("+")) t = make_term(Term::Op::Add, {t, product()});
      else if (accept("-")) t = make_term(Term::Op::Sub, {t, product()});
      else return t;
    }
  }

  void finish() {
    if (toks_[pos_].kind != Tok::End) throw SyntaxError("unexpected '" + toks_[pos_].text + "'", toks_[pos_].pos);
  }

 private:
  FormulaPtr quantifier() {
    auto node = std::make_shared<FormulaNode>();
    node->kind = toks_[pos_].text == "exists" ? FormulaNode::Kind::Exists : FormulaNode::Kind::Forall;
    ++pos_;
    node->var = variable_name();
    expect_ident("in");
    if (accept_ident("RF")) {
      node->domain = FormulaNode::Domain::RF;
    } else if (accept("[")) {
      node->domain = FormulaNode::Domain::Interval;
      node->lo = signed_int();
      expect("..");
      node->hi = signed_int();
      expect("]");
      if (node->hi < node->lo) throw SyntaxError("empty interval", toks_[pos_ - 1].pos);
    } else if (accept_ident("ball")) {
      node->domain = FormulaNode::Domain::Ball;
      expect("(");
      node->center = term();
      expect(",");
      node->radius = static_cast<int>(signed_int());
      expect(")");
    } else if (peek_ident("VF") || peek_ident("VG")) {
      throw SyntaxError("quantifiers over " + toks_[pos_].text + " must be bounded (use ball(c, r) or [a..b])",
                        toks_[pos_].pos);
    } else {
      throw SyntaxError("expected RF, [a..b] or ball(c, r)", toks_[pos_].pos);
    }
    expect(":");
    node->a = formula();
    return node;
  }

  FormulaPtr disjunction() {
    FormulaPtr f = conjunction();
    while (accept("||")) f = binary(FormulaNode::Kind::Or, f, conjunction());
    return f;
  }

  FormulaPtr conjunction() {
    FormulaPtr f = negation();
    while (accept("&&")) f = binary(FormulaNode::Kind::And, f, negation());
    return f;
  }

  FormulaPtr negation() {
    if (accept("!")) {
      auto node = std::make_shared<FormulaNode>();
      node->kind = FormulaNode::Kind::Not;
      node->a = negation();
      return node;
    }
    if (peek_ident("exists") || peek_ident("forall")) return quantifier();
    return atom();
  }

  FormulaPtr atom() {
    if (accept_ident("true")) return constant(true);
    if (accept_ident("false")) return constant(false);
    const std::size_t save = pos_;
    std::optional<SyntaxError> first;
    try {
      return comparison();
    } catch (const SyntaxError& e) {
      first = e;
    }
    pos_ = save;
    if (accept("(")) {
      try {
        FormulaPtr f = formula();
        expect(")");
        return f;
      } catch (const SyntaxError& e) {
        if (e.position() >= first->position()) throw;
      }
    }
    throw *first;
  }

  FormulaPtr comparison() {
    TermPtr lhs = term();
    static const std::pair<const char*, CmpOp> ops[] = {{"=", CmpOp::Eq}, {"!=", CmpOp::Ne}, {"<=", CmpOp::Le},
                                                        {">=", CmpOp::Ge}, {"<", CmpOp::Lt},  {">", CmpOp::Gt}};
    for (auto [text, op] : ops) {
      if (!accept(text)) continue;
      auto node = std::make_shared<FormulaNode>();
      node->kind = FormulaNode::Kind::Cmp;
      node->cmp = op;
      node->lhs = lhs;
      node->rhs = term();
      if (accept_ident("mod")) {
        if (op != CmpOp::Eq) throw SyntaxError("congruence needs '='", toks_[pos_ - 1].pos);
        node->kind = FormulaNode::Kind::Cong;
        node->modulus = signed_int();
        if (node->modulus < 1) throw SyntaxError("modulus must be positive", toks_[pos_ - 1].pos);
      }
      return node;
    }
    throw SyntaxError("expected comparison operator", toks_[pos_].pos);
  }

  TermPtr product() {
    TermPtr t = unary_term();
    while (accept("*")) t = make_term(Term::Op::Mul, {t, unary_term()});
    return t;
  }

  TermPtr unary_term() {
    if (accept("-")) return make_term(Term::Op::Neg, {unary_term()});
    return power();
  }

  TermPtr power() {
    TermPtr base = primary();
    if (accept("^")) {
      if (toks_[pos_].kind != Tok::Int) throw SyntaxError("exponent must be a nonnegative integer", toks_[pos_].pos);
      auto t = std::make_shared<Term>();
      t->op = Term::Op::Pow;
      t->exponent = std::stol(toks_[pos_++].text);
      t->args = {base};
      return t;
    }
    return base;
  }

  TermPtr primary() {
    const Token& tok = toks_[pos_];
    if (tok.kind == Tok::Int) {
      ++pos_;
      auto t = std::make_shared<Term>();
      t->op = Term::Op::Const;
      t->value = Integer(tok.text);
      return t;
    }
    if (accept_ident("ord")) {
      expect("(");
      TermPtr arg = term();
      expect(")");
      return make_term(Term::Op::Ord, {arg});
    }
    if (accept_ident("ac")) {
      expect("(");
      TermPtr arg = term();
      expect(")");
      return make_term(Term::Op::Ac, {arg});
    }
    if (tok.kind == Tok::Ident && !kKeywords.count(tok.text)) {
      ++pos_;
      auto t = std::make_shared<Term>();
      t->op = Term::Op::Var;
      t->name = tok.text;
      return t;
    }
    if (accept("(")) {
      TermPtr t = term();
      expect(")");
      return t;
    }
    throw SyntaxError("expected term", tok.pos);
  }

  static FormulaPtr binary(FormulaNode::Kind k, FormulaPtr a, FormulaPtr b) {
    auto node = std::make_shared<FormulaNode>();
    node->kind = k;
    node->a = std::move(a);
    node->b = std::move(b);
    return node;
  }

  static FormulaPtr constant(bool v) {
    auto node = std::make_shared<FormulaNode>();
    node->kind = v ? FormulaNode::Kind::True : FormulaNode::Kind::False;
    return node;
  }

  std::string variable_name() {
    const Token& tok = toks_[pos_];
    if (tok.kind != Tok::Ident || kKeywords.count(tok.text)) throw SyntaxError("expected variable name", tok.pos);
    ++pos_;
    return tok.text;
  }

  long signed_int() {
    bool neg = accept("-");
    if (toks_[pos_].kind != Tok::Int) throw SyntaxError("expected integer", toks_[pos_].pos);
    long v = std::stol(toks_[pos_++].text);
    return neg ? -v : v;
  }

  bool peek_ident(const char* w) const { return toks_[pos_].kind == Tok::Ident && toks_[pos_].text == w; }
  bool accept_ident(const char* w) {
    if (!peek_ident(w)) return false;
    ++pos_;
    return true;
  }
  void expect_ident(const char* w) {
    if (!accept_ident(w)) throw SyntaxError(std::string("expected '") + w + "'", toks_[pos_].pos);
  }
  bool accept(const char* s) {
    if (toks_[pos_].kind == Tok::Sym && toks_[pos_].text == s) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const char* s) {
    if (!accept(s)) throw SyntaxError(std::string("expected '") + s + "'", toks_[pos_].pos);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Sort inference.

class SortChecker {
 public:
  explicit SortChecker(const std::vector<Variable>& declared) {
    for (const auto& v : declared) {
      free_[v.name] = v.sort;
      order_.push_back(v.name);
    }
  }

  // Repeats passes until no undeclared variable gains a sort, then defaults the rest to VF.
  FormulaPtr run(const FormulaPtr& f) {
    for (;;) {
      changed_ = false;
      scopes_.clear();
      final_ = false;
      formula(f);
      if (!changed_) break;
    }
    for (const auto& name : order_)
      if (!free_[name]) free_[name] = Sort::VF;
    final_ = true;
    scopes_.clear();
    return formula(f);
  }

  TermPtr run_term(const TermPtr& t, std::optional<Sort> expected) {
    for (;;) {
      changed_ = false;
      final_ = false;
      term(t, expected);
      if (!changed_) break;
    }
    for (const auto& name : order_)
      if (!free_[name]) free_[name] = Sort::VF;
    final_ = true;
    auto [typed, sort] = term(t, expected ? expected : std::optional<Sort>(Sort::VF));
    (void)sort;
    return typed;
  }

  std::vector<Variable> signature() const {
    std::vector<Variable> sig;
    for (const auto& name : order_) sig.push_back({name, *free_.at(name)});
    return sig;
  }

 private:
  FormulaPtr formula(const FormulaPtr& f) {
    auto out = std::make_shared<FormulaNode>(*f);
    switch (f->kind) {
      case FormulaNode::Kind::True:
      case FormulaNode::Kind::False:
        break;
      case FormulaNode::Kind::Cmp: {
        std::optional<Sort> s = peek_sort(f->lhs);
        if (!s) s = peek_sort(f->rhs);
        if (!s && final_) s = Sort::VG;  // comparison of literals
        auto [l, ls] = term(f->lhs, s);
        auto [r, rs] = term(f->rhs, s ? s : ls);
        out->lhs = l;
        out->rhs = r;
        std::optional<Sort> sort = s ? s : ls ? ls : rs;
        if (final_ && sort != Sort::VG && f->cmp != CmpOp::Eq && f->cmp != CmpOp::Ne)
          throw SortError("order comparison on sort " + to_string(*sort), to_string(f->lhs) + " ? " + to_string(f->rhs));
        break;
      }
      case FormulaNode::Kind::Cong:
        out->lhs = term(f->lhs, Sort::VG).first;
        out->rhs = term(f->rhs, Sort::VG).first;
        break;
      case FormulaNode::Kind::Not:
        out->a = formula(f->a);
        break;
      case FormulaNode::Kind::And:
      case FormulaNode::Kind::Or:
        out->a = formula(f->a);
        out->b = formula(f->b);
        break;
      case FormulaNode::Kind::Exists:
      case FormulaNode::Kind::Forall: {
        Sort s = f->domain == FormulaNode::Domain::RF ? Sort::RF
                 : f->domain == FormulaNode::Domain::Interval ? Sort::VG
                                                              : Sort::VF;
        if (f->domain == FormulaNode::Domain::Ball) out->center = term(f->center, Sort::VF).first;
        scopes_.push_back({f->var, s});
        out->a = formula(f->a);
        scopes_.pop_back();
        break;
      }
    }
    return out;
  }

  std::optional<Sort> lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (it->name == name) return it->sort;
    auto it = free_.find(name);
    if (it == free_.end()) return std::nullopt;
    return it->second;
  }

  // Sort of a term if already determined, without assigning anything.
  std::optional<Sort> peek_sort(const TermPtr& t) const {
    switch (t->op) {
      case Term::Op::Var: return lookup(t->name);
      case Term::Op::Const: return std::nullopt;
      case Term::Op::Ord: return Sort::VG;
      case Term::Op::Ac: return Sort::RF;
      default:
        for (const auto& a : t->args)
          if (auto s = peek_sort(a)) return s;
        return std::nullopt;
    }
  }

  void declare_free(const std::string& name) {
    if (!free_.count(name)) {
      free_[name] = std::nullopt;
      order_.push_back(name);
    }
  }

  std::pair<TermPtr, std::optional<Sort>> term(const TermPtr& t, std::optional<Sort> expected) {
    auto out = std::make_shared<Term>(*t);
    auto mismatch = [&](Sort got) {
      throw SortError("expected sort " + to_string(*expected) + ", found " + to_string(got), to_string(t));
    };
    switch (t->op) {
      case Term::Op::Var: {
        std::optional<Sort> s = lookup(t->name);
        if (!s) {
          declare_free(t->name);
          if (expected) {
            free_[t->name] = expected;
            changed_ = true;
            s = expected;
          }
        }
        if (s && expected && *s != *expected) mismatch(*s);
        if (s) out->sort = *s;
        return {out, s};
      }
      case Term::Op::Const:
        if (expected) out->sort = *expected;
        return {out, expected};
      case Term::Op::Ord:
      case Term::Op::Ac: {
        Sort s = t->op == Term::Op::Ord ? Sort::VG : Sort::RF;
        if (expected && *expected != s) mismatch(s);
        out->args = {term(t->args[0], Sort::VF).first};
        out->sort = s;
        return {out, s};
      }
      default: {
        std::optional<Sort> s = expected ? expected : peek_sort(t);
        std::vector<TermPtr> args;
        for (const auto& a : t->args) {
          auto [typed, as] = term(a, s);
          if (!s) s = as;
          args.push_back(typed);
        }
        if (s && !expected) {
          // Second pass so every child sees the sort found in a later sibling.
          args.clear();
          for (const auto& a : t->args) args.push_back(term(a, s).first);
        }
        out->args = args;
        if (s) out->sort = *s;
        if (final_ && s == Sort::VG) {
          if (t->op == Term::Op::Pow) throw SortError("powers are not Presburger terms", to_string(t));
          if (t->op == Term::Op::Mul && t->args[0]->op != Term::Op::Const && t->args[1]->op != Term::Op::Const)
            throw SortError("VG multiplication needs a literal factor", to_string(t));
        }
        return {out, s};
      }
    }
  }

  std::map<std::string, std::optional<Sort>> free_;
  std::vector<std::string> order_;
  std::vector<Variable> scopes_;
  bool changed_ = false;
  bool final_ = false;
};

const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Le: return "<=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

}  // namespace

std::string to_string(const TermPtr& t) {
  switch (t->op) {
    case Term::Op::Var: return t->name;
    case Term::Op::Const: return t->value.get_str();
    case Term::Op::Add: return "(" + to_string(t->args[0]) + " + " + to_string(t->args[1]) + ")";
    case Term::Op::Sub: return "(" + to_string(t->args[0]) + " - " + to_string(t->args[1]) + ")";
    case Term::Op::Mul: return "(" + to_string(t->args[0]) + " * " + to_string(t->args[1]) + ")";
    case Term::Op::Neg: return "(-" + to_string(t->args[0]) + ")";
    case Term::Op::Pow: return to_string(t->args[0]) + "^" + std::to_string(t->exponent);
    case Term::Op::Ord: return "ord(" + to_string(t->args[0]) + ")";
    case Term::Op::Ac: return "ac(" + to_string(t->args[0]) + ")";
  }
  return "?";
}

std::string to_string(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaNode::Kind::True: return "true";
    case FormulaNode::Kind::False: return "false";
    case FormulaNode::Kind::Cmp: return to_string(f->lhs) + " " + cmp_text(f->cmp) + " " + to_string(f->rhs);
    case FormulaNode::Kind::Cong:
      return to_string(f->lhs) + " = " + to_string(f->rhs) + " mod " + std::to_string(f->modulus);
    case FormulaNode::Kind::Not: return "!(" + to_string(f->a) + ")";
    case FormulaNode::Kind::And: return "(" + to_string(f->a) + " && " + to_string(f->b) + ")";
    case FormulaNode::Kind::Or: return "(" + to_string(f->a) + " || " + to_string(f->b) + ")";
    case FormulaNode::Kind::Exists:
    case FormulaNode::Kind::Forall: {
      std::string q = f->kind == FormulaNode::Kind::Exists ? "exists " : "forall ";
      std::string dom;
      if (f->domain == FormulaNode::Domain::RF) dom = "RF";
      else if (f->domain == FormulaNode::Domain::Interval)
        dom = "[" + std::to_string(f->lo) + ".." + std::to_string(f->hi) + "]";
      else dom = "ball(" + to_string(f->center) + ", " + std::to_string(f->radius) + ")";
      return "(" + q + f->var + " in " + dom + ": " + to_string(f->a) + ")";
    }
  }
  return "?";
}

bool structurally_equal(const TermPtr& a, const TermPtr& b) {
  if (a->op != b->op || a->sort != b->sort || a->name != b->name || a->value != b->value ||
      a->exponent != b->exponent || a->args.size() != b->args.size())
    return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!structurally_equal(a->args[i], b->args[i])) return false;
  return true;
}

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FormulaNode::Kind::True:
    case FormulaNode::Kind::False:
      return true;
    case FormulaNode::Kind::Cmp:
    case FormulaNode::Kind::Cong:
      return a->cmp == b->cmp && a->modulus == b->modulus && structurally_equal(a->lhs, b->lhs) &&
             structurally_equal(a->rhs, b->rhs);
    case FormulaNode::Kind::Not: return structurally_equal(a->a, b->a);
    case FormulaNode::Kind::And:
    case FormulaNode::Kind::Or:
      return structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b);
    case FormulaNode::Kind::Exists:
    case FormulaNode::Kind::Forall:
      if (a->var != b->var || a->domain != b->domain) return false;
      if (a->domain == FormulaNode::Domain::Interval && (a->lo != b->lo || a->hi != b->hi)) return false;
      if (a->domain == FormulaNode::Domain::Ball &&
          (a->radius != b->radius || !structurally_equal(a->center, b->center)))
        return false;
      return structurally_equal(a->a, b->a);
  }
  return false;
}

std::vector<std::string> Formula::vf_variables() const {
  std::vector<std::string> out;
  for (const auto& v : signature_)
    if (v.sort == Sort::VF) out.push_back(v.name);
  return out;
}

std::string Formula::to_string() const {
  std::string decls;
  for (Sort s : {Sort::VF, Sort::RF, Sort::VG}) {
    std::string names;
    for (const auto& v : signature_)
      if (v.sort == s) names += (names.empty() ? "" : ", ") + v.name;
    if (!names.empty()) decls += (s == Sort::VF ? "vf " : s == Sort::RF ? "rf " : "vg ") + names + "; ";
  }
  return decls + germlab::to_string(root_);
}

bool operator==(const Formula& a, const Formula& b) {
  auto sorted = [](std::vector<Variable> v) {
    std::sort(v.begin(), v.end(), [](const Variable& x, const Variable& y) { return x.name < y.name; });
    return v;
  };
  return sorted(a.signature_) == sorted(b.signature_) && structurally_equal(a.root_, b.root_);
}

Formula parse_formula(std::string_view text) {
  Parser parser(text);
  std::vector<Variable> decls = parser.declarations();
  FormulaPtr raw = parser.formula();
  parser.finish();
  SortChecker checker(decls);
  FormulaPtr typed = checker.run(raw);
  return Formula(typed, checker.signature());
}

Formula load_formula(const std::filesystem::path& dp_file) {
  std::ifstream in(dp_file);
  if (!in) throw std::runtime_error("cannot open " + dp_file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_formula(buf.str());
}

TermPtr parse_term(std::string_view text, const std::vector<Variable>& known, std::optional<Sort> expected) {
  Parser parser(text);
  TermPtr raw = parser.term();
  parser.finish();
  SortChecker checker(known);
  return checker.run_term(raw, expected);
}

// ---------------------------------------------------------------------------
// Evaluation.

namespace {

struct Range {
  long lo, hi;
  bool exact() const { return lo == hi; }
};

long sat_add(long a, long b) {
  if (a >= kInfinity || b >= kInfinity) return kInfinity;
  if (a <= -kInfinity || b <= -kInfinity) return -kInfinity;
  long s = a + b;
  return std::clamp(s, -kInfinity, kInfinity);
}

long sat_mul(long c, long a) {
  if (c == 0) return 0;
  if (a >= kInfinity) return c > 0 ? kInfinity : -kInfinity;
  if (a <= -kInfinity) return c > 0 ? -kInfinity : kInfinity;
  __int128 s = static_cast<__int128>(c) * a;
  if (s >= kInfinity) return kInfinity;
  if (s <= -kInfinity) return -kInfinity;
  return static_cast<long>(s);
}

struct Residue {
  int v = 0;
  bool known = true;
};

Truth kleene_not(Truth t) {
  if (t == Truth::Unknown) return t;
  return t == Truth::True ? Truth::False : Truth::True;
}

Truth from_bool(bool b) { return b ? Truth::True : Truth::False; }

class Evaluator {
 public:
  Evaluator(const FieldSpec& field, const EvalOptions& opts, const Environment& env)
      : field_(field), opts_(opts), env_(env) {}

  Truth formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaNode::Kind::True: return Truth::True;
      case FormulaNode::Kind::False: return Truth::False;
      case FormulaNode::Kind::Not: return kleene_not(formula(f->a));
      case FormulaNode::Kind::And: {
        Truth a = formula(f->a);
        if (a == Truth::False) return a;
        Truth b = formula(f->b);
        if (b == Truth::False) return b;
        return a == Truth::True && b == Truth::True ? Truth::True : Truth::Unknown;
      }
      case FormulaNode::Kind::Or: {
        Truth a = formula(f->a);
        if (a == Truth::True) return a;
        Truth b = formula(f->b);
        if (b == Truth::True) return b;
        return a == Truth::False && b == Truth::False ? Truth::False : Truth::Unknown;
      }
      case FormulaNode::Kind::Cmp: return compare(f);
      case FormulaNode::Kind::Cong: {
        Range l = vg(f->lhs), r = vg(f->rhs);
        if (l.lo >= kInfinity || r.lo >= kInfinity) return Truth::False;
        if (!l.exact() || !r.exact()) return Truth::Unknown;
        long d = l.lo - r.lo;
        return from_bool(((d % f->modulus) + f->modulus) % f->modulus == 0);
      }
      case FormulaNode::Kind::Exists:
      case FormulaNode::Kind::Forall: return quantifier(f);
    }
    return Truth::Unknown;
  }

  LocalElement vf(const TermPtr& t) {
    switch (t->op) {
      case Term::Op::Var: return std::get<LocalElement>(lookup(t));
      case Term::Op::Const: {
        LocalElement c = LocalElement::from_integer(field_, t->value);
        if (opts_.coset_precision && !c.is_zero()) c = c.truncated(*opts_.coset_precision);
        return c;
      }
      case Term::Op::Add: return vf(t->args[0]) + vf(t->args[1]);
      case Term::Op::Sub: return vf(t->args[0]) - vf(t->args[1]);
      case Term::Op::Mul: return vf(t->args[0]) * vf(t->args[1]);
      case Term::Op::Neg: return -vf(t->args[0]);
      case Term::Op::Pow: {
        LocalElement base = vf(t->args[0]);
        LocalElement r = LocalElement::one(field_);
        for (long i = 0; i < t->exponent; ++i) r = r * base;
        return r;
      }
      default: throw std::logic_error("VF evaluation of a non-VF term");
    }
  }

  Range vg(const TermPtr& t) {
    switch (t->op) {
      case Term::Op::Var: {
        long v = std::get<long>(lookup(t));
        return {v, v};
      }
      case Term::Op::Const: {
        long v = t->value.get_si();
        return {v, v};
      }
      case Term::Op::Add: {
        Range a = vg(t->args[0]), b = vg(t->args[1]);
        return {sat_add(a.lo, b.lo), sat_add(a.hi, b.hi)};
      }
      case Term::Op::Sub: {
        Range a = vg(t->args[0]), b = vg(t->args[1]);
        Range nb{b.hi >= kInfinity ? -kInfinity : -b.hi, b.lo >= kInfinity ? -kInfinity : -b.lo};
        return {sat_add(a.lo, nb.lo), sat_add(a.hi, nb.hi)};
      }
      case Term::Op::Neg: {
        Range a = vg(t->args[0]);
        return {a.hi >= kInfinity ? -kInfinity : -a.hi, a.lo >= kInfinity ? -kInfinity : -a.lo};
      }
      case Term::Op::Mul: {
        const bool left_const = t->args[0]->op == Term::Op::Const;
        long c = (left_const ? t->args[0] : t->args[1])->value.get_si();
        Range a = vg(left_const ? t->args[1] : t->args[0]);
        long x = sat_mul(c, a.lo), y = sat_mul(c, a.hi);
        return {std::min(x, y), std::max(x, y)};
      }
      case Term::Op::Ord: {
        LocalElement e = vf(t->args[0]);
        if (e.is_zero()) return {kInfinity, kInfinity};
        if (e.is_fuzzy_zero()) return {e.absolute_precision(), kInfinity};
        long v = *e.ord();
        return {v, v};
      }
      default: throw std::logic_error("VG evaluation of a non-VG term");
    }
  }

  Residue rf(const TermPtr& t) {
    const int p = field_.p();
    switch (t->op) {
      case Term::Op::Var: return {std::get<int>(lookup(t)), true};
      case Term::Op::Const: return {static_cast<int>(mpz_fdiv_ui(t->value.get_mpz_t(), static_cast<unsigned long>(p))), true};
      case Term::Op::Add:
      case Term::Op::Sub: {
        Residue a = rf(t->args[0]), b = rf(t->args[1]);
        if (!a.known || !b.known) return {0, false};
        int v = t->op == Term::Op::Add ? a.v + b.v : a.v - b.v;
        return {((v % p) + p) % p, true};
      }
      case Term::Op::Mul: {
        Residue a = rf(t->args[0]), b = rf(t->args[1]);
        if ((a.known && a.v == 0) || (b.known && b.v == 0)) return {0, true};
        if (!a.known || !b.known) return {0, false};
        return {static_cast<int>(static_cast<long>(a.v) * b.v % p), true};
      }
      case Term::Op::Neg: {
        Residue a = rf(t->args[0]);
        return {a.known ? (p - a.v) % p : 0, a.known};
      }
      case Term::Op::Pow: {
        Residue a = rf(t->args[0]);
        if (!a.known) return a;
        long r = 1;
        for (long i = 0; i < t->exponent; ++i) r = r * a.v % p;
        return {static_cast<int>(r), true};
      }
      case Term::Op::Ac: {
        LocalElement e = vf(t->args[0]);
        if (e.is_fuzzy_zero()) return {0, false};
        return {e.ac(), true};
      }
      default: throw std::logic_error("RF evaluation of a non-RF term");
    }
  }

 private:
  const Value& lookup(const TermPtr& t) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (it->first == t->name) return check_sort(t, it->second);
    auto it = env_.find(t->name);
    if (it == env_.end()) throw std::invalid_argument("unbound variable '" + t->name + "'");
    return check_sort(t, it->second);
  }

  static const Value& check_sort(const TermPtr& t, const Value& v) {
    bool ok = (t->sort == Sort::VF && std::holds_alternative<LocalElement>(v)) ||
              (t->sort == Sort::RF && std::holds_alternative<int>(v)) ||
              (t->sort == Sort::VG && std::holds_alternative<long>(v));
    if (!ok) throw std::invalid_argument("variable '" + t->name + "' bound to a value of the wrong sort");
    return v;
  }

  Truth compare(const FormulaPtr& f) {
    const Sort s = f->lhs->sort;
    const bool eq = f->cmp == CmpOp::Eq;
    if (s == Sort::VF) {
      LocalElement d = vf(f->lhs) - vf(f->rhs);
      // Equality up to the working budget counts as equality outside coset mode.
      if (d.is_fuzzy_zero() && (opts_.coset_precision || d.absolute_precision() < field_.precision()))
        return Truth::Unknown;
      if (d.is_fuzzy_zero()) return from_bool(eq);
      return from_bool(d.is_zero() == eq);
    }
    if (s == Sort::RF) {
      Residue a = rf(f->lhs), b = rf(f->rhs);
      if (!a.known || !b.known) return Truth::Unknown;
      return from_bool((a.v == b.v) == eq);
    }
    Range a = vg(f->lhs), b = vg(f->rhs);
    // Decide "a <= b" style questions on intervals.
    auto le = [](Range x, Range y) {
      if (x.hi <= y.lo) return Truth::True;
      if (x.lo > y.hi) return Truth::False;
      return Truth::Unknown;
    };
    auto lt = [](Range x, Range y) {
      if (x.hi < y.lo) return Truth::True;
      if (x.lo >= y.hi) return Truth::False;
      return Truth::Unknown;
    };
    switch (f->cmp) {
      case CmpOp::Eq:
      case CmpOp::Ne: {
        Truth t;
        if (a.exact() && b.exact()) t = from_bool(a.lo == b.lo);
        else if (a.hi < b.lo || b.hi < a.lo) t = Truth::False;
        else t = Truth::Unknown;
        return eq ? t : kleene_not(t);
      }
      case CmpOp::Le: return le(a, b);
      case CmpOp::Ge: return le(b, a);
      case CmpOp::Lt: return lt(a, b);
      case CmpOp::Gt: return lt(b, a);
    }
    return Truth::Unknown;
  }

  Truth quantifier(const FormulaPtr& f) {
    const bool exists = f->kind == FormulaNode::Kind::Exists;
    bool unknown = false;
    auto visit = [&](Value v) {
      scopes_.emplace_back(f->var, std::move(v));
      Truth t = formula(f->a);
      scopes_.pop_back();
      if (t == Truth::Unknown) unknown = true;
      return t == (exists ? Truth::True : Truth::False);
    };
    switch (f->domain) {
      case FormulaNode::Domain::RF:
        for (int r = 0; r < field_.p(); ++r)
          if (visit(r)) return from_bool(exists);
        break;
      case FormulaNode::Domain::Interval:
        for (long n = f->lo; n <= f->hi; ++n)
          if (visit(n)) return from_bool(exists);
        break;
      case FormulaNode::Domain::Ball: {
        LocalElement c = vf(f->center);
        const int depth = std::max(opts_.ball_depth, f->radius);
        for (LocalElement y : coset_representatives({c.is_fuzzy_zero() ? LocalElement::zero(field_) : c, f->radius}, depth)) {
          if (opts_.coset_precision || c.is_fuzzy_zero()) y = y.truncated(std::min(depth, c.absolute_precision()));
          if (visit(y)) return from_bool(exists);
        }
        break;
      }
    }
    if (unknown) return Truth::Unknown;
    return from_bool(!exists);
  }

  const FieldSpec& field_;
  const EvalOptions& opts_;
  const Environment& env_;
  std::vector<std::pair<std::string, Value>> scopes_;
};

bool has_ball_quantifier(const FormulaPtr& f) {
  if (!f) return false;
  if ((f->kind == FormulaNode::Kind::Exists || f->kind == FormulaNode::Kind::Forall) &&
      f->domain == FormulaNode::Domain::Ball)
    return true;
  return has_ball_quantifier(f->a) || has_ball_quantifier(f->b);
}

}  // namespace

Truth evaluate_truth(const FormulaPtr& f, const Environment& env, const FieldSpec& field, const EvalOptions& opts) {
  return Evaluator(field, opts, env).formula(f);
}

EvalResult evaluate(const Formula& f, const Environment& env, const FieldSpec& field, const EvalOptions& opts) {
  for (const auto& v : f.signature())
    if (!env.count(v.name)) throw std::invalid_argument("unbound variable '" + v.name + "'");
  Truth t = evaluate_truth(f.root(), env, field, opts);
  if (t == Truth::Unknown) throw PrecisionError("formula undetermined at the available precision");
  bool stable = true;
  if (has_ball_quantifier(f.root())) {
    EvalOptions finer = opts;
    finer.ball_depth = opts.ball_depth + 1;
    stable = evaluate_truth(f.root(), env, field, finer) == t;
  }
  return {t == Truth::True, stable};
}

std::pair<long, long> evaluate_vg(const TermPtr& t, const Environment& env, const FieldSpec& field,
                                  const EvalOptions& opts) {
  Range r = Evaluator(field, opts, env).vg(t);
  return {r.lo, r.hi};
}

LocalElement evaluate_vf(const TermPtr& t, const Environment& env, const FieldSpec& field, const EvalOptions& opts) {
  return Evaluator(field, opts, env).vf(t);
}

std::vector<LocalElement> coset_representatives(const Ball& ball, int depth) {
  if (depth < ball.radius) throw std::invalid_argument("coset depth below the ball radius");
  const FieldSpec& f = ball.center.spec();
  const int p = f.p();
  const int digits = depth - ball.radius;
  std::size_t count = 1;
  for (int i = 0; i < digits; ++i) {
    count *= static_cast<std::size_t>(p);
    if (count > (std::size_t{1} << 34)) throw std::invalid_argument("coset grid too large");
  }
  std::vector<LocalElement> out;
  out.reserve(count);
  std::vector<int> d(static_cast<std::size_t>(digits), 0);
  for (std::size_t idx = 0; idx < count; ++idx) {
    // Lexicographic with the lowest digit most significant.
    std::size_t rest = idx;
    for (int i = digits - 1; i >= 0; --i) {
      d[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::size_t>(p));
      rest /= static_cast<std::size_t>(p);
    }
    LocalElement offset = LocalElement::from_digits(f, ball.radius, d);
    out.push_back(ball.center + offset);
  }
  return out;
}

PointSet enumerate_points(const DefinableSet& s, const std::map<std::string, Ball>& box, int depth,
                          const FieldSpec& field, const Environment& fixed) {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  const std::vector<std::string> vars = s.vf_variables();
  for (const auto& v : vars)
    if (!box.count(v)) throw std::invalid_argument("box does not cover VF variable '" + v + "'");
  for (const auto& [name, ball] : box)
    if (std::find(vars.begin(), vars.end(), name) == vars.end())
      throw std::invalid_argument("box variable '" + name + "' is not a VF variable of the set");
  for (const auto& v : s.signature())
    if (v.sort != Sort::VF && !fixed.count(v.name))
      throw std::invalid_argument("free " + to_string(v.sort) + " variable '" + v.name + "' needs a value");

  std::vector<std::vector<LocalElement>> grids;
  std::size_t total = 1;
  for (const auto& v : vars) {
    grids.push_back(coset_representatives(box.at(v), depth));
    total *= grids.back().size();
  }
  auto unpack = [&](std::size_t idx) {
    std::vector<LocalElement> point;
    std::vector<std::size_t> pos(vars.size());
    for (std::size_t i = vars.size(); i-- > 0;) {
      pos[i] = idx % grids[i].size();
      idx /= grids[i].size();
    }
    for (std::size_t i = 0; i < vars.size(); ++i) point.push_back(grids[i][pos[i]]);
    return point;
  };
  auto bind = [&](const std::vector<LocalElement>& point) {
    Environment env = fixed;
    for (std::size_t i = 0; i < vars.size(); ++i) env.insert_or_assign(vars[i], point[i]);
    return env;
  };

  EvalOptions rep_opts;
  rep_opts.ball_depth = depth;
  EvalOptions coset_opts = rep_opts;
  coset_opts.coset_precision = depth;

  std::vector<char> member(total, 0), decided(total, 0);
  parallel_for(total, [&](std::size_t idx) {
    std::vector<LocalElement> point = unpack(idx);
    Truth rep = evaluate_truth(s.root(), bind(point), field, rep_opts);
    if (rep == Truth::Unknown) throw PrecisionError("representative membership undetermined");
    member[idx] = rep == Truth::True;
    std::vector<LocalElement> coset;
    for (const auto& x : point) coset.push_back(x.truncated(depth));
    decided[idx] = evaluate_truth(s.root(), bind(coset), field, coset_opts) != Truth::Unknown;
  });

  PointSet out;
  out.cosets = total;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (member[idx]) out.points.push_back(unpack(idx));
    if (!decided[idx]) ++out.undetermined;
  }
  // Deterministic refinement sample: every stride-th coset, all its children.
  bool refine_ok = true;
  const std::size_t samples = std::min<std::size_t>(total, 16);
  const std::size_t stride = std::max<std::size_t>(1, total / samples);
  for (std::size_t idx = 0; idx < total && refine_ok; idx += stride) {
    std::vector<LocalElement> point = unpack(idx);
    std::vector<std::vector<LocalElement>> children{{}};
    for (const auto& x : point) {
      std::vector<std::vector<LocalElement>> next;
      for (const auto& prefix : children)
        for (const auto& c : coset_representatives({x, depth}, depth + 1)) {
          auto t = prefix;
          t.push_back(c);
          next.push_back(t);
        }
      children = std::move(next);
    }
    EvalOptions child_opts = rep_opts;
    child_opts.ball_depth = depth + 1;
    for (const auto& child : children)
      if ((evaluate_truth(s.root(), bind(child), field, child_opts) == Truth::True) != static_cast<bool>(member[idx])) {
        refine_ok = false;
        break;
      }
  }
  out.stable = out.undetermined == 0 && refine_ok;
  return out;
}

}  // namespace germlab
