#include "germlab/toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace germlab {

namespace {

class TomlReader {
 public:
  explicit TomlReader(std::string_view text) : text_(text) {}

  nlohmann::json read() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    while (pos_ < text_.size()) {
      skip_blank();
      if (pos_ >= text_.size()) break;
      char c = text_[pos_];
      if (c == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '[') {
        table = header(root);
        end_of_line();
        continue;
      }
      std::string key = bare_key();
      skip_blank();
      expect('=');
      skip_blank();
      if (table->contains(key)) fail("duplicate key '" + key + "'");
      (*table)[key] = value();
      end_of_line();
    }
    return root;
  }

 private:
  nlohmann::json* header(nlohmann::json& root) {
    ++pos_;
    bool array = false;
    if (peek() == '[') {
      array = true;
      ++pos_;
    }
    skip_blank();
    std::string name = bare_key();
    skip_blank();
    expect(']');
    if (array) expect(']');
    if (array) {
      nlohmann::json& list = root[name];
      if (list.is_null()) list = nlohmann::json::array();
      if (!list.is_array()) fail("'" + name + "' is not an array of tables");
      list.push_back(nlohmann::json::object());
      return &list.back();
    }
    if (root.contains(name)) fail("table '" + name + "' defined twice");
    root[name] = nlohmann::json::object();
    return &root[name];
  }

  nlohmann::json value() {
    skip_blank();
    char c = peek();
    if (c == '"') return string();
    if (c == '[') return array();
    if (text_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return true;
    }
    if (text_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return false;
    }
    if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) return integer();
    fail("unsupported value");
  }

  nlohmann::json array() {
    expect('[');
    nlohmann::json out = nlohmann::json::array();
    for (;;) {
      skip_space_and_comments();
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      out.push_back(value());
      skip_space_and_comments();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_space_and_comments();
      expect(']');
      return out;
    }
  }

  nlohmann::json string() {
    expect('"');
    std::string s;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\n') fail("unterminated string");
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
        char e = text_[pos_ + 1];
        s += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        pos_ += 2;
        continue;
      }
      s += text_[pos_++];
    }
    expect('"');
    return s;
  }

  nlohmann::json integer() {
    std::size_t start = pos_;
    if (peek() == '-' || peek() == '+') ++pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    std::string digits;
    for (std::size_t i = start; i < pos_; ++i)
      if (text_[i] != '_') digits += text_[i];
    if (digits.empty() || digits == "-" || digits == "+") fail("expected integer");
    return std::stoll(digits);
  }

  std::string bare_key() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-'))
      ++pos_;
    if (pos_ == start) fail("expected key");
    return std::string(text_.substr(start, pos_ - start));
  }

  void end_of_line() {
    skip_blank();
    if (peek() == '#') skip_comment();
    if (pos_ < text_.size()) {
      if (text_[pos_] != '\n') fail("expected end of line");
      ++pos_;
      ++line_;
    }
  }

  void skip_blank() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }
  void skip_comment() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }
  void skip_space_and_comments() {
    for (;;) {
      skip_blank();
      if (peek() == '#') skip_comment();
      if (peek() == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      return;
    }
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("toml line " + std::to_string(line_) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

nlohmann::json parse_toml(std::string_view text) { return TomlReader(text).read(); }

nlohmann::json load_toml(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str());
}

}  // namespace germlab
