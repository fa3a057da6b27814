#include "volterra_cli/config.hpp"

#include <cctype>
#include <cmath>

namespace volterra::cli {
namespace {

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

/// Records the line of every value of a document that nlohmann already
/// accepted, keyed by JSON pointer.
class LineIndexer {
 public:
  LineIndexer(const std::string& text, std::map<std::string, std::size_t>& out) : text_(text), out_(out) {}

  void run() {
    skip_space();
    value("");
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string_token() {
    std::string s;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') {
        s += text_[pos_++];
      }
      s += text_[pos_++];
    }
    ++pos_;
    return s;
  }

  void value(const std::string& pointer) {
    out_.emplace(pointer, line_);
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_space();
      while (pos_ < text_.size() && text_[pos_] != '}') {
        const std::string key = nlohmann::json::parse("\"" + string_token() + "\"").get<std::string>();
        skip_space();
        ++pos_;  // colon
        skip_space();
        value(pointer + "/" + escape_pointer_token(key));
        skip_space();
        if (text_[pos_] == ',') ++pos_;
        skip_space();
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      skip_space();
      std::size_t index = 0;
      while (pos_ < text_.size() && text_[pos_] != ']') {
        value(pointer + "/" + std::to_string(index++));
        skip_space();
        if (text_[pos_] == ',') ++pos_;
        skip_space();
      }
      ++pos_;
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != ',' &&
             text_[pos_] != '}' && text_[pos_] != ']')
        ++pos_;
    }
  }

  const std::string& text_;
  std::map<std::string, std::size_t>& out_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

const char* type_name(const nlohmann::json& v) { return v.type_name(); }

}  // namespace

SchemaError::SchemaError(const std::string& message, std::string field, std::size_t line)
    : std::runtime_error(message), field_(std::move(field)), line_(line) {}

Document Document::parse(const std::string& text) {
  Document doc;
  try {
    doc.root_ = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw SchemaError(std::string("malformed JSON: ") + e.what(), "", line);
  }
  if (!doc.root_.is_object()) throw SchemaError("scenario must be a JSON object", "", 1);
  LineIndexer(text, doc.lines_).run();
  return doc;
}

std::size_t Document::line_of(const std::string& pointer) const {
  const auto it = lines_.find(pointer);
  return it == lines_.end() ? 0 : it->second;
}

Node::Node(const Document& doc, const nlohmann::json& value, std::string pointer)
    : doc_(&doc), value_(&value), pointer_(std::move(pointer)), used_(std::make_shared<std::set<std::string>>()) {
  if (!value.is_object())
    throw SchemaError("expected an object", pointer_.empty() ? "/" : pointer_, doc.line_of(pointer_));
}

std::string Node::path(const std::string& key) const { return pointer_ + "/" + escape_pointer_token(key); }

void Node::fail(const std::string& key, const std::string& message) const {
  const std::string p = key.empty() ? pointer_ : path(key);
  throw SchemaError(message, p.empty() ? "/" : p, doc_->line_of(p));
}

void Node::fail_index(const std::string& key, std::size_t index, const std::string& message) const {
  const std::string p = path(key) + "/" + std::to_string(index);
  throw SchemaError(message, p, doc_->line_of(p));
}

bool Node::has(const std::string& key) const { return value_->contains(key); }

const nlohmann::json& Node::get(const std::string& key) const {
  if (!has(key)) fail(key, "missing required field");
  used_->insert(key);
  return value_->at(key);
}

const nlohmann::json& Node::raw(const std::string& key) const { return get(key); }

double Node::number(const std::string& key) const {
  const auto& v = get(key);
  if (!v.is_number()) fail(key, std::string("expected a number, found ") + type_name(v));
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "expected a finite number");
  return x;
}

double Node::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

double Node::positive(const std::string& key) const {
  const double x = number(key);
  if (!(x > 0.0)) fail(key, "expected a positive number");
  return x;
}

double Node::positive(const std::string& key, double fallback) const { return has(key) ? positive(key) : fallback; }

std::uint64_t Node::count(const std::string& key) const {
  const auto& v = get(key);
  if (!v.is_number_unsigned()) fail(key, std::string("expected a non-negative integer, found ") + type_name(v));
  return v.get<std::uint64_t>();
}

std::uint64_t Node::count(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? count(key) : fallback;
}

std::string Node::text(const std::string& key) const {
  const auto& v = get(key);
  if (!v.is_string()) fail(key, std::string("expected a string, found ") + type_name(v));
  return v.get<std::string>();
}

std::string Node::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

std::string Node::choice(const std::string& key, const std::vector<std::string>& allowed) const {
  const std::string v = text(key);
  for (const auto& a : allowed)
    if (a == v) return v;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  fail(key, "unknown value \"" + v + "\" (expected one of: " + list + ")");
}

std::string Node::choice(const std::string& key, const std::vector<std::string>& allowed,
                         const std::string& fallback) const {
  return has(key) ? choice(key, allowed) : fallback;
}

bool Node::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = get(key);
  if (!v.is_boolean()) fail(key, std::string("expected a boolean, found ") + type_name(v));
  return v.get<bool>();
}

std::vector<double> Node::numbers(const std::string& key) const {
  const auto& v = get(key);
  if (!v.is_array()) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
      fail_index(key, i, "expected a finite number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<double> Node::numbers(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? numbers(key) : fallback;
}

std::vector<std::uint64_t> Node::counts(const std::string& key) const {
  const auto& v = get(key);
  if (!v.is_array()) fail(key, "expected an array of non-negative integers");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_unsigned()) fail_index(key, i, "expected a non-negative integer");
    out.push_back(v[i].get<std::uint64_t>());
  }
  return out;
}

std::vector<std::uint64_t> Node::counts(const std::string& key, std::vector<std::uint64_t> fallback) const {
  return has(key) ? counts(key) : fallback;
}

std::vector<std::string> Node::texts(const std::string& key, std::vector<std::string> fallback) const {
  if (!has(key)) return fallback;
  const auto& v = get(key);
  if (!v.is_array()) fail(key, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) fail_index(key, i, "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

Node Node::child(const std::string& key) const {
  const auto& v = get(key);
  if (!v.is_object()) fail(key, std::string("expected an object, found ") + type_name(v));
  return Node(*doc_, v, path(key));
}

std::optional<Node> Node::optional_child(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return child(key);
}

std::vector<Node> Node::children(const std::string& key) const {
  const auto& v = get(key);
  if (!v.is_array()) fail(key, "expected an array of objects");
  std::vector<Node> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_object()) fail_index(key, i, "expected an object");
    out.emplace_back(*doc_, v[i], path(key) + "/" + std::to_string(i));
  }
  return out;
}

void Node::finish() const {
  for (const auto& [key, _] : value_->items())
    if (!used_->count(key)) fail(key, "unknown key \"" + key + "\"");
}

}  // namespace volterra::cli
