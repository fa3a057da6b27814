#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace volterra::cli {

/// Schema violation in a scenario document. `field` is a JSON pointer and
/// `line` the 1-based line of the offending value (0 when unknown).
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& message, std::string field, std::size_t line);
  const std::string& field() const noexcept { return field_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

/// A parsed scenario document with the source line of every value.
class Document {
 public:
  static Document parse(const std::string& text);

  const nlohmann::json& root() const noexcept { return root_; }
  /// Line of the value at a JSON pointer, or 0.
  std::size_t line_of(const std::string& pointer) const;

 private:
  nlohmann::json root_;
  std::map<std::string, std::size_t> lines_;
};

/// Strict view of one JSON object: every key must be read before finish().
class Node {
 public:
  Node(const Document& doc, const nlohmann::json& value, std::string pointer);

  const std::string& pointer() const noexcept { return pointer_; }
  bool has(const std::string& key) const;

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  double positive(const std::string& key) const;
  double positive(const std::string& key, double fallback) const;
  std::uint64_t count(const std::string& key) const;
  std::uint64_t count(const std::string& key, std::uint64_t fallback) const;
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  /// One of `allowed`.
  std::string choice(const std::string& key, const std::vector<std::string>& allowed) const;
  std::string choice(const std::string& key, const std::vector<std::string>& allowed,
                     const std::string& fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::uint64_t> counts(const std::string& key) const;
  std::vector<std::uint64_t> counts(const std::string& key, std::vector<std::uint64_t> fallback) const;
  std::vector<std::string> texts(const std::string& key, std::vector<std::string> fallback) const;

  Node child(const std::string& key) const;
  std::optional<Node> optional_child(const std::string& key) const;
  /// Array of objects.
  std::vector<Node> children(const std::string& key) const;
  /// The raw value (marks the key as read).
  const nlohmann::json& raw(const std::string& key) const;

  /// Rejects keys that were never read.
  void finish() const;

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  const nlohmann::json& get(const std::string& key) const;
  [[noreturn]] void fail_index(const std::string& key, std::size_t index, const std::string& message) const;
  std::string path(const std::string& key) const;

  const Document* doc_;
  const nlohmann::json* value_;
  std::string pointer_;
  std::shared_ptr<std::set<std::string>> used_;
};

}  // namespace volterra::cli
