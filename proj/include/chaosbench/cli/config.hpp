#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chaosbench/core/error.hpp"
#include "chaosbench/core/io.hpp"

namespace chaosbench::cli {

namespace detail {

// Character iterator that remembers how far the parser has read, so SAX
// events can be given a line number.
struct TrackingIter {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  const char** mark = nullptr;

  reference operator*() const {
    if (p + 1 > *mark) *mark = p + 1;
    return *p;
  }
  TrackingIter& operator++() {
    ++p;
    return *this;
  }
  TrackingIter operator++(int) {
    TrackingIter t = *this;
    ++p;
    return t;
  }
  bool operator==(const TrackingIter& o) const { return p == o.p; }
  bool operator!=(const TrackingIter& o) const { return p != o.p; }
};

inline int line_at(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Records the line of every object key by path and rejects duplicates.
class KeyLines : public nlohmann::json_sax<json> {
 public:
  KeyLines(const std::string& text, const char** mark, std::string source)
      : text_(text), mark_(mark), source_(std::move(source)) {}

  std::map<std::string, int> lines;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }

  bool start_object(std::size_t) override {
    open(true);
    return true;
  }
  bool key(string_t& k) override {
    Frame& f = stack_.back();
    const int line = line_at(text_, static_cast<std::size_t>(*mark_ - text_.data()));
    if (!f.keys.insert(k).second)
      throw ConfigError(source_ + ":" + std::to_string(line) + ": duplicate key '" + join(k) + "'");
    f.current = k;
    lines[join(k)] = line;
    return true;
  }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override {
    open(false);
    return true;
  }
  bool end_array() override { return close(); }
  bool parse_error(std::size_t pos, const std::string&, const nlohmann::detail::exception& ex) override {
    throw ConfigError(source_ + ":" + std::to_string(line_at(text_, pos)) + ": " + ex.what());
  }

 private:
  struct Frame {
    bool object = true;
    std::set<std::string> keys;
    std::string current;
    std::size_t index = 0;
  };

  std::string join(const std::string& k) const {
    // path of a key inside the innermost object
    std::string s;
    for (std::size_t i = 0; i + 1 < stack_.size(); ++i) {
      const Frame& f = stack_[i];
      if (f.object) s += (s.empty() ? "" : ".") + f.current;
      else s += "[" + std::to_string(f.index) + "]";
    }
    return s + (s.empty() ? "" : ".") + k;
  }
  bool value() {
    if (!stack_.empty() && !stack_.back().object) ++stack_.back().index;
    return true;
  }
  void open(bool object) { stack_.push_back(Frame{object, {}, {}, 0}); }
  bool close() {
    stack_.pop_back();
    return value();
  }

  const std::string& text_;
  const char** mark_;
  std::string source_;
  std::vector<Frame> stack_;
};

}  // namespace detail

/// A parsed JSON document with key line numbers for error messages.
class Document {
 public:
  Document(const std::string& text, std::string source = "config") : source_(std::move(source)) {
    const char* mark = text.data();
    detail::KeyLines sax(text, &mark, source_);
    detail::TrackingIter first{text.data(), &mark}, last{text.data() + text.size(), &mark};
    json::sax_parse(first, last, &sax);
    lines_ = std::move(sax.lines);
    root_ = json::parse(text);
    if (!root_.is_object()) throw ConfigError(source_ + ": top level must be an object");
  }

  static Document from_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError(path.string() + ": no such file");
    return Document(read_file(path), path.string());
  }

  const json& root() const { return root_; }
  const std::string& source() const { return source_; }

  std::string where(const std::string& path) const {
    auto it = lines_.find(path);
    return source_ + (it == lines_.end() ? "" : ":" + std::to_string(it->second)) + ": ";
  }

 private:
  std::string source_;
  json root_;
  std::map<std::string, int> lines_;
};

/// Typed, strict access to one JSON object of a Document.
class Section {
 public:
  Section(const Document& doc, const json& obj, std::string path) : doc_(&doc), obj_(&obj), path_(std::move(path)) {
    if (!obj.is_object()) throw ConfigError(doc.where(path_) + "'" + path_ + "' must be an object");
  }

  std::string key_path(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return obj_->contains(k); }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& k, const std::string& msg) const {
    throw ConfigError(doc_->where(key_path(k)) + "'" + key_path(k) + "' " + msg);
  }

  /// Unknown keys are errors.
  void allow(std::initializer_list<const char*> keys) const {
    for (auto it = obj_->begin(); it != obj_->end(); ++it) {
      bool ok = false;
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) throw ConfigError(doc_->where(key_path(it.key())) + "unknown key '" + key_path(it.key()) + "'");
    }
  }

  const json& raw(const std::string& k) const {
    if (!has(k)) throw ConfigError(doc_->where(path_) + "missing key '" + key_path(k) + "'");
    return obj_->at(k);
  }

  double number(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_number()) fail(k, "must be a number, got " + std::string(v.type_name()));
    return v.get<double>();
  }
  double number(const std::string& k, double def) const { return has(k) ? number(k) : def; }

  std::int64_t integer(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_number_integer()) fail(k, "must be an integer, got " + std::string(v.type_name()));
    return v.get<std::int64_t>();
  }
  std::int64_t integer(const std::string& k, std::int64_t def) const { return has(k) ? integer(k) : def; }
  std::size_t count(const std::string& k, std::size_t def) const {
    const std::int64_t v = integer(k, static_cast<std::int64_t>(def));
    if (v < 0) fail(k, "must be nonnegative");
    return static_cast<std::size_t>(v);
  }
  std::size_t count(const std::string& k) const {
    const std::int64_t v = integer(k);
    if (v < 0) fail(k, "must be nonnegative");
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& k, bool def) const {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_boolean()) fail(k, "must be true or false, got " + std::string(v.type_name()));
    return v.get<bool>();
  }

  std::string string(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_string()) fail(k, "must be a string, got " + std::string(v.type_name()));
    return v.get<std::string>();
  }
  std::string string(const std::string& k, const std::string& def) const { return has(k) ? string(k) : def; }

  std::vector<double> numbers(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_array()) fail(k, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(k, "must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  std::vector<std::size_t> counts(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_array()) fail(k, "must be an array of integers");
    std::vector<std::size_t> out;
    for (const auto& e : v) {
      if (!e.is_number_integer() || e.get<std::int64_t>() < 0) fail(k, "must be an array of nonnegative integers");
      out.push_back(static_cast<std::size_t>(e.get<std::int64_t>()));
    }
    return out;
  }
  // [[re, im], ...]
  std::vector<cplx> complexes(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_array()) fail(k, "must be an array of [re, im] pairs");
    std::vector<cplx> out;
    for (const auto& e : v) {
      if (e.is_number()) {
        out.emplace_back(e.get<double>(), 0.0);
        continue;
      }
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        fail(k, "must be an array of [re, im] pairs");
      out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
  }

  Section child(const std::string& k) const { return Section(*doc_, raw(k), key_path(k)); }
  std::vector<Section> children(const std::string& k) const {
    const json& v = raw(k);
    if (!v.is_array()) fail(k, "must be an array of objects");
    std::vector<Section> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(*doc_, v[i], key_path(k) + "[" + std::to_string(i) + "]");
    return out;
  }

 private:
  const Document* doc_;
  const json* obj_;
  std::string path_;
};

}  // namespace chaosbench::cli
