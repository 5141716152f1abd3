#pragma once

// Minimal streaming JSON writer.  Exists so every report prints doubles with
// 17 significant digits (lossless round-trip) and stable key order; parsing
// is done with nlohmann/json.

#include <cstdint>
#include <cstdio>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace isostab {

/// %.17g rendering; the shortest form is not used so that reruns are
/// byte-identical across platforms with the same libc.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class JsonWriter {
 public:
  JsonWriter& begin_object() { return open('{', '}', true); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('[', ']', false); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(std::string_view k) {
    separate();
    out_ += '"';
    escape(k);
    out_ += "\": ";
    pending_value_ = true;
    return *this;
  }

  JsonWriter& value(double v) { return raw(format_double(v)); }
  JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
  JsonWriter& value(int v) { return raw(std::to_string(v)); }
  JsonWriter& value(std::int64_t v) { return raw(std::to_string(v)); }
  JsonWriter& value(std::uint64_t v) { return raw(std::to_string(v)); }
  JsonWriter& value(std::string_view s) {
    separate();
    out_ += '"';
    escape(s);
    out_ += '"';
    return *this;
  }
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }

  template <typename Range>
  JsonWriter& value_array(const Range& r) {
    begin_array();
    for (const auto& v : r) value(static_cast<double>(v));
    return end_array();
  }

  std::string take() {
    out_ += '\n';
    return std::move(out_);
  }

 private:
  struct Level {
    bool object;
    bool first = true;
  };

  JsonWriter& open(char c, char, bool object) {
    separate();
    out_ += c;
    stack_.push_back({object});
    return *this;
  }

  JsonWriter& close(char c) {
    const bool empty = stack_.back().first;
    stack_.pop_back();
    if (!empty) newline_indent();
    out_ += c;
    return *this;
  }

  JsonWriter& raw(std::string_view tok) {
    separate();
    out_ += tok;
    return *this;
  }

  void separate() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (stack_.empty()) return;
    if (!stack_.back().first) out_ += ',';
    stack_.back().first = false;
    newline_indent();
  }

  void newline_indent() {
    out_ += '\n';
    out_.append(2 * stack_.size(), ' ');
  }

  void escape(std::string_view s) {
    for (const char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        case '\r': out_ += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
  }

  std::string out_;
  std::vector<Level> stack_;
  bool pending_value_ = false;
};

}  // namespace isostab
