#include "wagner/report.hpp"

#include <cmath>
#include <cstdio>

namespace wagner::report {

std::string format_double(double value) {
  if (std::isnan(value)) return "\"nan\"";
  if (std::isinf(value)) return value > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value == 0.0 ? 0.0 : value);
  return buf;
}

Value Value::object() {
  Value v;
  v.kind_ = Kind::Object;
  return v;
}

Value Value::array() {
  Value v;
  v.kind_ = Kind::Array;
  return v;
}

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.bool_ = b;
  return v;
}

Value Value::integer(std::int64_t i) {
  Value v;
  v.kind_ = Kind::Int;
  v.int_ = i;
  return v;
}

Value Value::number(double d) {
  Value v;
  v.kind_ = Kind::Double;
  v.double_ = d;
  return v;
}

Value Value::string(std::string s) {
  Value v;
  v.kind_ = Kind::String;
  v.string_ = std::move(s);
  return v;
}

Value Value::of(const Vec& v) {
  Value out = array();
  for (double c : v) out.push(number(c));
  return out;
}

Value Value::of(const Mat& m) {
  Value out = array();
  for (const auto& row : m) out.push(of(row));
  return out;
}

Value Value::of(const Tens3& t) {
  Value out = array();
  for (const auto& mat : t) out.push(of(mat));
  return out;
}

Value& Value::set(std::string key, Value v) {
  fields_.emplace_back(std::move(key), std::move(v));
  return *this;
}

Value& Value::push(Value v) {
  items_.push_back(std::move(v));
  return *this;
}

namespace {

void write_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

void indent(std::string& out, int depth) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
}

}  // namespace

void Value::write(std::string& out, int depth) const {
  switch (kind_) {
    case Kind::Null:
      out += "null";
      break;
    case Kind::Bool:
      out += bool_ ? "true" : "false";
      break;
    case Kind::Int:
      out += std::to_string(int_);
      break;
    case Kind::Double:
      out += format_double(double_);
      break;
    case Kind::String:
      write_escaped(out, string_);
      break;
    case Kind::Array: {
      if (items_.empty()) {
        out += "[]";
        break;
      }
      // Arrays of plain numbers stay on one line; nested ones break.
      bool flat = true;
      for (const Value& v : items_) {
        if (v.kind_ == Kind::Array || v.kind_ == Kind::Object) {
          flat = false;
          break;
        }
      }
      out += '[';
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (flat) {
          if (i) out += ", ";
        } else {
          if (i) out += ',';
          out += '\n';
          indent(out, depth + 1);
        }
        items_[i].write(out, depth + 1);
      }
      if (!flat) {
        out += '\n';
        indent(out, depth);
      }
      out += ']';
      break;
    }
    case Kind::Object: {
      if (fields_.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (i) out += ',';
        out += '\n';
        indent(out, depth + 1);
        write_escaped(out, fields_[i].first);
        out += ": ";
        fields_[i].second.write(out, depth + 1);
      }
      out += '\n';
      indent(out, depth);
      out += '}';
      break;
    }
  }
}

std::string Value::serialize() const {
  std::string out;
  write(out, 0);
  out += '\n';
  return out;
}

}  // namespace wagner::report
