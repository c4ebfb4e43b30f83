#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wagner/types.hpp"

namespace wagner::report {

// %.17g with -0 collapsed to 0, so equal doubles always render equally.
std::string format_double(double value);

// Minimal ordered JSON builder for reports: objects keep insertion order and
// every double goes through format_double, which makes serialization a pure
// function of the inserted values — identical inputs give identical bytes.
class Value {
 public:
  Value() = default;  // null

  static Value object();
  static Value array();
  static Value boolean(bool b);
  static Value integer(std::int64_t i);
  static Value number(double d);
  static Value string(std::string s);

  static Value of(const Vec& v);
  static Value of(const Mat& m);
  static Value of(const Tens3& t);

  Value& set(std::string key, Value v);  // object field, insertion-ordered
  Value& push(Value v);                  // array element

  std::string serialize() const;  // 2-space indent, ends with a newline

 private:
  enum class Kind { Null, Object, Array, Bool, Int, Double, String };

  Kind kind_ = Kind::Null;
  bool bool_ = false;
  std::int64_t int_ = 0;
  double double_ = 0.0;
  std::string string_;
  std::vector<std::pair<std::string, Value>> fields_;
  std::vector<Value> items_;

  void write(std::string& out, int depth) const;
};

}  // namespace wagner::report
