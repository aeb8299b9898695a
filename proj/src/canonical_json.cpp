#include "setree/canonical_json.hpp"

#include <cmath>
#include <cstdio>

namespace setree {

namespace {

void write(const nlohmann::json& j, std::string& out, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent > 0) {
      out += '\n';
      out.append(static_cast<std::size_t>(indent * d), ' ');
    }
  };
  switch (j.type()) {
  case nlohmann::json::value_t::object: {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += '{';
    bool first = true;
    // nlohmann::json objects are std::map backed, so iteration is key-sorted.
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) {
        out += ',';
      }
      first = false;
      newline(depth + 1);
      out += nlohmann::json(it.key()).dump();
      out += indent > 0 ? ": " : ":";
      write(it.value(), out, indent, depth + 1);
    }
    newline(depth);
    out += '}';
    return;
  }
  case nlohmann::json::value_t::array: {
    if (j.empty()) {
      out += "[]";
      return;
    }
    out += '[';
    bool first = true;
    for (const auto& item : j) {
      if (!first) {
        out += ',';
      }
      first = false;
      newline(depth + 1);
      write(item, out, indent, depth + 1);
    }
    newline(depth);
    out += ']';
    return;
  }
  case nlohmann::json::value_t::number_float:
    out += format_real(j.get<double>());
    return;
  default:
    out += j.dump();
    return;
  }
}

} // namespace

std::string format_real(double value) {
  if (!std::isfinite(value)) {
    return "null";
  }
  if (value == 0.0) {
    return "0.0";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string canonical_json(const nlohmann::json& doc) {
  std::string out;
  write(doc, out, 0, 0);
  return out;
}

std::string canonical_json_pretty(const nlohmann::json& doc) {
  std::string out;
  write(doc, out, 2, 0);
  out += '\n';
  return out;
}

} // namespace setree
