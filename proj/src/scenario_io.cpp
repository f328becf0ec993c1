// Scenario file reader/writer. The format is the TOML subset the scenario
// files use: [table] headers, dotted or bare keys, strings, numbers and
// (nested) numeric arrays.

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cabletrace/errors.hpp"
#include "cabletrace/world.hpp"

namespace cabletrace {

namespace {

struct Value {
  enum class Kind { Number, String, Array } kind = Kind::Number;
  std::string text;  // raw number token or unquoted string
  std::vector<Value> items;
  int line = 0;
};

class ValueParser {
 public:
  ValueParser(std::string_view src, int line) : src_(src), line_(line) {}

  Value parse_all() {
    Value v = parse_value();
    skip_ws();
    if (pos_ != src_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  Value parse_value() {
    skip_ws();
    if (pos_ >= src_.size()) fail("missing value");
    const char ch = src_[pos_];
    Value v;
    v.line = line_;
    if (ch == '"') {
      v.kind = Value::Kind::String;
      ++pos_;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\') fail("escape sequences are not supported");
        v.text.push_back(src_[pos_++]);
      }
      if (pos_ >= src_.size()) fail("unterminated string");
      ++pos_;
      return v;
    }
    if (ch == '[') {
      v.kind = Value::Kind::Array;
      ++pos_;
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == ']') {
        ++pos_;
        return v;
      }
      for (;;) {
        v.items.push_back(parse_value());
        skip_ws();
        if (pos_ >= src_.size()) fail("unterminated array");
        if (src_[pos_] == ',') {
          ++pos_;
          skip_ws();
          if (pos_ < src_.size() && src_[pos_] == ']') {  // trailing comma
            ++pos_;
            return v;
          }
          continue;
        }
        if (src_[pos_] == ']') {
          ++pos_;
          return v;
        }
        fail("expected ',' or ']' in array");
      }
    }
    const std::size_t start = pos_;
    while (pos_ < src_.size() && src_[pos_] != ',' && src_[pos_] != ']' &&
           !std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    v.text = std::string(src_.substr(start, pos_ - start));
    if (v.text.empty()) fail("missing value");
    return v;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_;
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

int bracket_balance(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  for (char ch : s) {
    if (ch == '"') in_string = !in_string;
    if (in_string) continue;
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
  }
  return depth;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char ch : key) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) {
      return false;
    }
  }
  return key.front() != '.' && key.back() != '.';
}

struct Document {
  std::map<std::string, Value> values;
  int fault_tables = 0;
};

Document parse_document(std::string_view text) {
  Document doc;
  std::string table;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.starts_with("[[")) {
      if (!line.ends_with("]]")) throw ParseError("line " + std::to_string(line_no) + ": malformed table header");
      table = trim(std::string_view(line).substr(2, line.size() - 4));
      if (table != "fault") {
        throw ParseError("line " + std::to_string(line_no) + ": array of tables [[" + table +
                         "]] not supported");
      }
      if (++doc.fault_tables > 1) {
        throw ValidationError("fault: at most one fault per scenario");
      }
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("line " + std::to_string(line_no) + ": malformed table header");
      table = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!valid_key(table)) throw ParseError("line " + std::to_string(line_no) + ": bad table name");
      if (table == "fault" && ++doc.fault_tables > 1) {
        throw ValidationError("fault: at most one fault per scenario");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (!valid_key(key)) throw ParseError("line " + std::to_string(line_no) + ": bad key '" + key + "'");
    std::string value_text = line.substr(eq + 1);
    const int start_line = line_no;
    while (bracket_balance(value_text) > 0) {
      if (!std::getline(in, raw)) {
        throw ParseError("line " + std::to_string(start_line) + ": unterminated array");
      }
      ++line_no;
      value_text += " " + strip_comment(raw);
    }
    const std::string full = table.empty() ? key : table + "." + key;
    if (doc.values.contains(full)) {
      throw ParseError("line " + std::to_string(start_line) + ": duplicate key '" + full + "'");
    }
    doc.values.emplace(full, ValueParser(value_text, start_line).parse_all());
  }
  return doc;
}

double as_number(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::Number) {
    throw ParseError("line " + std::to_string(v.line) + ": " + key + " must be a number");
  }
  std::string t = v.text;
  std::erase(t, '_');
  if (!t.empty() && t.front() == '+') t.erase(0, 1);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParseError("line " + std::to_string(v.line) + ": " + key + ": bad number '" + v.text + "'");
  }
  return out;
}

std::uint64_t as_seed(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::Number) {
    throw ParseError("line " + std::to_string(v.line) + ": " + key + " must be an integer");
  }
  std::string t = v.text;
  std::erase(t, '_');
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParseError("line " + std::to_string(v.line) + ": " + key +
                     ": expected a non-negative integer, got '" + v.text + "'");
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  // keep floats visibly floats
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

WorldScenario load_scenario(std::string_view text) {
  Document doc = parse_document(text);
  std::set<std::string> used;

  auto take = [&](const std::string& key) -> const Value* {
    auto it = doc.values.find(key);
    if (it == doc.values.end()) return nullptr;
    used.insert(key);
    return &it->second;
  };
  auto require = [&](const std::string& key) -> const Value& {
    const Value* v = take(key);
    if (!v) throw ParseError("missing required key '" + key + "'");
    return *v;
  };
  auto number_or = [&](const std::string& key, double fallback) {
    const Value* v = take(key);
    return v ? as_number(*v, key) : fallback;
  };

  const Value& wp = require("route.waypoints");
  if (wp.kind != Value::Kind::Array) {
    throw ParseError("line " + std::to_string(wp.line) + ": route.waypoints must be an array");
  }
  std::vector<Vec2> points;
  for (const Value& item : wp.items) {
    if (item.kind != Value::Kind::Array || item.items.size() != 2) {
      throw ParseError("line " + std::to_string(wp.line) +
                       ": route.waypoints entries must be [x, y] pairs");
    }
    points.push_back({as_number(item.items[0], "route.waypoints"),
                      as_number(item.items[1], "route.waypoints")});
  }

  WorldScenario sc;
  sc.route = CableRoute(std::move(points), as_number(require("route.depth_m"), "route.depth_m"));
  sc.line_current = as_number(require("line.current_a"), "line.current_a");
  sc.line_voltage = as_number(require("line.voltage_v"), "line.voltage_v");
  sc.line_frequency = as_number(require("line.frequency_hz"), "line.frequency_hz");
  sc.noise_seed = as_seed(require("noise.seed"), "noise.seed");
  sc.noise_sigma = as_number(require("noise.sigma_hz"), "noise.sigma_hz");

  const Value* kind = take("fault.kind");
  const Value* pos = take("fault.position_m");
  if (kind || pos || doc.fault_tables > 0) {
    if (!kind || !pos) throw ParseError("fault table needs both 'kind' and 'position_m'");
    if (kind->kind != Value::Kind::String) {
      throw ParseError("line " + std::to_string(kind->line) + ": fault.kind must be a string");
    }
    const auto k = parse_fault_kind(kind->text);
    if (!k) {
      throw ParseError("line " + std::to_string(kind->line) + ": fault.kind '" + kind->text +
                       "' is not one of open, short, earth");
    }
    sc.fault = FaultSpec{*k, as_number(*pos, "fault.position_m")};
  }

  sc.probe.coupling_m2 = number_or("probe.coupling_m2", sc.probe.coupling_m2);
  sc.probe.short_surge = number_or("probe.short_surge", sc.probe.short_surge);
  sc.probe.earth_attenuation = number_or("probe.earth_attenuation", sc.probe.earth_attenuation);

  DetectorSetup& det = sc.detector;
  det.tuned.r = number_or("detector.r_ohm", det.tuned.r);
  det.tuned.rs = number_or("detector.rs_ohm", det.tuned.rs);
  det.tuned.c = number_or("detector.c_f", det.tuned.c);
  det.tuned.v_dd = number_or("detector.vdd_v", det.tuned.v_dd);
  det.tuned.v_d = number_or("detector.vd_v", det.tuned.v_d);
  det.tuned.v_t = number_or("detector.vt_v", det.tuned.v_t);
  det.threshold_v = number_or("detector.threshold_v", det.threshold_v);
  det.match_tolerance = number_or("detector.match_tolerance", det.match_tolerance);

  for (const auto& [key, value] : doc.values) {
    if (!used.contains(key)) {
      throw ParseError("line " + std::to_string(value.line) + ": unknown key '" + key + "'");
    }
  }

  validate(sc);
  return sc;
}

WorldScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::string save_scenario(const WorldScenario& sc) {
  std::ostringstream os;
  os << "[route]\nwaypoints = [";
  const auto& wps = sc.route.waypoints();
  for (std::size_t i = 0; i < wps.size(); ++i) {
    if (i) os << ", ";
    os << '[' << fmt_double(wps[i].x) << ", " << fmt_double(wps[i].y) << ']';
  }
  os << "]\ndepth_m = " << fmt_double(sc.route.depth()) << "\n\n";
  os << "[line]\ncurrent_a = " << fmt_double(sc.line_current)
     << "\nvoltage_v = " << fmt_double(sc.line_voltage)
     << "\nfrequency_hz = " << fmt_double(sc.line_frequency) << "\n\n";
  os << "[noise]\nseed = " << sc.noise_seed << "\nsigma_hz = " << fmt_double(sc.noise_sigma)
     << "\n\n";
  if (sc.fault) {
    os << "[fault]\nkind = \"" << to_string(sc.fault->kind) << "\"\nposition_m = "
       << fmt_double(sc.fault->position) << "\n\n";
  }
  os << "[probe]\ncoupling_m2 = " << fmt_double(sc.probe.coupling_m2)
     << "\nshort_surge = " << fmt_double(sc.probe.short_surge)
     << "\nearth_attenuation = " << fmt_double(sc.probe.earth_attenuation) << "\n\n";
  const DetectorSetup& d = sc.detector;
  os << "[detector]\nr_ohm = " << fmt_double(d.tuned.r) << "\nrs_ohm = " << fmt_double(d.tuned.rs)
     << "\nc_f = " << fmt_double(d.tuned.c) << "\nvdd_v = " << fmt_double(d.tuned.v_dd)
     << "\nvd_v = " << fmt_double(d.tuned.v_d) << "\nvt_v = " << fmt_double(d.tuned.v_t)
     << "\nthreshold_v = " << fmt_double(d.threshold_v)
     << "\nmatch_tolerance = " << fmt_double(d.match_tolerance) << "\n";
  return os.str();
}

}  // namespace cabletrace
