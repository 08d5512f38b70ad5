#include "dpmimo/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "dpmimo/errors.hpp"

namespace dpmimo {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); }

double parse_double(const std::string& key, const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "Inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    invalid(key + ": not a number: '" + text + "'");
  }
  if (used != text.size()) invalid(key + ": trailing characters in '" + text + "'");
  return value;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) invalid(key + ": not an integer: '" + text + "'");
  return value;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Field table shared by the parser and the serializer.
struct Field {
  const char* name;
  std::function<void(SystemConfig&, const std::string&)> set;
  std::function<std::string(const SystemConfig&)> get;
};

#define DPMIMO_INT_FIELD(name) \
  Field{#name, [](SystemConfig& c, const std::string& v) { c.name = parse_int<int>(#name, v); }, \
        [](const SystemConfig& c) { return std::to_string(c.name); }}
#define DPMIMO_DOUBLE_FIELD(name) \
  Field{#name, [](SystemConfig& c, const std::string& v) { c.name = parse_double(#name, v); }, \
        [](const SystemConfig& c) { return format_double(c.name); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      DPMIMO_INT_FIELD(M),
      DPMIMO_INT_FIELD(K),
      DPMIMO_INT_FIELD(tau_c),
      DPMIMO_INT_FIELD(tau_p),
      DPMIMO_INT_FIELD(tau_uni_p),
      DPMIMO_DOUBLE_FIELD(xpd_db),
      DPMIMO_INT_FIELD(N_clusters),
      DPMIMO_DOUBLE_FIELD(asd_deg),
      DPMIMO_DOUBLE_FIELD(sigma_sf),
      DPMIMO_DOUBLE_FIELD(noise_dbm),
      DPMIMO_DOUBLE_FIELD(p_kV),
      DPMIMO_DOUBLE_FIELD(p_kH),
      DPMIMO_DOUBLE_FIELD(rho_kV),
      DPMIMO_DOUBLE_FIELD(rho_kH),
      DPMIMO_DOUBLE_FIELD(p_uni),
      DPMIMO_DOUBLE_FIELD(rho_uni),
      DPMIMO_DOUBLE_FIELD(bandwidth_mhz),
      Field{"seed",
            [](SystemConfig& c, const std::string& v) {
              c.seed = parse_int<std::uint64_t>("seed", v);
            },
            [](const SystemConfig& c) { return std::to_string(c.seed); }},
      DPMIMO_INT_FIELD(drops),
      DPMIMO_INT_FIELD(mc_trials),
  };
  return table;
}

#undef DPMIMO_INT_FIELD
#undef DPMIMO_DOUBLE_FIELD

}  // namespace

double SystemConfig::noise_var_mw() const { return std::pow(10.0, noise_dbm / 10.0); }

void SystemConfig::validate() const {
  if (M < 2 || M % 2 != 0) invalid("M must be a positive even number");
  if (K < 1) invalid("K must be at least 1");
  if (tau_p != 0 && tau_p != 2 * K) invalid("tau_p must equal 2K (or 0 for the default)");
  if (2 * K > tau_c) invalid("2K must not exceed tau_c");
  if (uni_pilot_length() < K || uni_pilot_length() >= tau_c) {
    invalid("tau_uni_p must lie in [K, tau_c)");
  }
  if (pilot_length() >= tau_c) invalid("tau_p must be below tau_c");
  if (std::isnan(xpd_db)) invalid("xpd_db is NaN");
  if (N_clusters < 1) invalid("N_clusters must be at least 1");
  if (!(asd_deg >= 0.0)) invalid("asd_deg must be >= 0");
  if (!(sigma_sf >= 0.0)) invalid("sigma_sf must be >= 0");
  if (!std::isfinite(noise_dbm)) invalid("noise_dbm must be finite");
  for (double p : {p_kV, p_kH, rho_kV, rho_kH, p_uni, rho_uni}) {
    if (!(p >= 0.0) || !std::isfinite(p)) invalid("powers must be finite and >= 0");
  }
  if (drops < 1) invalid("drops must be at least 1");
  if (mc_trials < 100) invalid("mc_trials must be at least 100");
}

SystemConfig parse_config(std::istream& in) {
  std::map<std::string, const Field*> by_name;
  for (const auto& f : fields()) by_name[f.name] = &f;

  SystemConfig config;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      invalid("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = by_name.find(key);
    if (it == by_name.end()) invalid("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) invalid("line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    it->second->set(config, value);
  }
  config.validate();
  return config;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const SystemConfig& config) {
  std::ostringstream out;
  for (const auto& f : fields()) out << f.name << " = " << f.get(config) << '\n';
  return out.str();
}

std::string config_digest(const SystemConfig& config) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(config)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace dpmimo
