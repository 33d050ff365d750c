#include "levrep/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace levrep {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    // Accept integral values written in floating form, e.g. 3e5.
    const double d = to_double(key, text);
    if (d < 0 || d != static_cast<double>(static_cast<std::uint64_t>(d)))
      throw ConfigError("key '" + key + "': '" + text + "' is not a non-negative integer");
    return static_cast<std::uint64_t>(d);
  }
  return v;
}

}  // namespace

std::string format_number(double value) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", value);
  return buf.data();
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw IoError("csv row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(trim(cell));
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(to_double(path.string(), trim(cell)));
    if (row.size() != t.header.size()) throw IoError("ragged row in " + path.string());
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::stringstream items{std::string(text)};
  std::string item;
  while (std::getline(items, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in number list '" + std::string(text) + "'");
    if (item.find(':') == std::string::npos) {
      out.push_back(to_double("list", item));
      continue;
    }
    std::stringstream parts(item);
    std::vector<double> range;
    std::string part;
    while (std::getline(parts, part, ':')) range.push_back(to_double("range", trim(part)));
    if (range.size() != 3 || !(range[2] > 0) || range[1] < range[0])
      throw ConfigError("range '" + item + "' must be start:stop:step with step > 0 and stop >= start");
    const auto n = static_cast<std::int64_t>(std::floor((range[1] - range[0]) / range[2] + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i) out.push_back(range[0] + static_cast<double>(i) * range[2]);
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 initialisation failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::string hex;
  constexpr char kHex[] = "0123456789abcdef";
  for (unsigned i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 15];
  }
  return hex;
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

KeyValues config_to_key_values(const EnsembleConfig& c) {
  KeyValues kv;
  kv["system"] = std::string(to_string(c.system));
  kv["energy"] = format_number(c.energy);
  kv["window"] = format_number(c.window_width);
  kv["members"] = std::to_string(c.member_count);
  kv["seed"] = std::to_string(c.seed);
  kv["param-mean"] = format_number(c.param_law.mean);
  kv["param-spread"] = format_number(c.param_law.spread);
  kv["param-lower"] = format_number(c.param_law.lower_cut);
  kv["param-upper"] = format_number(c.param_law.upper_cut);
  kv["spread-kind"] = c.param_law.spread_kind == SpreadKind::StdDev ? "std" : "hwhm";
  return kv;
}

EnsembleConfig config_from_key_values(const KeyValues& kv, EnsembleConfig base) {
  if (auto it = kv.find("system"); it != kv.end()) {
    const SystemKind system = parse_system(it->second);
    if (system != base.system) base = EnsembleConfig::defaults(system);
  }
  auto num = [&](const char* key, double& target) {
    if (auto it = kv.find(key); it != kv.end()) target = to_double(key, it->second);
  };
  num("energy", base.energy);
  num("window", base.window_width);
  if (auto it = kv.find("members"); it != kv.end()) base.member_count = to_u64("members", it->second);
  if (auto it = kv.find("seed"); it != kv.end()) base.seed = to_u64("seed", it->second);
  for (const char* prefix : {"param", "alpha", "beta"}) {
    const std::string p(prefix);
    num((p + "-mean").c_str(), base.param_law.mean);
    num((p + "-spread").c_str(), base.param_law.spread);
    num((p + "-lower").c_str(), base.param_law.lower_cut);
    num((p + "-upper").c_str(), base.param_law.upper_cut);
  }
  if (auto it = kv.find("spread-kind"); it != kv.end()) {
    if (it->second == "std") base.param_law.spread_kind = SpreadKind::StdDev;
    else if (it->second == "hwhm") base.param_law.spread_kind = SpreadKind::HalfWidthHalfMax;
    else throw ConfigError("spread-kind must be std or hwhm");
  }
  return base;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "# levrep run manifest\n";
  out << "tool_version = " << kToolVersion << '\n';
  out << "command = " << m.command << '\n';
  if (m.config)
    for (const auto& [k, v] : config_to_key_values(*m.config)) out << k << " = " << v << '\n';
  for (const auto& [k, v] : m.settings) out << k << " = " << v << '\n';
  out << "threads = " << m.threads << '\n';
  out << "duration_seconds = " << format_number(m.duration_seconds) << '\n';
  const auto dir = path.parent_path();
  for (const auto& [name, file] : m.outputs) {
    out << "output." << name << " = " << file << '\n';
    out << "sha256." << name << " = " << sha256_file(dir / file) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

ManifestCheck verify_manifest(const std::filesystem::path& path) {
  const KeyValues kv = read_key_values(path);
  const auto dir = path.parent_path();
  ManifestCheck check;
  for (const auto& [key, file] : kv) {
    if (!key.starts_with("output.")) continue;
    const std::string name = key.substr(7);
    const auto expected = kv.find("sha256." + name);
    ++check.checked;
    if (!std::filesystem::exists(dir / file) || expected == kv.end()) {
      check.missing.push_back(file);
      continue;
    }
    if (sha256_file(dir / file) != expected->second) check.mismatched.push_back(file);
  }
  return check;
}

}  // namespace levrep
