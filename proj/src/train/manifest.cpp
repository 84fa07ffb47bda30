#include "pitt/train/manifest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pitt::train {

namespace {

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw std::invalid_argument("seeds: '" + s + "' is not a non-negative integer");
  return v;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

}  // namespace

void Manifest::validate() const {
  if (dataset.empty()) throw std::invalid_argument("manifest: dataset is required");
  if (seeds.empty()) throw std::invalid_argument("manifest: seed list is empty");
  config.validate();
}

std::vector<std::uint64_t> parse_seeds(const std::string& text, std::uint64_t base) {
  const auto t = trim(text);
  if (t.empty()) throw std::invalid_argument("seeds: empty");
  std::vector<std::uint64_t> out;
  if (t.find(',') == std::string::npos) {
    const auto n = to_u64(t);
    if (n == 0) throw std::invalid_argument("seeds: count must be positive");
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(base + i);
    return out;
  }
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_u64(trim(item)));
  return out;
}

Manifest parse_manifest(const std::string& text) {
  Manifest m;
  std::vector<std::pair<std::string, std::string>> rest;
  std::string seeds;
  for (auto& [k, v] : parse_key_values(text)) {
    if (k == "dataset") m.dataset = v;
    else if (k == "out") m.out = v;
    else if (k == "seeds") seeds = v;
    else rest.emplace_back(k, v);
  }
  m.config = config_from_keys(rest);
  if (!seeds.empty()) m.seeds = parse_seeds(seeds, m.config.seed);
  m.validate();
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read manifest " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_manifest(ss.str());
}

std::string benchmark_name(const TrainConfig& c) {
  switch (c.regime) {
    case Regime::next_step_2d: return "ns-next";
    case Regime::fixed_future: return "ns-ff" + std::to_string(static_cast<int>(std::lround(c.target_time)));
    default: return std::string(eqtok::family_name(c.family));
  }
}

}  // namespace pitt::train
