#include "pitt/eqtok/vocabulary.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pitt/io/hash.hpp"

namespace pitt::eqtok {

Vocabulary::Vocabulary(std::vector<std::string> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& tok = entries_[i];
    if (tok.empty() || tok.find_first_of(" \t\r\n") != std::string::npos) {
      throw std::invalid_argument("vocabulary: token " + std::to_string(i) + " is empty or has whitespace");
    }
    if (!index_.emplace(tok, static_cast<int>(i)).second) {
      throw std::invalid_argument("vocabulary: duplicate token '" + tok + "'");
    }
  }
  auto pad = index_.find(std::string(kPadToken));
  if (pad == index_.end()) throw std::invalid_argument("vocabulary: missing padding token");
  pad_id_ = pad->second;
}

int Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) throw std::out_of_range("vocabulary: unknown token '" + std::string(token) + "'");
  return it->second;
}

bool Vocabulary::contains(std::string_view token) const { return index_.count(std::string(token)) != 0; }

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= entries_.size()) {
    throw std::out_of_range("vocabulary: id " + std::to_string(id) + " out of range [0, " +
                            std::to_string(entries_.size()) + ")");
  }
  return entries_[static_cast<std::size_t>(id)];
}

std::string Vocabulary::manifest() const {
  std::string out;
  for (const auto& tok : entries_) {
    out += tok;
    out += '\n';
  }
  return out;
}

void Vocabulary::save_manifest(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("vocabulary: cannot write " + path.string());
  f << manifest();
}

Vocabulary Vocabulary::from_manifest(std::string_view text) {
  std::vector<std::string> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    entries.push_back(line);
  }
  return Vocabulary(std::move(entries));
}

Vocabulary Vocabulary::load_manifest(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("vocabulary: cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return from_manifest(ss.str());
}

std::string Vocabulary::hash() const { return io::sha256_hex(manifest()); }

const Vocabulary& build_vocabulary() {
  // Order matches data/vocabulary.txt. Append only; never reorder.
  static const Vocabulary vocab(std::vector<std::string>{
      std::string(kPadToken), "Derivative",
      // equation symbols
      "(", ")", "∂", "Σ", "j", "A_j", "l_j", "ω_j", "φ_j", "sin", "t", "u", "x", "y", "+", "-", "*", "/",
      // boundary conditions
      "Neumann", "Dirichlet", "None",
      // numerals
      "0", "1", "2", "3", "4", "5", "6", "7", "8", "9", "10^", "E", "e",
      // delimiters and separator
      ",", ".", "&",
      // 2D symbols
      "∇", "=", "Δ", "·",
      // symbols needed to write the forcing and 2D equations in full
      "w", "ν", "f", "g", "cos", "π", "A"});
  return vocab;
}

}  // namespace pitt::eqtok
