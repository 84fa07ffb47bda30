#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pitt::eqtok {

/// Frozen token list. Ids are positions in `entries()`; they never change once shipped.
class Vocabulary {
 public:
  explicit Vocabulary(std::vector<std::string> entries);

  const std::vector<std::string>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  int index_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const;
  int pad_id() const { return pad_id_; }

  /// One token per line, line number = id.
  std::string manifest() const;
  void save_manifest(const std::filesystem::path& path) const;
  static Vocabulary load_manifest(const std::filesystem::path& path);
  static Vocabulary from_manifest(std::string_view text);

  /// Hex SHA-256 of the manifest text.
  std::string hash() const;

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, int> index_;
  int pad_id_ = 0;
};

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr int kVocabularyVersion = 1;

/// The canonical vocabulary.
const Vocabulary& build_vocabulary();

}  // namespace pitt::eqtok
