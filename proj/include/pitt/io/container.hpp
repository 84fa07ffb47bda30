#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pitt::io {

enum class DType { f32, f64, i32, i64 };
std::size_t dtype_size(DType t);
std::string_view dtype_name(DType t);
DType parse_dtype(std::string_view name);

struct Array {
  DType dtype = DType::f32;
  std::vector<std::int64_t> shape;
  std::vector<std::byte> bytes;

  std::int64_t elements() const;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Self-describing binary file: magic "PITTCNT1", u64 header length, a JSON header
/// (format version, free-form meta, array directory), then 8-byte aligned little-endian arrays.
class Container {
 public:
  static constexpr int kFormatVersion = 1;

  nlohmann::json meta = nlohmann::json::object();

  template <class T>
  void put(const std::string& name, std::vector<std::int64_t> shape, std::span<const T> values);
  template <class T>
  std::vector<T> get(const std::string& name) const;

  bool has(const std::string& name) const { return arrays_.count(name) != 0; }
  const Array& array(const std::string& name) const;
  const std::vector<std::int64_t>& shape(const std::string& name) const { return array(name).shape; }
  const std::map<std::string, Array>& arrays() const { return arrays_; }

  /// Writes the file and returns its SHA-256. Refuses to replace an existing file unless asked.
  std::string save(const std::filesystem::path& path, bool overwrite = false) const;
  static Container load(const std::filesystem::path& path);
  /// SHA-256 of the exact bytes `save` would write.
  std::string content_hash() const;

 private:
  template <class Sink>
  void write(Sink&& sink) const;

  std::map<std::string, Array> arrays_;
};

std::string file_sha256(const std::filesystem::path& path);

template <class T>
constexpr DType dtype_of() {
  if constexpr (std::is_same_v<T, float>) return DType::f32;
  else if constexpr (std::is_same_v<T, double>) return DType::f64;
  else if constexpr (std::is_same_v<T, std::int32_t>) return DType::i32;
  else {
    static_assert(std::is_same_v<T, std::int64_t>, "unsupported element type");
    return DType::i64;
  }
}

template <class T>
void Container::put(const std::string& name, std::vector<std::int64_t> shape, std::span<const T> values) {
  Array a;
  a.dtype = dtype_of<T>();
  a.shape = std::move(shape);
  if (a.elements() != static_cast<std::int64_t>(values.size())) {
    throw std::invalid_argument("container: array '" + name + "' shape does not match its data");
  }
  a.bytes.resize(values.size_bytes());
  if (!values.empty()) std::memcpy(a.bytes.data(), values.data(), values.size_bytes());
  arrays_[name] = std::move(a);
}

template <class T>
std::vector<T> Container::get(const std::string& name) const {
  const Array& a = array(name);
  if (a.dtype != dtype_of<T>()) {
    throw FormatError("container: array '" + name + "' has dtype " + std::string(dtype_name(a.dtype)));
  }
  std::vector<T> out(static_cast<std::size_t>(a.elements()));
  if (!out.empty()) std::memcpy(out.data(), a.bytes.data(), a.bytes.size());
  return out;
}

}  // namespace pitt::io
