#include "pitt/io/container.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "pitt/io/hash.hpp"

static_assert(std::endian::native == std::endian::little, "container format assumes a little-endian host");

namespace pitt::io {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'I', 'T', 'T', 'C', 'N', 'T', '1'};
constexpr std::size_t kAlign = 8;

std::size_t padded(std::size_t n) { return (n + kAlign - 1) / kAlign * kAlign; }

}  // namespace

std::size_t dtype_size(DType t) {
  switch (t) {
    case DType::f32:
    case DType::i32: return 4;
    case DType::f64:
    case DType::i64: return 8;
  }
  return 0;
}

std::string_view dtype_name(DType t) {
  switch (t) {
    case DType::f32: return "f32";
    case DType::f64: return "f64";
    case DType::i32: return "i32";
    case DType::i64: return "i64";
  }
  return "?";
}

DType parse_dtype(std::string_view name) {
  for (DType t : {DType::f32, DType::f64, DType::i32, DType::i64})
    if (dtype_name(t) == name) return t;
  throw FormatError("container: unknown dtype '" + std::string(name) + "'");
}

std::int64_t Array::elements() const {
  std::int64_t n = 1;
  for (auto s : shape) {
    if (s < 0) throw FormatError("container: negative dimension");
    n *= s;
  }
  return n;
}

const Array& Container::array(const std::string& name) const {
  auto it = arrays_.find(name);
  if (it == arrays_.end()) throw FormatError("container: no array named '" + name + "'");
  return it->second;
}

template <class Sink>
void Container::write(Sink&& sink) const {
  nlohmann::json dir = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& [name, a] : arrays_) {
    dir.push_back({{"name", name},
                   {"dtype", dtype_name(a.dtype)},
                   {"shape", a.shape},
                   {"offset", offset},
                   {"nbytes", a.bytes.size()}});
    offset += padded(a.bytes.size());
  }
  nlohmann::json header = {{"format_version", kFormatVersion}, {"meta", meta}, {"arrays", dir}};
  std::string text = header.dump();
  text.resize(padded(text.size()), ' ');
  const std::uint64_t len = text.size();
  static constexpr std::array<std::byte, kAlign> zeros{};

  sink(std::as_bytes(std::span(kMagic)));
  sink(std::as_bytes(std::span(&len, 1)));
  sink(std::as_bytes(std::span(text.data(), text.size())));
  for (const auto& [name, a] : arrays_) {
    sink(std::span<const std::byte>(a.bytes));
    sink(std::span(zeros.data(), padded(a.bytes.size()) - a.bytes.size()));
  }
}

std::string Container::content_hash() const {
  Sha256 h;
  write([&](std::span<const std::byte> b) { h.update(b); });
  return h.finish();
}

std::string Container::save(const std::filesystem::path& path, bool overwrite) const {
  if (!overwrite && std::filesystem::exists(path)) {
    throw std::runtime_error("container: " + path.string() + " exists (pass --overwrite to replace it)");
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write beside the target and rename, so readers never see a partial file.
  auto tmp = path;
  tmp += ".partial";
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("container: cannot write " + path.string());
  Sha256 h;
  write([&](std::span<const std::byte> b) {
    h.update(b);
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  });
  out.close();
  if (!out) throw std::runtime_error("container: write failed for " + path.string());
  std::filesystem::rename(tmp, path);
  return h.finish();
}

Container Container::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("container: cannot open " + path.string());
  std::array<char, 8> magic{};
  std::uint64_t len = 0;
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || magic != kMagic) throw FormatError("container: " + path.string() + " is not a container file");
  const auto file_size = std::filesystem::file_size(path);
  if (len > file_size) throw FormatError("container: header length exceeds file size");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw FormatError("container: truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("container: bad header: ") + e.what());
  }
  if (header.value("format_version", -1) != kFormatVersion) {
    throw FormatError("container: unsupported format version " + header.value("format_version", nlohmann::json()).dump());
  }
  Container c;
  c.meta = header.at("meta");
  const std::uint64_t data_start = kMagic.size() + sizeof len + len;
  for (const auto& entry : header.at("arrays")) {
    Array a;
    a.dtype = parse_dtype(entry.at("dtype").get<std::string>());
    a.shape = entry.at("shape").get<std::vector<std::int64_t>>();
    const auto nbytes = entry.at("nbytes").get<std::uint64_t>();
    const auto offset = entry.at("offset").get<std::uint64_t>();
    if (static_cast<std::uint64_t>(a.elements()) * dtype_size(a.dtype) != nbytes) {
      throw FormatError("container: array '" + entry.at("name").get<std::string>() + "' size mismatch");
    }
    if (data_start + offset + nbytes > file_size) throw FormatError("container: array data past end of file");
    a.bytes.resize(nbytes);
    in.seekg(static_cast<std::streamoff>(data_start + offset));
    in.read(reinterpret_cast<char*>(a.bytes.data()), static_cast<std::streamsize>(nbytes));
    if (!in) throw FormatError("container: truncated array data");
    c.arrays_[entry.at("name").get<std::string>()] = std::move(a);
  }
  return c;
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 20);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(std::as_bytes(std::span(buf.data(), static_cast<std::size_t>(in.gcount()))));
  }
  return h.finish();
}

}  // namespace pitt::io
