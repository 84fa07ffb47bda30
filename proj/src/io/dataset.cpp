#include "pitt/io/dataset.hpp"

#include <cmath>
#include <stdexcept>

#include "pitt/eqtok/tokenizer.hpp"
#include "pitt/eqtok/vocabulary.hpp"
#include "pitt/io/spec_json.hpp"

namespace pitt::io {

using nlohmann::json;

std::size_t Dataset::sample_size() const {
  std::size_t n = 1;
  for (auto s : sample_shape) n *= static_cast<std::size_t>(s);
  return n;
}

std::span<const float> Dataset::field(std::size_t i) const {
  if (i >= count()) throw std::out_of_range("dataset: sample index out of range");
  return std::span(u).subspan(i * sample_size(), sample_size());
}

std::span<const float> Dataset::input_field(std::size_t i) const {
  if (!steady()) throw std::logic_error("dataset: only steady-state samples carry an input field");
  if (i >= count()) throw std::out_of_range("dataset: sample index out of range");
  return std::span(input).subspan(i * sample_size(), sample_size());
}

std::span<const std::int32_t> Dataset::token_ids(std::size_t i) const {
  if (i >= count()) throw std::out_of_range("dataset: sample index out of range");
  return std::span(tokens).subspan(i * static_cast<std::size_t>(pad_length), static_cast<std::size_t>(pad_length));
}

Container Dataset::to_container() const {
  Container c;
  json samples_json = json::array();
  for (const auto& s : samples) {
    samples_json.push_back({{"spec", spec_to_json(s.spec)},
                            {"seed", s.seed},
                            {"equation_group", s.equation_group},
                            {"init_group", s.init_group},
                            {"resamples", s.resamples}});
  }
  c.meta = {{"family", eqtok::family_name(family)},
            {"pad_length", pad_length},
            {"vocab_hash", vocab_hash},
            {"base_seed", base_seed},
            {"count", count()},
            {"sample_shape", sample_shape},
            {"generation", generation},
            {"samples", samples_json}};
  auto with_count = [&](std::vector<std::int64_t> tail) {
    tail.insert(tail.begin(), static_cast<std::int64_t>(count()));
    return tail;
  };
  c.put<float>("u", with_count(sample_shape), u);
  if (steady()) c.put<float>("input", with_count(sample_shape), input);
  c.put<float>("grid_x", {static_cast<std::int64_t>(grid_x.size())}, grid_x);
  if (!grid_y.empty()) c.put<float>("grid_y", {static_cast<std::int64_t>(grid_y.size())}, grid_y);
  if (!grid_t.empty()) c.put<float>("grid_t", {static_cast<std::int64_t>(grid_t.size())}, grid_t);
  c.put<std::int32_t>("tokens", {static_cast<std::int64_t>(count()), pad_length}, tokens);
  c.put<std::int32_t>("token_length", {static_cast<std::int64_t>(count())}, token_length);
  return c;
}

Dataset Dataset::from_container(const Container& c) {
  Dataset d;
  try {
    const auto& m = c.meta;
    d.family = eqtok::parse_family(m.at("family").get<std::string>());
    d.pad_length = m.at("pad_length").get<int>();
    d.vocab_hash = m.at("vocab_hash").get<std::string>();
    d.base_seed = m.at("base_seed").get<std::uint64_t>();
    d.sample_shape = m.at("sample_shape").get<std::vector<std::int64_t>>();
    d.generation = m.at("generation");
    for (const auto& s : m.at("samples")) {
      SampleMeta sm;
      sm.spec = spec_from_json(s.at("spec"));
      sm.seed = s.at("seed").get<std::uint64_t>();
      sm.equation_group = s.at("equation_group").get<std::int64_t>();
      sm.init_group = s.at("init_group").get<std::int64_t>();
      sm.resamples = s.at("resamples").get<int>();
      d.samples.push_back(std::move(sm));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("dataset: bad metadata: ") + e.what());
  }
  d.u = c.get<float>("u");
  if (d.steady()) d.input = c.get<float>("input");
  d.grid_x = c.get<float>("grid_x");
  if (c.has("grid_y")) d.grid_y = c.get<float>("grid_y");
  if (c.has("grid_t")) d.grid_t = c.get<float>("grid_t");
  d.tokens = c.get<std::int32_t>("tokens");
  d.token_length = c.get<std::int32_t>("token_length");
  if (d.u.size() != d.count() * d.sample_size()) throw FormatError("dataset: field array does not match sample count");
  if (d.tokens.size() != d.count() * static_cast<std::size_t>(d.pad_length)) {
    throw FormatError("dataset: token array does not match the declared pad length");
  }
  return d;
}

std::string Dataset::save(const std::filesystem::path& path, bool overwrite) const {
  return to_container().save(path, overwrite);
}

Dataset Dataset::load(const std::filesystem::path& path) { return from_container(Container::load(path)); }

std::vector<std::string> Dataset::verify() const {
  std::vector<std::string> problems;
  const auto& vocab = eqtok::build_vocabulary();
  if (vocab_hash != vocab.hash()) problems.push_back("vocabulary hash does not match the built-in manifest");
  if (pad_length != eqtok::default_pad_length(family)) {
    problems.push_back("pad length " + std::to_string(pad_length) + " differs from the family default");
  }
  if (tokens.size() != count() * static_cast<std::size_t>(pad_length)) problems.push_back("token array size mismatch");
  if (token_length.size() != count()) problems.push_back("token length array size mismatch");
  if (u.size() != count() * sample_size()) problems.push_back("field array size mismatch");
  if (steady() && input.size() != u.size()) problems.push_back("input array size mismatch");
  for (std::size_t k = 0; k < u.size(); ++k)
    if (!std::isfinite(u[k])) {
      problems.push_back("non-finite field value in sample " + std::to_string(k / std::max<std::size_t>(1, sample_size())));
      break;
    }
  for (std::size_t k = 0; k < input.size(); ++k)
    if (!std::isfinite(input[k])) {
      problems.push_back("non-finite input value");
      break;
    }
  if (!problems.empty()) return problems;
  for (std::size_t i = 0; i < count(); ++i) {
    if (samples[i].spec.family != family) {
      problems.push_back("sample " + std::to_string(i) + " has the wrong family");
      continue;
    }
    // Stored tokens must be exactly what the tokenizer emits for the stored spec.
    try {
      const auto seq = eqtok::tokenize_equation(samples[i].spec, pad_length);
      const auto ids = token_ids(i);
      if (!std::equal(ids.begin(), ids.end(), seq.ids.begin(), seq.ids.end()) || seq.true_length != token_length[i]) {
        problems.push_back("sample " + std::to_string(i) + " tokens do not match its spec");
      }
    } catch (const std::exception& e) {
      problems.push_back("sample " + std::to_string(i) + ": " + e.what());
    }
  }
  return problems;
}

}  // namespace pitt::io
