#include "pitt/eqtok/tokenizer.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace pitt::eqtok {

namespace {

using Symbols = std::vector<std::string>;

void append(Symbols& out, const Symbols& more) { out.insert(out.end(), more.begin(), more.end()); }

void append_chars(Symbols& out, std::string_view digits) {
  for (char c : digits) out.emplace_back(1, c);
}

template <typename T>
void append_list(Symbols& out, const std::vector<T>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.emplace_back(",");
    append(out, tokenize_number(static_cast<double>(values[i])));
  }
}

// Signed term inside the 1D flux: "+ c * body" / "- c * body", omitted when c == 0.
void append_term(Symbols& out, double coeff, const Symbols& body) {
  if (coeff == 0.0) return;
  if (coeff < 0.0) {
    out.emplace_back("-");
  } else if (!out.empty() && out.back() != "(") {
    out.emplace_back("+");
  }
  append(out, tokenize_number(std::abs(coeff)));
  out.emplace_back("*");
  append(out, body);
}

Symbols render_1d_equation(const EquationSpec& s) {
  Symbols out{"∂", "t", "u", "+", "∂", "x", "("};
  append_term(out, s.alpha, {"u", "*", "u"});
  append_term(out, -s.beta, {"∂", "x", "u"});
  append_term(out, s.gamma, {"∂", "x", "∂", "x", "u"});
  if (out.back() == "(") out.emplace_back("0");
  append(out, {")", "=", "f"});
  return out;
}

Symbols render_1d_forcing(const ForcingParams& p) {
  Symbols out{"f", "=", "Σ", "j", "A_j", "*", "sin", "(", "ω_j", "*", "t", "+", "2", "*", "π", "*",
              "l_j", "*", "x", "/"};
  append(out, tokenize_number(p.domain_length));
  append(out, {"+", "φ_j", ")"});
  return out;
}

Symbols render_1d_values(const ForcingParams& p) {
  Symbols out{"A_j", "="};
  append_list(out, p.amplitude);
  append(out, {"ω_j", "="});
  append_list(out, p.omega);
  append(out, {"l_j", "="});
  append_list(out, p.wavenumber);
  append(out, {"φ_j", "="});
  append_list(out, p.phase);
  return out;
}

Symbols render_ns_equations() {
  return {"∂", "t", "w", "+", "u", "·", "∇", "w", "=", "ν", "*", "Δ", "w", "+", "f", ",",
          "∇", "·", "u", "=", "0", ",",
          "f", "=", "A", "*", "(", "sin", "(", "2", "*", "π", "*", "(", "x", "+", "y", ")", ")",
          "+", "cos", "(", "2", "*", "π", "*", "(", "x", "+", "y", ")", ")", ")"};
}

}  // namespace

int default_pad_length(Family f) { return is_1d(f) ? kPadLength1D : kPadLength2D; }

double normalize_id(int id, std::size_t vocab_size) {
  return 2.0 * static_cast<double>(id) / static_cast<double>(vocab_size - 1) - 1.0;
}

std::vector<double> normalize_ids(const std::vector<std::int32_t>& ids, std::size_t vocab_size) {
  std::vector<double> out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out[i] = normalize_id(ids[i], vocab_size);
  return out;
}

std::vector<std::string> tokenize_number(double value, int precision) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("tokenize_number: non-finite value " + std::to_string(value));
  }
  if (precision < 1 || precision > 17) throw std::invalid_argument("tokenize_number: precision must be in [1, 17]");
  if (value == 0.0) return {"0"};

  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", precision - 1, std::abs(value));
  const std::string text(buf);
  const auto epos = text.find('e');
  std::string digits;
  for (std::size_t i = 0; i < epos; ++i) {
    if (text[i] != '.') digits.push_back(text[i]);
  }
  const int exponent = std::atoi(text.c_str() + epos + 1);
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();

  Symbols out;
  if (value < 0.0) out.emplace_back("-");
  if (exponent >= -4 && exponent < 15) {
    if (exponent >= 0) {
      const auto int_len = static_cast<std::size_t>(exponent) + 1;
      std::string int_part = digits.substr(0, std::min(int_len, digits.size()));
      int_part.append(int_len - int_part.size(), '0');
      append_chars(out, int_part);
      if (digits.size() > int_len) {
        out.emplace_back(".");
        append_chars(out, digits.substr(int_len));
      }
    } else {
      out.emplace_back("0");
      out.emplace_back(".");
      append_chars(out, std::string(static_cast<std::size_t>(-exponent - 1), '0'));
      append_chars(out, digits);
    }
  } else {
    out.emplace_back(1, digits[0]);
    if (digits.size() > 1) {
      out.emplace_back(".");
      append_chars(out, digits.substr(1));
    }
    out.emplace_back("E");
    if (exponent < 0) out.emplace_back("-");
    append_chars(out, std::to_string(std::abs(exponent)));
  }
  return out;
}

std::vector<std::vector<std::string>> render_sections(const EquationSpec& spec) {
  spec.validate();
  std::vector<Symbols> sections;
  if (is_1d(spec.family)) {
    const auto& p = *spec.forcing;
    sections.push_back(render_1d_equation(spec));
    sections.push_back(render_1d_forcing(p));
    sections.push_back({"u", "(", "0", ",", "x", ")", "=", "f", "(", "0", ",", "x", ")"});
    sections.push_back(render_1d_values(p));
  } else if (spec.family == Family::navier_stokes) {
    sections.push_back(render_ns_equations());
    Symbols values{"ν", "="};
    append(values, tokenize_number(spec.nu));
    append(values, {",", "A", "="});
    append(values, tokenize_number(spec.amp));
    sections.push_back(std::move(values));
  } else {
    sections.push_back({"Δ", "u", "=", "g"});
    Symbols bc;
    for (std::size_t e = 0; e < spec.edges.size(); ++e) {
      if (e) bc.emplace_back(",");
      bc.emplace_back(spec.edges[e].kind == BoundaryKind::dirichlet ? "Dirichlet" : "Neumann");
    }
    sections.push_back(std::move(bc));
    Symbols plates;
    for (std::size_t i = 0; i < spec.plates.size(); ++i) {
      const auto& pl = spec.plates[i];
      if (i) plates.emplace_back(",");
      append_list(plates, std::vector<double>{static_cast<double>(pl.x), static_cast<double>(pl.y),
                                              static_cast<double>(pl.width), pl.charge});
    }
    if (plates.empty()) plates.emplace_back("None");
    sections.push_back(std::move(plates));
  }
  sections.push_back(tokenize_number(spec.target_time));
  return sections;
}

std::vector<std::string> render_symbols(const EquationSpec& spec) {
  Symbols out;
  const auto sections = render_sections(spec);
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (i) out.emplace_back("&");
    append(out, sections[i]);
  }
  return out;
}

std::vector<std::string> lex(std::string_view text, const Vocabulary& vocab) {
  Symbols out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++pos;
      continue;
    }
    std::size_t best = 0;
    for (const auto& tok : vocab.entries()) {
      if (tok.size() > best && text.compare(pos, tok.size(), tok) == 0) best = tok.size();
    }
    if (best == 0) {
      throw std::invalid_argument("lex: no token matches at offset " + std::to_string(pos) + ": '" +
                                  std::string(text.substr(pos, 12)) + "'");
    }
    out.emplace_back(text.substr(pos, best));
    pos += best;
  }
  return out;
}

TokenSequence make_sequence(const std::vector<std::string>& symbols, int pad_to, const Vocabulary& vocab) {
  if (pad_to < 0 || symbols.size() > static_cast<std::size_t>(pad_to)) {
    throw std::length_error("tokenize: rendering needs " + std::to_string(symbols.size()) +
                            " tokens but pad length is " + std::to_string(pad_to));
  }
  TokenSequence seq;
  seq.ids.assign(static_cast<std::size_t>(pad_to), vocab.pad_id());
  for (std::size_t i = 0; i < symbols.size(); ++i) seq.ids[i] = vocab.index_of(symbols[i]);
  seq.true_length = static_cast<int>(symbols.size());
  seq.normalized = normalize_ids(seq.ids, vocab.size());
  return seq;
}

TokenSequence tokenize_equation(const EquationSpec& spec, int pad_to) {
  return make_sequence(render_symbols(spec), pad_to);
}

std::string detokenize(const std::vector<std::int32_t>& ids, const Vocabulary& vocab) {
  std::string out;
  for (auto id : ids) {
    const auto& tok = vocab.token(id);
    if (id == vocab.pad_id()) continue;
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

std::string detokenize(const TokenSequence& seq, const Vocabulary& vocab) { return detokenize(seq.ids, vocab); }

TokenSequence retokenize(std::string_view text, int pad_to, const Vocabulary& vocab) {
  return make_sequence(lex(text, vocab), pad_to, vocab);
}

}  // namespace pitt::eqtok
