#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pitt/eqtok/equation_spec.hpp"
#include "pitt/eqtok/vocabulary.hpp"

namespace pitt::eqtok {

inline constexpr int kPadLength1D = 500;
inline constexpr int kPadLength2D = 100;
inline constexpr int kNumberPrecision = 15;

int default_pad_length(Family f);

struct TokenSequence {
  std::vector<std::int32_t> ids;
  int true_length = 0;
  std::vector<double> normalized;
};

/// Maps id to 2 id / (V - 1) - 1.
double normalize_id(int id, std::size_t vocab_size);
std::vector<double> normalize_ids(const std::vector<std::int32_t>& ids, std::size_t vocab_size);

/// Canonical decimal rendering: fixed point for |v| in [1e-4, 1e15), otherwise
/// mantissa "E" exponent. At most `precision` significant digits, no trailing zeros.
std::vector<std::string> tokenize_number(double value, int precision = kNumberPrecision);

/// Symbol sections of a spec, before they are joined by the separator.
std::vector<std::vector<std::string>> render_sections(const EquationSpec& spec);
std::vector<std::string> render_symbols(const EquationSpec& spec);

/// Longest-match lexing of free text over the vocabulary; whitespace separates.
std::vector<std::string> lex(std::string_view text, const Vocabulary& vocab = build_vocabulary());

TokenSequence make_sequence(const std::vector<std::string>& symbols, int pad_to,
                            const Vocabulary& vocab = build_vocabulary());

TokenSequence tokenize_equation(const EquationSpec& spec, int pad_to);
inline TokenSequence tokenize_equation(const EquationSpec& spec) {
  return tokenize_equation(spec, default_pad_length(spec.family));
}

/// Space-joined token strings with padding removed.
std::string detokenize(const TokenSequence& seq, const Vocabulary& vocab = build_vocabulary());
std::string detokenize(const std::vector<std::int32_t>& ids,
                       const Vocabulary& vocab = build_vocabulary());

/// Lexes text produced by detokenize back into a padded sequence.
TokenSequence retokenize(std::string_view text, int pad_to,
                         const Vocabulary& vocab = build_vocabulary());

}  // namespace pitt::eqtok
