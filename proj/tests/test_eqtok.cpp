#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pitt/eqtok/tokenizer.hpp"
#include "support.hpp"

using namespace pitt::eqtok;

using pitt::testing::random_spec;

TEST_CASE("vocabulary holds every listed token and matches the shipped manifest") {
  const auto& v = build_vocabulary();
  for (const char* tok : {"(", ")", "∂", "Σ", "j", "A_j", "l_j", "ω_j", "φ_j", "sin", "t", "u", "x", "y", "+",
                          "-", "*", "/", "Neumann", "Dirichlet", "None", "0", "1", "2", "3", "4", "5", "6",
                          "7", "8", "9", "10^", "E", "e", ",", ".", "&", "∇", "=", "Δ", "·", "Derivative"}) {
    CHECK_MESSAGE(v.contains(tok), tok);
  }
  CHECK(v.index_of(v.entries()[0]) == 0);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v.index_of(v.entries()[i]) == static_cast<int>(i));

  const auto shipped = Vocabulary::load_manifest(std::string(PITT_DATA_DIR) + "/vocabulary.txt");
  REQUIRE(shipped.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(shipped.index_of(v.entries()[i]) == static_cast<int>(i));
  CHECK(shipped.hash() == v.hash());

  const auto reloaded = Vocabulary::from_manifest(v.manifest());
  CHECK(reloaded.entries() == v.entries());
}

TEST_CASE("vocabulary rejects duplicates and a missing pad token") {
  CHECK_THROWS_AS(Vocabulary({"<pad>", "a", "a"}), std::invalid_argument);
  CHECK_THROWS_AS(Vocabulary({"a", "b"}), std::invalid_argument);
  CHECK_THROWS_AS(build_vocabulary().token(-1), std::out_of_range);
}

TEST_CASE("tokenize_number canonical forms") {
  using S = std::vector<std::string>;
  CHECK(tokenize_number(0.25) == S{"0", ".", "2", "5"});
  CHECK(tokenize_number(0.0) == S{"0"});
  CHECK(tokenize_number(-0.0) == S{"0"});
  CHECK(tokenize_number(2e-9) == S{"2", "E", "-", "9"});
  CHECK(tokenize_number(-1.5e-9) == S{"-", "1", ".", "5", "E", "-", "9"});
  CHECK(tokenize_number(1e-4) == S{"0", ".", "0", "0", "0", "1"});
  CHECK(tokenize_number(100.0) == S{"1", "0", "0"});
  CHECK(tokenize_number(1e15) == S{"1", "E", "1", "5"});
  CHECK(tokenize_number(3.0 * 1e-9) == S{"3", "E", "-", "9"});
  CHECK(tokenize_number(0.1 + 0.2) == S{"0", ".", "3"});
  CHECK(tokenize_number(std::numbers::pi).size() == 16);  // 15 significant digits and the point
  CHECK_THROWS_AS(tokenize_number(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(tokenize_number(INFINITY), std::invalid_argument);
}

TEST_CASE("tokenize_number is injective at 15 significant digits") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mant(1.0, 10.0);
  std::uniform_int_distribution<int> ex(-12, 16);
  for (int i = 0; i < 2000; ++i) {
    const double a = std::stod(std::to_string(mant(rng)).substr(0, 8)) * std::pow(10.0, ex(rng));
    const double b = std::nextafter(a * (1.0 + 1e-13), INFINITY);
    CHECK(tokenize_number(a) != tokenize_number(b));
    // Rebuilding the number from its tokens gives the same 15-digit value.
    std::string text;
    for (const auto& t : tokenize_number(a)) text += t;
    CHECK(std::abs(std::stod(text) - a) <= 1e-14 * std::abs(a));
  }
}

TEST_CASE("worked derivative example") {
  const auto symbols = lex("Derivative(u(x,t),t)");
  CHECK(symbols == std::vector<std::string>{"Derivative", "(", "u", "(", "x", ",", "t", ")", ",", "t", ")"});
  const auto seq = make_sequence(symbols, 11);
  // Ids under the shipped manifest.
  CHECK(seq.ids == std::vector<std::int32_t>{1, 2, 13, 2, 14, 36, 12, 3, 36, 12, 3});
}

TEST_CASE("normalization endpoints and monotonicity") {
  const auto n = build_vocabulary().size();
  CHECK(normalize_id(0, n) == -1.0);
  CHECK(normalize_id(static_cast<int>(n) - 1, n) == 1.0);
  for (int i = 1; i < static_cast<int>(n); ++i) CHECK(normalize_id(i, n) > normalize_id(i - 1, n));
}

TEST_CASE("heat rendering has five separated sections") {
  EquationSpec s;
  s.family = Family::heat;
  s.beta = 0.1;
  s.forcing = ForcingParams::zero();
  s.forcing->amplitude[0] = 0.125;
  s.target_time = 0.44;
  const auto seq = tokenize_equation(s);
  CHECK(seq.ids.size() == 500);
  const auto text = detokenize(seq);
  CHECK(std::count(text.begin(), text.end(), '&') == 4);
  CHECK(text.rfind("0 . 4 4") == text.size() - 7);
  CHECK(text.find("∂ t u + ∂ x ( - 0 . 1 * ∂ x u ) = f") == 0);
}

TEST_CASE("padding, errors, and empty sequences") {
  EquationSpec s;
  s.family = Family::navier_stokes;
  s.nu = 1e-5;
  s.amp = 0.003;
  s.target_time = 12.5;
  const auto seq = tokenize_equation(s);
  CHECK(seq.ids.size() == 100);
  for (std::size_t i = seq.true_length; i < seq.ids.size(); ++i) CHECK(seq.ids[i] == build_vocabulary().pad_id());
  CHECK_THROWS_AS(tokenize_equation(s, 20), std::length_error);
  try {
    (void)tokenize_equation(s, 20);
  } catch (const std::length_error& e) {
    CHECK(std::string(e.what()).find(std::to_string(seq.true_length)) != std::string::npos);
  }

  TokenSequence pads;
  pads.ids.assign(100, build_vocabulary().pad_id());
  CHECK(detokenize(pads).empty());
  pads.ids[3] = 999;
  CHECK_THROWS_AS(detokenize(pads), std::out_of_range);

  EquationSpec bad = s;
  bad.beta = 0.1;
  CHECK_THROWS_AS(tokenize_equation(bad), std::invalid_argument);
  EquationSpec poisson;
  poisson.family = Family::poisson;
  poisson.target_time = 0.5;
  CHECK_THROWS_AS(tokenize_equation(poisson), std::invalid_argument);
}

TEST_CASE("property: detokenize then retokenize reproduces ids") {
  std::mt19937_64 rng(2024);
  int ok = 0;
  const int total = 1000;
  for (int i = 0; i < total; ++i) {
    const auto spec = random_spec(rng);
    const int pad = default_pad_length(spec.family);
    const auto seq = tokenize_equation(spec, pad);
    REQUIRE(static_cast<int>(seq.ids.size()) == pad);
    for (double v : seq.normalized) REQUIRE((v >= -1.0 && v <= 1.0));
    const auto back = retokenize(detokenize(seq), pad);
    if (back.ids == seq.ids && back.true_length == seq.true_length) ++ok;
  }
  CHECK(ok == total);
}
