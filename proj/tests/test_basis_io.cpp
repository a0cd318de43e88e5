#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "prolatoscope/prolate.hpp"

using namespace prolatoscope;
using Catch::Matchers::ContainsSubstring;

namespace {

const ProlateBasis& small_basis() {
  static ProlateBasis b = build_basis({1.0, 6, 128});
  return b;
}

const std::string kDir = "io_test_artifacts/";

// replace everything after the body with a freshly computed checksum line, so
// deliberate body edits still pass the integrity check and exercise the
// validation layer behind it
std::string reseal(std::string body_and_checksum) {
  const auto pos = body_and_checksum.rfind("checksum=");
  REQUIRE(pos != std::string::npos);
  std::string body = body_and_checksum.substr(0, pos);
  return body + "checksum=" + to_hex16(fnv1a64(body)) + "\n";
}

std::string lambda_token(const std::string& text, int mode) {
  const std::string key = "mode=" + std::to_string(mode) + " lambda=";
  const auto pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  const auto start = pos + key.size();
  const auto end = text.find(' ', start);
  return text.substr(start, end - start);
}

}  // namespace

TEST_CASE("save/load round trip is byte and bit exact") {
  const ProlateBasis& b = small_basis();
  const std::string path = kDir + "roundtrip.basis";
  save_basis(b, path);

  const std::string first = read_text_file(path);
  CHECK(first == serialize_basis(b));

  ProlateBasis loaded = load_basis(path);
  CHECK(serialize_basis(loaded) == first);

  CHECK(loaded.c() == b.c());
  CHECK(loaded.num_modes() == b.num_modes());
  CHECK(loaded.matrix_order() == b.matrix_order());
  CHECK(loaded.precision_bits() == b.precision_bits());
  for (int n = 0; n < b.num_modes(); ++n) {
    CHECK(loaded.lambda(n) == b.lambda(n));
    CHECK(loaded.mode(n).gamma == b.mode(n).gamma);
  }
  for (double s : {-0.9, -0.3, 0.0, 0.45, 1.0})
    for (int n = 0; n < b.num_modes(); ++n)
      CHECK(loaded.eval_phi(n, s) == b.eval_phi(n, s));
  for (double x : {0.2, 1.8, 6.0})
    for (int n = 0; n < b.num_modes(); ++n)
      CHECK(loaded.eval_psi(n, x) == b.eval_psi(n, x));
}

TEST_CASE("missing cache file") {
  CHECK_THROWS_AS(load_basis(kDir + "no-such-file.basis"), missing_artifact_error);
}

TEST_CASE("corrupted byte fails the integrity check") {
  const std::string path = kDir + "corrupt.basis";
  save_basis(small_basis(), path);
  std::string text = read_text_file(path);
  const auto pos = text.find("gamma=") + 8;  // a mantissa digit of gamma_0
  text[pos] = (text[pos] == '9') ? '8' : '9';
  write_text_file(path, text);
  CHECK_THROWS_WITH(load_basis(path), ContainsSubstring("checksum mismatch"));
}

TEST_CASE("truncated file names the failing line") {
  const std::string path = kDir + "truncated.basis";
  save_basis(small_basis(), path);
  std::string text = read_text_file(path);
  write_text_file(path, text.substr(0, text.size() / 2));
  try {
    load_basis(path);
    FAIL("expected a parse failure");
  } catch (const numeric_error& e) {
    CHECK_THAT(e.what(), ContainsSubstring(path));
    CHECK_THAT(e.what(), ContainsSubstring("line"));
  }
}

TEST_CASE("monotonicity violation is rejected after the checksum passes") {
  const std::string path = kDir + "tampered.basis";
  save_basis(small_basis(), path);
  std::string text = read_text_file(path);
  // overwrite mode 3's eigenvalue with mode 2's: sequence no longer decreasing
  const std::string l2 = lambda_token(text, 2);
  const std::string l3 = lambda_token(text, 3);
  const std::string key3 = "mode=3 lambda=" + l3;
  text.replace(text.find(key3), key3.size(), "mode=3 lambda=" + l2);
  write_text_file(path, reseal(text));
  CHECK_THROWS_WITH(load_basis(path), ContainsSubstring("not strictly decreasing"));
}

TEST_CASE("wrong version line is rejected") {
  const std::string path = kDir + "version.basis";
  save_basis(small_basis(), path);
  std::string text = read_text_file(path);
  text.replace(text.find("v1"), 2, "v9");
  write_text_file(path, text);
  CHECK_THROWS_WITH(load_basis(path), ContainsSubstring("version"));
}

TEST_CASE("checksum accessor matches the serialized stream") {
  const ProlateBasis& b = small_basis();
  CHECK(basis_checksum(b) == to_hex16(fnv1a64(serialize_basis(b))));
  CHECK(basis_checksum(b).size() == 16);
}
