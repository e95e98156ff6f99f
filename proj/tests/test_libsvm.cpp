#include "doctest.h"

#include "test_oracles.hpp"
#include "trsqp/libsvm.hpp"
#include "trsqp/oracle.hpp"

using namespace trsqp;

TEST_CASE("parse_libsvm_text: format definition") {
  const Dataset d = parse_libsvm_text("-1 1:0.5 3:2.0\n", 3);
  CHECK(d.n_samples == 1);
  CHECK(d.dim == 3);
  CHECK(d.labels(0) == -1);
  CHECK(d.features(0, 0) == doctest::Approx(0.5));
  CHECK(d.features(0, 1) == 0.0);
  CHECK(d.features(0, 2) == doctest::Approx(2.0));

  const Dataset e = parse_libsvm_text("+1 2:1\n");
  CHECK(e.labels(0) == 1);
  CHECK(e.dim == 2);
  CHECK(e.features(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("parse_libsvm_text: {0,1} labels remap to {-1,+1}") {
  const Dataset d = parse_libsvm_text("0 1:1\n1 1:2\n");
  CHECK(d.labels(0) == -1);
  CHECK(d.labels(1) == 1);
}

TEST_CASE("parse_libsvm_text: blank lines, CRLF, and trailing whitespace tolerated") {
  const Dataset d = parse_libsvm_text("\n+1 1:1.5 \r\n\n-1 2:2.5\t\n");
  CHECK(d.n_samples == 2);
  CHECK(d.dim == 2);
  CHECK(d.features(0, 0) == doctest::Approx(1.5));
  CHECK(d.features(1, 1) == doctest::Approx(2.5));
}

TEST_CASE("parse_libsvm_text: dim_hint widens the feature space") {
  const Dataset d = parse_libsvm_text("+1 2:1\n", 7);
  CHECK(d.dim == 7);
}

TEST_CASE("parse_libsvm_text: malformed lines rejected with line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      parse_libsvm_text(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1L;
  };
  CHECK(line_of("+1 0:1\n") == 1);                    // index 0
  CHECK(line_of("+1 1:1\n-1 -3:1\n") == 2);           // negative index
  CHECK(line_of("+1 11\n") == 1);                     // missing colon
  CHECK(line_of("+1 1:\n") == 1);                     // missing value
  CHECK(line_of("+1 :2\n") == 1);                     // missing index
  CHECK(line_of("+1 1:abc\n") == 1);                  // non-numeric value
  CHECK(line_of("abc 1:1\n") == 1);                   // non-numeric label
  CHECK(line_of("+1 1:1\n+1 1:nan\n") == 2);          // NaN literal
  CHECK(line_of("+1 1:inf\n") == 1);                  // non-finite value
  CHECK(line_of("2 1:1\n") == 1);                     // unsupported label value
  CHECK(line_of("+1 1.5:2\n") == 1);                  // fractional index
  CHECK(line_of("") == 0);                            // empty input
  CHECK(line_of("\n\n") == 2);                        // only blank lines
}

TEST_CASE("libsvm round trip: serialize then parse is the identity") {
  RngStream rng(1101, 6);
  for (int trial = 0; trial < 100; ++trial) {
    Dataset d;
    d.n_samples = 1 + rng.uniform_index(12);
    d.dim = 1 + rng.uniform_index(9);
    d.features = Matrix::Zero(d.n_samples, d.dim);
    d.labels = Vector(d.n_samples);
    for (Index i = 0; i < d.n_samples; ++i) {
      d.labels(i) = rng.normal() > 0 ? 1 : -1;
      for (Index j = 0; j < d.dim; ++j) {
        if (rng.normal() > 0.3) d.features(i, j) = rng.normal();
      }
    }
    const std::string text = write_libsvm_text(d);
    const Dataset back = parse_libsvm_text(text, d.dim);
    REQUIRE(back.n_samples == d.n_samples);
    REQUIRE(back.dim == d.dim);
    CHECK((back.labels - d.labels).norm() == 0.0);
    CHECK((back.features - d.features).norm() == 0.0);  // %.17g round trip is exact
  }
}

TEST_CASE("libsvm file I/O round trip") {
  RngStream rng(1102, 6);
  Dataset d;
  d.n_samples = 5;
  d.dim = 4;
  d.features = oracles::random_matrix(rng, 5, 4);
  d.labels = Vector(5);
  for (Index i = 0; i < 5; ++i) d.labels(i) = (i % 2 == 0) ? 1 : -1;
  const std::string path = "/tmp/trsqp_libsvm_roundtrip.txt";
  write_libsvm(d, path);
  const Dataset back = parse_libsvm(path, d.dim);
  CHECK((back.features - d.features).norm() == 0.0);
  CHECK_THROWS(parse_libsvm("/nonexistent/path.libsvm"));
}
