#include <doctest.h>

#include "hadamux/codes.hpp"
#include "oracles.hpp"

#include <stdexcept>
#include <string>

using namespace hadamux;

namespace {

const int kOrders[] = {3, 7, 11, 19, 31, 127};

std::string error_of(int order) {
  try {
    build_s_matrix(order);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("order 3 agrees with the matrix cut out of the order-4 Hadamard matrix") {
  const Matrix ref = oracle::s_from_hadamard(oracle::sylvester(4));
  const SMatrix s = build_s_matrix(3);
  // Same matrix up to a cyclic phase: some row rotation must match exactly.
  bool matched = false;
  for (int shift = 0; shift < 3 && !matched; ++shift) {
    bool all = true;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) all = all && s(i, j) == ref((i + shift) % 3, j);
    }
    matched = all;
  }
  CHECK(matched);
  for (int i = 0; i < 3; ++i) CHECK(s.entries().row(i).sum() == 2);
}

TEST_CASE("order 7 is cyclic with weight 4 and S^T S = 2(I+J)") {
  const SMatrix s = build_s_matrix(7);
  const IntMatrix g = s.entries().transpose() * s.entries();
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) CHECK(g(i, j) == (i == j ? 4 : 2));
  }
}

TEST_CASE("first row marks zero and the quadratic residues") {
  for (int n : kOrders) {
    const SMatrix s = build_s_matrix(n);
    CHECK(s(0, 0) == 1);
    for (int j = 1; j < n; ++j) CHECK(s(0, j) == (oracle::euler_residue(j, n) ? 1 : 0));
  }
}

TEST_CASE("unsupported orders are rejected by name") {
  for (int bad : {-7, 0, 1, 2, 4, 5, 9, 13, 15, 121}) {
    const std::string msg = error_of(bad);
    CHECK(msg.find("unsupported order") != std::string::npos);
    CHECK(msg.find(std::to_string(bad)) != std::string::npos);
  }
}

TEST_CASE("weights, correlation and cyclicity hold exactly for every supported order up to 131") {
  for (int n = 3; n <= 131; ++n) {
    if (!is_supported_order(n)) continue;
    CAPTURE(n);
    const SMatrix s = build_s_matrix(n);
    const IntMatrix& e = s.entries();
    const int w = (n + 1) / 2;
    CHECK((e.rowwise().sum().array() == w).all());
    CHECK((e.colwise().sum().array() == w).all());
    const IntMatrix g = e.transpose() * e;
    IntMatrix expected = IntMatrix::Constant(n, n, (n + 1) / 4);
    expected.diagonal().array() += (n + 1) / 4;
    CHECK((g - expected).cwiseAbs().maxCoeff() == 0);
    for (int i = 0; i + 1 < n; ++i) {
      for (int j = 0; j < n; ++j) REQUIRE(e(i + 1, j) == e(i, (j + 1) % n));
    }
  }
}

TEST_CASE("supported order set") {
  CHECK(is_supported_order(3));
  CHECK(is_supported_order(127));
  CHECK(is_supported_order(131));
  CHECK_FALSE(is_supported_order(5));
  CHECK_FALSE(is_supported_order(2));
  CHECK_FALSE(is_supported_order(15));
  CHECK(is_prime(127));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(91));
}

TEST_CASE("closed-form inverse of the symmetric order-3 instance") {
  IntMatrix e(3, 3);
  e << 1, 0, 1, 0, 1, 1, 1, 1, 0;
  const SMatrix s = SMatrix::from_entries(e);
  Matrix expected(3, 3);
  expected << 1, -1, 1, -1, 1, 1, 1, 1, -1;
  expected *= 0.5;
  CHECK((s_inverse(s) - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((s.as_real() * s_inverse(s) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("closed-form inverse matches Gauss-Jordan and has tiny residual") {
  for (int n : kOrders) {
    CAPTURE(n);
    const SMatrix s = build_s_matrix(n);
    const Matrix inv = s_inverse(s);
    const Matrix eye = Matrix::Identity(n, n);
    CHECK((s.as_real() * inv - eye).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((inv * s.as_real() - eye).cwiseAbs().maxCoeff() < 1e-10);
    if (n <= 31) CHECK((inv - oracle::gauss_jordan_inverse(s.as_real())).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("validation passes for built matrices") {
  for (int n : kOrders) {
    const ValidationReport r = validate_s_matrix(build_s_matrix(n).as_real());
    CHECK(r.ok());
    CHECK(r.order == n);
    CHECK(r.checks.size() == 5);
    CHECK(r.convention.find("cyclic") == 0);
  }
}

TEST_CASE("identity of order 7 fails the row weight check") {
  const ValidationReport r = validate_s_matrix(Matrix::Identity(7, 7));
  CHECK_FALSE(r.ok());
  const ValidationCheck* rw = r.find("row_weight");
  REQUIRE(rw != nullptr);
  CHECK_FALSE(rw->passed);
  CHECK(rw->offending.size() == 7);
  CHECK(r.find("binary")->passed);
  CHECK(r.to_text().find("row_weight") != std::string::npos);
}

TEST_CASE("flipping one entry breaks the correlation check") {
  Matrix m = build_s_matrix(7).as_real();
  m(1, 1) = 1.0 - m(1, 1);
  const ValidationReport r = validate_s_matrix(m);
  CHECK_FALSE(r.ok());
  CHECK(r.find("binary")->passed);
  CHECK_FALSE(r.find("correlation")->passed);
  CHECK_FALSE(r.find("row_weight")->passed);
  bool names_row = false;
  for (auto [row, col] : r.find("row_weight")->offending) names_row = names_row || row == 1;
  CHECK(names_row);
}

TEST_CASE("non-binary entries are reported with their position") {
  Matrix m = build_s_matrix(7).as_real();
  m(2, 5) = 0.5;
  const ValidationReport r = validate_s_matrix(m);
  const ValidationCheck* b = r.find("binary");
  REQUIRE(b != nullptr);
  CHECK_FALSE(b->passed);
  REQUIRE(b->offending.size() == 1);
  CHECK(b->offending[0] == std::pair{2, 5});
}

TEST_CASE("a row-permuted S-matrix is valid but not cyclic") {
  Matrix m = build_s_matrix(7).as_real();
  m.row(0).swap(m.row(3));
  const ValidationReport r = validate_s_matrix(m);
  CHECK(r.ok());
  CHECK(r.convention == "non-cyclic");
}

TEST_CASE("from_entries refuses non S-matrices") {
  CHECK_THROWS_AS(SMatrix::from_entries(IntMatrix::Identity(3, 3)), std::invalid_argument);
  CHECK_NOTHROW(SMatrix::from_entries(build_s_matrix(11).entries()));
}
