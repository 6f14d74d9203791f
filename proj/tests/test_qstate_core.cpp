#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qmaxent/bell_chsh.hpp"
#include "qmaxent/quantum_state.hpp"

using namespace qmaxent;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

DensityMatrix bell_projector(std::size_t which) {
  const auto bell = bell_basis_vectors();
  return DensityMatrix(outer_product(bell[which], bell[which]));
}

}  // namespace

TEST_CASE("eigendecomposition: identity matrix") {
  const HermitianObservable h(ComplexSquareMatrix::identity(4));
  const Spectrum spec = hermitian_eigendecompose(h);
  for (double w : spec.eigenvalues) CHECK(w == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("eigendecomposition: already diagonal") {
  ComplexSquareMatrix m(4);
  m(0, 0) = -2.0 * kSqrt2;
  m(3, 3) = 2.0 * kSqrt2;
  const Spectrum spec = hermitian_eigendecompose(HermitianObservable(m));
  CHECK(spec.eigenvalues[0] == Catch::Approx(-2.0 * kSqrt2).margin(1e-14));
  CHECK(spec.eigenvalues[1] == Catch::Approx(0.0).margin(1e-14));
  CHECK(spec.eigenvalues[2] == Catch::Approx(0.0).margin(1e-14));
  CHECK(spec.eigenvalues[3] == Catch::Approx(2.0 * kSqrt2).margin(1e-14));
}

TEST_CASE("eigendecomposition: CHSH operator, cross-checked by embedding oracle") {
  // Build the operator from its rank-two outer-product form right here,
  // independent of bell_chsh_operator().
  const auto bell = bell_basis_vectors();
  const ComplexSquareMatrix b =
      (2.0 * kSqrt2) *
      (outer_product(bell[0], bell[0]) - outer_product(bell[1], bell[1]));

  const Spectrum spec = hermitian_eigendecompose(HermitianObservable(b));
  const std::vector<double> oracle =
      test_oracles::hermitian_eigenvalues_by_embedding(b);

  const std::vector<double> expected{-2.0 * kSqrt2, 0.0, 0.0, 2.0 * kSqrt2};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(spec.eigenvalues[i] == Catch::Approx(expected[i]).margin(1e-10));
    CHECK(oracle[i] == Catch::Approx(expected[i]).margin(1e-10));
  }
}

TEST_CASE("eigendecomposition: round trip and orthonormality on random Hermitian") {
  std::mt19937 rng(421);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + trial % 5;
    const ComplexSquareMatrix h = test_oracles::random_hermitian_matrix(rng, d);
    const Spectrum spec = hermitian_eigendecompose(HermitianObservable(h));

    ComplexSquareMatrix reconstructed(d);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          reconstructed(i, j) += spec.eigenvalues[k] * spec.eigenvectors(i, k) *
                                 std::conj(spec.eigenvectors(j, k));
    CHECK(max_abs_diff(reconstructed, h) <= 1e-10);

    const ComplexSquareMatrix gram =
        adjoint(spec.eigenvectors) * spec.eigenvectors;
    CHECK(max_abs_diff(gram, ComplexSquareMatrix::identity(d)) <= 1e-10);

    for (std::size_t i = 1; i < d; ++i)
      CHECK(spec.eigenvalues[i - 1] <= spec.eigenvalues[i]);

    // Embedding oracle agrees on the eigenvalues.
    const auto oracle = test_oracles::hermitian_eigenvalues_by_embedding(h);
    for (std::size_t i = 0; i < d; ++i)
      CHECK(oracle[i] == Catch::Approx(spec.eigenvalues[i]).margin(1e-9));
  }
}

TEST_CASE("expectation values against the CHSH operator") {
  const HermitianObservable b = bell_chsh_operator();
  const HermitianObservable b2 = bell_chsh_squared();
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(4);

  CHECK(expectation(mixed, b) == Catch::Approx(0.0).margin(1e-14));
  CHECK(expectation(bell_projector(0), b) ==
        Catch::Approx(2.0 * kSqrt2).margin(1e-13));

  // Tr(B^2) computed directly from the matrix square.
  const ComplexSquareMatrix square = b.matrix() * b.matrix();
  CHECK(trace(square).real() == Catch::Approx(16.0).margin(1e-12));
  CHECK(expectation(mixed, b2) == Catch::Approx(4.0).margin(1e-13));
}

TEST_CASE("expectation rejects mismatched dimensions") {
  const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
  CHECK_THROWS_AS(expectation(rho, bell_chsh_operator()), DimensionError);
}

TEST_CASE("von Neumann entropy: pure, mixed, rank-two") {
  CHECK(von_neumann_entropy(bell_projector(0)) == Catch::Approx(0.0).margin(1e-12));
  CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(4)) ==
        Catch::Approx(std::log(4.0)).margin(1e-12));
  const BellDiagonalState half(0.5, 0.5, 0.0, 0.0);
  CHECK(von_neumann_entropy(half.to_density_matrix()) ==
        Catch::Approx(std::log(2.0)).margin(1e-12));
}

TEST_CASE("entropy bounds hold for random states") {
  std::mt19937 rng(9090);
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix rho =
        DensityMatrix(test_oracles::random_density_matrix_entries(rng, 4));
    const double s = von_neumann_entropy(rho);
    CHECK(s >= 0.0);
    CHECK(s <= std::log(4.0));
  }
}

TEST_CASE("relative entropy: identical states, mixed reference, support violation") {
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(4);
  const DensityMatrix pure = bell_projector(0);

  CHECK(std::abs(relative_entropy(mixed, mixed)) <= 1e-12);
  CHECK(relative_entropy(mixed, pure) == Catch::Approx(std::log(4.0)).margin(1e-10));

  const DensityMatrix rank_two = BellDiagonalState(0.5, 0.5, 0.0, 0.0).to_density_matrix();
  CHECK(std::isinf(relative_entropy(rank_two, mixed)));

  CHECK_THROWS_AS(relative_entropy(mixed, DensityMatrix::maximally_mixed(2)),
                  DimensionError);
}

TEST_CASE("relative entropy is non-negative on random full-rank pairs") {
  std::mt19937 rng(35711);
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix a =
        DensityMatrix(test_oracles::random_density_matrix_entries(rng, 4));
    const DensityMatrix b =
        DensityMatrix(test_oracles::random_density_matrix_entries(rng, 4));
    CHECK(relative_entropy(a, b) >= -1e-10);
  }
}

TEST_CASE("bell basis: component values and orthonormality") {
  const auto bell = bell_basis_vectors();
  const double r = 1.0 / kSqrt2;

  CHECK(bell[0][0].real() == Catch::Approx(r));
  CHECK(bell[0][1] == complexd(0.0, 0.0));
  CHECK(bell[0][2] == complexd(0.0, 0.0));
  CHECK(bell[0][3].real() == Catch::Approx(r));

  CHECK(bell[1][0] == complexd(0.0, 0.0));
  CHECK(bell[1][1].real() == Catch::Approx(r));
  CHECK(bell[1][2].real() == Catch::Approx(-r));
  CHECK(bell[1][3] == complexd(0.0, 0.0));

  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      complexd dot(0.0, 0.0);
      for (std::size_t k = 0; k < 4; ++k) dot += std::conj(bell[i][k]) * bell[j][k];
      CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-15);
    }
}

TEST_CASE("bell vectors diagonalize both CHSH observables") {
  const auto bell = bell_basis_vectors();
  for (const auto& obs : {bell_chsh_operator(), bell_chsh_squared()}) {
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        if (i == j) continue;
        complexd off(0.0, 0.0);
        for (std::size_t a = 0; a < 4; ++a) {
          complexd row(0.0, 0.0);
          for (std::size_t c = 0; c < 4; ++c) row += obs.matrix()(a, c) * bell[j][c];
          off += std::conj(bell[i][a]) * row;
        }
        CHECK(std::abs(off) <= 1e-12);
      }
  }
}

TEST_CASE("partial transpose: identity, pure Bell state, involution") {
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(4);
  CHECK(max_abs_diff(partial_transpose(mixed, Subsystem::second),
                     mixed.matrix()) <= 1e-15);

  const DensityMatrix pure = bell_projector(0);
  const ComplexSquareMatrix pt = partial_transpose(pure, Subsystem::second);
  const auto eig = test_oracles::hermitian_eigenvalues_by_embedding(pt);
  CHECK(eig.front() == Catch::Approx(-0.5).margin(1e-12));

  // Against the block-wise oracles, both subsystems.
  std::mt19937 rng(777);
  for (int trial = 0; trial < 25; ++trial) {
    const DensityMatrix rho =
        DensityMatrix(test_oracles::random_density_matrix_entries(rng, 4));
    const ComplexSquareMatrix first = partial_transpose(rho, Subsystem::first);
    const ComplexSquareMatrix second = partial_transpose(rho, Subsystem::second);
    CHECK(max_abs_diff(first,
                       test_oracles::partial_transpose_first_blockwise(
                           rho.matrix())) <= 1e-15);
    CHECK(max_abs_diff(second,
                       test_oracles::partial_transpose_second_blockwise(
                           rho.matrix())) <= 1e-15);
    CHECK(is_hermitian(second, 1e-14));
    CHECK(std::abs(trace(second) - complexd(1.0, 0.0)) <= 1e-14);

    // Involution: transposing twice restores the state. The intermediate is
    // generally not positive, so the second application goes through the
    // raw-matrix oracle.
    CHECK(max_abs_diff(
              test_oracles::partial_transpose_second_blockwise(second),
              rho.matrix()) <= 1e-15);
    CHECK(max_abs_diff(test_oracles::partial_transpose_first_blockwise(first),
                       rho.matrix()) <= 1e-15);
  }

  // Linearity on convex mixtures.
  {
    const DensityMatrix r1 =
        DensityMatrix(test_oracles::random_density_matrix_entries(rng, 4));
    const DensityMatrix r2 =
        DensityMatrix(test_oracles::random_density_matrix_entries(rng, 4));
    const DensityMatrix mix(
        hermitian_part(0.3 * r1.matrix() + 0.7 * r2.matrix()));
    const ComplexSquareMatrix lhs = partial_transpose(mix, Subsystem::second);
    const ComplexSquareMatrix rhs =
        0.3 * partial_transpose(r1, Subsystem::second) +
        0.7 * partial_transpose(r2, Subsystem::second);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-14);
  }

  // On product states the partial transpose stays a valid state, so the
  // double application can run through the public API as well.
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexSquareMatrix a(2), b2(2);
    for (auto* m : {&a, &b2}) {
      ComplexSquareMatrix g(2);
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
          g(i, j) = complexd(gauss(rng), gauss(rng));
      *m = g * adjoint(g);
      *m = (1.0 / trace(*m).real()) * *m;
    }
    ComplexSquareMatrix prod(4);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 2; ++k)
          for (std::size_t l = 0; l < 2; ++l)
            prod(2 * i + k, 2 * j + l) = a(i, j) * b2(k, l);
    const DensityMatrix rho(hermitian_part(prod));
    const DensityMatrix once(
        hermitian_part(partial_transpose(rho, Subsystem::second)));
    CHECK(max_abs_diff(partial_transpose(once, Subsystem::second),
                       rho.matrix()) <= 1e-14);
  }
}

TEST_CASE("partial transpose rejects unsupported dimensions") {
  CHECK_THROWS_AS(
      partial_transpose(DensityMatrix::maximally_mixed(2), Subsystem::first),
      DimensionError);
}

TEST_CASE("type invariants reject malformed inputs") {
  ComplexSquareMatrix not_hermitian(2);
  not_hermitian(0, 1) = complexd(1.0, 0.0);
  not_hermitian(1, 0) = complexd(0.5, 0.0);
  CHECK_THROWS_AS(HermitianObservable(not_hermitian), InvariantError);

  ComplexSquareMatrix wrong_trace = ComplexSquareMatrix::identity(2);
  CHECK_THROWS_AS(DensityMatrix(wrong_trace), InvariantError);

  ComplexSquareMatrix not_psd(2);
  not_psd(0, 0) = 1.5;
  not_psd(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(not_psd), InvariantError);

  CHECK_THROWS_AS(ComplexSquareMatrix(0), DimensionError);
}
