#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nonloc/constructions.hpp"
#include "nonloc/schmidt.hpp"
#include "support.hpp"

using namespace nonloc;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("regroup lays out amplitudes by grouped indices") {
  const StateVector ghz = superpose({{{0, 0, 0}, 1.0}, {{1, 1, 1}, 1.0}}, {2, 2, 2});
  const Eigen::MatrixXcd m = regroup(ghz, Bipartition({0, 1}, {2}, 3));
  REQUIRE(m.rows() == 4);
  REQUIRE(m.cols() == 2);
  REQUIRE(std::abs(m(0, 0) - cd(kInvSqrt2, 0.0)) <= 1e-15);
  REQUIRE(std::abs(m(3, 1) - cd(kInvSqrt2, 0.0)) <= 1e-15);
  REQUIRE(std::abs(m.squaredNorm() - 1.0) <= 1e-14);
  long nonzeros = 0;
  for (long r = 0; r < 4; ++r)
    for (long c = 0; c < 2; ++c)
      if (std::abs(m(r, c)) > 0) ++nonzeros;
  REQUIRE(nonzeros == 2);
}

TEST_CASE("regroup of the first k-partite phase state hits the diagonal columns") {
  const StateSet set = mes_set_kpartite(4, 3);
  const Eigen::MatrixXcd m = regroup(set.states[0], Bipartition({0}, {1, 2, 3}, 4));
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 27);
  const double r3 = 1.0 / std::sqrt(3.0);
  for (int l = 0; l < 3; ++l) REQUIRE(std::abs(m(l, 13 * l) - cd(r3, 0.0)) <= 1e-12);
  REQUIRE(std::abs(m.squaredNorm() - 1.0) <= 1e-12);
}

TEST_CASE("regroup rejects mismatched bipartitions") {
  const StateVector ghz = superpose({{{0, 0, 0}, 1.0}, {{1, 1, 1}, 1.0}}, {2, 2, 2});
  REQUIRE_THROWS_AS(regroup(ghz, Bipartition({0, 1}, {2, 3}, 4)), shape_error);
}

TEST_CASE("regroup round trip is bit-exact on random states") {
  std::mt19937 rng(7041);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> party_count(3, 4);
    std::uniform_int_distribution<int> dim(2, 3);
    const int n = party_count(rng);
    std::vector<int> dims(static_cast<size_t>(n));
    for (int& d : dims) d = dim(rng);
    const StateVector s = testsupport::random_state(rng, dims);
    const Bipartition cut = testsupport::random_bipartition(rng, n);
    const StateVector back = regroup_inverse(regroup(s, cut), cut, dims);
    for (long i = 0; i < s.total_dim(); ++i) {
      REQUIRE(back.amplitudes()[i].real() == s.amplitudes()[i].real());
      REQUIRE(back.amplitudes()[i].imag() == s.amplitudes()[i].imag());
    }
  }
}

TEST_CASE("schmidt of a GHZ cut is flat at rank two") {
  const StateVector ghz = superpose({{{0, 0, 0}, 1.0}, {{1, 1, 1}, 1.0}}, {2, 2, 2});
  const SchmidtData data = schmidt(regroup(ghz, Bipartition({0}, {1, 2}, 3)));
  REQUIRE(data.rank == 2);
  REQUIRE(std::abs(data.singular_values[0] - kInvSqrt2) <= 1e-12);
  REQUIRE(std::abs(data.singular_values[1] - kInvSqrt2) <= 1e-12);
  REQUIRE(data.max_deviation_from_flat <= 1e-12);
}

TEST_CASE("schmidt of a Bell pair matches the printed values") {
  const StateVector bell = superpose({{{0, 1}, 1.0}, {{1, 0}, 1.0}}, {2, 2});
  const SchmidtData data = schmidt(regroup(bell, Bipartition({0}, {1}, 2)));
  REQUIRE(data.rank == 2);
  REQUIRE(data.max_deviation_from_flat <= 1e-12);
}

TEST_CASE("schmidt of a product state is rank one") {
  const StateVector product = superpose({{{0, 0, 0}, 1.0}}, {2, 2, 2});
  const SchmidtData data = schmidt(regroup(product, Bipartition({0, 2}, {1}, 3)));
  REQUIRE(data.rank == 1);
  REQUIRE(std::abs(data.singular_values[0] - 1.0) <= 1e-12);
}

TEST_CASE("schmidt of the fourth 3x3x3 state is flat at rank three") {
  const StateSet set = mes_set_3x3x3();
  const SchmidtData data = schmidt(regroup(set.states[3], Bipartition({0}, {1, 2}, 3)));
  REQUIRE(data.rank == 3);
  const double r3 = 1.0 / std::sqrt(3.0);
  for (int i = 0; i < 3; ++i) REQUIRE(std::abs(data.singular_values[i] - r3) <= 1e-12);
}

TEST_CASE("schmidt requires a unit-norm matrix") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 0) = 2.0;
  REQUIRE_THROWS_AS(schmidt(m), precondition_error);
}

TEST_CASE("schmidt values: sorted, squares sum to one, phase-invariant, side-symmetric") {
  std::mt19937 rng(90210);
  std::uniform_real_distribution<double> angle(0.0, 6.28318530717958648);
  for (int trial = 0; trial < 25; ++trial) {
    std::uniform_int_distribution<int> party_count(3, 4);
    std::uniform_int_distribution<int> dim(2, 3);
    const int n = party_count(rng);
    std::vector<int> dims(static_cast<size_t>(n));
    for (int& d : dims) d = dim(rng);
    const StateVector s = testsupport::random_state(rng, dims);
    const Bipartition cut = testsupport::random_bipartition(rng, n);

    const SchmidtData data = schmidt(regroup(s, cut));
    double sum_sq = 0.0;
    for (long i = 0; i < data.singular_values.size(); ++i) {
      sum_sq += data.singular_values[i] * data.singular_values[i];
      if (i > 0) REQUIRE(data.singular_values[i] <= data.singular_values[i - 1] + 1e-14);
    }
    REQUIRE(std::abs(sum_sq - 1.0) <= 1e-10);

    const cd phase = std::polar(1.0, angle(rng));
    const StateVector rotated =
        StateVector::from_unit_amplitudes(dims, phase * s.amplitudes());
    const SchmidtData rotated_data = schmidt(regroup(rotated, cut));
    REQUIRE((rotated_data.singular_values - data.singular_values).cwiseAbs().maxCoeff() <= 1e-10);

    const Bipartition swapped(cut.block_b(), cut.block_a(), n);
    const SchmidtData swapped_data = schmidt(regroup(s, swapped));
    REQUIRE((swapped_data.singular_values - data.singular_values).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("schmidt values match the reduced-density eigenvalue route") {
  std::mt19937 rng(1847);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> dim(2, 3);
    std::vector<int> dims{dim(rng), dim(rng), dim(rng)};
    const StateVector s = testsupport::random_state(rng, dims);
    const Bipartition cut = testsupport::random_bipartition(rng, 3);
    const Eigen::MatrixXcd m = regroup(s, cut);
    const Eigen::VectorXd via_svd = schmidt(m).singular_values;
    const Eigen::VectorXd via_density = testsupport::schmidt_values_by_density(m);
    REQUIRE((via_svd - via_density).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("orthonormalized columns form an orthonormal basis and keep column order") {
  Eigen::MatrixXcd cols(3, 3);
  cols.col(0) << 1.0, 1.0, 0.0;
  cols.col(1) << 2.0, 2.0, 0.0;  // dependent on column 0
  cols.col(2) << 0.0, 1.0, 1.0;
  const Eigen::MatrixXcd basis = orthonormalize_columns(cols, 1e-9);
  REQUIRE(basis.cols() == 2);
  REQUIRE((basis.adjoint() * basis - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <=
          1e-12);
  // first basis vector is the normalized first input column
  REQUIRE(std::abs(basis(0, 0) - cd(kInvSqrt2, 0.0)) <= 1e-12);
  REQUIRE(std::abs(basis(1, 0) - cd(kInvSqrt2, 0.0)) <= 1e-12);
  REQUIRE(std::abs(basis(2, 0)) <= 1e-12);
}

TEST_CASE("reduced supports have equal dims on both sides and orthonormal bases") {
  const StateSet set = mes_set_3x3x3();
  for (const StateVector& s : set.states) {
    for (const Bipartition& cut : enumerate_bipartitions(3)) {
      const Subspace sa = reduced_support(s, cut, Side::A);
      const Subspace sb = reduced_support(s, cut, Side::B);
      REQUIRE(sa.dim() == sb.dim());
      REQUIRE(sa.dim() == schmidt(regroup(s, cut)).rank);
      REQUIRE((sa.basis.adjoint() * sa.basis -
               Eigen::MatrixXcd::Identity(sa.dim(), sa.dim())).cwiseAbs().maxCoeff() <= 1e-10);
      REQUIRE(sa.ambient_dim >= sa.dim());
      REQUIRE(sa.dim() >= 1);
    }
  }
}

TEST_CASE("reduced support of a GHZ state spans the expected grouped labels") {
  const StateVector ghz = superpose({{{0, 0, 0}, 1.0}, {{1, 1, 1}, 1.0}}, {2, 2, 2});
  const Subspace side_a = reduced_support(ghz, Bipartition({0, 1}, {2}, 3), Side::A);
  REQUIRE(side_a.ambient_dim == 4);
  REQUIRE(side_a.dim() == 2);
  // span{|00>, |11>}: no weight on grouped labels 1 and 2
  for (int col = 0; col < 2; ++col) {
    REQUIRE(std::abs(side_a.basis(1, col)) <= 1e-12);
    REQUIRE(std::abs(side_a.basis(2, col)) <= 1e-12);
  }

  const Subspace product_side =
      reduced_support(superpose({{{0, 0, 0}, 1.0}}, {2, 2, 2}), Bipartition({0}, {1, 2}, 3),
                      Side::B);
  REQUIRE(product_side.dim() == 1);
}

TEST_CASE("reduced support side B of the fourth 3x3x3 state spans the diagonal pairs") {
  const StateSet set = mes_set_3x3x3();
  const Subspace sb = reduced_support(set.states[3], Bipartition({0}, {1, 2}, 3), Side::B);
  REQUIRE(sb.ambient_dim == 9);
  REQUIRE(sb.dim() == 3);
  // span{|00>, |11>, |22>}: grouped indices 0, 4, 8
  for (int col = 0; col < 3; ++col)
    for (long row = 0; row < 9; ++row)
      if (row != 0 && row != 4 && row != 8) REQUIRE(std::abs(sb.basis(row, col)) <= 1e-12);
}

TEST_CASE("single-party reduced density agrees with schmidt eigenvalues") {
  std::mt19937 rng(5150);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<int> dims{2, 3, 2};
    const StateVector s = testsupport::random_state(rng, dims);
    for (int party = 0; party < 3; ++party) {
      const Eigen::MatrixXcd rho = reduced_density(s, party);
      REQUIRE(std::abs(rho.trace().real() - 1.0) <= 1e-12);
      REQUIRE((rho - rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  REQUIRE_THROWS_AS(reduced_density(testsupport::random_state(rng, {2, 2, 2}), 3),
                    parameter_error);
}
