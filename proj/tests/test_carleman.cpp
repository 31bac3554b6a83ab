#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <vector>

#include "clbm/carleman.hpp"
#include "support.hpp"

namespace clbm {
namespace {

using testing::naive_collide;
using testing::Rng;
using testing::uniform;

const auto vs = build_velocity_set<double>();

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double state_diff(const CarlemanState<double>& a, const CarlemanState<double>& b) {
  return max_abs(a.to_vector() - b.to_vector());
}

PopulationVector<double> quadratic_only(const PopulationVector<double>& f, const CollisionTensors<double>& t) {
  const PairBlock<double> ff = f * f.transpose();
  return t.A * f + contract_pair(t.B, ff);
}

TEST(Lift, UniformWeightsSingleSite) {
  LatticeField<double> f(1, 1);
  f.data().col(0) = vs.weights;
  const auto s = lift(f, 2, Cutoff::truncation, Locality::full_pairs);
  for (int i = 0; i < kQ; ++i) {
    for (int j = 0; j < kQ; ++j) EXPECT_EQ(s.g(s.g_index(i, 0, j, 0)), vs.weights(i) * vs.weights(j));
  }
}

TEST(Lift, ProductsAreExact) {
  Rng rng(31);
  const auto f = testing::random_field(rng, 3, 2);
  const auto s = lift(f, 3, Cutoff::truncation, Locality::full_pairs);
  std::uniform_int_distribution<int> vi(0, kQ - 1);
  std::uniform_int_distribution<int> xi(0, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const int i = vi(rng), j = vi(rng), k = vi(rng);
    const int a = xi(rng), b = xi(rng), c = xi(rng);
    EXPECT_NEAR(s.g(s.g_index(i, a, j, a)), f.data()(i, a) * f.data()(j, a), 1e-14);
    EXPECT_NEAR(s.g(s.g_index(i, a, j, b)), f.data()(i, a) * f.data()(j, b), 1e-14);
    EXPECT_NEAR(s.h(s.h_index(i, a, j, b, k, c)), f.data()(i, a) * f.data()(j, b) * f.data()(k, c), 1e-14);
  }
}

TEST(Lift, PairCountOnTwoByTwo) {
  const auto s = lift(LatticeField<double>(2, 2), 2, Cutoff::truncation, Locality::full_pairs);
  EXPECT_EQ(s.g.size(), 1296);
  EXPECT_EQ(s.h.size(), 0);
  const auto local = lift(LatticeField<double>(2, 2), 3, Cutoff::closure, Locality::local_single_step);
  EXPECT_EQ(local.g.size(), 4 * 81);
  EXPECT_EQ(local.h.size(), 4 * 729);
}

TEST(Lift, CapacityAndOrderErrors) {
  const LatticeField<double> f(8, 8);
  EXPECT_THROW(lift(LatticeField<double>(12, 12), 3, Cutoff::truncation, Locality::full_pairs), CapacityError);
  try {
    lift(f, 2, Cutoff::truncation, Locality::full_pairs, 1024);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_EQ(e.requested_bytes(), (576u + 576u * 576u) * sizeof(double));
    EXPECT_EQ(e.cap_bytes(), 1024u);
  }
  EXPECT_THROW(lift(f, 4, Cutoff::truncation, Locality::full_pairs), std::invalid_argument);
}

TEST(Truncate2, ExactLiftMatchesQuadraticCollision) {
  Rng rng(32);
  const auto t = build_tensors(1.4, vs);
  const auto f = testing::random_field(rng, 1, 1);
  const auto out = collide_truncate2(lift(f, 2, Cutoff::truncation, Locality::full_pairs), t);
  EXPECT_LT((out.f.at_site(0) - quadratic_only(f.at_site(0), t)).cwiseAbs().maxCoeff(), 1e-15);
}

// Mode coupling is A f + B ff - rho B ff / 2, so truncation overshoots it by rho B ff / 2.
TEST(Truncate2, ExcessOverModeCouplingIsHalfQuadraticTerm) {
  Rng rng(33);
  const auto t = build_tensors(1.5, vs);
  auto f = testing::near_rest_field(rng, 1, 1);
  const auto out = collide_truncate2(lift(f, 2, Cutoff::truncation, Locality::full_pairs), t);
  const PairBlock<double> ff = f.at_site(0) * f.at_site(0).transpose();
  const double rho = f.at_site(0).sum();
  const PopulationVector<double> excess = out.f.at_site(0) - collide_mode_coupling(f, t).at_site(0);
  EXPECT_LT((excess - 0.5 * rho * contract_pair(t.B, ff)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Truncate2, PairUpdateMatchesKroneckerProduct) {
  Rng rng(34);
  const auto t = build_tensors(1.0, vs);
  const auto s = testing::random_lifted(rng, 1, 1, 2, Cutoff::truncation);
  Eigen::MatrixXd K(kQ * kQ, kQ * kQ);
  for (int i = 0; i < kQ; ++i)
    for (int j = 0; j < kQ; ++j)
      for (int k = 0; k < kQ; ++k)
        for (int l = 0; l < kQ; ++l) K(i * kQ + j, k * kQ + l) = t.L(i, k) * t.L(j, l);
  const auto out = collide_truncate2(s, t);
  EXPECT_LT(max_abs(out.g - K * s.g), 1e-15);
}

TEST(Truncate2, ZeroPairsGiveLinearUpdate) {
  Rng rng(35);
  const auto t = build_tensors(0.7, vs);
  auto s = lift(testing::random_field(rng, 2, 3), 2, Cutoff::truncation, Locality::full_pairs);
  s.g.setZero();
  const auto out = collide_truncate2(s, t);
  EXPECT_LT((out.f.data() - t.A * s.f.data()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(max_abs(out.g), 0.0);
}

TEST(Truncate2, MatchesNaiveOracleOnThreeSites) {
  Rng rng(36);
  const auto t = build_tensors(1.6, vs);
  const auto s = testing::random_lifted(rng, 3, 1, 2, Cutoff::truncation);
  EXPECT_LT(state_diff(collide_truncate2(s, t), naive_collide(s, t, vs)), 1e-14);
}

TEST(Truncate2, RejectsMismatchedState) {
  const auto t = build_tensors(1.0, vs);
  const auto s = lift(LatticeField<double>(1, 1), 3, Cutoff::truncation, Locality::full_pairs);
  EXPECT_THROW(collide_truncate2(s, t), std::invalid_argument);
  const auto c = lift(LatticeField<double>(1, 1), 2, Cutoff::closure, Locality::full_pairs);
  EXPECT_THROW(collide_truncate2(c, t), std::invalid_argument);
}

TEST(Truncate3, ExactLiftSingleSiteMatchesModeCoupling) {
  Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = build_tensors(uniform(rng, 0.2, 1.9), vs);
    const auto f = testing::random_field(rng, 1, 1);
    const auto out = collide_truncate3(lift(f, 3, Cutoff::truncation, Locality::full_pairs), t);
    EXPECT_LT((out.f.data() - collide_mode_coupling(f, t).data()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Truncate3, ZeroTriplesReduceToTruncate2) {
  Rng rng(38);
  const auto t = build_tensors(1.2, vs);
  auto s3 = testing::random_lifted(rng, 2, 1, 3, Cutoff::truncation);
  s3.h.setZero();
  auto s2 = lift(s3.f, 2, Cutoff::truncation, Locality::full_pairs);
  s2.g = s3.g;
  const auto a = collide_truncate3(s3, t);
  const auto b = collide_truncate2(s2, t);
  EXPECT_LT((a.f.data() - b.f.data()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(max_abs(a.g - b.g), 1e-15);
  EXPECT_EQ(max_abs(a.h), 0.0);
}

TEST(Truncate3, MatchesDenseMatrixOnOneSite) {
  Rng rng(39);
  const auto t = build_tensors(1.5, vs);
  const auto s = testing::random_lifted(rng, 1, 1, 3, Cutoff::truncation);
  const Eigen::MatrixXd M =
      testing::assemble_matrix(s, [&](const CarlemanState<double>& e) { return naive_collide(e, t, vs); });
  EXPECT_LT(max_abs(collide_truncate3(s, t).to_vector() - M * s.to_vector()), 1e-12);
}

TEST(Truncate3, MatchesNaiveOracleOnTwoSites) {
  Rng rng(40);
  const auto t = build_tensors(1.1, vs);
  const auto s = testing::random_lifted(rng, 2, 1, 3, Cutoff::truncation);
  EXPECT_LT(state_diff(collide_truncate3(s, t), naive_collide(s, t, vs)), 1e-13);
}

TEST(Closure2, QuadraticCoefficientIsFiveSixths) {
  Rng rng(41);
  const auto t = build_tensors(1.3, vs);
  auto s = testing::random_lifted(rng, 1, 1, 2, Cutoff::closure);
  const auto out = collide_closure2(s, t, vs);
  PairBlock<double> g = Eigen::Map<const PairBlock<double>>(s.g.data());
  const PopulationVector<double> expected = t.A * s.f.at_site(0) + (5.0 / 6.0) * contract_pair(t.B, g);
  EXPECT_LT((out.f.at_site(0) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Closure2, ZeroPairsStayZero) {
  Rng rng(42);
  const auto t = build_tensors(1.3, vs);
  auto s = lift(testing::random_field(rng, 2, 2), 2, Cutoff::closure, Locality::full_pairs);
  s.g.setZero();
  const auto out = collide_closure2(s, t, vs);
  EXPECT_LT((out.f.data() - t.A * s.f.data()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(max_abs(out.g), 0.0);
}

// The closure replaces C fff by (1/3) C (w f f + f w f + f f w).
TEST(Closure2, ResidualAgainstModeCouplingMatchesClosedCubic) {
  Rng rng(43);
  const auto t = build_tensors(1.5, vs);
  const auto f = testing::random_field(rng, 1, 1);
  const auto out = collide_closure2(lift(f, 2, Cutoff::closure, Locality::full_pairs), t, vs);
  const auto& p = f.data();
  const auto& w = vs.weights;
  PopulationVector<double> residual = PopulationVector<double>::Zero();
  for (int i = 0; i < kQ; ++i) {
    for (int j = 0; j < kQ; ++j) {
      for (int k = 0; k < kQ; ++k) {
        for (int l = 0; l < kQ; ++l) {
          const double c = t.cubic(i, j, k, l);
          residual(i) += c * (w(j) * p(k, 0) * p(l, 0) + p(j, 0) * w(k) * p(l, 0) + p(j, 0) * p(k, 0) * w(l)) / 3.0 -
                         c * p(j, 0) * p(k, 0) * p(l, 0);
        }
      }
    }
  }
  const PopulationVector<double> diff = out.f.at_site(0) - collide_mode_coupling(f, t).at_site(0);
  EXPECT_LT((diff - residual).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Closure2, NonDiagonalUpdateMatchesNaiveOracle) {
  Rng rng(44);
  const auto t = build_tensors(0.9, vs);
  const auto s = testing::random_lifted(rng, 2, 2, 2, Cutoff::closure);
  const auto out = collide_closure2(s, t, vs);
  EXPECT_LT(state_diff(out, naive_collide(s, t, vs)), 1e-14);
  // a pair of distinct sites picks up the closure source
  auto no_source = s;
  no_source.cutoff = Cutoff::truncation;
  const auto tr = collide_truncate2(no_source, t);
  EXPECT_GT(std::abs(out.g(s.g_index(0, 0, 1, 3)) - tr.g(s.g_index(0, 0, 1, 3))), 1e-6);
}

TEST(Closure3, ZeroHigherDegreesGiveLinearUpdate) {
  Rng rng(45);
  const auto t = build_tensors(1.3, vs);
  auto s = lift(testing::random_field(rng, 1, 2), 3, Cutoff::closure, Locality::full_pairs);
  s.g.setZero();
  s.h.setZero();
  const auto out = collide_closure3(s, t, vs);
  EXPECT_LT((out.f.data() - t.A * s.f.data()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Closure3, ExactLiftSingleSiteMatchesModeCoupling) {
  Rng rng(46);
  const auto t = build_tensors(1.5, vs);
  const auto f = testing::random_field(rng, 1, 1);
  const auto out = collide_closure3(lift(f, 3, Cutoff::closure, Locality::full_pairs), t, vs);
  EXPECT_LT((out.f.data() - collide_mode_coupling(f, t).data()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Closure3, MatchesDenseMatrixOnOneSite) {
  Rng rng(47);
  const auto t = build_tensors(1.7, vs);
  const auto s = testing::random_lifted(rng, 1, 1, 3, Cutoff::closure);
  const Eigen::MatrixXd M =
      testing::assemble_matrix(s, [&](const CarlemanState<double>& e) { return naive_collide(e, t, vs); });
  EXPECT_LT(max_abs(collide_closure3(s, t, vs).to_vector() - M * s.to_vector()), 1e-12);
}

TEST(Closure3, MatchesNaiveOracleOnTwoSites) {
  Rng rng(48);
  const auto t = build_tensors(0.8, vs);
  const auto s = testing::random_lifted(rng, 1, 2, 3, Cutoff::closure);
  EXPECT_LT(state_diff(collide_closure3(s, t, vs), naive_collide(s, t, vs)), 1e-13);
}

TEST(Collide, VariantsAreLinear) {
  Rng rng(49);
  const auto t = build_tensors(1.4, vs);
  for (const int order : {2, 3}) {
    for (const Cutoff cutoff : {Cutoff::truncation, Cutoff::closure}) {
      const auto v = testing::random_lifted(rng, 2, 1, order, cutoff);
      const auto w = testing::random_lifted(rng, 2, 1, order, cutoff);
      const double a = uniform(rng, -2.0, 2.0);
      const double b = uniform(rng, -2.0, 2.0);
      auto mix = v;
      mix.assign_from_vector(a * v.to_vector() + b * w.to_vector());
      const Eigen::VectorXd lhs = carleman_step(mix, t, vs).to_vector();
      const Eigen::VectorXd rhs = a * carleman_step(v, t, vs).to_vector() + b * carleman_step(w, t, vs).to_vector();
      EXPECT_LT(max_abs(lhs - rhs), 1e-12) << "order " << order;
    }
  }
}

TEST(Collide, VariantsConserveMassAndMomentumPerSite) {
  Rng rng(50);
  const auto t = build_tensors(1.6, vs);
  for (const int order : {2, 3}) {
    for (const Cutoff cutoff : {Cutoff::truncation, Cutoff::closure}) {
      for (int trial = 0; trial < 10; ++trial) {
        const auto s = lift(testing::random_field(rng, 2, 1), order, cutoff, Locality::full_pairs);
        const auto out = collide(s, t, vs);
        for (Eigen::Index x = 0; x < 2; ++x) {
          const auto a = moments(s.f.at_site(x), vs);
          const auto b = moments(out.f.at_site(x), vs);
          EXPECT_NEAR(a.density, b.density, 1e-12);
          EXPECT_LT((a.momentum - b.momentum).cwiseAbs().maxCoeff(), 1e-12);
        }
      }
    }
  }
}

TEST(StreamLifted, OneHotPairMovesWithBothVelocities) {
  auto s = lift(LatticeField<double>(3, 4), 2, Cutoff::truncation, Locality::full_pairs);
  const LatticeField<double>& grid = s.f;
  const Eigen::Index x1 = grid.site(1, 2);
  const Eigen::Index x2 = grid.site(2, 3);
  s.g(s.g_index(1, x1, 2, x2)) = 1.0;
  const auto out = stream_lifted(s, vs);
  EXPECT_EQ(out.g(s.g_index(1, grid.site(2, 2), 2, grid.site(2, 0))), 1.0);
  EXPECT_EQ(out.g.sum(), 1.0);
}

TEST(StreamLifted, OneHotTripleMovesWithAllVelocities) {
  auto s = lift(LatticeField<double>(2, 2), 3, Cutoff::truncation, Locality::full_pairs);
  const LatticeField<double>& grid = s.f;
  s.h(s.h_index(5, grid.site(1, 1), 3, grid.site(0, 1), 0, grid.site(1, 0))) = 2.0;
  const auto out = stream_lifted(s, vs);
  EXPECT_EQ(out.h(s.h_index(5, grid.site(0, 0), 3, grid.site(1, 1), 0, grid.site(1, 0))), 2.0);
  EXPECT_EQ(out.h.sum(), 2.0);
}

TEST(StreamLifted, PreservesMultisetOfValues) {
  Rng rng(51);
  const auto s = testing::random_lifted(rng, 3, 2, 2, Cutoff::truncation);
  const auto out = stream_lifted(s, vs);
  std::vector<double> a(s.g.data(), s.g.data() + s.g.size());
  std::vector<double> b(out.g.data(), out.g.data() + out.g.size());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

// After one step the pairs are the exact products of the linearly evolved populations.
TEST(StreamLifted, PairsStayProductOfLinearPart) {
  Rng rng(52);
  const auto t = build_tensors(1.5, vs);
  const auto f = testing::random_field(rng, 3, 3);
  const auto out = carleman_step(lift(f, 2, Cutoff::truncation, Locality::full_pairs), t, vs);
  LatticeField<double> linear = f;
  linear.data() = t.A * f.data();
  const auto expected = lift(stream(linear, vs), 2, Cutoff::truncation, Locality::full_pairs);
  EXPECT_LT(max_abs(out.g - expected.g), 1e-12);
}

TEST(StreamLifted, SingleStepMatchesQuadraticLbmStep) {
  Rng rng(53);
  const auto t = build_tensors(1.2, vs);
  const auto f = testing::random_field(rng, 4, 3);
  LatticeField<double> collided = f;
  for (Eigen::Index s = 0; s < f.sites(); ++s) collided.data().col(s) = quadratic_only(f.at_site(s), t);
  const auto expected = stream(collided, vs);
  for (const Locality loc : {Locality::full_pairs, Locality::local_single_step}) {
    const auto out = carleman_step(lift(f, 2, Cutoff::truncation, loc), t, vs);
    EXPECT_LT((out.f.data() - expected.data()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(StreamLifted, LocalStateIsExhaustedAfterOneStep) {
  Rng rng(54);
  const auto t = build_tensors(1.2, vs);
  const auto s = lift(testing::random_field(rng, 2, 2), 2, Cutoff::truncation, Locality::local_single_step);
  const auto once = carleman_step(s, t, vs);
  EXPECT_TRUE(once.exhausted);
  EXPECT_THROW(stream_lifted(once, vs), StateExhaustedError);
  EXPECT_THROW(collide_truncate2(once, t), StateExhaustedError);
}

TEST(LocalCollision, MatchesFullPairsOnDiagonal) {
  Rng rng(55);
  const auto t = build_tensors(1.3, vs);
  const auto f = testing::random_field(rng, 2, 2);
  for (const int order : {2, 3}) {
    for (const Cutoff cutoff : {Cutoff::truncation, Cutoff::closure}) {
      LatticeField<double> one(1, 1);
      for (Eigen::Index x = 0; x < f.sites(); ++x) {
        one.data().col(0) = f.at_site(x);
        const auto full = collide(lift(one, order, cutoff, Locality::full_pairs), t, vs);
        const auto local = collide(lift(f, order, cutoff, Locality::local_single_step), t, vs);
        EXPECT_LT((local.f.at_site(x) - full.f.at_site(0)).cwiseAbs().maxCoeff(), 1e-15);
        for (int i = 0; i < kQ; ++i)
          for (int j = 0; j < kQ; ++j)
            EXPECT_NEAR(local.g(local.g_local_index(i, x, j)), full.g(full.g_index(i, 0, j, 0)), 1e-15);
      }
    }
  }
}

TEST(Counts, ReferenceGridValues) {
  const auto c2 = carleman_counts(1024, 9, 2);
  EXPECT_EQ(c2.n_natural, 9216u);
  EXPECT_EQ(c2.n_cl, 84943872u);
  EXPECT_EQ(c2.q, 27);
  const auto c3 = carleman_counts(1024, 9, 3);
  EXPECT_EQ(c3.n_cl, 9216u + 84934656u + 782757789696u);
  EXPECT_NEAR(static_cast<double>(c3.n_cl), 7.8e11, 0.05e11);
  EXPECT_EQ(c3.q, 40);
  const auto sym = carleman_counts(1, 9, 2, 1, true);
  EXPECT_EQ(sym.n_cl, 54u);
  EXPECT_EQ(sym.q, 6);
  EXPECT_EQ(carleman_counts(4, 9, 2, 1, true).n_cl, 4u * 54u);
}

TEST(Counts, WindowedFormulaAndQubitRule) {
  // 32 x 32: L = 32, windowed for s < 16.5
  EXPECT_EQ(carleman_counts(1024, 9, 2, 1).n_cl, 1024u * (9u + 81u));
  EXPECT_EQ(carleman_counts(1024, 9, 2, 3).n_cl, 1024u * (9u + 81u * 25u));
  // the window reaches the whole lattice at s = (L + 1) / 2
  EXPECT_EQ(carleman_counts(25, 9, 2, 3).n_cl, carleman_counts(25, 9, 2).n_cl);
  EXPECT_EQ(carleman_counts(25, 9, 2, 2).n_cl, 25u * (9u + 81u * 9u));
  for (std::uint64_t n : {1u, 2u, 7u, 16u, 100u}) {
    for (int order : {2, 3}) {
      const auto c = carleman_counts(n, 9, order);
      EXPECT_GE(std::uint64_t{1} << c.q, c.n_cl);
      EXPECT_LT(std::uint64_t{1} << (c.q - 1), c.n_cl);
    }
  }
  EXPECT_THROW(carleman_counts(0, 9, 2), std::invalid_argument);
  EXPECT_THROW(carleman_counts(4, 9, 4), std::invalid_argument);
  EXPECT_THROW(carleman_counts(4, 9, 3, 0, true), std::invalid_argument);
}

TEST(SymmetricPacking, RoundTrip) {
  Rng rng(56);
  const auto f = testing::random_field(rng, 2, 1);
  const auto s = lift(f, 2, Cutoff::truncation, Locality::local_single_step);
  const Eigen::VectorXd packed = pack_symmetric(s);
  EXPECT_EQ(packed.size(), 2 * 54);
  auto back = lift(LatticeField<double>(2, 1), 2, Cutoff::truncation, Locality::local_single_step);
  unpack_symmetric(packed, back);
  EXPECT_EQ(back.to_vector(), s.to_vector());
}

TEST(VectorDump, RoundTripAndValidation) {
  Rng rng(57);
  const auto s = testing::random_lifted(rng, 2, 1, 3, Cutoff::closure);
  const auto path = std::filesystem::temp_directory_path() / "clbm_vector_dump.bin";
  save_carleman_vector(path, s);
  EXPECT_EQ(std::filesystem::file_size(path), 16u + sizeof(double) * static_cast<std::size_t>(s.to_vector().size()));
  const auto loaded = load_carleman_vector(path);
  EXPECT_EQ(loaded.header.order, 3u);
  EXPECT_EQ(loaded.header.sites, 2u);
  EXPECT_EQ(loaded.header.velocities, 9u);
  EXPECT_EQ(loaded.values, s.to_vector());
  {
    std::fstream io(path, std::ios::in | std::ios::out | std::ios::binary);
    io.write("XXXX", 4);
  }
  EXPECT_THROW(load_carleman_vector(path), Error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace clbm
