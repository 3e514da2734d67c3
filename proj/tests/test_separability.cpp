#include <gtest/gtest.h>

#include <cmath>

#include "entwit/separability.hpp"
#include "support.hpp"

using namespace entwit;
using entwit::testing::MatrixNear;

namespace {

WitnessOperator two_qubit_witness() { return bipartite_basis_witness({2, 2}, 0, 1, 0, 1); }

}  // namespace

TEST(SMatrix, PureStateIsRankOne) {
  const auto o = two_qubit_witness();
  const auto bell = bell_phi_plus();
  const ComplexMatrix s = s_matrix(density_from_pure(bell), o);
  const auto sv = singular_values(s);
  EXPECT_NEAR(sv[0], std::abs(conjugate_overlap(bell, o)), 1e-12);
  EXPECT_NEAR(sv[0] * o.scale, 1.0, 1e-12);
  for (std::size_t i = 1; i < sv.size(); ++i) EXPECT_NEAR(sv[i], 0.0, 1e-12);
}

TEST(SMatrix, MaximallyMixed) {
  const auto o = two_qubit_witness();
  const DensityMatrix rho({2, 2}, ComplexMatrix::Identity(4, 4) / 4.0);
  EXPECT_TRUE(MatrixNear(s_matrix(rho, o), o.matrix / 4.0, 1e-14));
  for (double v : singular_values(s_matrix(rho, o))) EXPECT_NEAR(v, 0.125, 1e-14);
}

TEST(SMatrix, Symmetric) {
  Rng rng = derive_rng(1, 0);
  for (int t = 0; t < 10; ++t) {
    const auto rho = random_mixed({3, 3}, 4, rng);
    const ComplexMatrix s = s_matrix(rho, semi_random_bipartite(rho.dims(), rng));
    EXPECT_LT((s - s.transpose()).norm(), 1e-12);
  }
}

TEST(SMatrix, DimensionMismatch) {
  EXPECT_THROW(s_matrix(isotropic(3, 0.5), two_qubit_witness()), ValidationError);
}

TEST(WitnessTest, Bell) {
  const auto r = witness_test(density_from_pure(bell_phi_plus()), two_qubit_witness());
  EXPECT_TRUE(r.violated);
  EXPECT_NEAR(r.lhs, 0.5, 1e-12);
  EXPECT_NEAR(r.rhs, 0.0, 1e-12);
  EXPECT_GT(r.margin, r.threshold);
  EXPECT_EQ(r.label, "basis(1,2:1,2)");
}

TEST(WitnessTest, MaximallyMixedNotViolated) {
  const DensityMatrix rho({2, 2}, ComplexMatrix::Identity(4, 4) / 4.0);
  const auto r = witness_test(rho, two_qubit_witness());
  EXPECT_FALSE(r.violated);
  EXPECT_NEAR(r.margin, -2.0 * r.lhs, 1e-14);
}

TEST(WitnessTest, ProductStateNotViolated) {
  Rng rng = derive_rng(2, 0);
  const auto rho = density_from_pure(random_product_pure({3, 3}, rng));
  const auto r = witness_test(rho, semi_random_bipartite(rho.dims(), rng));
  EXPECT_NEAR(r.lhs, 0.0, 1e-8);
  EXPECT_FALSE(r.violated);
}

TEST(WitnessTest, ResultInvariants) {
  Rng rng = derive_rng(3, 0);
  for (int t = 0; t < 20; ++t) {
    const auto rho = random_mixed({2, 3}, 1 + t % 6, rng);
    const auto r = witness_test(rho, semi_random_bipartite(rho.dims(), rng));
    EXPECT_TRUE(std::is_sorted(r.singular_values.rbegin(), r.singular_values.rend()));
    EXPECT_GE(r.singular_values.back(), 0.0);
    EXPECT_EQ(r.violated, r.margin > r.threshold);
    EXPECT_NEAR(r.margin, r.lhs - r.rhs, 1e-15);
  }
}

TEST(WitnessTest, LocalUnitaryCovariance) {
  // S transforms as (U sqrt(rho) U^dag)^T O (U sqrt(rho) U^dag); with O -> U^* O U^dag the
  // singular values are unchanged.
  Rng rng = derive_rng(4, 0);
  const auto rho = random_mixed({2, 3}, 3, rng);
  const auto o = semi_random_bipartite(rho.dims(), rng);
  const auto us = random_local_unitaries(rho.dims(), rng);
  const ComplexMatrix u = local_unitary(rho.dims(), us);
  const auto moved = apply_local_unitary(rho, us);
  WitnessOperator o2 = o;
  o2.matrix = u.conjugate() * o.matrix * u.adjoint();
  const auto a = witness_test(rho, o).singular_values;
  const auto b = witness_test(moved, o2).singular_values;
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
}

TEST(SpectrumViaRho, AgreesWithSMatrix) {
  Rng rng = derive_rng(5, 0);
  for (int t = 0; t < 10; ++t) {
    const auto rho = random_mixed({3, 3}, 9, rng);
    const auto o = semi_random_bipartite(rho.dims(), rng);
    const auto a = singular_values(s_matrix(rho, o));
    const auto b = spectrum_via_rho(rho, o);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-8);
  }
}

TEST(SpectrumViaRho, Examples) {
  const auto o = two_qubit_witness();
  const auto b = spectrum_via_rho(density_from_pure(bell_phi_plus()), o);
  EXPECT_NEAR(b[0], 0.5, 1e-7);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(b[i], 0.0, 1e-7);
  const auto eq = spectrum_via_rho(DensityMatrix({2, 2}, ComplexMatrix::Identity(4, 4) / 4.0), o);
  for (double v : eq) EXPECT_NEAR(v, eq.front(), 1e-12);
}

TEST(Detection, BellFirstTrial) {
  DetectionOptions opt;
  opt.trials = 1;
  const auto r = sample_witness_detection(density_from_pure(bell_phi_plus()), opt);
  EXPECT_EQ(r.verdict, Verdict::Entangled);
  ASSERT_TRUE(r.first_violation_trial.has_value());
  EXPECT_EQ(*r.first_violation_trial, 1u);
  EXPECT_EQ(r.trials, 1u);
}

TEST(Detection, SeparableMixtureInconclusive) {
  Rng rng = derive_rng(6, 0);
  const auto rho = random_separable_mixture({3, 3}, 6, rng);
  DetectionOptions opt;
  opt.trials = 500;
  opt.master_seed = 17;
  const auto r = sample_witness_detection(rho, opt);
  EXPECT_EQ(r.verdict, Verdict::Inconclusive);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_EQ(r.trials, 500u);
  EXPECT_FALSE(r.first_violation_trial.has_value());
  EXPECT_LE(r.max_margin, 0.0);
}

TEST(Detection, ThreadCountDoesNotChangeReport) {
  Rng rng = derive_rng(7, 0);
  const auto rho = random_mixed({2, 2, 2}, 2, rng);
  for (bool full : {false, true}) {
    DetectionOptions opt;
    opt.trials = 300;
    opt.master_seed = 99;
    opt.full_stats = full;
    const auto a = sample_witness_detection(rho, opt);
    opt.threads = 3;
    const auto b = sample_witness_detection(rho, opt);
    EXPECT_EQ(a.trials, b.trials);
    EXPECT_EQ(a.violations, b.violations);
    EXPECT_EQ(a.first_violation_trial, b.first_violation_trial);
    EXPECT_EQ(a.max_margin, b.max_margin);
    EXPECT_EQ(a.family, SamplingFamily::CutRoundRobin);
  }
}

TEST(Detection, EarlyExitStatisticsStopAtFirstViolation) {
  const auto rho = isotropic(3, 0.45);
  DetectionOptions opt;
  opt.trials = 1000;
  opt.master_seed = 5;
  const auto early = sample_witness_detection(rho, opt);
  opt.full_stats = true;
  const auto full = sample_witness_detection(rho, opt);
  ASSERT_TRUE(early.first_violation_trial.has_value());
  EXPECT_EQ(early.first_violation_trial, full.first_violation_trial);
  EXPECT_EQ(early.trials, *early.first_violation_trial);
  EXPECT_EQ(early.violations, 1u);
  EXPECT_EQ(full.trials, 1000u);
  EXPECT_GE(full.violations, early.violations);
  EXPECT_LE(*full.first_violation_trial, full.trials);
}

TEST(Detection, TrialWitnessDependsOnlyOnSeedAndIndex) {
  const DimSpec dims{2, 3};
  EXPECT_EQ(trial_witness(dims, SamplingFamily::Bipartite, 3, 10).matrix,
            trial_witness(dims, SamplingFamily::Bipartite, 3, 10).matrix);
  EXPECT_NE(trial_witness(dims, SamplingFamily::Bipartite, 3, 10).matrix,
            trial_witness(dims, SamplingFamily::Bipartite, 3, 11).matrix);
  EXPECT_EQ(*trial_witness({2, 2, 2}, SamplingFamily::CutRoundRobin, 3, 5).structure.cut_index(), 1u);
}

TEST(Detection, Validation) {
  DetectionOptions opt;
  opt.trials = 0;
  EXPECT_THROW(sample_witness_detection(isotropic(2, 1.0), opt), ValidationError);
  opt.trials = 5;
  opt.family = SamplingFamily::Bipartite;
  EXPECT_THROW(sample_witness_detection(density_from_pure(ghz(3, 2)), opt), ValidationError);
}

TEST(PureStateCheck, Examples) {
  const auto prod = pure_state_check(basis_state({2, 2, 2, 2}, {0, 0, 1, 1}));
  EXPECT_EQ(prod.verdict, Verdict::Separable);
  EXPECT_LT(prod.max_overlap, 1e-12);
  const auto g = pure_state_check(ghz(3, 2));
  EXPECT_EQ(g.verdict, Verdict::Entangled);
  EXPECT_GT(g.max_overlap, 0.1);
}

TEST(PureStateCheck, FastPathsMatchOperators) {
  Rng rng = derive_rng(9, 0);
  const auto psi = random_pure({3, 4}, rng);
  const auto o = bipartite_basis_witness(psi.dims(), 0, 2, 1, 3);
  EXPECT_NEAR(std::abs(bipartite_basis_overlap(psi, 0, 2, 1, 3)), std::abs(conjugate_overlap(psi, o)) * o.scale,
              1e-12);
  const auto tri = random_pure({2, 3, 2}, rng);
  const std::vector<IndexPair> idx{{0, 1}, {2, 0}, {1, 1}};
  const auto op = multipartite_cut_witness(tri.dims(), 0, idx);
  EXPECT_NEAR(std::abs(cut_witness_overlap(tri, 0, idx)), std::abs(conjugate_overlap(tri, op)) * op.scale, 1e-12);
}

TEST(PureStateCheck, AgreesWithWootters) {
  Rng rng = derive_rng(10, 0);
  for (int t = 0; t < 50; ++t) {
    const auto psi = t % 2 ? random_pure({2, 2}, rng) : random_product_pure({2, 2}, rng);
    const bool entangled = pure_state_check(psi).verdict == Verdict::Entangled;
    EXPECT_EQ(entangled, wootters_oracle(density_from_pure(psi)) > 1e-6);
  }
}

TEST(AverageConcurrenceBound, Examples) {
  const auto basis = enumerate_bipartite_basis({2, 2});
  const auto o = compose_witness(basis, {1.0});
  EXPECT_NEAR(average_concurrence_bound(density_from_pure(bell_phi_plus()), o), 1.0, 1e-12);
  EXPECT_NEAR(average_concurrence_bound(werner_2qubit(0.9), o), (3 * 0.9 - 1) / 2, 1e-12);
  Rng rng = derive_rng(11, 0);
  EXPECT_EQ(average_concurrence_bound(random_separable_mixture({2, 2}, 3, rng), o), 0.0);
  EXPECT_THROW(average_concurrence_bound(werner_2qubit(0.9), basis[0]), ValidationError);
}

TEST(AverageConcurrenceBound, BelowWootters) {
  const auto o = compose_witness(enumerate_bipartite_basis({2, 2}), {1.0});
  Rng rng = derive_rng(12, 0);
  for (int t = 0; t < 30; ++t) {
    const auto rho = random_mixed({2, 2}, 1 + t % 4, rng);
    EXPECT_LE(average_concurrence_bound(rho, o), wootters_oracle(rho) + 1e-9);
  }
}

TEST(PptOracle, Examples) {
  const auto bell = ppt_oracle(density_from_pure(bell_phi_plus()));
  EXPECT_TRUE(bell.npt);
  EXPECT_NEAR(bell.min_eigenvalue, -0.5, 1e-12);
  Rng rng = derive_rng(13, 0);
  EXPECT_FALSE(ppt_oracle(random_product_mixed({2, 3}, rng)).npt);
  for (double p = 0.0; p <= 1.0; p += 0.05) {
    EXPECT_EQ(ppt_oracle(werner_2qubit(p)).npt, p > 1.0 / 3.0 + 1e-9) << p;
    EXPECT_NEAR(ppt_oracle(werner_2qubit(p)).min_eigenvalue, std::min((1 - 3 * p) / 4, (1 + p) / 4), 1e-12);
  }
  EXPECT_THROW(ppt_oracle(density_from_pure(ghz(3, 2))), ValidationError);
}

TEST(WoottersOracle, Examples) {
  EXPECT_NEAR(wootters_oracle(density_from_pure(bell_phi_plus())), 1.0, 1e-7);
  for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
    EXPECT_NEAR(wootters_oracle(werner_2qubit(p)), std::max(0.0, (3 * p - 1) / 2), 1e-7) << p;
  }
  Rng rng = derive_rng(14, 0);
  EXPECT_NEAR(wootters_oracle(random_separable_mixture({2, 2}, 4, rng)), 0.0, 1e-10);
  EXPECT_THROW(wootters_oracle(isotropic(3, 0.5)), ValidationError);
}

TEST(Negativity, Werner) {
  EXPECT_NEAR(negativity(werner_2qubit(0.5)), 0.125, 1e-12);
  EXPECT_NEAR(negativity(werner_2qubit(0.2)), 0.0, 1e-15);
}

TEST(Tolerances, Threshold) {
  Tolerances t;
  EXPECT_EQ(t.threshold(1.0), 1e-8);
  EXPECT_EQ(t.threshold(1e-6), 1e-12);
}
