#include "msvar/error.hpp"
#include "msvar/model.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace msvar;

TEST(ModelSpec, RejectsInconsistentSpecs) {
  auto p = testing_support::separated_model(2, 2, 1.0);
  EXPECT_NO_THROW(p.validate());

  auto spec = p.spec;
  spec.lag_order = 0;
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = p.spec;
  spec.n_regimes = 0;
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = p.spec;
  spec.endogenous = {"a", "a"};
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = p.spec;
  spec.identification_ordering = {"y1"};
  EXPECT_THROW(spec.validate(), ValidationError);
  spec.identification_ordering = {"y2", "zz"};
  EXPECT_THROW(spec.validate(), ValidationError);
  spec.identification_ordering = {"y2", "y1"};
  EXPECT_EQ(spec.ordering_indices(), (std::vector<int>{1, 0}));
}

TEST(Parameters, RejectsBadBlocks) {
  auto p = testing_support::separated_model(2, 2, 1.0);
  auto q = p;
  q.transition.P(0, 0) = 0.5;
  EXPECT_THROW(q.validate(), ValidationError);
  q = p;
  q.regimes[1].covariance(0, 0) = -1.0;
  EXPECT_THROW(q.validate(), NumericalError);
  q = p;
  q.regimes[0].lags.clear();
  EXPECT_THROW(q.validate(), ValidationError);
  q = p;
  q.initial_probs = Vector::Constant(2, 0.7);
  EXPECT_THROW(q.validate(), ValidationError);
  q = p;
  q.regimes.pop_back();
  EXPECT_THROW(q.validate(), ValidationError);
}

TEST(Parameters, PermutationRelabelsEverything) {
  auto p = testing_support::separated_model(2, 3, 2.0);
  p.transition.P << 0.8, 0.15, 0.05, 0.1, 0.7, 0.2, 0.3, 0.3, 0.4;
  p.initial_probs << 0.2, 0.3, 0.5;
  const std::vector<int> order = {2, 0, 1};
  const auto q = p.permuted(order);
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(q.regimes[a].intercept, p.regimes[order[a]].intercept);
    EXPECT_EQ(q.initial_probs(a), p.initial_probs(order[a]));
    for (int b = 0; b < 3; ++b) EXPECT_EQ(q.transition.P(a, b), p.transition.P(order[a], order[b]));
  }
  EXPECT_THROW(p.permuted({0, 0, 1}), ValidationError);
}

TEST(Dataset, EffectiveYearsDropPresample) {
  auto d = testing_support::dataset_from_columns({{1, 2, 3, 4}}, 2);
  EXPECT_EQ(d.effective_years(), (std::vector<int>{3, 4}));
  d.effective_T = 3;
  EXPECT_THROW(d.validate(), ValidationError);
}
