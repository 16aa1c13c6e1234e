#include <gtest/gtest.h>

#include "identity_checks.hpp"

// The identity machinery itself lives in identity_checks.hpp so the
// acceptance suite can reuse it; here it runs on three model families,
// including a branched tree that exercises the disjoint-pair zero cases.

using namespace sorbd;

namespace {

void expectAllIdentitiesHold(const Model& model, uint64_t seed) {
  const auto results = sorbd::testing::checkJointIdentities(model, seed);
  ASSERT_EQ(results.size(), 16u);
  for (const auto& r : results) EXPECT_LE(r.maxErr, 1e-11) << r.name;
}

}  // namespace

TEST(JointIdentities, MixedSixLinkChain) {
  expectAllIdentitiesHold(make_serial_chain(6, jointPattern(6, 1), 11), 101);
}

TEST(JointIdentities, FloatingBaseChain) {
  expectAllIdentitiesHold(make_serial_chain(6, jointPattern(6, 2), 12), 102);
}

TEST(JointIdentities, BranchedTreeCoversDisjointPairs) {
  expectAllIdentitiesHold(make_binary_tree(7, jointPattern(7, 1), 13), 103);
}
