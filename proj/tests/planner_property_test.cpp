#include "doctest.h"

#include "properties.hpp"

using namespace aet;
using aet::testing::F;

TEST_CASE("property: accepted orderings agree with nested loops") {
  auto rep = testing::planner_property(200, 41);
  MESSAGE("accepted ", rep.accepted, " rejected ", rep.rejected);
  CHECK_MESSAGE(rep.answer_failures == 0, rep.first_failure);
  CHECK_MESSAGE(rep.duplicate_failures == 0, rep.first_failure);
  CHECK_MESSAGE(rep.idempotence_failures == 0, rep.first_failure);
  CHECK(rep.accepted > 300);
  CHECK(rep.rejected > 0);
  CHECK(rep.nonempty > 40);
}

TEST_CASE("comparison before its generator is reversed exactly") {
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  Formula in = F("exists([X,Y,Z,W], and(X > 100, TRANS(Y,Z,W,X)))");
  CHECK(rearrange(in, fx.theory) == F("exists([X,Y,Z,W], and(TRANS(Y,Z,W,X), X > 100))"));
}
