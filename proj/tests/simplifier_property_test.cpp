#include "doctest.h"

#include "properties.hpp"

TEST_CASE("property: simplification preserves every model") {
  auto rep = aet::testing::simplifier_property(1000, 31);
  CHECK(rep.formulas == 1000);
  CHECK_MESSAGE(rep.model_failures == 0, rep.first_failure);
  CHECK_MESSAGE(rep.idempotence_failures == 0, rep.first_failure);
  CHECK(rep.changed > 300);
  CHECK(rep.merged > 20);
}
