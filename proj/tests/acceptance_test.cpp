#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <iostream>

#include "doctest.h"
#include "sobocert/acceptance.hpp"

TEST_CASE("acceptance suite") {
  auto results = sobocert::run_acceptance(std::cout, 1);
  REQUIRE(results.size() == 10);
  for (const auto& result : results) {
    INFO(result.id, ": ", result.name, " — ", result.detail);
    CHECK(result.pass);
  }
}
