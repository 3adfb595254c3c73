#pragma once

#include <string>

#ifndef STORYCHECK_FIXTURES
#error "STORYCHECK_FIXTURES must name the fixture directory"
#endif

namespace storycheck::testing {

inline std::string fixture(const std::string& name) { return std::string(STORYCHECK_FIXTURES) + "/" + name; }

}  // namespace storycheck::testing
