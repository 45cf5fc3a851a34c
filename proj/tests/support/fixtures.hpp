#ifndef CPID_TEST_FIXTURES_HPP_
#define CPID_TEST_FIXTURES_HPP_

#include <string>

#include "cpid/admg.hpp"
#include "cpid/template.hpp"

namespace cpid::testing {

std::string fixture_path(const std::string& relative);
Admg load_graph(const std::string& name);              // fixtures/graphs/<name>.graph
RolledTemplate load_template(const std::string& name);

}  // namespace cpid::testing

#endif  // CPID_TEST_FIXTURES_HPP_
