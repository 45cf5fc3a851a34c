#ifndef CPID_TEST_PROCESSES_HPP_
#define CPID_TEST_PROCESSES_HPP_

#include <string>

#include "cpid/process_io.hpp"

namespace cpid::testing {

// fixtures/graphs/<graph>.graph with fixtures/process/<process>.json
DecisionProcess load_fixture_process(const std::string& graph, const std::string& process,
                                     const ProcessOverrides& ov = {});

// fig6a after collapsing each period into the constructs R, S, U, A with
// U latent; the projection adds U_t -> S_{t+1} and U_t -> A_t.
DecisionProcess fig6_projected_process();

}  // namespace cpid::testing

#endif  // CPID_TEST_PROCESSES_HPP_
