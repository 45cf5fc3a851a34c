#ifndef CPID_PROCESS_IO_HPP_
#define CPID_PROCESS_IO_HPP_

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "cpid/decision_process.hpp"
#include "cpid/graph_io.hpp"

namespace cpid {

// Explicit graphs:
//   {"blocks": [["L1"], "A1", ["L2"], "A2", ["R3"]],
//    "states": {"1": ["L1"], "2": ["A1", "L2"]}, "rewards": {"3": ["R3"]}}
// Templates:
//   {"horizon": 3, "states": {"A1": ["A1@1"]}, "rewards": ["R"]}
DecisionProcess process_from_json(std::shared_ptr<const Admg> g, const nlohmann::json& j);
TemplateAnnotation annotation_from_json(const nlohmann::json& j);

struct ProcessOverrides {
    // Template: "A1@1,B1" for every action, or "A2=B1;A1=A1@1,B1".
    // Explicit: "1=L1;2=A1,L2".
    std::optional<std::string> state;
    std::optional<int> horizon;
};

struct LoadedProcess {
    GraphSource source;
    std::optional<TemplateAnnotation> annotation;  // set for templates
    DecisionProcess process;
};

LoadedProcess load_process(const GraphSource& src, const nlohmann::json& j,
                           const ProcessOverrides& ov = {});
LoadedProcess load_process_files(const std::string& graph_path, const std::string& process_path,
                                 const ProcessOverrides& ov = {});

nlohmann::json to_json(const DecisionProcess& p);

}  // namespace cpid

#endif  // CPID_PROCESS_IO_HPP_
