#ifndef CPID_GRAPH_IO_HPP_
#define CPID_GRAPH_IO_HPP_

#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "cpid/admg.hpp"
#include "cpid/template.hpp"

namespace cpid {

// Line format: `vertex NAME`, `latent NAME`, `edge A -> B`, `edge A <-> B`.
Admg parse_graph_text(std::string_view text);
std::string to_text(const Admg& g);

// {"vertices": [...], "latent": [...], "directed": [[a,b],...], "bidirected": [[a,b],...]}
Admg graph_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Admg& g);

// First significant line is `template`; then `vertex B`, `latent U`, `action A`,
// `edge X@lag -> Y`, `edge X@lag <-> Y`.
RolledTemplate parse_template_text(std::string_view text);
std::string to_text(const RolledTemplate& t);

using GraphSource = std::variant<Admg, RolledTemplate>;

// Dispatches on content: JSON object, template text, or plain graph text.
GraphSource parse_graph_source(std::string_view text);
GraphSource load_graph_source(const std::string& path);

}  // namespace cpid

#endif  // CPID_GRAPH_IO_HPP_
