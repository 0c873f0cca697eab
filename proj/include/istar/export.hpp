#pragma once

#include <string>
#include <variant>
#include <vector>

#include "istar/model.hpp"
#include "istar/validator.hpp"
#include "istar/views.hpp"

namespace istar {

inline constexpr const char* kInterchangeSchemaVersion = "istar-2.0/1";

// Lossless interchange JSON (schema "istar-2.0/1"): sorted keys, entities
// in id order, optional dependency ends serialized as explicit null.
std::string to_interchange(const Model& model);

// Rebuilds a model from interchange JSON through the checked constructors.
// Malformed documents, version mismatches, broken references and
// constraint violations come back as diagnostics instead of a model.
std::variant<Model, std::vector<Diagnostic>> from_interchange(
    const std::string& doc);

// Graphviz dot text for a projected view: one cluster per open actor
// boundary, one node per actor/element/dependum, edges tagged with their
// link style. Deterministic output, frozen by golden tests.
std::string to_graph_text(const ViewModel& view);

// Newline-delimited JSON, one object per diagnostic, sorted by
// (code, primary id).
std::string diagnostics_to_machine(const std::vector<Diagnostic>& diags);

}  // namespace istar
