#pragma once

#include <string>
#include <vector>

#include "istar/model.hpp"
#include "istar/validator.hpp"

namespace istar {

// Result of parsing one `.istar` source. The model is present iff no
// error-severity diagnostic was produced; warnings may accompany success.
struct ParseOutcome {
    std::optional<Model> model;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return model.has_value(); }
};

// Parses DSL text into a Model with a source span recorded for every id.
// Syntactic and reference errors, plus construction-time errors from the
// model layer, are reported as diagnostics with spans; whole-graph
// validation is left to validate().
ParseOutcome parse(const std::string& source, const std::string& fileName);

// Canonical pretty-printer: actor blocks in declaration order, boundary
// statements grouped per actor, top-level links and dependencies last.
// parse(format(m)) reconstructs m up to id renumbering.
std::string format(const Model& model);

}  // namespace istar
