#pragma once

#include <string>
#include <vector>

#include "istar/model.hpp"

namespace istar {

enum class Severity { Error, Warning };

const char* to_string(Severity severity);

struct DiagnosticLocation {
    std::uint32_t id = 0;
    std::optional<SourceSpan> span;
};

struct Diagnostic {
    std::string code;  // "E001".."E016", or a parser code
    Severity severity = Severity::Error;
    std::string message;
    DiagnosticLocation primary;
    std::vector<DiagnosticLocation> related;
};

// Stable (code, primary id) ordering used everywhere diagnostics are emitted.
void sort_diagnostics(std::vector<Diagnostic>& diags);

// Diagnostic code for a construction-time error: the matching E-code where
// the integrity-constraint catalog has one, otherwise a P-code.
std::string diagnostic_code_for(ModelErrorCode code);

// Link classes of the element-link compatibility matrix.
enum class LinkClass { Refinement, Contribution, Qualification, NeededBy };

// True iff a link of the given class may start from sourceKind and point at
// targetKind. Exactly 16 of the 64 combinations are permitted.
bool check_link_matrix(ElementKind sourceKind, ElementKind targetKind,
                       LinkClass linkClass);

enum class CycleRelation { IsA, ParticipatesIn, Refinement };

// Every elementary cycle of the directed graph induced by the relation
// (for Refinement: edge child -> parent). Each cycle is rotated to start at
// its smallest id and the list is sorted, so output is deterministic.
std::vector<std::vector<std::uint32_t>> detect_cycles(const Model& model,
                                                      CycleRelation relation);

// Checks the full integrity-constraint catalog (E001..E016), one diagnostic
// per violation instance, sorted by (code, primary id).
std::vector<Diagnostic> validate(const Model& model);

struct CatalogEntry {
    const char* code;
    const char* title;
    const char* summary;
};

// The published diagnostic catalog, in code order.
const std::vector<CatalogEntry>& diagnostic_catalog();

}  // namespace istar
